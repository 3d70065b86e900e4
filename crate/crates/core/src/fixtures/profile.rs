use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::FixtureError;

/// Target mean and standard deviation of a per-note count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountTarget {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthTarget {
    pub mean: f64,
    pub sd: f64,
    pub min: usize,
}

/// Distribution of planted errors and note length across a generated corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureProfile {
    pub grammar: CountTarget,
    pub spelling: CountTarget,
    pub terms: CountTarget,
    pub abbreviations: CountTarget,
    pub length: LengthTarget,
    /// Mean number of unfixable nonsense words per note. They never enter the ledger.
    #[serde(default)]
    pub noise: f64,
}

impl FixtureProfile {
    /// Per-note means and SDs reported for the clinical corpus.
    pub fn clinic() -> Self {
        Self {
            grammar: CountTarget { mean: 4.9, sd: 1.8 },
            spelling: CountTarget { mean: 3.3, sd: 5.2 },
            terms: CountTarget { mean: 3.1, sd: 3.0 },
            abbreviations: CountTarget { mean: 15.8, sd: 9.1 },
            length: LengthTarget { mean: 6420.0, sd: 3689.0, min: 2000 },
            noise: 0.0,
        }
    }

    /// No planted errors.
    pub fn clean() -> Self {
        let zero = CountTarget { mean: 0.0, sd: 0.0 };
        Self { grammar: zero, spelling: zero, terms: zero, abbreviations: zero, ..Self::clinic() }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "clinic" | "default" => Some(Self::clinic()),
            "clean" => Some(Self::clean()),
            _ => None,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), FixtureError> {
        let counts = [self.grammar, self.spelling, self.terms, self.abbreviations];
        let ok = counts.iter().all(|c| c.mean >= 0.0 && c.sd >= 0.0 && c.mean.is_finite() && c.sd.is_finite())
            && self.length.mean > 0.0
            && self.length.sd >= 0.0
            && self.noise >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(FixtureError::Profile("means and SDs must be finite and non-negative".into()))
        }
    }
}

/// Mean and SD of `max(0, round(X))` for `X ~ N(mu, sigma)`.
pub fn clamped_rounded_moments(mu: f64, sigma: f64) -> (f64, f64) {
    if sigma <= 0.0 {
        let v = mu.round().max(0.0);
        return (v, 0.0);
    }
    let n = Normal::new(mu, sigma).expect("positive sigma");
    let top = (mu + 12.0 * sigma).ceil().max(1.0) as u64 + 1;
    let (mut m1, mut m2) = (0.0, 0.0);
    let mut below = n.cdf(0.5);
    for k in 1..=top {
        let upper = n.cdf(k as f64 + 0.5);
        let p = upper - below;
        below = upper;
        m1 += k as f64 * p;
        m2 += (k * k) as f64 * p;
    }
    (m1, (m2 - m1 * m1).max(0.0).sqrt())
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Latent normal parameters whose clamped, rounded draws have the target mean and SD.
pub fn solve_latent(target: CountTarget) -> (f64, f64) {
    if target.sd == 0.0 || target.mean == 0.0 {
        return (target.mean, 0.0);
    }
    let mu_for = |sigma: f64| {
        bisect(-20.0 * sigma - 50.0, target.mean + 10.0, |mu| clamped_rounded_moments(mu, sigma).0 - target.mean)
    };
    let sigma = bisect(1e-3, 20.0 * target.sd + 10.0, |sigma| {
        clamped_rounded_moments(mu_for(sigma), sigma).1 - target.sd
    });
    (mu_for(sigma), sigma)
}

/// Per-note draws for one metric.
///
/// The unit interval is split into `n` strata, each note receives one stratum
/// in random order, and the draw is the normal quantile at a uniform point
/// within it.
pub(crate) fn stratified_normals(n: usize, mu: f64, sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if sigma == 0.0 {
        return vec![mu; n];
    }
    let normal = Normal::new(mu, sigma).expect("positive sigma");
    let mut strata: Vec<usize> = (0..n).collect();
    strata.shuffle(rng);
    strata
        .into_iter()
        .map(|s| {
            let u = (s as f64 + rng.random_range(0.0..1.0)) / n as f64;
            normal.inverse_cdf(u.clamp(1e-12, 1.0 - 1e-12))
        })
        .collect()
}

/// Drawn targets for one note.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct NotePlan {
    pub grammar: usize,
    pub spelling: usize,
    pub terms: usize,
    pub abbreviations: usize,
    pub length: usize,
    pub min_length: usize,
    pub noise: usize,
}

pub(crate) fn plan_corpus(n: usize, seed: u64, profile: &FixtureProfile) -> Vec<NotePlan> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let mut counts = |t: CountTarget| {
        let (mu, sigma) = solve_latent(t);
        stratified_normals(n, mu, sigma, &mut rng)
            .into_iter()
            .map(|x| x.round().max(0.0) as usize)
            .collect::<Vec<_>>()
    };
    let grammar = counts(profile.grammar);
    let spelling = counts(profile.spelling);
    let terms = counts(profile.terms);
    let abbreviations = counts(profile.abbreviations);
    let length = {
        let (mean, sd) = (profile.length.mean, profile.length.sd);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(u64::MAX - 1);
        stratified_normals(n, mean, sd, &mut r)
    };
    let noise = counts(CountTarget { mean: profile.noise, sd: profile.noise.sqrt() });
    (0..n)
        .map(|i| NotePlan {
            grammar: grammar[i],
            spelling: spelling[i],
            terms: terms[i],
            abbreviations: abbreviations[i],
            length: (length[i].round().max(0.0) as usize).max(profile.length.min),
            min_length: profile.length.min,
            noise: noise[i],
        })
        .collect()
}
