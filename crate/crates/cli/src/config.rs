//! Run configuration: a TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use notestd_core::llm::BackendConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Rules,
    Llm,
    Mock,
}

/// Everything a run depends on besides its input files.
///
/// ```toml
/// backend = "rules"
/// parallelism = 4
/// seed = 0
/// bins = 20
/// min_chars = 2000
/// out_dir = "out"
/// resources_dir = "my-lexicons"   # optional
/// medications = "meds.json"       # optional
/// findings = "findings.json"      # optional
/// concept_map = "concepts.json"   # optional
/// transcript = "replies.jsonl"    # mock backend only
///
/// [llm]
/// endpoint_url = "https://api.openai.com/v1/chat/completions"
/// model_id = "gpt-4"
/// max_retries = 3
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub backend: BackendKind,
    pub parallelism: usize,
    pub seed: u64,
    pub bins: usize,
    pub min_chars: usize,
    pub out_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resources_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub medications: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub findings: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concept_map: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<PathBuf>,
    pub llm: BackendConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            backend: BackendKind::Rules,
            parallelism: 4,
            seed: 0,
            bins: 20,
            min_chars: 2000,
            out_dir: PathBuf::from("."),
            resources_dir: None,
            medications: None,
            findings: None,
            concept_map: None,
            transcript: None,
            llm: BackendConfig::default(),
        }
    }
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// TOML run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendKind>,
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Histogram bins
    #[arg(long, global = true)]
    pub bins: Option<usize>,
    /// Minimum note length in characters
    #[arg(long, global = true)]
    pub min_chars: Option<usize>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Directory with replacement lexicon files
    #[arg(long, global = true)]
    pub resources_dir: Option<PathBuf>,
    /// Canned replies for the mock backend (JSONL)
    #[arg(long, global = true)]
    pub transcript: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Read the file named by `--config` (if any), then apply the flags.
    pub fn load(o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match &o.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
                let mut cfg = Self::from_toml(&text)?;
                cfg.resolve_relative(path.parent().unwrap_or(Path::new(".")));
                cfg
            }
            None => Self::default(),
        };
        if let Some(v) = o.backend {
            cfg.backend = v;
        }
        if let Some(v) = o.parallelism {
            cfg.parallelism = v;
        }
        if let Some(v) = o.seed {
            cfg.seed = v;
        }
        if let Some(v) = o.bins {
            cfg.bins = v;
        }
        if let Some(v) = o.min_chars {
            cfg.min_chars = v;
        }
        if let Some(v) = &o.out_dir {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = &o.resources_dir {
            cfg.resources_dir = Some(v.clone());
        }
        if let Some(v) = &o.transcript {
            cfg.transcript = Some(v.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Paths in a config file are relative to the file.
    fn resolve_relative(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.out_dir);
        for p in [
            &mut self.resources_dir,
            &mut self.medications,
            &mut self.findings,
            &mut self.concept_map,
            &mut self.transcript,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.parallelism == 0 {
            return Err(CliError::Config("parallelism must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(CliError::Config("bins must be at least 1".into()));
        }
        let paths = [
            ("resources_dir", &self.resources_dir),
            ("medications", &self.medications),
            ("findings", &self.findings),
            ("concept_map", &self.concept_map),
            ("transcript", &self.transcript),
        ];
        for (name, path) in paths {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(CliError::Config(format!("{name} path {} does not exist", p.display())));
                }
            }
        }
        if self.backend == BackendKind::Llm {
            self.llm.validate().map_err(|e| CliError::Config(format!("llm: {e}")))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
