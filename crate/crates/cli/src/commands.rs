//! One function per subcommand. Each reads its inputs, writes its outputs
//! atomically into the output directory and records the stage in the manifest.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Subcommand, ValueEnum};
use notestd_core::corpus::{filter_rows, parse_corpus_rows, read_jsonl, read_notes_jsonl, write_jsonl, write_notes_jsonl};
use notestd_core::evaluation::{
    aggregate_ratings, completeness_check_with, rate_quality, sample_for_review, ContentDiff, QualityRatings,
    RatingMode, RatingThresholds, ReviewRecord, RATING_NAMES,
};
use notestd_core::extraction::{
    extract_findings, extract_medications, frequency_table, CountMode, Gazetteer, LlmExtractor, Mention, MentionKind,
};
use notestd_core::fixtures::{FixtureGenerator, FixtureProfile, TemplateBank};
use notestd_core::interop::{bundle, map_to_ontology, to_resource, write_unmapped_csv, CodeSystem, ConceptMap};
use notestd_core::llm::{estimate_cost, ConfigError, LlmBackend, MockBackend, TextCompletion};
use notestd_core::pipeline::{
    aggregate, compute_note_stats, histogram_svg, render_report, standardize_corpus, write_stats_csv, ReportFormat,
    RuleBackend, StandardizationBackend, StandardizedRecord,
};
use notestd_core::resources;
use notestd_core::rules::StandardizationResources;
use notestd_core::{FilterCriteria, SourceNote};
use rayon::prelude::*;
use serde::Serialize;

use crate::artifacts::Stage;
use crate::config::{BackendKind, RunConfig};
use crate::{CliError, Status};

type Result<T> = std::result::Result<T, CliError>;

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::input(path, e))
}

fn read_notes(path: &Path) -> Result<Vec<SourceNote>> {
    read_notes_jsonl(open(path)?).map_err(|e| CliError::input(path, e))
}

fn read_records<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    read_jsonl(open(path)?).map_err(|e| CliError::input(path, e))
}

fn jsonl<T: Serialize>(items: &[T]) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_jsonl(items, &mut buf)?;
    Ok(buf)
}

fn pretty<T: Serialize>(value: &T) -> anyhow::Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(value)?;
    buf.push(b'\n');
    Ok(buf)
}

fn load_resources(cfg: &RunConfig) -> Result<Cow<'static, StandardizationResources>> {
    match &cfg.resources_dir {
        Some(dir) => resources::load_dir(dir)
            .map(Cow::Owned)
            .map_err(|e| CliError::Config(format!("resources in {}: {e}", dir.display()))),
        None => Ok(Cow::Borrowed(resources::builtin())),
    }
}

fn load_gazetteer(path: Option<&PathBuf>, builtin: &'static Gazetteer) -> Result<Cow<'static, Gazetteer>> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::input(p, e))?;
            Gazetteer::from_json(&text)
                .map(Cow::Owned)
                .map_err(|e| CliError::Config(format!("gazetteer {}: {e}", p.display())))
        }
        None => Ok(Cow::Borrowed(builtin)),
    }
}

fn load_concept_map(cfg: &RunConfig) -> Result<Cow<'static, ConceptMap>> {
    match &cfg.concept_map {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::input(p, e))?;
            ConceptMap::from_json(&text)
                .map(Cow::Owned)
                .map_err(|e| CliError::Config(format!("concept map {}: {e}", p.display())))
        }
        None => Ok(Cow::Borrowed(resources::concept_map())),
    }
}

/// Model backend with the key from the environment.
fn llm_backend(cfg: &RunConfig) -> Result<LlmBackend> {
    LlmBackend::from_env(cfg.llm.clone())
        .map(|b| b.with_jitter_seed(cfg.seed))
        .map_err(|e| match e {
            ConfigError::MissingApiKey(var) => {
                CliError::Config(format!("the llm backend needs an API key: set the environment variable {var}"))
            }
            other => CliError::Config(format!("llm: {other}")),
        })
}

fn pool(cfg: &RunConfig) -> anyhow::Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(cfg.parallelism).build()?)
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// CSV export with one note per row
    pub csv: PathBuf,
    #[arg(long, default_value = "note_text")]
    pub text_column: String,
    /// Column holding accession numbers; rows are numbered from 1 when absent
    #[arg(long)]
    pub id_column: Option<String>,
    /// Keep rows whose COLUMN holds one of the listed values, e.g. `setting=outpatient`
    #[arg(long = "filter", value_name = "COLUMN=V1,V2")]
    pub filters: Vec<String>,
}

fn parse_filters(raw: &[String]) -> Result<BTreeMap<String, BTreeSet<String>>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for f in raw {
        let (col, values) = f
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("filter `{f}` is not COLUMN=VALUES")))?;
        let set = out.entry(col.trim().to_string()).or_default();
        set.extend(values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()));
    }
    Ok(out)
}

pub fn ingest(cfg: &RunConfig, args: &IngestArgs) -> Result<Status> {
    let rows = parse_corpus_rows(open(&args.csv)?, &args.text_column, args.id_column.as_deref())
        .map_err(|e| CliError::input(&args.csv, e))?;
    let criteria = FilterCriteria { min_chars: cfg.min_chars, column_filters: parse_filters(&args.filters)? };
    let (kept, dropped) = filter_rows(&rows, &criteria);
    if kept.is_empty() {
        tracing::warn!("no notes passed the filters");
    }

    let mut stage = Stage::new("ingest", &cfg.out_dir, cfg.hash());
    stage.input(&args.csv)?;
    let mut buf = Vec::new();
    write_notes_jsonl(&kept, &mut buf).context("serializing notes")?;
    stage.output("notes.jsonl", &buf)?;
    stage.output("dropped.jsonl", &jsonl(&dropped)?)?;
    stage.count("rows", rows.len());
    stage.count("kept", kept.len());
    stage.count("dropped", dropped.len());
    stage.finish()?;
    eprintln!("ingest: {} of {} notes kept", kept.len(), rows.len());
    Ok(Status::Ok)
}

#[derive(Debug, Args)]
pub struct StandardizeArgs {
    /// notes.jsonl from `ingest` or `fixtures generate`
    pub notes: PathBuf,
}

pub fn standardize(cfg: &RunConfig, args: &StandardizeArgs) -> Result<Status> {
    let resources = load_resources(cfg)?;
    let llm = match cfg.backend {
        BackendKind::Llm => Some(llm_backend(cfg)?),
        _ => None,
    };
    let notes = read_notes(&args.notes)?;
    let mock;
    let rules = RuleBackend { resources: &resources };
    let backend: &dyn StandardizationBackend = match cfg.backend {
        BackendKind::Rules => &rules,
        BackendKind::Llm => llm.as_ref().expect("built above"),
        BackendKind::Mock => {
            let m = match &cfg.transcript {
                Some(p) => MockBackend::from_jsonl(open(p)?).map_err(|e| CliError::input(p, e))?,
                None => MockBackend::default(),
            };
            mock = m.with_resources(Arc::new(resources.clone().into_owned()));
            &mock
        }
    };
    tracing::info!(backend = backend.name(), notes = notes.len(), parallelism = cfg.parallelism, "standardizing");
    let batch = standardize_corpus(&notes, backend, cfg.parallelism).context("standardize")?;

    let mut stage = Stage::new("standardize", &cfg.out_dir, cfg.hash());
    stage.input(&args.notes)?;
    stage.output("standardized.jsonl", &jsonl(&batch.records())?)?;
    stage.output("failures.jsonl", &jsonl(&batch.failures)?)?;
    stage.count("notes", notes.len());
    stage.count("standardized", batch.results.len());
    stage.count("failed", batch.failures.len());
    if let Some(b) = &llm {
        let usage = b.usage();
        stage.count("requests", usage.requests as usize);
        stage.count("input_tokens", usage.input_tokens as usize);
        stage.count("output_tokens", usage.output_tokens as usize);
    }
    stage.finish()?;
    eprintln!("standardize: {} ok, {} failed", batch.results.len(), batch.failures.len());
    Ok(match batch.failures.len() {
        0 => Status::Ok,
        failed => Status::Partial { failed },
    })
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub standardized: PathBuf,
    /// Source notes, for the source length column
    #[arg(long)]
    pub notes: Option<PathBuf>,
    /// Report printed to stdout
    #[arg(long, value_enum, default_value = "text")]
    pub format: FormatArg,
}

pub fn metrics(cfg: &RunConfig, args: &MetricsArgs) -> Result<Status> {
    let records: Vec<StandardizedRecord> = read_records(&args.standardized)?;
    let sources: HashMap<String, SourceNote> = match &args.notes {
        Some(p) => read_notes(p)?.into_iter().map(|n| (n.accession_num.clone(), n)).collect(),
        None => HashMap::new(),
    };
    let mut stats = Vec::with_capacity(records.len());
    for r in &records {
        let source = match (&args.notes, sources.get(&r.accession_num)) {
            (None, _) => Cow::Owned(SourceNote::new(r.accession_num.clone(), "")),
            (Some(_), Some(s)) => Cow::Borrowed(s),
            (Some(p), None) => return Err(CliError::input(p, format!("no source note for accession {}", r.accession_num))),
        };
        stats.push(compute_note_stats(&source, &r.note));
    }
    let summary = aggregate(&stats, cfg.bins).map_err(|e| CliError::input(&args.standardized, e))?;

    let mut stage = Stage::new("metrics", &cfg.out_dir, cfg.hash());
    stage.input(&args.standardized)?;
    if let Some(p) = &args.notes {
        stage.input(p)?;
    }
    let mut csv = Vec::new();
    write_stats_csv(&stats, &mut csv).context("stats.csv")?;
    stage.output("stats.csv", &csv)?;
    stage.output("summary.json", &render_report(&summary, ReportFormat::Json))?;
    for (name, m) in summary.metrics() {
        stage.output(&format!("hist_{name}.svg"), histogram_svg(name, m).as_bytes())?;
    }
    stage.count("notes", stats.len());
    stage.finish()?;

    let format = match args.format {
        FormatArg::Text => ReportFormat::Text,
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Csv => ReportFormat::Csv,
    };
    print!("{}", String::from_utf8_lossy(&render_report(&summary, format)));
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtractMode {
    Gazetteer,
    Llm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CountArg {
    PerNote,
    Raw,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    pub standardized: PathBuf,
    #[arg(long, value_enum, default_value = "gazetteer")]
    pub mode: ExtractMode,
    /// Count notes mentioning a term, or every mention
    #[arg(long, value_enum, default_value = "per-note")]
    pub count_mode: CountArg,
    /// Medication gazetteer (JSON)
    #[arg(long)]
    pub medications: Option<PathBuf>,
    /// Sign and symptom gazetteer (JSON)
    #[arg(long)]
    pub findings: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct ExtractionFailure {
    accession_num: String,
    kind: MentionKind,
    error: String,
}

pub fn extract(cfg: &RunConfig, args: &ExtractArgs) -> Result<Status> {
    let meds = load_gazetteer(args.medications.as_ref().or(cfg.medications.as_ref()), resources::medications())?;
    let finds = load_gazetteer(args.findings.as_ref().or(cfg.findings.as_ref()), resources::findings())?;
    let model = match args.mode {
        ExtractMode::Llm => Some(llm_backend(cfg)?),
        ExtractMode::Gazetteer => None,
    };
    let records: Vec<StandardizedRecord> = read_records(&args.standardized)?;

    let per_note: Vec<(Vec<Mention>, Vec<ExtractionFailure>)> = pool(cfg)?.install(|| {
        records
            .par_iter()
            .map(|r| match &model {
                None => {
                    let mut m = extract_medications(&r.accession_num, &r.note, &meds);
                    m.extend(extract_findings(&r.accession_num, &r.note, &finds));
                    (m, Vec::new())
                }
                Some(model) => {
                    let mut mentions = Vec::new();
                    let mut failures = Vec::new();
                    for (kind, gaz) in [(MentionKind::Medication, &*meds), (MentionKind::Finding, &*finds)] {
                        let ex = LlmExtractor { model: model as &dyn TextCompletion, gazetteer: gaz };
                        match ex.extract(&r.accession_num, &r.note, kind) {
                            Ok(m) => mentions.extend(m),
                            Err(e) => failures.push(ExtractionFailure {
                                accession_num: r.accession_num.clone(),
                                kind,
                                error: e.to_string(),
                            }),
                        }
                    }
                    (mentions, failures)
                }
            })
            .collect()
    });
    let (mentions, failures): (Vec<Mention>, Vec<ExtractionFailure>) = per_note
        .into_iter()
        .fold((Vec::new(), Vec::new()), |(mut ms, mut fs), (m, f)| {
            ms.extend(m);
            fs.extend(f);
            (ms, fs)
        });

    let mode = match args.count_mode {
        CountArg::PerNote => CountMode::PerNote,
        CountArg::Raw => CountMode::Raw,
    };
    let mut stage = Stage::new("extract", &cfg.out_dir, cfg.hash());
    stage.input(&args.standardized)?;
    for (kind, name) in [(MentionKind::Medication, "medications.csv"), (MentionKind::Finding, "findings.csv")] {
        let mut buf = Vec::new();
        frequency_table(&mentions, kind, mode).write_csv(&mut buf).context(name)?;
        stage.output(name, &buf)?;
    }
    stage.output("mentions.jsonl", &jsonl(&mentions)?)?;
    if model.is_some() {
        stage.output("extraction_failures.jsonl", &jsonl(&failures)?)?;
    }
    stage.count("notes", records.len());
    stage.count("medication_mentions", mentions.iter().filter(|m| m.kind == MentionKind::Medication).count());
    stage.count("finding_mentions", mentions.iter().filter(|m| m.kind == MentionKind::Finding).count());
    stage.count("failed", failures.len());
    stage.finish()?;
    eprintln!("extract: {} mentions from {} notes", mentions.len(), records.len());
    Ok(match failures.len() {
        0 => Status::Ok,
        failed => Status::Partial { failed },
    })
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// mentions.jsonl from `extract`
    pub mentions: PathBuf,
    /// Preferred code system (SNOMED-CT, RxNorm, LOINC, ICD); by default RxNorm
    /// for medications and SNOMED-CT for findings
    #[arg(long)]
    pub system: Option<String>,
}

pub fn export_fhir(cfg: &RunConfig, args: &ExportArgs) -> Result<Status> {
    let preferred = args
        .system
        .as_deref()
        .map(|s| CodeSystem::parse(s).ok_or_else(|| CliError::Config(format!("unknown code system `{s}`"))))
        .transpose()?;
    let table = load_concept_map(cfg)?;
    let mentions: Vec<Mention> = read_records(&args.mentions)?;
    let mapped: Vec<_> = mentions
        .into_iter()
        .map(|m| {
            let system = preferred.unwrap_or(match m.kind {
                MentionKind::Medication => CodeSystem::RxNorm,
                MentionKind::Finding => CodeSystem::SnomedCt,
            });
            let mapping = map_to_ontology(&m, &table, system);
            (m, mapping)
        })
        .collect();
    let resources: Vec<_> = mapped.iter().map(|(m, map)| to_resource(m, map)).collect();
    let unmapped = resources.iter().filter(|r| r.coding.is_none()).count();

    let mut stage = Stage::new("export-fhir", &cfg.out_dir, cfg.hash());
    stage.input(&args.mentions)?;
    stage.output("bundle.json", &bundle(&resources))?;
    let mut csv = Vec::new();
    write_unmapped_csv(&mapped, &mut csv).context("unmapped_terms.csv")?;
    stage.output("unmapped_terms.csv", &csv)?;
    stage.count("mentions", mapped.len());
    stage.count("entries", resources.len());
    stage.count("unmapped", unmapped);
    stage.finish()?;
    eprintln!("export-fhir: {} entries, {} unmapped", resources.len(), unmapped);
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RatingArg {
    Heuristic,
    LlmJudge,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub notes: PathBuf,
    pub standardized: PathBuf,
    #[arg(long, value_enum, default_value = "heuristic")]
    pub mode: RatingArg,
    /// Notes drawn for rating and review; 0 rates every note
    #[arg(long, default_value_t = notestd_core::evaluation::DEFAULT_REVIEW_SIZE)]
    pub sample: usize,
    /// Rating thresholds (JSON)
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct DiffLine<'a> {
    accession_num: &'a str,
    missing_ratio: f64,
    #[serde(flatten)]
    diff: &'a ContentDiff,
}

#[derive(Debug, Serialize)]
struct JudgeFailure {
    accession_num: String,
    error: String,
}

pub fn evaluate(cfg: &RunConfig, args: &EvaluateArgs) -> Result<Status> {
    let resources = load_resources(cfg)?;
    let thresholds = match &args.thresholds {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::input(p, e))?;
            RatingThresholds::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => RatingThresholds::default(),
    };
    let mode = match args.mode {
        RatingArg::Heuristic => RatingMode::Heuristic,
        RatingArg::LlmJudge => RatingMode::LlmJudge,
    };
    let judge = match mode {
        RatingMode::LlmJudge => Some(llm_backend(cfg)?),
        RatingMode::Heuristic => None,
    };

    let mut sources: HashMap<String, SourceNote> =
        read_notes(&args.notes)?.into_iter().map(|n| (n.accession_num.clone(), n)).collect();
    let records: Vec<StandardizedRecord> = read_records(&args.standardized)?;
    let mut pairs = Vec::with_capacity(records.len());
    for r in records {
        let source = sources
            .remove(&r.accession_num)
            .ok_or_else(|| CliError::input(&args.notes, format!("no source note for accession {}", r.accession_num)))?;
        pairs.push((source, r.note));
    }
    if pairs.is_empty() {
        return Err(CliError::input(&args.standardized, "no standardized notes"));
    }

    let diffs: Vec<ContentDiff> = pool(cfg)?.install(|| {
        pairs
            .par_iter()
            .map(|(s, n)| completeness_check_with(s, n, &resources.headings))
            .collect()
    });
    let diff_lines: Vec<DiffLine> = pairs
        .iter()
        .zip(&diffs)
        .map(|((s, _), d)| DiffLine { accession_num: &s.accession_num, missing_ratio: d.missing_ratio(), diff: d })
        .collect();

    let n = if args.sample == 0 { pairs.len() } else { args.sample.min(pairs.len()) };
    if args.sample > pairs.len() {
        tracing::warn!(requested = args.sample, available = pairs.len(), "review sample capped at corpus size");
    }
    let indices: Vec<usize> = (0..pairs.len()).collect();
    let chosen = sample_for_review(&indices, n, cfg.seed).context("sampling")?;

    let judged: Vec<_> = pool(cfg)?.install(|| {
        chosen
            .par_iter()
            .map(|&i| {
                let (s, note) = &pairs[i];
                let j = judge.as_ref().map(|b| b as &dyn TextCompletion);
                (i, rate_quality(s, note, mode, &resources, &thresholds, j))
            })
            .collect()
    });
    let mut ratings: Vec<(usize, QualityRatings)> = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in judged {
        match r {
            Ok(q) => ratings.push((i, q)),
            Err(e) => failures.push(JudgeFailure { accession_num: pairs[i].0.accession_num.clone(), error: e.to_string() }),
        }
    }

    let review: Vec<ReviewRecord> = chosen
        .iter()
        .map(|&i| ReviewRecord {
            accession_num: pairs[i].0.accession_num.clone(),
            source: pairs[i].0.note_text.clone(),
            standardized: pairs[i].1.clone(),
        })
        .collect();
    let mut csv = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["accession_num"];
    header.extend(RATING_NAMES);
    csv.write_record(&header).context("ratings.csv")?;
    for (i, q) in &ratings {
        let mut row = vec![pairs[*i].0.accession_num.clone()];
        row.extend(q.values().iter().map(|v| v.to_string()));
        csv.write_record(&row).context("ratings.csv")?;
    }
    let csv = csv.into_inner().map_err(|e| anyhow::anyhow!("ratings.csv: {e}"))?;

    let mut stage = Stage::new("evaluate", &cfg.out_dir, cfg.hash());
    stage.input(&args.notes)?;
    stage.input(&args.standardized)?;
    stage.output("content_diffs.jsonl", &jsonl(&diff_lines)?)?;
    stage.output("review_sample.jsonl", &jsonl(&review)?)?;
    stage.output("ratings.csv", &csv)?;
    let values: Vec<QualityRatings> = ratings.iter().map(|(_, q)| *q).collect();
    let table = aggregate_ratings(&values).ok();
    if let Some(t) = &table {
        stage.output("ratings_summary.json", &pretty(t)?)?;
    }
    if judge.is_some() {
        stage.output("judge_failures.jsonl", &jsonl(&failures)?)?;
    }
    stage.count("pairs", pairs.len());
    stage.count("notes_with_missing_tokens", diffs.iter().filter(|d| !d.missing_tokens.is_empty()).count());
    stage.count("rated", ratings.len());
    stage.count("failed", failures.len());
    stage.finish()?;

    let missing = diffs.iter().filter(|d| !d.missing_tokens.is_empty()).count();
    println!("content check: {missing} of {} notes with missing tokens", pairs.len());
    if let Some(t) = table {
        print!("{}", t.to_text());
    }
    Ok(match failures.len() {
        0 => Status::Ok,
        failed => Status::Partial { failed },
    })
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    pub notes: PathBuf,
}

pub fn estimate(cfg: &RunConfig, args: &EstimateArgs) -> Result<Status> {
    cfg.llm.validate().map_err(|e| CliError::Config(format!("llm: {e}")))?;
    let notes = read_notes(&args.notes)?;
    let est = estimate_cost(&notes, &cfg.llm, cfg.parallelism);

    let mut stage = Stage::new("estimate", &cfg.out_dir, cfg.hash());
    stage.input(&args.notes)?;
    stage.output("estimate.json", &pretty(&est)?)?;
    stage.count("notes", notes.len());
    stage.finish()?;

    let per_note = if est.notes == 0 { 0.0 } else { est.total_cost / est.notes as f64 };
    println!("notes: {}", est.notes);
    println!("model: {}", cfg.llm.model_id);
    println!("total cost: ${:.2} (${:.4} per note)", est.total_cost, per_note);
    println!("serial time: {:.1} h", est.serial_time / 3600.0);
    println!("time at parallelism {}: {:.1} h", est.parallelism, est.parallel_time / 3600.0);
    Ok(Status::Ok)
}

#[derive(Debug, Subcommand)]
pub enum FixturesCommand {
    /// Write notes.jsonl and ledger.jsonl
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// `clinic`, `clean`, or a JSON profile file
    #[arg(long, default_value = "clinic")]
    pub profile: String,
}

fn load_profile(name: &str) -> Result<FixtureProfile> {
    if let Some(p) = FixtureProfile::by_name(name) {
        return Ok(p);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(CliError::Config(format!("unknown profile `{name}` (expected clinic, clean or a JSON file)")));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("profile {name}: {e}")))
}

pub fn fixtures_generate(cfg: &RunConfig, args: &GenerateArgs) -> Result<Status> {
    let profile = load_profile(&args.profile)?;
    let resources = load_resources(cfg)?;
    let meds = load_gazetteer(cfg.medications.as_ref(), resources::medications())?;
    let finds = load_gazetteer(cfg.findings.as_ref(), resources::findings())?;
    let bank = TemplateBank::from_json(resources::TEMPLATES_JSON, &resources, &meds, &finds)
        .map_err(|e| CliError::Config(format!("templates: {e}")))?;
    let generator = FixtureGenerator::new(&resources, &bank, &meds, &finds);
    let (notes, ledgers) = pool(cfg)?
        .install(|| generator.generate(args.n, cfg.seed, &profile))
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut stage = Stage::new("fixtures", &cfg.out_dir, cfg.hash());
    let mut buf = Vec::new();
    write_notes_jsonl(&notes, &mut buf).context("serializing notes")?;
    stage.output("notes.jsonl", &buf)?;
    stage.output("ledger.jsonl", &jsonl(&ledgers)?)?;
    stage.count("notes", notes.len());
    stage.count("planted", ledgers.iter().map(|l| l.planted.len()).sum());
    stage.finish()?;
    eprintln!("fixtures: {} notes written", notes.len());
    Ok(Status::Ok)
}
