//! `semdisc` command line.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::annotator::Annotation;
use crate::config::{Config, OutputFormat, PartialConfig};
use crate::error::Error;
use crate::lexicon::Lexicon;
use crate::ranker::{discover, DiscoveryContext, RankedResult};
use crate::registry::{build_index, ingest_registry, ServiceIndex};
use crate::requirements::{RequirementsModel, TaskRequirement};
use crate::taxonomy::{CategoryMatch, CategoryTaxonomy};

#[derive(Debug, Parser)]
#[command(name = "semdisc", version, about = "Rank web services against task requirements")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Index management
    Index {
        #[command(subcommand)]
        action: IndexAction,
    },
    /// Print the semantic vector and category matches of a task
    Annotate(TaskArgs),
    /// Rank indexed services for a task
    Discover(TaskArgs),
}

#[derive(Debug, Subcommand)]
pub enum IndexAction {
    /// Annotate a registry dump and write the index file
    Build,
}

#[derive(Debug, Args)]
pub struct TaskArgs {
    /// Outline of goals and tasks; one block of output per task
    #[arg(long, env = "SEMDISC_REQUIREMENTS", global = true)]
    pub requirements: Option<PathBuf>,

    /// Task text
    pub text: Vec<String>,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// TOML config file
    #[arg(long, env = "SEMDISC_CONFIG", global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, env = "SEMDISC_LEXICON", global = true)]
    pub lexicon: Option<PathBuf>,
    /// Word-count table used instead of the lexicon forms for word probabilities
    #[arg(long, env = "SEMDISC_WORD_COUNTS", global = true)]
    pub word_counts: Option<PathBuf>,
    #[arg(long, env = "SEMDISC_TAXONOMY", global = true)]
    pub taxonomy: Option<PathBuf>,
    #[arg(long, env = "SEMDISC_REGISTRY", global = true)]
    pub registry: Option<PathBuf>,
    #[arg(long, env = "SEMDISC_INDEX", global = true)]
    pub index: Option<PathBuf>,
    /// Category (C-score) weight
    #[arg(long, env = "SEMDISC_W1", global = true)]
    pub w1: Option<f64>,
    /// Semantic (S-score) weight
    #[arg(long, env = "SEMDISC_W2", global = true)]
    pub w2: Option<f64>,
    /// Annotation acceptance threshold in [-1, 1]
    #[arg(long, env = "SEMDISC_THRESHOLD", global = true, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    #[arg(long, env = "SEMDISC_MIN_CSCORE", global = true)]
    pub min_cscore: Option<f64>,
    #[arg(long, env = "SEMDISC_TOP_K_CATEGORIES", global = true)]
    pub top_k_categories: Option<usize>,
    /// Number of ranked services per task
    #[arg(long, env = "SEMDISC_TOP_K", global = true)]
    pub top_k: Option<usize>,
    #[arg(long, env = "SEMDISC_FORMAT", global = true, value_enum)]
    pub format: Option<OutputFormat>,
}

impl CommonArgs {
    fn to_partial(&self) -> PartialConfig {
        PartialConfig {
            lexicon: self.lexicon.clone(),
            word_counts: self.word_counts.clone(),
            taxonomy: self.taxonomy.clone(),
            registry: self.registry.clone(),
            index: self.index.clone(),
            w1: self.w1,
            w2: self.w2,
            threshold: self.threshold,
            min_cscore: self.min_cscore,
            top_k_categories: self.top_k_categories,
            top_k: self.top_k,
            format: self.format,
            ..PartialConfig::default()
        }
    }
}

/// Error carrying the process exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError { code: 1, message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError { code: 1, message: e.to_string() }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn load_err(what: &str, path: &Path, e: Error) -> CliError {
    match e {
        Error::Io { source, .. } if source.kind() == io::ErrorKind::NotFound => {
            CliError::usage(format!("{what} not found: {}", path.display()))
        }
        e => CliError::usage(format!("{what}: {e}")),
    }
}

fn required<'a>(path: &'a Option<PathBuf>, what: &str) -> CliResult<&'a Path> {
    path.as_deref().ok_or_else(|| CliError::usage(format!("no {what} given (use --{what})")))
}

pub fn resolve_config(common: &CommonArgs) -> CliResult<Config> {
    let file = match &common.config {
        Some(p) => PartialConfig::from_file(p).map_err(|e| load_err("config", p, e))?,
        None => PartialConfig::default(),
    };
    Config::resolve(common.to_partial().or(file)).map_err(|e| CliError::usage(e.to_string()))
}

fn load_lexicon(cfg: &Config) -> CliResult<Lexicon> {
    let path = required(&cfg.lexicon, "lexicon")?;
    if let Some(wc) = &cfg.word_counts {
        if !wc.exists() {
            return Err(CliError::usage(format!("word counts not found: {}", wc.display())));
        }
    }
    Lexicon::load_with(path, cfg.word_counts.as_ref(), cfg.normalize.clone()).map_err(|e| load_err("lexicon", path, e))
}

fn load_taxonomy(path: &Path) -> CliResult<CategoryTaxonomy> {
    CategoryTaxonomy::load(path).map_err(|e| load_err("taxonomy", path, e))
}

fn load_tasks(args: &TaskArgs) -> CliResult<Vec<TaskRequirement>> {
    match &args.requirements {
        Some(path) => {
            if !args.text.is_empty() {
                return Err(CliError::usage("give either task text or --requirements, not both"));
            }
            let model = RequirementsModel::load(path).map_err(|e| load_err("requirements", path, e))?;
            Ok(model.tasks().into_iter().cloned().collect())
        }
        None => Ok(vec![TaskRequirement { id: "T1".into(), description: args.text.join(" ") }]),
    }
}

/// Runs a parsed command line, writing results to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult {
    let cfg = resolve_config(&cli.common)?;
    match &cli.command {
        Command::Index { action: IndexAction::Build } => cmd_index_build(&cfg, out),
        Command::Annotate(args) => cmd_annotate(&cfg, args, out),
        Command::Discover(args) => cmd_discover(&cfg, args, out),
    }
}

pub fn cmd_index_build(cfg: &Config, out: &mut dyn Write) -> CliResult {
    let registry = required(&cfg.registry, "registry")?;
    let index_path = required(&cfg.index, "index")?;
    let lexicon = load_lexicon(cfg)?;
    let records = ingest_registry(registry).map_err(|e| load_err("registry", registry, e))?;
    let index = build_index(&records, &lexicon, &cfg.annotator());
    index.save(index_path).map_err(|e| CliError { code: 1, message: e.to_string() })?;
    let empty = index.empty_vector_count();
    writeln!(out, "services\t{}", index.len())?;
    writeln!(out, "annotated\t{}", index.len() - empty)?;
    writeln!(out, "empty_vectors\t{empty}")?;
    writeln!(out, "index\t{}", index_path.display())?;
    Ok(())
}

#[derive(Serialize)]
struct AnnotationRecord<'a> {
    task: &'a str,
    text: &'a str,
    vector: Vec<ConceptRecord<'a>>,
    categories: &'a [CategoryMatch],
}

#[derive(Serialize)]
struct ConceptRecord<'a> {
    concept: &'a str,
    weight: f64,
    lexical_form: &'a str,
    sim: f64,
    tf: u32,
    idf: f64,
}

pub fn cmd_annotate(cfg: &Config, args: &TaskArgs, out: &mut dyn Write) -> CliResult {
    let lexicon = load_lexicon(cfg)?;
    let taxonomy = cfg.taxonomy.as_deref().map(load_taxonomy).transpose()?;
    let annotator = cfg.annotator();
    for task in load_tasks(args)? {
        let annotations: Vec<Annotation> = annotator.annotations(&task.description, &lexicon);
        let categories = taxonomy
            .as_ref()
            .map(|t| t.match_categories(&task.description, cfg.min_cscore, cfg.top_k_categories, &cfg.isub))
            .unwrap_or_default();
        match cfg.format {
            OutputFormat::Table => {
                writeln!(out, "# [{}] {}", task.id, task.description)?;
                let entries: Vec<String> =
                    annotations.iter().map(|a| format!("'{}': {}", a.concept, fmt_weight(a.weight()))).collect();
                writeln!(out, "vector\t{{{}}}", entries.join(", "))?;
                for a in &annotations {
                    writeln!(
                        out,
                        "concept\t{}\t{:.4}\tsim={:.4}\ttf={}\tform={:?}",
                        a.concept,
                        a.weight(),
                        a.sim,
                        a.tf,
                        a.lexical_form
                    )?;
                }
                for m in &categories {
                    writeln!(out, "category\t{}\t{:.4}", m.category, m.c_score)?;
                }
            }
            OutputFormat::Records => {
                let rec = AnnotationRecord {
                    task: &task.id,
                    text: &task.description,
                    vector: annotations
                        .iter()
                        .map(|a| ConceptRecord {
                            concept: &a.concept,
                            weight: a.weight(),
                            lexical_form: &a.lexical_form,
                            sim: a.sim,
                            tf: a.tf,
                            idf: a.idf_value,
                        })
                        .collect(),
                    categories: &categories,
                };
                writeln!(out, "{}", serde_json::to_string(&rec)?)?;
            }
        }
    }
    Ok(())
}

/// Weights print as integers when they are integral to 4 decimals.
fn fmt_weight(w: f64) -> String {
    let s = format!("{w:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

#[derive(Serialize)]
struct ResultRecord<'a> {
    task: &'a str,
    rank: usize,
    #[serde(flatten)]
    result: &'a RankedResult,
}

pub fn cmd_discover(cfg: &Config, args: &TaskArgs, out: &mut dyn Write) -> CliResult {
    let lexicon = load_lexicon(cfg)?;
    let taxonomy = load_taxonomy(required(&cfg.taxonomy, "taxonomy")?)?;
    let index = match (&cfg.index, &cfg.registry) {
        (Some(path), _) => ServiceIndex::load(path).map_err(|e| load_err("index", path, e))?,
        (None, Some(registry)) => {
            let records = ingest_registry(registry).map_err(|e| load_err("registry", registry, e))?;
            build_index(&records, &lexicon, &cfg.annotator())
        }
        (None, None) => return Err(CliError::usage("no index given (use --index or --registry)")),
    };
    if index.fingerprint_mismatch(&lexicon) {
        log::warn!("index was built with a different lexicon; scores may be inconsistent");
        eprintln!("warning: index lexicon fingerprint differs from the supplied lexicon");
    }
    let ctx = DiscoveryContext { index: &index, lexicon: &lexicon, taxonomy: &taxonomy };
    let opts = cfg.discovery_options();
    for task in load_tasks(args)? {
        let found = discover(&task.description, ctx, &opts);
        match cfg.format {
            OutputFormat::Table => {
                writeln!(out, "# [{}] {}", task.id, task.description)?;
                writeln!(out, "service\tshared_annotations\tc_score\ts_score\tscore")?;
                for r in &found.results {
                    writeln!(
                        out,
                        "{}\t{}\t{:.4}\t{:.4}\t{:.4}",
                        r.service,
                        r.shared_annotations.join(", "),
                        r.c_score,
                        r.s_score,
                        r.score
                    )?;
                }
            }
            OutputFormat::Records => {
                for (i, r) in found.results.iter().enumerate() {
                    let rec = ResultRecord { task: &task.id, rank: i + 1, result: r };
                    writeln!(out, "{}", serde_json::to_string(&rec)?)?;
                }
            }
        }
    }
    Ok(())
}
