//! Run configuration.
//!
//! Values come from, in decreasing priority: command-line flags,
//! `SEMDISC_*` environment variables, a TOML config file, built-in defaults.
//! Relative paths in a config file are resolved against the file's
//! directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::annotator::{Annotator, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};
use crate::lexicon::NormalizeOptions;
use crate::ranker::{DiscoveryOptions, Weights, DEFAULT_TOP_K_SERVICES};
use crate::strsim::IsubParams;
use crate::taxonomy::{DEFAULT_MIN_CSCORE, DEFAULT_TOP_K};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Records,
}

/// Every field optional; used both for the config file and for the
/// flag/env layer.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub lexicon: Option<PathBuf>,
    pub word_counts: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub w1: Option<f64>,
    pub w2: Option<f64>,
    pub threshold: Option<f64>,
    pub min_cscore: Option<f64>,
    pub top_k_categories: Option<usize>,
    pub top_k: Option<usize>,
    pub format: Option<OutputFormat>,
    pub stem: Option<bool>,
    pub stopwords: Option<bool>,
    pub isub: Option<IsubParams>,
}

impl PartialConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: PartialConfig =
            toml::from_str(&text).map_err(|e| Error::Parse { line: 0, message: format!("{}: {e}", path.display()) })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for p in [&mut cfg.lexicon, &mut cfg.word_counts, &mut cfg.taxonomy, &mut cfg.registry, &mut cfg.index]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fills every unset field of `self` from `lower`. The two weights
    /// travel as a pair: if `self` sets either one, `lower`'s are ignored.
    pub fn or(self, lower: PartialConfig) -> PartialConfig {
        let (w1, w2) = if self.w1.is_some() || self.w2.is_some() { (self.w1, self.w2) } else { (lower.w1, lower.w2) };
        PartialConfig {
            lexicon: self.lexicon.or(lower.lexicon),
            word_counts: self.word_counts.or(lower.word_counts),
            taxonomy: self.taxonomy.or(lower.taxonomy),
            registry: self.registry.or(lower.registry),
            index: self.index.or(lower.index),
            w1,
            w2,
            threshold: self.threshold.or(lower.threshold),
            min_cscore: self.min_cscore.or(lower.min_cscore),
            top_k_categories: self.top_k_categories.or(lower.top_k_categories),
            top_k: self.top_k.or(lower.top_k),
            format: self.format.or(lower.format),
            stem: self.stem.or(lower.stem),
            stopwords: self.stopwords.or(lower.stopwords),
            isub: self.isub.or(lower.isub),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub lexicon: Option<PathBuf>,
    pub word_counts: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub weights: Weights,
    pub threshold: f64,
    pub min_cscore: f64,
    pub top_k_categories: usize,
    pub top_k: usize,
    pub format: OutputFormat,
    pub normalize: NormalizeOptions,
    pub isub: IsubParams,
}

impl Default for Config {
    fn default() -> Self {
        Config::resolve(PartialConfig::default()).expect("defaults are valid")
    }
}

impl Config {
    /// Applies defaults and validates ranges.
    pub fn resolve(p: PartialConfig) -> Result<Self> {
        // Setting only one weight implies the other.
        let (w1, w2) = match (p.w1, p.w2) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, 1.0 - a),
            (None, Some(b)) => (1.0 - b, b),
            (None, None) => {
                let w = Weights::default();
                (w.w1(), w.w2())
            }
        };
        let weights = Weights::new(w1, w2)?;
        let threshold = p.threshold.unwrap_or(DEFAULT_THRESHOLD);
        Annotator::new(threshold)?;
        let min_cscore = p.min_cscore.unwrap_or(DEFAULT_MIN_CSCORE);
        if !(0.0..=1.0).contains(&min_cscore) {
            return Err(Error::OutOfRange { name: "min-cscore", value: min_cscore });
        }
        let top_k = p.top_k.unwrap_or(DEFAULT_TOP_K_SERVICES);
        let top_k_categories = p.top_k_categories.unwrap_or(DEFAULT_TOP_K);
        if top_k == 0 {
            return Err(Error::OutOfRange { name: "top-k", value: 0.0 });
        }
        if top_k_categories == 0 {
            return Err(Error::OutOfRange { name: "top-k-categories", value: 0.0 });
        }
        let isub = p.isub.unwrap_or_default();
        if !(0.0..=1.0).contains(&isub.hamacher_p) {
            return Err(Error::OutOfRange { name: "isub.hamacher_p", value: isub.hamacher_p });
        }
        Ok(Config {
            lexicon: p.lexicon,
            word_counts: p.word_counts,
            taxonomy: p.taxonomy,
            registry: p.registry,
            index: p.index,
            weights,
            threshold,
            min_cscore,
            top_k_categories,
            top_k,
            format: p.format.unwrap_or_default(),
            normalize: NormalizeOptions { stem: p.stem.unwrap_or(false), stopwords: p.stopwords.unwrap_or(false) },
            isub,
        })
    }

    pub fn annotator(&self) -> Annotator {
        Annotator::new(self.threshold).expect("validated in resolve")
    }

    pub fn discovery_options(&self) -> DiscoveryOptions {
        DiscoveryOptions {
            weights: self.weights,
            annotator: self.annotator(),
            isub: self.isub.clone(),
            min_cscore: self.min_cscore,
            top_k_categories: self.top_k_categories,
            top_k: self.top_k,
        }
    }
}
