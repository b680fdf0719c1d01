//! Functional category taxonomy and task-to-category matching (C-score).
//!
//! The taxonomy file holds one category name per line. Indentation nests a
//! category under the closest less-indented line above it; `#` lines are
//! comments. Names are deduplicated after normalization.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::normalize_joined;
use crate::strsim::{clamp_cscore, isub, IsubParams};

pub const DEFAULT_MIN_CSCORE: f64 = 0.4;
pub const DEFAULT_TOP_K: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryTaxonomy {
    /// Display names in file order.
    categories: Vec<String>,
    /// normalized child -> normalized parent
    parents: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryMatch {
    pub category: String,
    pub c_score: f64,
}

impl CategoryTaxonomy {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut categories = Vec::new();
        let mut seen = HashSet::new();
        let mut parents = BTreeMap::new();
        // (indent, normalized name) of the open ancestors
        let mut stack: Vec<(usize, String)> = Vec::new();
        for line in text.lines() {
            let name = line.trim();
            if name.is_empty() || name.starts_with('#') {
                continue;
            }
            let key = normalize_joined(name);
            if key.is_empty() {
                continue;
            }
            let indent = line.len() - line.trim_start().len();
            while stack.last().is_some_and(|(i, _)| *i >= indent) {
                stack.pop();
            }
            if let Some((_, parent)) = stack.last() {
                if *parent != key {
                    parents.entry(key.clone()).or_insert_with(|| parent.clone());
                }
            }
            stack.push((indent, key.clone()));
            if seen.insert(key) {
                categories.push(name.to_owned());
            }
        }
        if categories.is_empty() {
            return Err(Error::EmptyTaxonomy);
        }
        Ok(CategoryTaxonomy { categories, parents })
    }

    pub fn from_names<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let text: Vec<String> = names.into_iter().map(|s| s.as_ref().trim().to_owned()).collect();
        Self::parse(&text.join("\n"))
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    /// Parent of a category, if the file nested it. Not used for scoring.
    pub fn parent(&self, category: &str) -> Option<&str> {
        let key = normalize_joined(category);
        let parent = self.parents.get(&key)?;
        self.categories.iter().find(|c| normalize_joined(c) == *parent).map(String::as_str)
    }

    /// Categories scoring at least `min_cscore` against the task, best first
    /// (ties by name), truncated to `top_k`.
    pub fn match_categories(
        &self,
        task_text: &str,
        min_cscore: f64,
        top_k: usize,
        params: &IsubParams,
    ) -> Vec<CategoryMatch> {
        let mut matches: Vec<CategoryMatch> = self
            .categories
            .iter()
            .map(|c| CategoryMatch { category: c.clone(), c_score: clamp_cscore(isub(task_text, c, params)) })
            .filter(|m| m.c_score >= min_cscore)
            .collect();
        matches.sort_by(|a, b| b.c_score.total_cmp(&a.c_score).then_with(|| a.category.cmp(&b.category)));
        matches.truncate(top_k);
        matches
    }
}
