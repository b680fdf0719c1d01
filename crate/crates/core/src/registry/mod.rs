//! Service registry dumps and the searchable service index.
//!
//! A registry dump is JSON Lines: one object per line with `name`,
//! `description`, `documentation`, `tags` and `categories`. Only `name` is
//! required.

mod format;
mod index;

pub use format::{FORMAT_VERSION, MAGIC};
pub use index::{build_index, AnnotatedService, ServiceId, ServiceIndex};

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceRecord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub documentation: Option<String>,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub categories: Vec<String>,
}

impl ServiceRecord {
    pub fn new(name: impl Into<String>) -> Self {
        ServiceRecord {
            name: name.into(),
            description: None,
            documentation: None,
            tags: Vec::new(),
            categories: Vec::new(),
        }
    }

    /// Description, or documentation when no description is available.
    pub fn primary_text(&self) -> Option<&str> {
        fn present(s: &Option<String>) -> Option<&str> {
            s.as_deref().filter(|t| !t.trim().is_empty())
        }
        present(&self.description).or_else(|| present(&self.documentation))
    }

    /// False when neither description nor documentation has any text.
    pub fn has_annotatable_text(&self) -> bool {
        self.primary_text().is_some()
    }
}

/// Text fed to the annotator: primary text, then tags, then categories.
pub fn annotation_text(record: &ServiceRecord) -> String {
    record
        .primary_text()
        .into_iter()
        .chain(record.tags.iter().map(String::as_str))
        .chain(record.categories.iter().map(String::as_str))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn ingest_registry(path: impl AsRef<Path>) -> Result<Vec<ServiceRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_registry(&text)
}

/// Parses a JSON Lines dump. Record indices in errors count non-blank lines
/// from zero.
pub fn parse_registry(text: &str) -> Result<Vec<ServiceRecord>> {
    let mut records = Vec::new();
    for (index, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let record: ServiceRecord = serde_json::from_str(line)
            .map_err(|e| Error::Record { index, message: e.to_string() })?;
        if record.name.trim().is_empty() {
            return Err(Error::Record { index, message: "empty service name".into() });
        }
        if !record.has_annotatable_text() {
            log::warn!("service {:?}: no annotatable text", record.name);
        }
        records.push(record);
    }
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &records {
        *seen.entry(r.name.as_str()).or_default() += 1;
    }
    let dups: Vec<String> = seen.into_iter().filter(|(_, n)| *n > 1).map(|(k, _)| k.to_owned()).collect();
    if !dups.is_empty() {
        return Err(Error::DuplicateServices(dups));
    }
    Ok(records)
}
