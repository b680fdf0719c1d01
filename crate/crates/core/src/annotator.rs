//! Information-theoretic concept annotation.
//!
//! A concept matches a text through its best lexical form. For a form `S`
//! and a text `T`:
//!
//! ```text
//! missing(S, T) = idf(S) - idf(cw(S, T))
//! ratio(S, T)   = (idf(cw(S, T)) - missing(S, T)) / idf(S)
//! sim(C, T)     = max over S in lex(C) of ratio(S, T)
//! ```
//!
//! where `cw` is the set of words shared by the form and the text. Concepts
//! whose similarity reaches the threshold enter the semantic vector with
//! weight `tf * idf(form)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{normalize_joined, Concept, Lexicon};

pub const DEFAULT_THRESHOLD: f64 = 0.8;

/// Sparse concept-id to tf·idf map. Entries always carry a positive weight.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SemanticVector {
    weights: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    provenance: BTreeMap<String, Provenance>,
}

/// Which lexical form produced an entry, and which text words it covered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub lexical_form: String,
    pub matched_words: Vec<String>,
}

impl SemanticVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Non-positive and non-finite weights are dropped.
    pub fn from_weights<K: Into<String>>(weights: impl IntoIterator<Item = (K, f64)>) -> Self {
        let weights = weights
            .into_iter()
            .filter(|(_, w)| *w > 0.0 && w.is_finite())
            .map(|(k, w)| (k.into(), w))
            .collect();
        SemanticVector { weights, provenance: BTreeMap::new() }
    }

    pub fn insert(&mut self, concept: impl Into<String>, weight: f64, provenance: Option<Provenance>) {
        if !(weight > 0.0 && weight.is_finite()) {
            return;
        }
        let concept = concept.into();
        if let Some(p) = provenance {
            self.provenance.insert(concept.clone(), p);
        }
        self.weights.insert(concept, weight);
    }

    pub fn get(&self, concept: &str) -> Option<f64> {
        self.weights.get(concept).copied()
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }

    pub fn provenance(&self, concept: &str) -> Option<&Provenance> {
        self.provenance.get(concept)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.weights.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.weights.keys().map(String::as_str)
    }

    pub fn contains(&self, concept: &str) -> bool {
        self.weights.contains_key(concept)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.weights.values().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SemanticVector) -> f64 {
        let (small, large) =
            if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().filter_map(|(k, w)| large.get(k).map(|v| w * v)).sum()
    }
}

/// One accepted concept with the evidence behind its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub concept: String,
    pub lexical_form: String,
    pub sim: f64,
    pub tf: u32,
    pub idf_value: f64,
    pub matched_words: Vec<String>,
}

impl Annotation {
    pub fn weight(&self) -> f64 {
        f64::from(self.tf) * self.idf_value
    }
}

/// Words shared by a form and a text.
pub fn cw(form: &BTreeSet<String>, text: &BTreeSet<String>) -> BTreeSet<String> {
    form.intersection(text).cloned().collect()
}

/// Information in `form` not covered by `text`.
pub fn missing(form: &BTreeSet<String>, text: &BTreeSet<String>, lexicon: &Lexicon) -> f64 {
    let covered = lexicon.idf(form.intersection(text));
    (lexicon.idf(form) - covered).max(0.0)
}

/// Coverage ratio in [-1, 1]; fails when the form carries no information.
pub fn ratio(form: &BTreeSet<String>, text: &BTreeSet<String>, lexicon: &Lexicon) -> Result<f64> {
    let total = lexicon.idf(form);
    if total <= 0.0 {
        return Err(Error::UndefinedScore(form.iter().cloned().collect::<Vec<_>>().join(" ")));
    }
    let covered = lexicon.idf(form.intersection(text));
    let missing = (total - covered).max(0.0);
    Ok(((covered - missing) / total).clamp(-1.0, 1.0))
}

/// Best-scoring lexical form of a concept against a text.
#[derive(Debug, Clone, PartialEq)]
pub struct FormMatch {
    pub sim: f64,
    pub form_index: usize,
}

/// Maximum ratio over the concept's forms. Ties go to the form with more
/// words, then to the lexicographically smaller normalized form. Returns
/// `None` when no form is scoreable.
pub fn sim(concept: &Concept, text: &BTreeSet<String>, lexicon: &Lexicon) -> Option<FormMatch> {
    let mut best: Option<(f64, usize, String, usize)> = None;
    for (i, form) in concept.lexical_forms.iter().enumerate() {
        let tokens = lexicon.tokenize(form);
        let set: BTreeSet<String> = tokens.iter().cloned().collect();
        let r = match ratio(&set, text, lexicon) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("concept {}: skipping form: {e}", concept.id);
                continue;
            }
        };
        let key = tokens.join(" ");
        let better = match &best {
            None => true,
            Some((br, blen, bkey, _)) => {
                r > *br || (r == *br && (tokens.len() > *blen || (tokens.len() == *blen && key < *bkey)))
            }
        };
        if better {
            best = Some((r, tokens.len(), key, i));
        }
    }
    best.map(|(sim, _, _, form_index)| FormMatch { sim, form_index })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotator {
    threshold: f64,
}

impl Default for Annotator {
    fn default() -> Self {
        Annotator { threshold: DEFAULT_THRESHOLD }
    }
}

impl Annotator {
    pub fn new(threshold: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&threshold) {
            return Err(Error::OutOfRange { name: "threshold", value: threshold });
        }
        Ok(Annotator { threshold })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// All concepts whose similarity reaches the threshold, ordered by id.
    pub fn annotations(&self, text: &str, lexicon: &Lexicon) -> Vec<Annotation> {
        let tokens = lexicon.tokenize(text);
        if tokens.is_empty() {
            return Vec::new();
        }
        let mut counts: HashMap<&str, u32> = HashMap::new();
        for t in &tokens {
            *counts.entry(t.as_str()).or_default() += 1;
        }
        let text_set: BTreeSet<String> = tokens.iter().cloned().collect();

        // A concept sharing no word with the text has ratio -1 on every form.
        let candidates: Vec<&Concept> = if self.threshold > -1.0 {
            lexicon.candidates(&text_set).into_iter().map(|i| &lexicon.concepts()[i]).collect()
        } else {
            lexicon.concepts().iter().collect()
        };

        let mut out: Vec<Annotation> = candidates
            .into_iter()
            .filter_map(|concept| {
                let m = sim(concept, &text_set, lexicon)?;
                if m.sim < self.threshold {
                    return None;
                }
                let form = &concept.lexical_forms[m.form_index];
                let form_tokens = lexicon.tokenize(form);
                let matched: Vec<String> = form_tokens
                    .iter()
                    .filter(|w| text_set.contains(*w))
                    .cloned()
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                Some(Annotation {
                    concept: concept.id.clone(),
                    lexical_form: normalize_joined(form),
                    sim: m.sim,
                    tf: term_frequency(&matched, &counts),
                    idf_value: lexicon.idf(&form_tokens),
                    matched_words: matched,
                })
            })
            .collect();
        out.sort_by(|a, b| a.concept.cmp(&b.concept));
        out
    }

    pub fn annotate(&self, text: &str, lexicon: &Lexicon) -> SemanticVector {
        let mut vector = SemanticVector::new();
        for a in self.annotations(text, lexicon) {
            let weight = a.weight();
            vector.insert(
                a.concept,
                weight,
                Some(Provenance { lexical_form: a.lexical_form, matched_words: a.matched_words }),
            );
        }
        vector
    }
}

/// Number of complete copies of the covered words in the text bag, at least 1.
fn term_frequency(covered: &[String], counts: &HashMap<&str, u32>) -> u32 {
    covered
        .iter()
        .map(|w| counts.get(w.as_str()).copied().unwrap_or(0))
        .min()
        .unwrap_or(1)
        .max(1)
}
