//! Ontology lexicons and the word-probability model behind idf.
//!
//! A lexicon file is UTF-8 with one tab-separated record per line:
//! `concept_id<TAB>source<TAB>lexical form`. Repeated ids accumulate forms
//! and `#` starts a comment line. Word probabilities are estimated from the
//! words of all lexical forms with add-one smoothing, unless a separate
//! word-count table is supplied (`word<TAB>count`), in which case that table
//! is the corpus.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Tokenization options. Both flags default to off.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizeOptions {
    pub stem: bool,
    pub stopwords: bool,
}

const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "for", "from", "in", "is", "it", "of", "on",
    "or", "that", "the", "to", "with",
];

/// Lowercase, turn every non-alphanumeric character into a space and split
/// on whitespace.
pub fn normalize(text: &str) -> Vec<String> {
    text.chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .map(str::to_owned)
        .collect()
}

pub fn normalize_with(text: &str, opts: &NormalizeOptions) -> Vec<String> {
    normalize(text)
        .into_iter()
        .filter(|w| !(opts.stopwords && STOPWORDS.contains(&w.as_str())))
        .map(|w| if opts.stem { stem(&w) } else { w })
        .collect()
}

/// Normalized text joined back with single spaces.
pub fn normalize_joined(text: &str) -> String {
    normalize(text).join(" ")
}

// Plural stripping only; enough to conflate "sequence"/"sequences".
fn stem(word: &str) -> String {
    if word.len() > 4 && word.ends_with("ies") {
        format!("{}y", &word[..word.len() - 3])
    } else if word.len() > 3 && word.ends_with('s') && !word.ends_with("ss") {
        word[..word.len() - 1].to_owned()
    } else {
        word.to_owned()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Concept {
    pub id: String,
    pub source: String,
    /// Surface strings in file order, without duplicates.
    pub lexical_forms: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    concepts: Vec<Concept>,
    by_id: HashMap<String, usize>,
    word_prob: HashMap<String, f64>,
    unseen_prob: f64,
    /// word -> concepts having a form that contains it
    word_concepts: HashMap<String, BTreeSet<usize>>,
    options: NormalizeOptions,
    fingerprint: String,
}

impl Lexicon {
    /// Loads a lexicon file, estimating word probabilities from its forms.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::load_with(path, None::<&Path>, NormalizeOptions::default())
    }

    /// Loads a lexicon file and, if given, a word-count table that replaces
    /// the lexical forms as the probability corpus.
    pub fn load_with(
        path: impl AsRef<Path>,
        word_counts: Option<impl AsRef<Path>>,
        options: NormalizeOptions,
    ) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let counts = match word_counts {
            Some(p) => {
                let p = p.as_ref();
                let raw = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                hasher.update([0u8]);
                hasher.update(raw.as_bytes());
                Some(parse_word_counts(&raw)?)
            }
            None => None,
        };
        let mut lexicon = Self::parse_with(&text, counts, options)?;
        lexicon.fingerprint = hex(&hasher.finalize());
        Ok(lexicon)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, None, NormalizeOptions::default())
    }

    pub fn parse_with(
        text: &str,
        word_counts: Option<BTreeMap<String, u64>>,
        options: NormalizeOptions,
    ) -> Result<Self> {
        let mut concepts: Vec<Concept> = Vec::new();
        let mut by_id: HashMap<String, usize> = HashMap::new();
        for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = line.splitn(3, '\t');
            let (id, source, form) = match (fields.next(), fields.next(), fields.next()) {
                (Some(id), Some(src), Some(form)) => (id.trim(), src.trim(), form.trim()),
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "expected concept_id<TAB>source<TAB>lexical form".into(),
                    })
                }
            };
            if id.is_empty() {
                return Err(Error::Parse { line: lineno, message: "empty concept id".into() });
            }
            if normalize_with(form, &options).is_empty() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("lexical form {form:?} has no words"),
                });
            }
            match by_id.get(id) {
                Some(&idx) => {
                    let concept = &mut concepts[idx];
                    if concept.source != source {
                        return Err(Error::DuplicateConcept(id.to_owned()));
                    }
                    if !concept.lexical_forms.iter().any(|f| f == form) {
                        concept.lexical_forms.push(form.to_owned());
                    }
                }
                None => {
                    by_id.insert(id.to_owned(), concepts.len());
                    concepts.push(Concept {
                        id: id.to_owned(),
                        source: source.to_owned(),
                        lexical_forms: vec![form.to_owned()],
                    });
                }
            }
        }
        if concepts.is_empty() {
            return Err(Error::EmptyLexicon);
        }

        let counts = match word_counts {
            Some(c) => c,
            None => {
                let mut c = BTreeMap::new();
                for concept in &concepts {
                    for form in &concept.lexical_forms {
                        for w in normalize_with(form, &options) {
                            *c.entry(w).or_insert(0u64) += 1;
                        }
                    }
                }
                c
            }
        };
        let (word_prob, unseen_prob) = smoothed_probabilities(&counts);

        let mut lexicon = Lexicon {
            concepts,
            by_id,
            word_prob,
            unseen_prob,
            word_concepts: HashMap::new(),
            options,
            fingerprint: String::new(),
        };
        lexicon.index_words();
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        lexicon.fingerprint = hex(&hasher.finalize());
        Ok(lexicon)
    }

    /// Builds a lexicon from explicit parts. Probabilities must lie in (0, 1].
    pub fn from_parts(
        concepts: Vec<Concept>,
        word_prob: HashMap<String, f64>,
        unseen_prob: f64,
    ) -> Result<Self> {
        if !(unseen_prob > 0.0 && unseen_prob <= 1.0) {
            return Err(Error::InvalidProbability { word: "<unseen>".into(), value: unseen_prob });
        }
        if let Some((w, &p)) = word_prob.iter().find(|(_, &p)| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::InvalidProbability { word: w.clone(), value: p });
        }
        if concepts.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        let mut by_id = HashMap::new();
        for (i, c) in concepts.iter().enumerate() {
            if c.id.is_empty() || c.lexical_forms.is_empty() {
                return Err(Error::Parse { line: 0, message: format!("invalid concept {:?}", c.id) });
            }
            if by_id.insert(c.id.clone(), i).is_some() {
                return Err(Error::DuplicateConcept(c.id.clone()));
            }
        }
        let mut hasher = Sha256::new();
        for c in &concepts {
            hasher.update(c.id.as_bytes());
            for f in &c.lexical_forms {
                hasher.update([0u8]);
                hasher.update(f.as_bytes());
            }
        }
        let mut lexicon = Lexicon {
            concepts,
            by_id,
            word_prob,
            unseen_prob,
            word_concepts: HashMap::new(),
            options: NormalizeOptions::default(),
            fingerprint: hex(&hasher.finalize()),
        };
        lexicon.index_words();
        Ok(lexicon)
    }

    fn index_words(&mut self) {
        let mut word_concepts: HashMap<String, BTreeSet<usize>> = HashMap::new();
        for (i, concept) in self.concepts.iter().enumerate() {
            for form in &concept.lexical_forms {
                for w in normalize_with(form, &self.options) {
                    word_concepts.entry(w).or_default().insert(i);
                }
            }
        }
        self.word_concepts = word_concepts;
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.by_id.get(id).map(|&i| &self.concepts[i])
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn vocabulary_size(&self) -> usize {
        self.word_prob.len()
    }

    pub fn unseen_prob(&self) -> f64 {
        self.unseen_prob
    }

    pub fn options(&self) -> &NormalizeOptions {
        &self.options
    }

    /// SHA-256 over the lexicon file (and word-count table, if any), hex encoded.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        normalize_with(text, &self.options)
    }

    pub fn prob(&self, word: &str) -> f64 {
        self.word_prob.get(word).copied().unwrap_or(self.unseen_prob)
    }

    /// Information content of a single word, `-ln P(w)`.
    pub fn word_idf(&self, word: &str) -> f64 {
        -self.prob(word).ln()
    }

    /// `-Σ ln P(w)` over a word multiset.
    ///
    /// Terms are summed in sorted order, so word lists with the same
    /// probability multiset give bit-identical totals and tie exactly.
    pub fn idf<S: AsRef<str>>(&self, words: impl IntoIterator<Item = S>) -> f64 {
        let mut terms: Vec<f64> = words.into_iter().map(|w| self.word_idf(w.as_ref())).collect();
        terms.sort_unstable_by(f64::total_cmp);
        terms.into_iter().sum()
    }

    /// Indices of concepts with at least one form sharing a word with `words`.
    pub(crate) fn candidates<'a>(&self, words: impl IntoIterator<Item = &'a String>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for w in words {
            if let Some(ids) = self.word_concepts.get(w) {
                out.extend(ids.iter().copied());
            }
        }
        out
    }
}

/// `P(w) = (count(w)+1) / (total+vocab+1)`; unseen words get `1 / (total+vocab+1)`.
fn smoothed_probabilities(counts: &BTreeMap<String, u64>) -> (HashMap<String, f64>, f64) {
    let total: u64 = counts.values().sum();
    let denom = (total + counts.len() as u64 + 1) as f64;
    let probs = counts.iter().map(|(w, &c)| (w.clone(), (c + 1) as f64 / denom)).collect();
    (probs, 1.0 / denom)
}

fn parse_word_counts(text: &str) -> Result<BTreeMap<String, u64>> {
    let mut counts = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (word, count) = trimmed.split_once('\t').ok_or_else(|| Error::Parse {
            line: lineno,
            message: "expected word<TAB>count".into(),
        })?;
        let count: u64 = count.trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("invalid count {count:?}"),
        })?;
        let word = normalize_joined(word);
        if word.is_empty() || word.contains(' ') {
            return Err(Error::Parse { line: lineno, message: "word must be a single token".into() });
        }
        *counts.entry(word).or_insert(0) += count;
    }
    Ok(counts)
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
