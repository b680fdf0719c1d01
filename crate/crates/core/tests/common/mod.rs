//! Brute-force oracles and random fixtures shared by the integration tests.
//!
//! Nothing here calls the annotator, ranker or index code paths; the oracles
//! only read word probabilities and raw records and recompute everything by
//! exhaustive enumeration.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use semdisc::lexicon::Lexicon;
use semdisc::registry::ServiceRecord;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// ASCII-only tokenizer used by the oracles.
pub fn words(text: &str) -> Vec<String> {
    text.to_ascii_lowercase()
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Summed smallest-first so equal multisets of probabilities tie exactly.
fn idf_of<'a>(lex: &Lexicon, ws: impl IntoIterator<Item = &'a String>) -> f64 {
    let mut terms: Vec<f64> = ws.into_iter().map(|w| -lex.prob(w).ln()).collect();
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// ratio via the expanded form (2 idf(cw) - idf(S)) / idf(S).
pub fn oracle_ratio(lex: &Lexicon, form: &str, text: &str) -> Option<f64> {
    let form: BTreeSet<String> = words(form).into_iter().collect();
    let text: BTreeSet<String> = words(text).into_iter().collect();
    let total = idf_of(lex, &form);
    if total <= 0.0 {
        return None;
    }
    let covered = idf_of(lex, form.iter().filter(|w| text.contains(*w)));
    Some((2.0 * covered - total) / total)
}

/// Copies of the covered words that can be removed from the text bag one
/// full set at a time.
fn oracle_tf(covered: &BTreeSet<String>, text: &[String]) -> u32 {
    if covered.is_empty() {
        return 1;
    }
    let mut bag = text.to_vec();
    let mut n = 0;
    loop {
        for w in covered {
            match bag.iter().position(|b| b == w) {
                Some(i) => {
                    bag.swap_remove(i);
                }
                None => return n.max(1),
            }
        }
        n += 1;
    }
}

/// Enumerates every (concept, form) pair and keeps the best form per concept.
pub fn oracle_annotate(lex: &Lexicon, text: &str, threshold: f64) -> BTreeMap<String, f64> {
    let tokens = words(text);
    let mut out = BTreeMap::new();
    if tokens.is_empty() {
        return out;
    }
    let text_set: BTreeSet<String> = tokens.iter().cloned().collect();
    for concept in lex.concepts() {
        let mut scored: Vec<(f64, usize, String)> = Vec::new();
        for form in &concept.lexical_forms {
            if let Some(r) = oracle_ratio(lex, form, text) {
                let toks = words(form);
                scored.push((r, toks.len(), toks.join(" ")));
            }
        }
        let Some(best_r) = scored.iter().map(|s| s.0).reduce(f64::max) else { continue };
        if best_r < threshold {
            continue;
        }
        let (_, _, form) = scored
            .into_iter()
            .filter(|s| s.0 == best_r)
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.2.cmp(&a.2)))
            .unwrap();
        let form_tokens = words(&form);
        let covered: BTreeSet<String> = form_tokens.iter().filter(|w| text_set.contains(*w)).cloned().collect();
        let weight = oracle_tf(&covered, &tokens) as f64 * idf_of(lex, &form_tokens);
        out.insert(concept.id.clone(), weight);
    }
    out
}

pub fn oracle_cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let na: f64 = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.iter().map(|(k, x)| x * b.get(k).copied().unwrap_or(0.0)).sum();
    (dot / (na * nb)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub service: String,
    pub shared: Vec<String>,
    pub c_score: f64,
    pub s_score: f64,
    pub score: f64,
}

/// Scores every service directly from its record: annotate its text, take
/// its best matched category, combine, sort, truncate.
#[allow(clippy::too_many_arguments)]
pub fn oracle_discover(
    lex: &Lexicon,
    records: &[ServiceRecord],
    task_vector: &BTreeMap<String, f64>,
    category_scores: &[(String, f64)],
    threshold: f64,
    w1: f64,
    w2: f64,
    top_k: usize,
) -> Vec<OracleRow> {
    let norm = |s: &str| words(s).join(" ");
    let mut rows = Vec::new();
    for r in records {
        let text = oracle_text(r);
        let vector = oracle_annotate(lex, &text, threshold);
        let cats: BTreeSet<String> = r.categories.iter().map(|c| norm(c)).collect();
        let hits: Vec<f64> =
            category_scores.iter().filter(|(c, _)| cats.contains(&norm(c))).map(|(_, s)| *s).collect();
        let shared: Vec<String> = task_vector.keys().filter(|k| vector.contains_key(*k)).cloned().collect();
        if hits.is_empty() && shared.is_empty() {
            continue;
        }
        let c_score = hits.into_iter().fold(0.0, f64::max);
        let s_score = if shared.is_empty() { 0.0 } else { oracle_cosine(task_vector, &vector) };
        rows.push(OracleRow { service: r.name.clone(), shared, c_score, s_score, score: c_score * w1 + s_score * w2 });
    }
    rows.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap()
            .then(b.s_score.partial_cmp(&a.s_score).unwrap())
            .then(a.service.cmp(&b.service))
    });
    rows.truncate(top_k);
    rows
}

pub fn oracle_text(r: &ServiceRecord) -> String {
    let primary = [&r.description, &r.documentation]
        .into_iter()
        .flatten()
        .find(|s| !s.trim().is_empty())
        .cloned();
    primary.into_iter().chain(r.tags.iter().cloned()).chain(r.categories.iter().cloned()).collect::<Vec<_>>().join(" ")
}

pub const CATEGORY_POOL: [&str; 5] =
    ["Protein Sequence Analysis", "Sequence Alignment", "Gene Expression", "Pathways", "Text Mining"];

/// A random world: lexicon text, records and a task, over a small vocabulary
/// so that overlaps are frequent.
pub struct RandomWorld {
    pub lexicon_text: String,
    pub records: Vec<ServiceRecord>,
    pub task: String,
}

pub fn random_world(rng: &mut impl Rng, max_concepts: usize, max_services: usize) -> RandomWorld {
    let vocab: Vec<String> = (0..14).map(|i| format!("w{i}")).collect();
    let pick = |rng: &mut dyn rand::RngCore, lo: usize, hi: usize| -> String {
        let n = rng.gen_range(lo..=hi);
        (0..n).map(|_| vocab.choose(rng).unwrap().clone()).collect::<Vec<_>>().join(" ")
    };
    let mut lexicon_text = String::new();
    for c in 0..rng.gen_range(1..=max_concepts) {
        for _ in 0..rng.gen_range(1..=3) {
            lexicon_text.push_str(&format!("K{c:03}\tsrc\t{}\n", pick(rng, 1, 3)));
        }
    }
    let records = (0..rng.gen_range(0..=max_services))
        .map(|i| {
            let mut r = ServiceRecord::new(format!("s{i:02}"));
            match rng.gen_range(0..4) {
                0 => r.description = Some(pick(rng, 1, 8)),
                1 => r.documentation = Some(pick(rng, 1, 8)),
                2 => {
                    r.description = Some(String::new());
                    r.documentation = Some(pick(rng, 1, 6));
                }
                _ => {}
            }
            r.tags = (0..rng.gen_range(0..3)).map(|_| pick(rng, 1, 1)).collect();
            let n = rng.gen_range(0..=2);
            r.categories = CATEGORY_POOL.choose_multiple(rng, n).map(|s| s.to_string()).collect();
            r
        })
        .collect();
    RandomWorld { lexicon_text, records, task: pick(rng, 0, 7) }
}
