//! Two independent searches over the index, fused by a convex combination:
//! `score = c_score * w1 + s_score * w2` with `w1 + w2 = 1`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::annotator::{Annotator, SemanticVector};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::registry::{ServiceId, ServiceIndex};
use crate::strsim::IsubParams;
use crate::taxonomy::{CategoryMatch, CategoryTaxonomy, DEFAULT_MIN_CSCORE, DEFAULT_TOP_K};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_TOP_K_SERVICES: usize = 10;

/// Category weight `w1` and semantic weight `w2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    w1: f64,
    w2: f64,
}

impl Weights {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        let in_range = (0.0..=1.0).contains(&w1) && (0.0..=1.0).contains(&w2);
        if !in_range || (w1 + w2 - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights { w1, w2 });
        }
        Ok(Weights { w1, w2 })
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    pub fn w2(&self) -> f64 {
        self.w2
    }
}

impl Default for Weights {
    /// 0.2 / 0.8: the split that reproduces the published ranking.
    fn default() -> Self {
        Weights { w1: 0.2, w2: 0.8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    pub service: String,
    pub shared_annotations: Vec<String>,
    pub c_score: f64,
    pub s_score: f64,
    pub score: f64,
}

/// Cosine of two sparse vectors; 0 when either is empty.
pub fn cosine(a: &SemanticVector, b: &SemanticVector) -> f64 {
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return 0.0;
    }
    (a.dot(b) / denom).clamp(0.0, 1.0)
}

pub fn combine(c_score: f64, s_score: f64, weights: &Weights) -> f64 {
    c_score * weights.w1 + s_score * weights.w2
}

/// Services filed under any matched category, each keeping its best C-score.
pub fn search_by_category(matches: &[CategoryMatch], index: &ServiceIndex) -> BTreeMap<ServiceId, f64> {
    let mut out: BTreeMap<ServiceId, f64> = BTreeMap::new();
    for m in matches {
        for id in index.services_in_category(&m.category) {
            let e = out.entry(id).or_insert(m.c_score);
            *e = e.max(m.c_score);
        }
    }
    out
}

/// Services sharing at least one concept with the task, scored by cosine.
pub fn search_by_concepts(task: &SemanticVector, index: &ServiceIndex) -> BTreeMap<ServiceId, f64> {
    let candidates: BTreeSet<ServiceId> =
        task.support().flat_map(|c| index.services_with_concept(c)).collect();
    candidates
        .into_iter()
        .filter_map(|id| index.service(id).map(|s| (id, cosine(task, &s.vector))))
        .collect()
}

/// Everything a discovery run needs besides the task text.
#[derive(Debug, Clone, Copy)]
pub struct DiscoveryContext<'a> {
    pub index: &'a ServiceIndex,
    pub lexicon: &'a Lexicon,
    pub taxonomy: &'a CategoryTaxonomy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryOptions {
    pub weights: Weights,
    pub annotator: Annotator,
    pub isub: IsubParams,
    pub min_cscore: f64,
    pub top_k_categories: usize,
    pub top_k: usize,
}

impl Default for DiscoveryOptions {
    fn default() -> Self {
        DiscoveryOptions {
            weights: Weights::default(),
            annotator: Annotator::default(),
            isub: IsubParams::default(),
            min_cscore: DEFAULT_MIN_CSCORE,
            top_k_categories: DEFAULT_TOP_K,
            top_k: DEFAULT_TOP_K_SERVICES,
        }
    }
}

/// Output of one discovery run, with the task annotations it was based on.
#[derive(Debug, Clone, PartialEq)]
pub struct Discovery {
    pub task_vector: SemanticVector,
    pub categories: Vec<CategoryMatch>,
    pub results: Vec<RankedResult>,
}

pub fn discover(task_text: &str, ctx: DiscoveryContext<'_>, opts: &DiscoveryOptions) -> Discovery {
    let task_vector = opts.annotator.annotate(task_text, ctx.lexicon);
    let categories =
        ctx.taxonomy.match_categories(task_text, opts.min_cscore, opts.top_k_categories, &opts.isub);
    let results = rank(&task_vector, &categories, ctx.index, &opts.weights, opts.top_k);
    Discovery { task_vector, categories, results }
}

/// Fuses both searches for an already annotated task.
pub fn rank(
    task_vector: &SemanticVector,
    categories: &[CategoryMatch],
    index: &ServiceIndex,
    weights: &Weights,
    top_k: usize,
) -> Vec<RankedResult> {
    let by_category = search_by_category(categories, index);
    let by_concept = search_by_concepts(task_vector, index);
    let ids: BTreeSet<ServiceId> = by_category.keys().chain(by_concept.keys()).copied().collect();

    let mut results: Vec<RankedResult> = ids
        .into_iter()
        .filter_map(|id| {
            let service = index.service(id)?;
            let c_score = by_category.get(&id).copied().unwrap_or(0.0);
            let s_score = by_concept.get(&id).copied().unwrap_or(0.0);
            let shared_annotations =
                task_vector.support().filter(|c| service.vector.contains(c)).map(str::to_owned).collect();
            Some(RankedResult {
                service: service.record.name.clone(),
                shared_annotations,
                c_score,
                s_score,
                score: combine(c_score, s_score, weights),
            })
        })
        .collect();
    sort_results(&mut results);
    results.truncate(top_k);
    results
}

/// Score descending, then S-score descending, then name.
pub fn sort_results(results: &mut [RankedResult]) {
    results.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| b.s_score.total_cmp(&a.s_score))
            .then_with(|| a.service.cmp(&b.service))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotator::Annotator;
    use crate::registry::{build_index, AnnotatedService, ServiceRecord};

    fn svc(name: &str, weights: &[(&str, f64)], cats: &[&str]) -> AnnotatedService {
        let mut record = ServiceRecord::new(name);
        record.categories = cats.iter().map(|c| c.to_string()).collect();
        AnnotatedService {
            record,
            vector: SemanticVector::from_weights(weights.iter().map(|(k, v)| (*k, *v))),
            categories_normalized: cats.iter().map(|c| crate::lexicon::normalize_joined(c)).collect(),
        }
    }

    #[test]
    fn weights_validation() {
        assert!(Weights::new(0.2, 0.8).is_ok());
        assert!(Weights::new(0.7, 0.3).is_ok());
        assert!(Weights::new(0.5, 0.6).is_err());
        assert!(Weights::new(-0.1, 1.1).is_err());
    }

    #[test]
    fn cosine_examples() {
        let a = SemanticVector::from_weights([("c1", 8.0), ("c2", 15.0)]);
        assert!((cosine(&a, &a) - 1.0).abs() < 1e-12);
        let b = SemanticVector::from_weights([("c2", 5.0)]);
        assert!((cosine(&a, &b) - 15.0 / 17.0).abs() < 1e-12);
        let d = SemanticVector::from_weights([("c3", 1.0)]);
        assert_eq!(cosine(&a, &d), 0.0);
        assert_eq!(cosine(&a, &SemanticVector::new()), 0.0);
    }

    #[test]
    fn combine_examples() {
        let w = Weights::new(0.2, 0.8).unwrap();
        assert!((combine(0.0, 0.6934, &w) - 0.5547).abs() < 5e-4);
        assert!((combine(0.5586, 0.5427, &w) - 0.5459).abs() < 5e-4);
        for (w1, v) in [(0.0, 0.3), (0.25, 0.9), (1.0, 0.5)] {
            let w = Weights::new(w1, 1.0 - w1).unwrap();
            assert!((combine(v, v, &w) - v).abs() < 1e-15);
        }
    }

    #[test]
    fn category_search_keeps_max() {
        let index = ServiceIndex::from_services(
            vec![svc("Uniprot", &[], &["Protein Sequence Analysis", "Databases"]), svc("Other", &[], &["Pathways"])],
            String::new(),
        );
        assert!(search_by_category(&[], &index).is_empty());
        let hits = search_by_category(
            &[
                CategoryMatch { category: "Protein Sequence Analysis".into(), c_score: 0.3 },
                CategoryMatch { category: "databases".into(), c_score: 0.5 },
            ],
            &index,
        );
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[&1], 0.5);
        let hits = search_by_category(
            &[CategoryMatch { category: "Protein Sequence Analysis".into(), c_score: 0.5586 }],
            &index,
        );
        assert_eq!(hits[&1], 0.5586);
    }

    #[test]
    fn concept_search_matches_scan() {
        let index = ServiceIndex::from_services(
            vec![
                svc("a", &[("c1", 8.0), ("c2", 15.0), ("x", 17.6)], &[]),
                svc("b", &[("c2", 15.0), ("y", 19.2)], &[]),
                svc("c", &[("z", 1.0)], &[]),
                svc("d", &[], &[]),
            ],
            String::new(),
        );
        let task = SemanticVector::from_weights([("c1", 8.0), ("c2", 15.0)]);
        let hits = search_by_concepts(&task, &index);
        assert_eq!(hits.keys().copied().collect::<Vec<_>>(), [0, 1]);
        for (i, s) in index.services().iter().enumerate() {
            let brute = cosine(&task, &s.vector);
            assert_eq!(hits.get(&(i as ServiceId)).copied().unwrap_or(0.0), brute);
        }
        assert!(search_by_concepts(&SemanticVector::new(), &index).is_empty());
    }

    #[test]
    fn self_match_ranks_first() {
        let lexicon = Lexicon::parse("C1\tumls\tdomains\nC2\tmygrid\tprotein sequences\nC3\tumls\tkinase\n").unwrap();
        let text = "Analyze domains in protein sequences";
        let mut same = ServiceRecord::new("Same");
        same.description = Some(text.into());
        let mut other = ServiceRecord::new("Other");
        other.description = Some("kinase domains".into());
        let index = build_index(&[other, same], &lexicon, &Annotator::default());
        let taxonomy = CategoryTaxonomy::from_names(["Pathways"]).unwrap();
        let out = discover(
            text,
            DiscoveryContext { index: &index, lexicon: &lexicon, taxonomy: &taxonomy },
            &DiscoveryOptions::default(),
        );
        assert_eq!(out.results[0].service, "Same");
        assert!((out.results[0].s_score - 1.0).abs() < 1e-12);
        assert_eq!(out.results[0].shared_annotations, ["C1", "C2"]);
        assert_eq!(out.results[1].shared_annotations, ["C1"]);
    }

    #[test]
    fn ties_break_on_s_score_then_name() {
        let mut r = vec![
            RankedResult { service: "b".into(), shared_annotations: vec![], c_score: 0.5, s_score: 0.5, score: 0.5 },
            RankedResult { service: "a".into(), shared_annotations: vec![], c_score: 0.5, s_score: 0.5, score: 0.5 },
            RankedResult { service: "c".into(), shared_annotations: vec![], c_score: 1.0, s_score: 0.375, score: 0.5 },
        ];
        sort_results(&mut r);
        let names: Vec<_> = r.iter().map(|x| x.service.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
    }
}
