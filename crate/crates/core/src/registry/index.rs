use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::{annotation_text, ServiceRecord};
use crate::annotator::{Annotator, SemanticVector};
use crate::error::{Error, Result};
use crate::lexicon::{normalize_joined, Lexicon};

/// Position of a service in the canonical (name-sorted) service table.
pub type ServiceId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedService {
    pub record: ServiceRecord,
    pub vector: SemanticVector,
    pub categories_normalized: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ServiceIndex {
    pub(super) services: Vec<AnnotatedService>,
    pub(super) concept_postings: BTreeMap<String, BTreeSet<ServiceId>>,
    pub(super) category_postings: BTreeMap<String, BTreeSet<ServiceId>>,
    pub(super) lexicon_fingerprint: String,
}

/// Annotates every record and builds the postings. Records are sorted by
/// name first, so input order never affects the result.
pub fn build_index(records: &[ServiceRecord], lexicon: &Lexicon, annotator: &Annotator) -> ServiceIndex {
    let mut sorted: Vec<&ServiceRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));

    let services: Vec<AnnotatedService> = sorted
        .par_iter()
        .map(|record| AnnotatedService {
            record: (*record).clone(),
            vector: annotator.annotate(&annotation_text(record), lexicon),
            categories_normalized: record
                .categories
                .iter()
                .map(|c| normalize_joined(c))
                .filter(|c| !c.is_empty())
                .collect(),
        })
        .collect();

    ServiceIndex::from_services(services, lexicon.fingerprint().to_owned())
}

impl ServiceIndex {
    /// Builds postings for already annotated services, sorting them by name.
    pub fn from_services(mut services: Vec<AnnotatedService>, lexicon_fingerprint: String) -> Self {
        services.sort_by(|a, b| a.record.name.cmp(&b.record.name));
        let mut concept_postings: BTreeMap<String, BTreeSet<ServiceId>> = BTreeMap::new();
        let mut category_postings: BTreeMap<String, BTreeSet<ServiceId>> = BTreeMap::new();
        for (id, s) in services.iter().enumerate() {
            let id = id as ServiceId;
            for concept in s.vector.support() {
                concept_postings.entry(concept.to_owned()).or_default().insert(id);
            }
            for category in &s.categories_normalized {
                category_postings.entry(category.clone()).or_default().insert(id);
            }
        }
        ServiceIndex { services, concept_postings, category_postings, lexicon_fingerprint }
    }

    pub fn services(&self) -> &[AnnotatedService] {
        &self.services
    }

    pub fn service(&self, id: ServiceId) -> Option<&AnnotatedService> {
        self.services.get(id as usize)
    }

    pub fn len(&self) -> usize {
        self.services.len()
    }

    pub fn is_empty(&self) -> bool {
        self.services.is_empty()
    }

    pub fn lexicon_fingerprint(&self) -> &str {
        &self.lexicon_fingerprint
    }

    pub fn concept_postings(&self) -> &BTreeMap<String, BTreeSet<ServiceId>> {
        &self.concept_postings
    }

    pub fn category_postings(&self) -> &BTreeMap<String, BTreeSet<ServiceId>> {
        &self.category_postings
    }

    pub fn services_with_concept(&self, concept: &str) -> impl Iterator<Item = ServiceId> + '_ {
        self.concept_postings.get(concept).into_iter().flatten().copied()
    }

    /// Services filed under a category; the name is normalized first.
    pub fn services_in_category(&self, category: &str) -> impl Iterator<Item = ServiceId> + '_ {
        self.category_postings.get(&normalize_joined(category)).into_iter().flatten().copied()
    }

    /// Number of services whose vector is empty.
    pub fn empty_vector_count(&self) -> usize {
        self.services.iter().filter(|s| s.vector.is_empty()).count()
    }

    /// True when the index was built with a different lexicon.
    pub fn fingerprint_mismatch(&self, lexicon: &Lexicon) -> bool {
        self.lexicon_fingerprint != lexicon.fingerprint()
    }

    /// Checks that the postings are exactly the transpose of the service
    /// vectors and category sets, and that services are in canonical order.
    pub fn verify(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Integrity(m));
        if self.services.windows(2).any(|w| w[0].record.name >= w[1].record.name) {
            return fail("service table not in canonical order".into());
        }
        let rebuilt = ServiceIndex::from_services(self.services.clone(), self.lexicon_fingerprint.clone());
        if rebuilt.concept_postings != self.concept_postings {
            return fail("concept postings disagree with service vectors".into());
        }
        if rebuilt.category_postings != self.category_postings {
            return fail("category postings disagree with service categories".into());
        }
        Ok(())
    }
}
