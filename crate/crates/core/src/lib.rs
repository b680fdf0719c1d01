//! Requirement-driven discovery of web services.
//!
//! Task descriptions and service metadata are annotated with ontology
//! concepts ([`annotator`]) and tasks are additionally matched to registry
//! categories by string similarity ([`taxonomy`], [`strsim`]). Services are
//! then ranked by a weighted sum of the category score and the cosine of
//! the concept vectors ([`ranker`]).

pub mod annotator;
pub mod cli;
pub mod config;
pub mod error;
pub mod lexicon;
pub mod ranker;
pub mod registry;
pub mod requirements;
pub mod strsim;
pub mod taxonomy;

pub use annotator::{Annotator, SemanticVector};
pub use error::{Error, Result};
pub use lexicon::Lexicon;
pub use ranker::{discover, DiscoveryContext, DiscoveryOptions, RankedResult, Weights};
pub use registry::{build_index, ServiceIndex, ServiceRecord};
pub use taxonomy::CategoryTaxonomy;
