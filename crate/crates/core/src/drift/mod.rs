//! Drift synthesis: pick a drifting feature, cut the source data into
//! value-ordered concepts and compose abrupt, gradual or incremental drift
//! streams from concept samplers.

mod chunk;
mod compose;
mod concept;
mod correlation;

use serde::{Deserialize, Serialize};

pub use chunk::chunk_by_feature;
pub use compose::{
    compose_abrupt, compose_gradual, compose_incremental, compose_incremental_with_feature,
    ConceptOrder, DriftKind, DriftSpec, Sector, SectorKind, SynthesizedStream,
};
pub use concept::{silverman_bandwidth, BootstrapSampler, ConceptSource, ReplayConcept};
pub use correlation::{correlation, pearson, select_drifting_feature, spearman, CorrelationMethod};

use crate::stream::StreamError;

#[derive(Debug, thiserror::Error)]
pub enum DriftError {
    #[error("correlation undefined: zero variance")]
    ZeroVariance,
    #[error("sequence lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 values, got {0}")]
    TooShort(usize),
    #[error("no numeric feature can serve as drifting feature")]
    NoNumericCandidates,
    #[error("cannot split {rows} rows into {chunks} chunks")]
    InvalidChunkCount { chunks: usize, rows: usize },
    #[error("need at least 2 concepts, got {0}")]
    TooFewConcepts(usize),
    #[error("spec declares {spec} concepts but {given} were given")]
    ConceptCountMismatch { spec: usize, given: usize },
    #[error("composer expects {expected:?} drift, spec says {found:?}")]
    WrongKind {
        expected: DriftKind,
        found: DriftKind,
    },
    #[error("drift length {0} must be even")]
    InvalidDriftLength(usize),
    #[error("concept length {concept_length} shorter than the {needed} rows the drifting periods consume")]
    ConceptTooShort {
        concept_length: usize,
        needed: usize,
    },
    #[error("drifting feature `{0}` not in schema")]
    FeatureMissing(String),
    #[error("drifting feature `{0}` is not numeric")]
    FeatureNotNumeric(String),
    #[error("concept schemas differ")]
    SchemaMismatch,
    #[error("concept has no rows")]
    EmptyConcept,
    #[error("instance has {found} features, schema expects {expected}")]
    Arity { expected: usize, found: usize },
    #[error("concept has {available} rows, {requested} requested")]
    Exhausted { requested: usize, available: usize },
    #[error(transparent)]
    Stream(#[from] StreamError),
}

/// Drift bookkeeping stored in a synthesized stream's manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftRecord {
    pub drift_type: DriftKind,
    pub spec: DriftSpec,
    pub boundaries: Vec<(usize, usize)>,
    pub drifting_feature: Option<String>,
    pub concept_order: Vec<usize>,
    pub layout: Vec<Sector>,
}

impl DriftRecord {
    pub fn new(stream: &SynthesizedStream, spec: &DriftSpec) -> Self {
        Self {
            drift_type: spec.kind,
            spec: *spec,
            boundaries: stream.boundaries.clone(),
            drifting_feature: stream.drifting_feature.clone(),
            concept_order: stream.concept_order.clone(),
            layout: stream.layout(),
        }
    }
}
