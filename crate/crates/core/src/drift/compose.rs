use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::chunk::numeric_feature;
use super::concept::ConceptSource;
use super::DriftError;
use crate::stream::{Instance, Schema, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftKind {
    Abrupt,
    Gradual,
    Incremental,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConceptOrder {
    #[default]
    Random,
    Given,
}

/// Recipe for a drifted stream: `num_concepts` concepts of `concept_length`
/// sampled rows each, joined by `num_concepts - 1` drifts.
///
/// For gradual and incremental drift, `drift_length = 2n` where the last `n`
/// rows of one concept and the first `n` of the next form the drifting
/// period, so the total length stays `num_concepts * concept_length`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriftSpec {
    pub kind: DriftKind,
    pub num_concepts: usize,
    pub concept_length: usize,
    pub drift_length: usize,
    pub seed: u64,
    pub order: ConceptOrder,
}

impl DriftSpec {
    pub fn num_drifts(&self) -> usize {
        self.num_concepts.saturating_sub(1)
    }

    pub fn total_length(&self) -> usize {
        self.num_concepts * self.concept_length
    }

    /// Rows taken from each side of a concept junction.
    pub fn half_width(&self) -> usize {
        match self.kind {
            DriftKind::Abrupt => 0,
            _ => self.drift_length / 2,
        }
    }

    pub fn validate(&self) -> Result<(), DriftError> {
        if self.num_concepts < 2 {
            return Err(DriftError::TooFewConcepts(self.num_concepts));
        }
        if self.kind == DriftKind::Abrupt {
            return Ok(());
        }
        if self.drift_length % 2 != 0 {
            return Err(DriftError::InvalidDriftLength(self.drift_length));
        }
        let n = self.half_width();
        // interior concepts lose n rows at each end
        let needed = if self.num_concepts > 2 { 2 * n } else { n };
        if self.concept_length < needed {
            return Err(DriftError::ConceptTooShort {
                concept_length: self.concept_length,
                needed,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorKind {
    Stable,
    Drift,
}

/// Half-open row range `[start, end)` of the realized stream layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sector {
    pub kind: SectorKind,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedStream {
    pub schema: Schema,
    pub instances: Vec<Instance>,
    /// Drifting periods as half-open `[start, end)` ranges. Abrupt switches
    /// are zero-width `(i, i)` at the first row of the new concept.
    pub boundaries: Vec<(usize, usize)>,
    pub drifting_feature: Option<String>,
    /// Original concept indices in the order they appear in the stream.
    pub concept_order: Vec<usize>,
}

impl SynthesizedStream {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Alternating stable/drift sectors covering the whole stream.
    pub fn layout(&self) -> Vec<Sector> {
        let mut out = Vec::new();
        let mut pos = 0;
        for &(s, e) in &self.boundaries {
            if s > pos {
                out.push(Sector {
                    kind: SectorKind::Stable,
                    start: pos,
                    end: s,
                });
            }
            if e > s {
                out.push(Sector {
                    kind: SectorKind::Drift,
                    start: s,
                    end: e,
                });
            }
            pos = e;
        }
        if self.len() > pos {
            out.push(Sector {
                kind: SectorKind::Stable,
                start: pos,
                end: self.len(),
            });
        }
        out
    }
}

pub fn compose_abrupt<S: ConceptSource>(
    concepts: &[S],
    spec: &DriftSpec,
    rng: &SeededRng,
) -> Result<SynthesizedStream, DriftError> {
    expect_kind(spec, DriftKind::Abrupt)?;
    compose(concepts, spec, rng, |_, _| Ok(()))
}

/// Pools the last `n` rows of each concept with the first `n` of the next
/// and shuffles the pool into a mixed drifting period.
pub fn compose_gradual<S: ConceptSource>(
    concepts: &[S],
    spec: &DriftSpec,
    rng: &SeededRng,
) -> Result<SynthesizedStream, DriftError> {
    expect_kind(spec, DriftKind::Gradual)?;
    let root = rng.clone();
    compose(concepts, spec, rng, |pool, junction| {
        pool.shuffle(&mut root.substream(&format!("mix-{junction}")));
        Ok(())
    })
}

/// Incremental drift with the drifting feature removed from the output.
pub fn compose_incremental<S: ConceptSource>(
    concepts: &[S],
    spec: &DriftSpec,
    rng: &SeededRng,
    drifting_feature: &str,
) -> Result<SynthesizedStream, DriftError> {
    let mut out = compose_incremental_with_feature(concepts, spec, rng, drifting_feature)?;
    let f = out
        .schema
        .feature_index(drifting_feature)
        .expect("validated by composer");
    out.schema = out.schema.without_feature(f);
    for inst in &mut out.instances {
        inst.features.remove(f);
    }
    Ok(out)
}

/// Incremental drift, keeping the drifting feature so the ordered transition
/// can be inspected or plotted.
///
/// Each pooled period is sorted by the drifting feature, ascending when the
/// incoming side of the pool has the larger mean and descending otherwise.
pub fn compose_incremental_with_feature<S: ConceptSource>(
    concepts: &[S],
    spec: &DriftSpec,
    rng: &SeededRng,
    drifting_feature: &str,
) -> Result<SynthesizedStream, DriftError> {
    expect_kind(spec, DriftKind::Incremental)?;
    let schema = concepts
        .first()
        .ok_or(DriftError::TooFewConcepts(0))?
        .schema();
    let f = numeric_feature(schema, drifting_feature)?;
    let n = spec.half_width();
    let mut out = compose(concepts, spec, rng, |pool, _| {
        let (outgoing, incoming) = pool.split_at(n);
        let ascending = mean_of(incoming, f) > mean_of(outgoing, f);
        if ascending {
            pool.sort_by(|a, b| a.features[f].total_cmp(&b.features[f]));
        } else {
            pool.sort_by(|a, b| b.features[f].total_cmp(&a.features[f]));
        }
        Ok(())
    })?;
    out.drifting_feature = Some(drifting_feature.to_owned());
    Ok(out)
}

fn mean_of(rows: &[Instance], f: usize) -> f64 {
    rows.iter().map(|i| i.features[f]).sum::<f64>() / rows.len().max(1) as f64
}

fn expect_kind(spec: &DriftSpec, kind: DriftKind) -> Result<(), DriftError> {
    if spec.kind != kind {
        return Err(DriftError::WrongKind {
            expected: kind,
            found: spec.kind,
        });
    }
    Ok(())
}

/// Shared composition skeleton. Concept `i` always samples from the
/// sub-stream `concept-{i}` and the order from `order`, so the output does
/// not depend on sampling order.
fn compose<S, F>(
    concepts: &[S],
    spec: &DriftSpec,
    rng: &SeededRng,
    mut arrange: F,
) -> Result<SynthesizedStream, DriftError>
where
    S: ConceptSource,
    F: FnMut(&mut Vec<Instance>, usize) -> Result<(), DriftError>,
{
    if concepts.len() < 2 {
        return Err(DriftError::TooFewConcepts(concepts.len()));
    }
    if concepts.len() != spec.num_concepts {
        return Err(DriftError::ConceptCountMismatch {
            spec: spec.num_concepts,
            given: concepts.len(),
        });
    }
    spec.validate()?;
    let schema = concepts[0].schema().clone();
    if concepts.iter().any(|c| c.schema() != &schema) {
        return Err(DriftError::SchemaMismatch);
    }

    let mut order: Vec<usize> = (0..concepts.len()).collect();
    if spec.order == ConceptOrder::Random {
        order.shuffle(&mut rng.substream("order"));
    }

    let len = spec.concept_length;
    let mut samples: Vec<Vec<Instance>> = Vec::with_capacity(concepts.len());
    for (i, c) in concepts.iter().enumerate() {
        let rows = c.sample(len, &mut rng.substream(&format!("concept-{i}")))?;
        if rows.len() != len {
            return Err(DriftError::Exhausted {
                requested: len,
                available: rows.len(),
            });
        }
        samples.push(rows);
    }

    let n = spec.half_width();
    let k = order.len();
    let mut instances = Vec::with_capacity(spec.total_length());
    let mut boundaries = Vec::with_capacity(k - 1);
    for (pos, &ci) in order.iter().enumerate() {
        let head = if pos == 0 { 0 } else { n };
        let tail = if pos + 1 == k { len } else { len - n };
        instances.extend_from_slice(&samples[ci][head..tail]);
        if pos + 1 < k {
            let next = order[pos + 1];
            let mut pool: Vec<Instance> = Vec::with_capacity(2 * n);
            pool.extend_from_slice(&samples[ci][len - n..]);
            pool.extend_from_slice(&samples[next][..n]);
            arrange(&mut pool, pos)?;
            let start = instances.len();
            instances.extend(pool);
            boundaries.push((start, instances.len()));
        }
    }
    debug_assert_eq!(instances.len(), spec.total_length());

    Ok(SynthesizedStream {
        schema,
        instances,
        boundaries,
        drifting_feature: None,
        concept_order: order,
    })
}
