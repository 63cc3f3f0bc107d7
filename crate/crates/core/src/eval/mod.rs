//! Test-then-train evaluation with cumulative and prequential metrics.

mod metrics;
mod output;
mod state;

use std::borrow::Borrow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::IntervalModel;
use crate::learners::{Regressor, StateHasher};
use crate::stream::Instance;

pub use metrics::{adjusted_r2, coverage, nmpiw, r2, rmse, MetricError};
pub use output::{read_metrics_csv, write_summary, MetricsWriter, METRICS_HEADER};
pub use state::{MetricState, Mode};

/// Metric values after `index` instances. `None` marks a metric whose
/// preconditions do not hold (too few instances, constant labels, no
/// intervals).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub index: u64,
    pub rmse: Option<f64>,
    pub adj_r2: Option<f64>,
    pub coverage: Option<f64>,
    pub nmpiw: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Prequential window length.
    pub window: usize,
    /// Emit a prequential record every this many instances (and at the end).
    pub report_every: usize,
    /// Predictor count `p` for adjusted R².
    pub predictors: usize,
    /// Record a learner state hash every this many instances.
    pub hash_every: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(predictors: usize) -> Self {
        Self {
            window: 1000,
            report_every: 1000,
            predictors,
            hash_every: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub instances: u64,
    pub predictors: usize,
    pub cumulative: EvaluationRecord,
    /// Prequential values over the final window.
    pub prequential: EvaluationRecord,
    /// `(instances processed, state hash)` pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub state_hashes: Vec<(u64, u64)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("the stream is empty")]
    EmptyStream,
    #[error("prequential window and report interval must be positive")]
    ZeroWindow,
    #[error("instance {index} has {found} features, expected {expected}")]
    Arity {
        index: u64,
        expected: usize,
        found: usize,
    },
}

/// Runs predict → score → learn over `stream` in order.
///
/// For every instance the learner's prediction and, with `pi`, the interval
/// around it are scored into a cumulative and a prequential state before the
/// label reaches either model. `on_record` receives the prequential record
/// every `report_every` instances and after the last one.
pub fn run_experiment<I, R, F>(
    stream: I,
    learner: &mut R,
    mut pi: Option<&mut dyn IntervalModel>,
    config: &ExperimentConfig,
    mut on_record: F,
) -> Result<Summary, EvalError>
where
    I: IntoIterator,
    I::Item: Borrow<Instance>,
    R: Regressor + ?Sized,
    F: FnMut(&EvaluationRecord),
{
    if config.window == 0 || config.report_every == 0 {
        return Err(EvalError::ZeroWindow);
    }
    let mut cumulative = MetricState::cumulative(config.predictors);
    let mut prequential = MetricState::prequential(config.window, config.predictors);
    let mut hashes = Vec::new();
    let mut arity = None;
    let mut index = 0u64;
    for item in stream {
        let inst = item.borrow();
        let expected = *arity.get_or_insert(inst.features.len());
        if inst.features.len() != expected {
            return Err(EvalError::Arity {
                index,
                expected,
                found: inst.features.len(),
            });
        }
        let point = learner.predict(&inst.features);
        let interval = pi.as_deref().map(|m| m.interval(point));
        cumulative.record(inst.target, point, interval);
        prequential.record(inst.target, point, interval);
        if let Some(m) = pi.as_deref_mut() {
            m.update(point, inst.target);
        }
        learner.learn(&inst.features, inst.target);
        index += 1;
        if index % config.report_every as u64 == 0 {
            on_record(&prequential.snapshot());
        }
        if config
            .hash_every
            .is_some_and(|h| h > 0 && index % h as u64 == 0)
        {
            hashes.push((index, combined_hash(learner, pi.as_deref())));
        }
    }
    if index == 0 {
        return Err(EvalError::EmptyStream);
    }
    if index % config.report_every as u64 != 0 {
        on_record(&prequential.snapshot());
    }
    Ok(Summary {
        instances: index,
        predictors: config.predictors,
        cumulative: cumulative.snapshot(),
        prequential: prequential.snapshot(),
        state_hashes: hashes,
    })
}

fn combined_hash<R: Regressor + ?Sized>(learner: &R, pi: Option<&dyn IntervalModel>) -> u64 {
    let mut h = StateHasher::default();
    h.u64(learner.state_hash());
    if let Some(m) = pi {
        h.u64(m.state_hash());
    }
    h.finish()
}
