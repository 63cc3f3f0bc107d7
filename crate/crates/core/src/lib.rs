//! Streaming regression under synthetic concept drift.
//!
//! * [`stream`]: schemas, instances, CSV ingestion, seeded randomness.
//! * [`drift`]: drifting-feature selection and abrupt / gradual /
//!   incremental stream composition.
//! * [`learners`]: test-then-train regressors (sliding-window KNN, an
//!   incremental regression tree, an online-bagging forest, SOKNL).
//! * [`interval`]: MVE and AdaPI prediction intervals.
//! * [`eval`]: cumulative and prequential RMSE, adjusted R², coverage and
//!   NMPIW, plus the evaluation driver.

pub mod drift;
pub mod eval;
pub mod interval;
pub mod learners;
pub mod manifest;
pub mod stream;

pub use drift::{DriftKind, DriftSpec, SynthesizedStream};
pub use eval::{run_experiment, EvaluationRecord, MetricState, Summary};
pub use interval::{AdaPiModel, Interval, IntervalModel, MveModel};
pub use learners::{FimtTree, OnlineBaggingForest, Regressor, SlidingWindowKnn, Soknl};
pub use manifest::StreamManifest;
pub use stream::{Instance, Schema, SeededRng};
