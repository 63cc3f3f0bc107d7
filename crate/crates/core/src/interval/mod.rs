//! Symmetric prediction intervals around a point forecast.
//!
//! Interval models are fed the base learner's point prediction, so they wrap
//! any [`Regressor`](crate::Regressor) without owning it. The driver asks for
//! the interval before the label is revealed and calls `update` afterwards.

mod normal;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::learners::StateHasher;

pub use normal::{inverse_normal_cdf, normal_cdf};

#[derive(Debug, Error, PartialEq)]
pub enum IntervalError {
    #[error("probability {0} is outside (0, 1)")]
    Probability(f64),
    #[error("confidence {0} is outside (0, 1)")]
    Confidence(f64),
    #[error("AdaPI floor must be positive, got {0}")]
    Floor(f64),
    #[error("AdaPI rate must be non-negative, got {0}")]
    Rate(f64),
}

/// Closed interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "interval [{lower}, {upper}] is reversed");
        Self { lower, upper }
    }

    pub fn centered(center: f64, half_width: f64) -> Self {
        Self::new(center - half_width, center + half_width)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Bounds are inclusive.
    pub fn contains(&self, y: f64) -> bool {
        self.lower <= y && y <= self.upper
    }
}

/// Produces an interval around a point prediction and learns from the
/// realised label.
pub trait IntervalModel {
    fn interval(&self, point: f64) -> Interval;

    /// Called once per instance, after scoring, with the same `point` that
    /// was passed to [`interval`](Self::interval).
    fn update(&mut self, point: f64, y: f64);

    fn state_hash(&self) -> u64;
}

impl<M: IntervalModel + ?Sized> IntervalModel for Box<M> {
    fn interval(&self, point: f64) -> Interval {
        (**self).interval(point)
    }

    fn update(&mut self, point: f64, y: f64) {
        (**self).update(point, y)
    }

    fn state_hash(&self) -> u64 {
        (**self).state_hash()
    }
}

/// Welford accumulator of signed prediction errors `y − ŷ`.
#[derive(Debug, Clone, Copy, Default)]
struct ErrorMoments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl ErrorMoments {
    fn add(&mut self, e: f64) {
        self.n += 1;
        let delta = e - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (e - self.mean);
    }

    /// Sample standard deviation; 0 with fewer than two errors.
    fn sd(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2.max(0.0) / (self.n - 1) as f64).sqrt()
        }
    }

    fn hash_into(&self, h: &mut StateHasher) {
        h.u64(self.n);
        h.f64(self.mean);
        h.f64(self.m2);
    }
}

/// Mean-and-variance estimation: `ŷ ± z·σ̂` with `z = Φ⁻¹((1 + c) / 2)` and
/// σ̂ the sample standard deviation of all past errors.
#[derive(Debug, Clone)]
pub struct MveModel {
    confidence: f64,
    z: f64,
    errors: ErrorMoments,
}

impl MveModel {
    pub fn new(confidence: f64) -> Result<Self, IntervalError> {
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(IntervalError::Confidence(confidence));
        }
        Ok(Self {
            confidence,
            z: inverse_normal_cdf((1.0 + confidence) / 2.0)?,
            errors: ErrorMoments::default(),
        })
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn sigma(&self) -> f64 {
        self.errors.sd()
    }

    pub fn half_width(&self) -> f64 {
        self.z * self.sigma()
    }
}

impl IntervalModel for MveModel {
    fn interval(&self, point: f64) -> Interval {
        Interval::centered(point, self.half_width())
    }

    fn update(&mut self, point: f64, y: f64) {
        self.errors.add(y - point);
    }

    fn state_hash(&self) -> u64 {
        let mut h = StateHasher::default();
        h.f64(self.confidence);
        self.errors.hash_into(&mut h);
        h.finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaPiConfig {
    pub confidence: f64,
    /// Lower limit of the scale.
    pub floor: f64,
    /// η of the multiplicative scale update.
    pub rate: f64,
    /// Decay of the exponentially weighted coverage estimate.
    pub coverage_decay: f64,
}

impl Default for AdaPiConfig {
    fn default() -> Self {
        Self {
            confidence: 0.95,
            floor: 0.01,
            rate: 0.02,
            coverage_decay: 0.999,
        }
    }
}

/// Adaptive prediction interval: the MVE interval times a scale that tracks
/// the gap between the target confidence and recent coverage.
///
/// On each label, `ĉ ← d·ĉ + (1 − d)·[y ∈ interval]` (starting at `c`) and
/// `scale ← max(floor, scale·(1 + η(c − ĉ)))`, so under-coverage widens and
/// over-coverage narrows the interval.
#[derive(Debug, Clone)]
pub struct AdaPiModel {
    config: AdaPiConfig,
    mve: MveModel,
    scale: f64,
    coverage: f64,
}

impl AdaPiModel {
    pub fn new(config: AdaPiConfig) -> Result<Self, IntervalError> {
        if config.floor.is_nan() || config.floor <= 0.0 {
            return Err(IntervalError::Floor(config.floor));
        }
        if config.rate.is_nan() || config.rate < 0.0 {
            return Err(IntervalError::Rate(config.rate));
        }
        Ok(Self {
            mve: MveModel::new(config.confidence)?,
            scale: 1.0_f64.max(config.floor),
            coverage: config.confidence,
            config,
        })
    }

    pub fn config(&self) -> &AdaPiConfig {
        &self.config
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Exponentially weighted coverage estimate ĉ.
    pub fn running_coverage(&self) -> f64 {
        self.coverage
    }

    pub fn sigma(&self) -> f64 {
        self.mve.sigma()
    }

    pub(crate) fn apply_coverage(&mut self, inside: bool) {
        let d = self.config.coverage_decay;
        self.coverage = d * self.coverage + (1.0 - d) * if inside { 1.0 } else { 0.0 };
        self.rescale();
    }

    fn rescale(&mut self) {
        let gap = self.config.confidence - self.coverage;
        self.scale = (self.scale * (1.0 + self.config.rate * gap)).max(self.config.floor);
    }
}

impl IntervalModel for AdaPiModel {
    fn interval(&self, point: f64) -> Interval {
        Interval::centered(point, self.scale * self.mve.half_width())
    }

    fn update(&mut self, point: f64, y: f64) {
        let inside = self.interval(point).contains(y);
        self.apply_coverage(inside);
        self.mve.update(point, y);
    }

    fn state_hash(&self) -> u64 {
        let mut h = StateHasher::default();
        h.u64(self.mve.state_hash());
        h.f64(self.scale);
        h.f64(self.coverage);
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_is_degenerate() {
        let mut m = MveModel::new(0.95).unwrap();
        assert_eq!(m.interval(3.0), Interval::new(3.0, 3.0));
        m.update(0.0, 1.0);
        assert_eq!(m.interval(3.0), Interval::new(3.0, 3.0));
    }

    #[test]
    fn half_width_for_sigma_two() {
        let mut m = MveModel::new(0.95).unwrap();
        // errors {2, −2, 0}: sample sd = 2
        m.update(0.0, 2.0);
        m.update(0.0, -2.0);
        m.update(0.0, 0.0);
        assert!((m.sigma() - 2.0).abs() < 1e-15);
        assert!((m.half_width() - 3.919_928).abs() < 1e-6);
    }

    #[test]
    fn alternating_unit_errors() {
        let mut m = MveModel::new(0.9).unwrap();
        for i in 0..10_000 {
            m.update(0.0, if i % 2 == 0 { -1.0 } else { 1.0 });
        }
        assert!((m.sigma() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn width_grows_with_confidence() {
        let mut widths = Vec::new();
        for c in [0.5, 0.8, 0.9, 0.95, 0.99] {
            let mut m = MveModel::new(c).unwrap();
            m.update(0.0, 1.0);
            m.update(0.0, -1.0);
            widths.push(m.interval(0.0).width());
        }
        assert!(widths.windows(2).all(|w| w[0] < w[1]), "{widths:?}");
    }

    #[test]
    fn rejects_bad_confidence() {
        assert!(MveModel::new(1.0).is_err());
        assert!(MveModel::new(0.0).is_err());
        assert!(AdaPiModel::new(AdaPiConfig {
            floor: 0.0,
            ..AdaPiConfig::default()
        })
        .is_err());
    }

    #[test]
    fn coverage_at_target_keeps_scale() {
        let mut m = AdaPiModel::new(AdaPiConfig::default()).unwrap();
        m.scale = 1.7;
        m.coverage = m.config.confidence;
        m.rescale();
        assert_eq!(m.scale(), 1.7);
    }

    #[test]
    fn sustained_misses_widen() {
        let mut m = AdaPiModel::new(AdaPiConfig::default()).unwrap();
        let mut prev = m.scale();
        for _ in 0..200 {
            m.apply_coverage(false);
            assert!(m.scale() > prev);
            prev = m.scale();
        }
    }

    #[test]
    fn scale_is_floored() {
        let mut m = AdaPiModel::new(AdaPiConfig {
            rate: 50.0,
            ..AdaPiConfig::default()
        })
        .unwrap();
        for _ in 0..1_000 {
            m.apply_coverage(true);
            assert!(m.scale() >= 0.01);
        }
        assert_eq!(m.scale(), 0.01);
    }
}
