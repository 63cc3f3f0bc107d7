//! Streaming regressors sharing the test-then-train contract.

mod detector;
mod forest;
mod knn;
mod soknl;
mod tree;

pub use detector::{DriftDetector, PageHinkley, PageHinkleyConfig};
pub use forest::{ForestConfig, OnlineBaggingForest};
pub use knn::SlidingWindowKnn;
pub use soknl::{nearest_leaf_average, Soknl};
pub use tree::{hoeffding_bound, FimtTree, LeafInfo, SplitCandidate, TreeConfig};

/// A single-pass regressor: `predict` each instance, then `learn` its label.
///
/// `predict` never changes state. Before the first `learn` every learner
/// predicts `0.0`.
pub trait Regressor {
    fn predict(&self, x: &[f64]) -> f64;

    fn learn(&mut self, x: &[f64], y: f64);

    /// Hash of the full learner state, used to check determinism.
    fn state_hash(&self) -> u64;
}

impl<R: Regressor + ?Sized> Regressor for Box<R> {
    fn predict(&self, x: &[f64]) -> f64 {
        (**self).predict(x)
    }

    fn learn(&mut self, x: &[f64], y: f64) {
        (**self).learn(x, y)
    }

    fn state_hash(&self) -> u64 {
        (**self).state_hash()
    }
}

/// FNV-1a over 64-bit words. Stable across runs and platforms.
#[derive(Debug, Clone)]
pub struct StateHasher(u64);

impl Default for StateHasher {
    fn default() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }
}

impl StateHasher {
    pub fn u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn f64(&mut self, v: f64) {
        self.u64(v.to_bits())
    }

    pub fn usize(&mut self, v: usize) {
        self.u64(v as u64)
    }

    pub fn slice(&mut self, v: &[f64]) {
        self.usize(v.len());
        for x in v {
            self.f64(*x);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}
