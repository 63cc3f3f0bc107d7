use super::forest::{ForestConfig, OnlineBaggingForest};
use super::{Regressor, StateHasher};
use crate::stream::ColumnKind;

/// Self-optimising k-nearest-leaves regression on top of an online-bagging
/// forest.
///
/// Each member routes `x` to one leaf. Leaves that have seen data are ranked
/// by Euclidean distance from `x` to their centroid and the target means of
/// the `k` closest are averaged. Every `k` in `1..=k_max` is scored on each
/// instance before training; the `k` with the lowest cumulative squared error
/// is used (ties to the smaller `k`).
#[derive(Debug, Clone)]
pub struct Soknl {
    forest: OnlineBaggingForest,
    k_max: usize,
    errors: Vec<f64>,
    k: usize,
}

impl Soknl {
    /// `k_max` defaults to the ensemble size.
    pub fn new(config: ForestConfig, kinds: Vec<ColumnKind>, k_max: Option<usize>) -> Self {
        let k_max = k_max.unwrap_or(config.ensemble_size).max(1);
        Self {
            forest: OnlineBaggingForest::new(config, kinds),
            k_max,
            errors: vec![0.0; k_max],
            k: 1,
        }
    }

    pub fn numeric(config: ForestConfig, num_features: usize) -> Self {
        Self::new(config, vec![ColumnKind::Numeric; num_features], None)
    }

    pub fn forest(&self) -> &OnlineBaggingForest {
        &self.forest
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Currently selected `k`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Cumulative squared error per `k`, index 0 holding `k = 1`.
    pub fn cumulative_errors(&self) -> &[f64] {
        &self.errors
    }

    /// `(squared distance, leaf mean)` of every non-empty routed leaf,
    /// nearest first, member order breaking ties.
    fn ranked_leaves(&self, x: &[f64]) -> Vec<(f64, f64)> {
        let mut leaves: Vec<(f64, f64)> = self
            .forest
            .members()
            .map(|t| t.leaf(x))
            .filter(|l| l.weight > 0.0)
            .map(|l| {
                let d2 = l
                    .centroid
                    .iter()
                    .zip(x)
                    .map(|(c, v)| (c - v) * (c - v))
                    .sum::<f64>();
                (d2, l.mean)
            })
            .collect();
        // stable: equal distances keep member order
        leaves.sort_by(|a, b| a.0.total_cmp(&b.0));
        leaves
    }
}

/// Mean of the first `min(k, len)` leaf means of a nearest-first ranking;
/// 0.0 when empty.
pub fn nearest_leaf_average(ranked: &[(f64, f64)], k: usize) -> f64 {
    let k = k.min(ranked.len());
    if k == 0 {
        return 0.0;
    }
    ranked[..k].iter().map(|l| l.1).sum::<f64>() / k as f64
}

impl Regressor for Soknl {
    fn predict(&self, x: &[f64]) -> f64 {
        nearest_leaf_average(&self.ranked_leaves(x), self.k)
    }

    fn learn(&mut self, x: &[f64], y: f64) {
        let ranked = self.ranked_leaves(x);
        let mut sum = 0.0;
        for k in 1..=self.k_max {
            let used = k.min(ranked.len());
            if k <= ranked.len() {
                sum += ranked[k - 1].1;
            }
            let pred = if used == 0 { 0.0 } else { sum / used as f64 };
            self.errors[k - 1] += (y - pred) * (y - pred);
        }
        // first minimum wins
        self.k = 1 + self.errors.iter().enumerate().fold(0, |best, (i, e)| {
            if *e < self.errors[best] {
                i
            } else {
                best
            }
        });
        self.forest.learn(x, y);
    }

    fn state_hash(&self) -> u64 {
        let mut h = StateHasher::default();
        h.u64(self.forest.state_hash());
        h.slice(&self.errors);
        h.usize(self.k);
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{FimtTree, TreeConfig};
    use crate::stream::SeededRng;
    use rand::Rng;

    #[test]
    fn k_nearest_leaf_means() {
        let ranked = [(1.0, 10.0), (4.0, 20.0), (9.0, 30.0)];
        assert_eq!(nearest_leaf_average(&ranked, 2), 15.0);
        assert_eq!(nearest_leaf_average(&ranked, 7), 20.0);
        assert_eq!(nearest_leaf_average(&[], 3), 0.0);
    }

    #[test]
    fn cold_start_is_zero() {
        let m = Soknl::numeric(ForestConfig::default(), 3);
        assert_eq!(m.predict(&[0.1, 0.2, 0.3]), 0.0);
    }

    #[test]
    fn single_member_k1_is_leaf_mean() {
        let tree = TreeConfig {
            drift_detection: None,
            ..TreeConfig::default()
        };
        let cfg = ForestConfig {
            ensemble_size: 1,
            lambda: None,
            tree,
            member_detection: None,
            seed: 0,
        };
        let mut m = Soknl::numeric(cfg, 1);
        let mut t = FimtTree::numeric(tree, 1);
        let mut rng = SeededRng::new(6);
        for _ in 0..3_000 {
            let x = [rng.random::<f64>()];
            let y = if x[0] > 0.5 { 4.0 } else { -1.0 };
            assert_eq!(m.k(), 1);
            let leaf = t.leaf(&x);
            let expected = if leaf.weight > 0.0 { leaf.mean } else { 0.0 };
            assert_eq!(m.predict(&x), expected);
            m.learn(&x, y);
            t.learn(&x, y);
        }
    }

    #[test]
    fn optimiser_picks_argmin() {
        let mut m = Soknl::numeric(
            ForestConfig {
                ensemble_size: 4,
                ..ForestConfig::default()
            },
            1,
        );
        let mut rng = SeededRng::new(7);
        for _ in 0..2_000 {
            let x = [rng.random::<f64>()];
            m.learn(&x, (6.0 * x[0]).sin());
        }
        let e = m.cumulative_errors();
        let min = e.iter().cloned().fold(f64::INFINITY, f64::min);
        let first = e.iter().position(|v| *v == min).unwrap();
        assert_eq!(m.k(), first + 1);
    }
}
