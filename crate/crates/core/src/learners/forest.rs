use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::detector::{DriftDetector, PageHinkley, PageHinkleyConfig};
use super::tree::{FimtTree, TreeConfig};
use super::{Regressor, StateHasher};
use crate::stream::{ColumnKind, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub ensemble_size: usize,
    /// Poisson rate of the per-member instance weights. `None` pins every
    /// weight to 1.
    pub lambda: Option<f64>,
    pub tree: TreeConfig,
    /// Detector on each member's absolute error; an alarm replaces the member.
    pub member_detection: Option<PageHinkleyConfig>,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            ensemble_size: 30,
            lambda: Some(6.0),
            tree: TreeConfig {
                drift_detection: None,
                ..TreeConfig::default()
            },
            member_detection: Some(PageHinkleyConfig::default()),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
struct Member {
    tree: FimtTree,
    rng: SeededRng,
    detector: Option<PageHinkley>,
    resets: usize,
}

/// Online bagging over incremental regression trees.
///
/// Each member sees every instance with a weight drawn from Poisson(λ) on its
/// own random substream and is replaced by a fresh tree when its error
/// detector fires. The prediction is the unweighted member mean.
#[derive(Debug, Clone)]
pub struct OnlineBaggingForest {
    config: ForestConfig,
    kinds: Vec<ColumnKind>,
    poisson: Option<Poisson<f64>>,
    members: Vec<Member>,
}

impl OnlineBaggingForest {
    pub fn new(config: ForestConfig, kinds: Vec<ColumnKind>) -> Self {
        assert!(config.ensemble_size > 0, "ensemble size must be positive");
        let poisson = config
            .lambda
            .map(|l| Poisson::new(l).expect("Poisson rate must be positive and finite"));
        let root = SeededRng::new(config.seed);
        let members = (0..config.ensemble_size)
            .map(|i| Member {
                tree: FimtTree::new(config.tree, kinds.clone()),
                rng: root.substream(&format!("member-{i}")),
                detector: config.member_detection.map(PageHinkley::new),
                resets: 0,
            })
            .collect();
        Self {
            config,
            kinds,
            poisson,
            members,
        }
    }

    pub fn numeric(config: ForestConfig, num_features: usize) -> Self {
        Self::new(config, vec![ColumnKind::Numeric; num_features])
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn members(&self) -> impl ExactSizeIterator<Item = &FimtTree> + '_ {
        self.members.iter().map(|m| &m.tree)
    }

    /// Member replacements after detector alarms, summed over members.
    pub fn resets(&self) -> usize {
        self.members.iter().map(|m| m.resets).sum()
    }
}

impl Regressor for OnlineBaggingForest {
    fn predict(&self, x: &[f64]) -> f64 {
        self.members.iter().map(|m| m.tree.predict(x)).sum::<f64>() / self.members.len() as f64
    }

    fn learn(&mut self, x: &[f64], y: f64) {
        for m in &mut self.members {
            if let Some(d) = &mut m.detector {
                let err = (y - m.tree.predict(x)).abs();
                if d.update(err) {
                    m.tree = FimtTree::new(self.config.tree, self.kinds.clone());
                    m.resets += 1;
                }
            }
            let w = match &self.poisson {
                Some(p) => p.sample(&mut m.rng),
                None => 1.0,
            };
            m.tree.learn_weighted(x, y, w);
        }
    }

    fn state_hash(&self) -> u64 {
        let mut h = StateHasher::default();
        for m in &self.members {
            m.tree.hash_into(&mut h);
            h.usize(m.resets);
            if let Some(d) = &m.detector {
                d.hash_into(&mut h);
            }
        }
        h.finish()
    }
}
