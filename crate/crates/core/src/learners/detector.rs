use serde::{Deserialize, Serialize};

use super::StateHasher;

/// Change detector fed one non-negative error value per instance.
pub trait DriftDetector {
    /// Returns `true` when a change is signalled. The detector restarts
    /// itself after an alarm.
    fn update(&mut self, value: f64) -> bool;

    fn reset(&mut self);
}

/// Page–Hinkley thresholds, both relative to the running mean of the
/// monitored values (the mean absolute error for error streams).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageHinkleyConfig {
    /// Alarm threshold as a multiple of the running mean.
    pub lambda: f64,
    /// Tolerated drift magnitude as a multiple of the running mean.
    pub alpha: f64,
    /// No alarm before this many observations.
    pub min_instances: usize,
}

impl Default for PageHinkleyConfig {
    fn default() -> Self {
        Self {
            lambda: 50.0,
            alpha: 0.005,
            min_instances: 30,
        }
    }
}

/// Page–Hinkley test for an increase in the mean of the monitored values.
#[derive(Debug, Clone)]
pub struct PageHinkley {
    config: PageHinkleyConfig,
    n: usize,
    mean: f64,
    cumulative: f64,
    minimum: f64,
}

impl PageHinkley {
    pub fn new(config: PageHinkleyConfig) -> Self {
        Self {
            config,
            n: 0,
            mean: 0.0,
            cumulative: 0.0,
            minimum: 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Current test statistic `m_T - M_T`.
    pub fn statistic(&self) -> f64 {
        self.cumulative - self.minimum
    }

    pub(crate) fn hash_into(&self, h: &mut StateHasher) {
        h.usize(self.n);
        h.f64(self.mean);
        h.f64(self.cumulative);
        h.f64(self.minimum);
    }
}

impl DriftDetector for PageHinkley {
    fn update(&mut self, value: f64) -> bool {
        self.n += 1;
        self.mean += (value - self.mean) / self.n as f64;
        self.cumulative += value - self.mean * (1.0 + self.config.alpha);
        self.minimum = self.minimum.min(self.cumulative);
        let alarm = self.n >= self.config.min_instances
            && self.statistic() > self.config.lambda * self.mean;
        if alarm {
            self.reset();
        }
        alarm
    }

    fn reset(&mut self) {
        *self = Self::new(self.config);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::SeededRng;
    use rand::Rng;

    #[test]
    fn constant_errors_never_alarm() {
        let mut ph = PageHinkley::new(PageHinkleyConfig::default());
        assert!((0..10_000).all(|_| !ph.update(1.0)));
    }

    #[test]
    fn detects_jump_in_mean() {
        let mut ph = PageHinkley::new(PageHinkleyConfig::default());
        let mut rng = SeededRng::new(4);
        for _ in 0..5_000 {
            assert!(!ph.update(rng.random_range(0.9..1.1)));
        }
        let delay = (0..1_000).position(|_| ph.update(rng.random_range(4.5..5.5)));
        assert!(matches!(delay, Some(d) if d < 100), "{delay:?}");
    }
}
