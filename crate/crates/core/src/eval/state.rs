use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::metrics::adjust;
use super::EvaluationRecord;
use crate::interval::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every instance since the start of the stream.
    Cumulative,
    /// The most recent `n` instances.
    Prequential(usize),
}

#[derive(Debug, Clone, Copy)]
struct Scored {
    y: f64,
    prediction: f64,
    interval: Option<Interval>,
}

/// Streaming accumulator for RMSE, adjusted R², coverage and NMPIW.
///
/// Cumulative mode keeps O(1) running sums. Prequential mode keeps the last
/// `n` scored instances and evaluates them in two passes on demand. The
/// label range used by NMPIW covers every label seen, in both modes.
#[derive(Debug, Clone)]
pub struct MetricState {
    mode: Mode,
    predictors: usize,
    seen: u64,
    min_y: f64,
    max_y: f64,
    // cumulative
    sse: f64,
    y_mean: f64,
    y_m2: f64,
    with_interval: u64,
    inside: u64,
    width_sum: f64,
    // prequential
    window: VecDeque<Scored>,
}

impl MetricState {
    /// `predictors` is the `p` of adjusted R².
    pub fn new(mode: Mode, predictors: usize) -> Self {
        if let Mode::Prequential(n) = mode {
            assert!(n > 0, "prequential window must be positive");
        }
        let capacity = match mode {
            Mode::Prequential(n) => n,
            Mode::Cumulative => 0,
        };
        Self {
            mode,
            predictors,
            seen: 0,
            min_y: f64::INFINITY,
            max_y: f64::NEG_INFINITY,
            sse: 0.0,
            y_mean: 0.0,
            y_m2: 0.0,
            with_interval: 0,
            inside: 0,
            width_sum: 0.0,
            window: VecDeque::with_capacity(capacity),
        }
    }

    pub fn cumulative(predictors: usize) -> Self {
        Self::new(Mode::Cumulative, predictors)
    }

    pub fn prequential(window: usize, predictors: usize) -> Self {
        Self::new(Mode::Prequential(window), predictors)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Instances scored since the start of the stream.
    pub fn seen(&self) -> u64 {
        self.seen
    }

    /// Instances the metrics currently cover.
    pub fn len(&self) -> usize {
        match self.mode {
            Mode::Cumulative => self.seen as usize,
            Mode::Prequential(_) => self.window.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Running `max(y) − min(y)` over all labels.
    pub fn label_range(&self) -> Option<f64> {
        (self.seen > 0).then_some(self.max_y - self.min_y)
    }

    pub fn record(&mut self, y: f64, prediction: f64, interval: Option<Interval>) {
        self.seen += 1;
        self.min_y = self.min_y.min(y);
        self.max_y = self.max_y.max(y);
        match self.mode {
            Mode::Cumulative => {
                let e = y - prediction;
                self.sse += e * e;
                let delta = y - self.y_mean;
                self.y_mean += delta / self.seen as f64;
                self.y_m2 += delta * (y - self.y_mean);
                if let Some(i) = interval {
                    self.with_interval += 1;
                    self.inside += u64::from(i.contains(y));
                    self.width_sum += i.width();
                }
            }
            Mode::Prequential(n) => {
                if self.window.len() == n {
                    self.window.pop_front();
                }
                self.window.push_back(Scored {
                    y,
                    prediction,
                    interval,
                });
            }
        }
    }

    pub fn rmse(&self) -> Option<f64> {
        let n = self.len();
        if n == 0 {
            return None;
        }
        let sse = match self.mode {
            Mode::Cumulative => self.sse,
            Mode::Prequential(_) => self
                .window
                .iter()
                .map(|s| (s.y - s.prediction) * (s.y - s.prediction))
                .sum(),
        };
        Some((sse / n as f64).sqrt())
    }

    pub fn adjusted_r2(&self) -> Option<f64> {
        let n = self.len();
        if n < self.predictors + 2 {
            return None;
        }
        let (sse, sst) = match self.mode {
            Mode::Cumulative => (self.sse, self.y_m2),
            Mode::Prequential(_) => {
                let mean = self.window.iter().map(|s| s.y).sum::<f64>() / n as f64;
                self.window.iter().fold((0.0, 0.0), |(sse, sst), s| {
                    let e = s.y - s.prediction;
                    (sse + e * e, sst + (s.y - mean) * (s.y - mean))
                })
            }
        };
        if sst.is_nan() || sst <= 0.0 {
            return None;
        }
        Some(adjust(1.0 - sse / sst, n, self.predictors))
    }

    pub fn coverage(&self) -> Option<f64> {
        let (with, inside) = match self.mode {
            Mode::Cumulative => (self.with_interval, self.inside),
            Mode::Prequential(_) => self
                .window
                .iter()
                .fold((0, 0), |(w, c), s| match s.interval {
                    Some(i) => (w + 1, c + u64::from(i.contains(s.y))),
                    None => (w, c),
                }),
        };
        (with > 0).then(|| inside as f64 / with as f64)
    }

    pub fn nmpiw(&self) -> Option<f64> {
        let range = self.label_range()?;
        if range.is_nan() || range <= 0.0 {
            return None;
        }
        let (with, width_sum) =
            match self.mode {
                Mode::Cumulative => (self.with_interval, self.width_sum),
                Mode::Prequential(_) => self.window.iter().fold((0u64, 0.0), |(w, s), sc| match sc
                    .interval
                {
                    Some(i) => (w + 1, s + i.width()),
                    None => (w, s),
                }),
            };
        (with > 0).then(|| width_sum / with as f64 / range)
    }

    pub fn snapshot(&self) -> EvaluationRecord {
        EvaluationRecord {
            index: self.seen,
            rmse: self.rmse(),
            adj_r2: self.adjusted_r2(),
            coverage: self.coverage(),
            nmpiw: self.nmpiw(),
        }
    }
}
