//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use driftbench::interval::Interval;
use driftbench::stream::{read_csv, ColumnKind, LoadedStream, SchemaHints};
use driftbench::{Instance, Regressor, SeededRng};
use rand::Rng;

/// `|a − b| ≤ tol · max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

pub fn close_opt(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => close(a, b, tol),
        (None, None) => true,
        _ => false,
    }
}

// ---- two-pass metric oracles -------------------------------------------

pub fn oracle_rmse(ys: &[f64], preds: &[f64]) -> f64 {
    let n = ys.len() as f64;
    (ys.iter()
        .zip(preds)
        .map(|(y, p)| (y - p).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
}

pub fn oracle_adj_r2(ys: &[f64], preds: &[f64], p: usize) -> Option<f64> {
    let n = ys.len();
    if n < p + 2 {
        return None;
    }
    let mean = ys.iter().sum::<f64>() / n as f64;
    let sst: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    if sst == 0.0 {
        return None;
    }
    let sse: f64 = ys.iter().zip(preds).map(|(y, q)| (y - q).powi(2)).sum();
    let r2 = 1.0 - sse / sst;
    Some(1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - p as f64 - 1.0))
}

pub fn oracle_coverage(ys: &[f64], ivs: &[Interval]) -> f64 {
    let inside = ys
        .iter()
        .zip(ivs)
        .filter(|(y, i)| i.lower <= **y && **y <= i.upper)
        .count();
    inside as f64 / ys.len() as f64
}

pub fn oracle_nmpiw(ivs: &[Interval], range: f64) -> Option<f64> {
    if range <= 0.0 {
        return None;
    }
    Some(ivs.iter().map(|i| i.upper - i.lower).sum::<f64>() / ivs.len() as f64 / range)
}

// ---- brute-force nearest neighbours ---------------------------------------

/// Exhaustive k-NN over a FIFO window, normalizing with min/max over every
/// point ever learned. Ties prefer the older point.
pub struct BruteKnn {
    k: usize,
    cap: usize,
    kinds: Vec<ColumnKind>,
    all: Vec<(Vec<f64>, f64)>,
}

impl BruteKnn {
    pub fn new(k: usize, cap: usize, kinds: Vec<ColumnKind>) -> Self {
        Self {
            k,
            cap,
            kinds,
            all: Vec::new(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let start = self.all.len().saturating_sub(self.cap);
        let window = &self.all[start..];
        if window.is_empty() {
            return 0.0;
        }
        let d = self.kinds.len();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for (row, _) in &self.all {
            for j in 0..d {
                lo[j] = lo[j].min(row[j]);
                hi[j] = hi[j].max(row[j]);
            }
        }
        let mut scored: Vec<(f64, usize, f64)> = window
            .iter()
            .enumerate()
            .map(|(age, (row, y))| {
                let mut dist = 0.0;
                for j in 0..d {
                    dist += match self.kinds[j] {
                        ColumnKind::Categorical => f64::from(u8::from(row[j] != x[j])),
                        ColumnKind::Numeric if hi[j] > lo[j] => {
                            ((row[j] - x[j]) / (hi[j] - lo[j])).powi(2)
                        }
                        ColumnKind::Numeric => 0.0,
                    };
                }
                (dist, age, *y)
            })
            .collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let k = self.k.min(scored.len());
        scored[..k].iter().map(|s| s.2).sum::<f64>() / k as f64
    }

    pub fn learn(&mut self, x: &[f64], y: f64) {
        self.all.push((x.to_vec(), y));
    }
}

// ---- stream fixtures ------------------------------------------------------

/// `n` instances with `d` uniform features and `y = Σ w_j x_j + noise`.
pub fn linear_stream(seed: u64, n: usize, d: usize, noise: f64) -> Vec<Instance> {
    let mut rng = SeededRng::new(seed);
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let y = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>()
                + noise * rng.random_range(-1.0..1.0);
            Instance::new(x, y)
        })
        .collect()
}

// ---- learner test hooks ---------------------------------------------------

/// Learns only the first `learn_limit` instances, then stays fixed.
pub struct Frozen<R> {
    pub inner: R,
    pub learn_limit: usize,
    seen: usize,
}

impl<R> Frozen<R> {
    pub fn new(inner: R, learn_limit: usize) -> Self {
        Self {
            inner,
            learn_limit,
            seen: 0,
        }
    }
}

impl<R: Regressor> Regressor for Frozen<R> {
    fn predict(&self, x: &[f64]) -> f64 {
        self.inner.predict(x)
    }

    fn learn(&mut self, x: &[f64], y: f64) {
        if self.seen < self.learn_limit {
            self.inner.learn(x, y);
        }
        self.seen += 1;
    }

    fn state_hash(&self) -> u64 {
        self.inner.state_hash() ^ self.seen as u64
    }
}

/// Predicts the label it will be shown next: knows the label sequence in
/// advance and advances on `learn`.
pub struct Clairvoyant {
    labels: Vec<f64>,
    next: usize,
}

impl Clairvoyant {
    pub fn new(labels: Vec<f64>) -> Self {
        Self { labels, next: 0 }
    }
}

impl Regressor for Clairvoyant {
    fn predict(&self, _x: &[f64]) -> f64 {
        self.labels[self.next]
    }

    fn learn(&mut self, _x: &[f64], _y: f64) {
        self.next += 1;
    }

    fn state_hash(&self) -> u64 {
        self.next as u64
    }
}

// ---- Abalone --------------------------------------------------------------

const ABALONE_COLUMNS: &str =
    "Sex,Length,Diameter,Height,Whole_weight,Shucked_weight,Viscera_weight,Shell_weight,Rings";

/// Loads Abalone from `$ABALONE_CSV` or `tests/data/abalone.csv`. Accepts
/// the raw header-less UCI `abalone.data` layout as well as a CSV whose
/// header names the `Rings` target.
pub fn load_abalone() -> Result<LoadedStream, String> {
    let path = std::env::var_os("ABALONE_CSV")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/abalone.csv")
        });
    let text = std::fs::read_to_string(&path).map_err(|e| {
        format!(
            "Abalone dataset not found at {} ({e}); set ABALONE_CSV to the UCI abalone.data file",
            path.display()
        )
    })?;
    let first = text.lines().next().unwrap_or("");
    let body =
        if first.starts_with(['M', 'F', 'I']) && first.contains(',') && !first.contains("Sex") {
            format!("{ABALONE_COLUMNS}\n{text}")
        } else {
            text
        };
    let target = body
        .lines()
        .next()
        .and_then(|h| {
            h.split(',')
                .find(|c| c.trim().eq_ignore_ascii_case("rings"))
        })
        .map(|s| s.trim().to_owned())
        .ok_or("Abalone header has no Rings column")?;
    read_csv(body.as_bytes(), &target, &SchemaHints::default()).map_err(|e| e.to_string())
}
