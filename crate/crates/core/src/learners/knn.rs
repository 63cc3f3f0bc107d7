use super::{Regressor, StateHasher};
use crate::stream::ColumnKind;

/// k-nearest-neighbour regression over a FIFO window of recent instances.
///
/// Numeric features are range-normalized with the running min/max of every
/// learned instance; categorical features contribute 0 on a match and 1 on a
/// mismatch. Raw values are stored so normalization always uses the current
/// ranges. Equal distances are broken in favour of the older entry.
#[derive(Debug, Clone)]
pub struct SlidingWindowKnn {
    k: usize,
    capacity: usize,
    kinds: Vec<ColumnKind>,
    // ring buffer, `capacity * d` values
    features: Vec<f64>,
    targets: Vec<f64>,
    head: usize,
    len: usize,
    min: Vec<f64>,
    max: Vec<f64>,
}

impl SlidingWindowKnn {
    pub fn new(k: usize, capacity: usize, kinds: Vec<ColumnKind>) -> Self {
        assert!(
            k > 0 && capacity > 0,
            "k and window capacity must be positive"
        );
        let d = kinds.len();
        Self {
            k,
            capacity,
            features: Vec::with_capacity(capacity * d),
            targets: Vec::with_capacity(capacity),
            head: 0,
            len: 0,
            min: vec![f64::INFINITY; d],
            max: vec![f64::NEG_INFINITY; d],
            kinds,
        }
    }

    pub fn numeric(k: usize, capacity: usize, num_features: usize) -> Self {
        Self::new(k, capacity, vec![ColumnKind::Numeric; num_features])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Window entries from oldest to newest.
    pub fn window(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        (0..self.len).map(move |p| {
            let slot = self.slot(p);
            (self.row(slot), self.targets[slot])
        })
    }

    /// Running `(min, max)` per feature over all learned instances.
    pub fn ranges(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.min.iter().copied().zip(self.max.iter().copied())
    }

    fn slot(&self, logical: usize) -> usize {
        (self.head + logical) % self.capacity
    }

    fn row(&self, slot: usize) -> &[f64] {
        let d = self.kinds.len();
        &self.features[slot * d..(slot + 1) * d]
    }

    /// Squared normalized distance between `x` and a stored row.
    fn distance(&self, x: &[f64], row: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (j, kind) in self.kinds.iter().enumerate() {
            match kind {
                ColumnKind::Numeric => {
                    let range = self.max[j] - self.min[j];
                    if range > 0.0 {
                        let diff = (x[j] - row[j]) / range;
                        acc += diff * diff;
                    }
                }
                ColumnKind::Categorical => {
                    if x[j] != row[j] {
                        acc += 1.0;
                    }
                }
            }
        }
        acc
    }
}

impl Regressor for SlidingWindowKnn {
    fn predict(&self, x: &[f64]) -> f64 {
        if self.len == 0 {
            return 0.0;
        }
        let mut scored: Vec<(f64, usize)> = (0..self.len)
            .map(|p| (self.distance(x, self.row(self.slot(p))), p))
            .collect();
        let k = self.k.min(self.len);
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
        }
        scored.sort_unstable_by(cmp);
        scored
            .iter()
            .map(|&(_, p)| self.targets[self.slot(p)])
            .sum::<f64>()
            / k as f64
    }

    fn learn(&mut self, x: &[f64], y: f64) {
        debug_assert_eq!(x.len(), self.kinds.len());
        for (j, kind) in self.kinds.iter().enumerate() {
            if *kind == ColumnKind::Numeric {
                self.min[j] = self.min[j].min(x[j]);
                self.max[j] = self.max[j].max(x[j]);
            }
        }
        let d = self.kinds.len();
        if self.len < self.capacity {
            self.features.extend_from_slice(x);
            self.targets.push(y);
            self.len += 1;
        } else {
            // overwrite the oldest entry
            let slot = self.head;
            self.features[slot * d..(slot + 1) * d].copy_from_slice(x);
            self.targets[slot] = y;
            self.head = (self.head + 1) % self.capacity;
        }
    }

    fn state_hash(&self) -> u64 {
        let mut h = StateHasher::default();
        h.usize(self.k);
        h.usize(self.capacity);
        for (row, y) in self.window() {
            h.slice(row);
            h.f64(y);
        }
        h.slice(&self.min);
        h.slice(&self.max);
        h.finish()
    }
}
