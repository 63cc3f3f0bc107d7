use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::DriftError;
use crate::stream::{ColumnKind, Instance, Schema, SeededRng};

/// Sampler for one stationary concept.
pub trait ConceptSource {
    fn schema(&self) -> &Schema;

    /// Draws `n` instances. Must be a pure function of `(self, n, rng state)`.
    fn sample(&self, n: usize, rng: &mut SeededRng) -> Result<Vec<Instance>, DriftError>;
}

impl<T: ConceptSource + ?Sized> ConceptSource for &T {
    fn schema(&self) -> &Schema {
        (**self).schema()
    }

    fn sample(&self, n: usize, rng: &mut SeededRng) -> Result<Vec<Instance>, DriftError> {
        (**self).sample(n, rng)
    }
}

impl<T: ConceptSource + ?Sized> ConceptSource for Box<T> {
    fn schema(&self) -> &Schema {
        (**self).schema()
    }

    fn sample(&self, n: usize, rng: &mut SeededRng) -> Result<Vec<Instance>, DriftError> {
        (**self).sample(n, rng)
    }
}

/// Smoothed bootstrap over a captured chunk: resample rows uniformly, then
/// add zero-mean Gaussian noise to numeric columns (features and target).
///
/// The default bandwidth per numeric column is Silverman's rule,
/// `0.9 * min(sd, IQR / 1.34) * m^(-1/5)` with `m` the chunk size, falling
/// back to `sd` when the IQR is zero. Categorical columns are never
/// perturbed, so they follow the chunk's empirical distribution.
#[derive(Debug, Clone)]
pub struct BootstrapSampler {
    schema: Schema,
    base: Vec<Instance>,
    feature_bandwidths: Vec<f64>,
    target_bandwidth: f64,
}

impl BootstrapSampler {
    pub fn new(schema: Schema, base: Vec<Instance>) -> Result<Self, DriftError> {
        let mut s = Self::exact(schema, base)?;
        for f in 0..s.schema.num_features() {
            if s.schema.feature(f).kind == ColumnKind::Numeric {
                let col: Vec<f64> = s.base.iter().map(|i| i.features[f]).collect();
                s.feature_bandwidths[f] = silverman_bandwidth(&col);
            }
        }
        let y: Vec<f64> = s.base.iter().map(|i| i.target).collect();
        s.target_bandwidth = silverman_bandwidth(&y);
        Ok(s)
    }

    /// Plain bootstrap: every sampled row is a row of `base`.
    pub fn exact(schema: Schema, base: Vec<Instance>) -> Result<Self, DriftError> {
        if base.is_empty() {
            return Err(DriftError::EmptyConcept);
        }
        if let Some(bad) = base
            .iter()
            .find(|i| i.features.len() != schema.num_features())
        {
            return Err(DriftError::Arity {
                expected: schema.num_features(),
                found: bad.features.len(),
            });
        }
        let nf = schema.num_features();
        Ok(Self {
            schema,
            base,
            feature_bandwidths: vec![0.0; nf],
            target_bandwidth: 0.0,
        })
    }

    pub fn feature_bandwidths(&self) -> &[f64] {
        &self.feature_bandwidths
    }

    pub fn target_bandwidth(&self) -> f64 {
        self.target_bandwidth
    }

    pub fn base(&self) -> &[Instance] {
        &self.base
    }
}

impl ConceptSource for BootstrapSampler {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn sample(&self, n: usize, rng: &mut SeededRng) -> Result<Vec<Instance>, DriftError> {
        let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let mut inst = self.base[rng.random_range(0..self.base.len())].clone();
            for (v, &bw) in inst.features.iter_mut().zip(&self.feature_bandwidths) {
                if bw > 0.0 {
                    *v += bw * std_normal.sample(rng);
                }
            }
            if self.target_bandwidth > 0.0 {
                inst.target += self.target_bandwidth * std_normal.sample(rng);
            }
            out.push(inst);
        }
        Ok(out)
    }
}

/// Pre-generated concept rows (for example, a concept CSV written by an
/// external generative model), replayed in file order.
#[derive(Debug, Clone)]
pub struct ReplayConcept {
    schema: Schema,
    rows: Vec<Instance>,
}

impl ReplayConcept {
    pub fn new(schema: Schema, rows: Vec<Instance>) -> Self {
        Self { schema, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Instance] {
        &self.rows
    }
}

impl ConceptSource for ReplayConcept {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn sample(&self, n: usize, _rng: &mut SeededRng) -> Result<Vec<Instance>, DriftError> {
        if n > self.rows.len() {
            return Err(DriftError::Exhausted {
                requested: n,
                available: self.rows.len(),
            });
        }
        Ok(self.rows[..n].to_vec())
    }
}

pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let m = values.len();
    if m < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * (m as f64).powf(-0.2)
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::Column;

    fn base() -> Vec<Instance> {
        (0..50)
            .map(|i| Instance::new(vec![i as f64, (i % 3) as f64], (2 * i) as f64))
            .collect()
    }

    fn schema() -> Schema {
        Schema::new(
            vec![
                Column::numeric("a"),
                Column::categorical("c", vec!["p".into(), "q".into(), "r".into()]),
                Column::numeric("y"),
            ],
            2,
        )
        .unwrap()
    }

    #[test]
    fn zero_bandwidth_draws_base_rows() {
        let s = BootstrapSampler::exact(schema(), base()).unwrap();
        let mut rng = SeededRng::new(3);
        for inst in s.sample(500, &mut rng).unwrap() {
            assert!(s.base().contains(&inst));
        }
    }

    #[test]
    fn smoothing_leaves_categoricals_alone() {
        let s = BootstrapSampler::new(schema(), base()).unwrap();
        assert!(s.feature_bandwidths()[0] > 0.0);
        assert_eq!(s.feature_bandwidths()[1], 0.0);
        assert!(s.target_bandwidth() > 0.0);
        let mut rng = SeededRng::new(3);
        for inst in s.sample(200, &mut rng).unwrap() {
            assert!([0.0, 1.0, 2.0].contains(&inst.features[1]));
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let s = BootstrapSampler::new(schema(), base()).unwrap();
        let a = s.sample(100, &mut SeededRng::new(9)).unwrap();
        let b = s.sample(100, &mut SeededRng::new(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn silverman_matches_hand_computation() {
        // 1..=5: sd = sqrt(2.5), IQR = 4 - 2 = 2 -> min(1.5811, 1.4925) = 1.4925
        let bw = silverman_bandwidth(&[1., 2., 3., 4., 5.]);
        let expected = 0.9 * (2.0 / 1.34) * 5f64.powf(-0.2);
        assert!((bw - expected).abs() < 1e-12);
        assert_eq!(silverman_bandwidth(&[4.0]), 0.0);
        assert_eq!(silverman_bandwidth(&[4.0, 4.0, 4.0]), 0.0);
    }

    #[test]
    fn replay_takes_rows_in_order() {
        let r = ReplayConcept::new(schema(), base());
        let mut rng = SeededRng::new(0);
        assert_eq!(r.sample(3, &mut rng).unwrap(), base()[..3].to_vec());
        assert!(matches!(
            r.sample(51, &mut rng),
            Err(DriftError::Exhausted { .. })
        ));
    }
}
