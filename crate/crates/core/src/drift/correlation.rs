use serde::{Deserialize, Serialize};

use super::DriftError;
use crate::stream::{ColumnKind, Instance, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMethod {
    #[default]
    Pearson,
    Spearman,
}

/// Product-moment correlation, computed two-pass around the means.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, DriftError> {
    if x.len() != y.len() {
        return Err(DriftError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(DriftError::TooShort(x.len()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(DriftError::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson correlation of average ranks (ties share their mean rank).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, DriftError> {
    if x.len() != y.len() {
        return Err(DriftError::LengthMismatch(x.len(), y.len()));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

pub(crate) fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && v[idx[j]] == v[idx[i]] {
            j += 1;
        }
        // ranks are 1-based; the tie group i..j shares the mean of i+1..=j
        let mean_rank = (i + j + 1) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = mean_rank;
        }
        i = j;
    }
    ranks
}

pub fn correlation(method: CorrelationMethod, x: &[f64], y: &[f64]) -> Result<f64, DriftError> {
    match method {
        CorrelationMethod::Pearson => pearson(x, y),
        CorrelationMethod::Spearman => spearman(x, y),
    }
}

/// Picks the numeric feature with the largest |correlation| to the target.
/// Ties go to the lower column index; constant features are skipped.
pub fn select_drifting_feature(
    data: &[Instance],
    schema: &Schema,
    method: CorrelationMethod,
) -> Result<String, DriftError> {
    let candidates: Vec<usize> = schema
        .features()
        .enumerate()
        .filter(|(_, c)| c.kind == ColumnKind::Numeric)
        .map(|(i, _)| i)
        .collect();
    if candidates.is_empty() {
        return Err(DriftError::NoNumericCandidates);
    }
    let y: Vec<f64> = data.iter().map(|i| i.target).collect();
    let mut best: Option<(usize, f64)> = None;
    for f in candidates {
        let x: Vec<f64> = data.iter().map(|i| i.features[f]).collect();
        let r = match correlation(method, &x, &y) {
            Ok(r) => r.abs(),
            Err(DriftError::ZeroVariance) => continue,
            Err(e) => return Err(e),
        };
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((f, r));
        }
    }
    best.map(|(f, _)| schema.feature(f).name.clone())
        .ok_or(DriftError::ZeroVariance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::Column;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn pearson_examples() {
        assert!(close(pearson(&[1., 2., 3.], &[2., 4., 6.]).unwrap(), 1.0));
        assert!(close(pearson(&[1., 2., 3.], &[6., 4., 2.]).unwrap(), -1.0));
        // cov = 4, var_x = var_y = 5
        assert!(close(
            pearson(&[1., 2., 3., 4.], &[1., 3., 2., 4.]).unwrap(),
            0.8
        ));
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson(&[1., 1., 1.], &[1., 2., 3.]),
            Err(DriftError::ZeroVariance)
        ));
        assert!(matches!(
            pearson(&[1.], &[1.]),
            Err(DriftError::TooShort(1))
        ));
        assert!(pearson(&[1., 2.], &[1.]).is_err());
    }

    #[test]
    fn spearman_examples() {
        assert!(close(
            spearman(&[1., 2., 3.], &[10., 100., 1000.]).unwrap(),
            1.0
        ));
        assert!(close(spearman(&[1., 2., 3.], &[3., 2., 1.]).unwrap(), -1.0));
    }

    #[test]
    fn spearman_ties_match_rank_oracle() {
        // Brute-force mean ranks: for each value, 1 + #smaller + (#equal - 1)/2.
        let x = [1., 2., 2., 4.];
        let y = [1., 2., 3., 4.];
        let rank = |v: &[f64], a: f64| {
            let smaller = v.iter().filter(|&&b| b < a).count() as f64;
            let equal = v.iter().filter(|&&b| b == a).count() as f64;
            1.0 + smaller + (equal - 1.0) / 2.0
        };
        let rx: Vec<f64> = x.iter().map(|&a| rank(&x, a)).collect();
        let ry: Vec<f64> = y.iter().map(|&a| rank(&y, a)).collect();
        assert_eq!(rx, vec![1.0, 2.5, 2.5, 4.0]);
        // pearson of the oracle ranks, by hand: dx = -1.5,0,0,1.5; dy = -1.5,-.5,.5,1.5
        // sxy = 4.5, sxx = 4.5, syy = 5 -> 4.5 / sqrt(22.5)
        let expected = 4.5 / 22.5f64.sqrt();
        assert!(close(spearman(&x, &y).unwrap(), expected));
        assert!(close(pearson(&rx, &ry).unwrap(), expected));
    }

    fn rows(cols: &[Vec<f64>], y: &[f64]) -> Vec<Instance> {
        (0..y.len())
            .map(|r| Instance::new(cols.iter().map(|c| c[r]).collect(), y[r]))
            .collect()
    }

    #[test]
    fn copy_of_target_wins() {
        let y = [1., 5., 2., 8., 3.];
        let noise = [0.3, 0.1, 0.9, 0.2, 0.5];
        let data = rows(&[noise.to_vec(), y.to_vec()], &y);
        let schema = Schema::new(
            vec![
                Column::numeric("f2"),
                Column::numeric("f1"),
                Column::numeric("y"),
            ],
            2,
        )
        .unwrap();
        assert_eq!(
            select_drifting_feature(&data, &schema, CorrelationMethod::Pearson).unwrap(),
            "f1"
        );
    }

    #[test]
    fn all_categorical_is_error() {
        let schema = Schema::new(
            vec![
                Column::categorical("c", vec!["a".into()]),
                Column::numeric("y"),
            ],
            1,
        )
        .unwrap();
        let data = rows(&[vec![0., 0.]], &[1., 2.]);
        assert!(matches!(
            select_drifting_feature(&data, &schema, CorrelationMethod::Pearson),
            Err(DriftError::NoNumericCandidates)
        ));
    }

    #[test]
    fn tie_goes_to_lower_index() {
        let y = [1., 2., 3., 4.];
        let data = rows(&[y.to_vec(), y.to_vec()], &y);
        assert_eq!(
            select_drifting_feature(&data, &Schema::numeric(2), CorrelationMethod::Spearman)
                .unwrap(),
            "x0"
        );
    }
}
