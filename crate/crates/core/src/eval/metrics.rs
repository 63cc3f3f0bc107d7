use thiserror::Error;

use crate::interval::Interval;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("no observations")]
    Empty,
    #[error("adjusted R² needs n ≥ p + 2, got n = {n}, p = {p}")]
    TooFew { n: usize, p: usize },
    #[error("targets have zero variance")]
    ZeroVariance,
    #[error("label range must be positive, got {0}")]
    ZeroRange(f64),
}

/// Root mean squared error over `(y, ŷ)` pairs.
pub fn rmse(pairs: &[(f64, f64)]) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::Empty);
    }
    let sse: f64 = pairs.iter().map(|(y, p)| (y - p) * (y - p)).sum();
    Ok((sse / pairs.len() as f64).sqrt())
}

/// `R² = 1 − SSE/SST` over `(y, ŷ)` pairs.
pub fn r2(pairs: &[(f64, f64)]) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::Empty);
    }
    let mean = pairs.iter().map(|p| p.0).sum::<f64>() / pairs.len() as f64;
    let sst: f64 = pairs.iter().map(|(y, _)| (y - mean) * (y - mean)).sum();
    if sst <= 0.0 {
        return Err(MetricError::ZeroVariance);
    }
    let sse: f64 = pairs.iter().map(|(y, p)| (y - p) * (y - p)).sum();
    Ok(1.0 - sse / sst)
}

/// `1 − (1 − R²)(n − 1)/(n − p − 1)` for `p` predictors.
pub fn adjusted_r2(pairs: &[(f64, f64)], p: usize) -> Result<f64, MetricError> {
    let n = pairs.len();
    if n < p + 2 {
        return Err(MetricError::TooFew { n, p });
    }
    Ok(adjust(r2(pairs)?, n, p))
}

pub(crate) fn adjust(r2: f64, n: usize, p: usize) -> f64 {
    1.0 - (1.0 - r2) * (n - 1) as f64 / (n - p - 1) as f64
}

/// Fraction of labels inside their (closed) interval.
pub fn coverage(triples: &[(f64, Interval)]) -> Result<f64, MetricError> {
    if triples.is_empty() {
        return Err(MetricError::Empty);
    }
    let inside = triples.iter().filter(|(y, i)| i.contains(*y)).count();
    Ok(inside as f64 / triples.len() as f64)
}

/// Mean interval width divided by the label range `range`.
pub fn nmpiw(intervals: &[Interval], range: f64) -> Result<f64, MetricError> {
    if intervals.is_empty() {
        return Err(MetricError::Empty);
    }
    if range.is_nan() || range <= 0.0 {
        return Err(MetricError::ZeroRange(range));
    }
    let mean = intervals.iter().map(Interval::width).sum::<f64>() / intervals.len() as f64;
    Ok(mean / range)
}
