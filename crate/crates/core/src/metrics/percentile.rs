use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::scalar::Scalar;

/// Linear-interpolation percentile: sort ascending, take rank `p/100 * (n-1)`
/// and interpolate between the neighbouring order statistics.
pub fn percentile<T: Scalar>(values: &[T], p: f64) -> Result<T, MetricsError> {
    check_percentile(p)?;
    if values.is_empty() {
        return Err(MetricsError::EmptyValues);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("percentile input must not contain NaN"));
    Ok(percentile_sorted(&sorted, p))
}

pub(crate) fn percentile_sorted<T: Scalar>(sorted: &[T], p: f64) -> T {
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    let frac = T::lit(rank - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn check_percentile(p: f64) -> Result<(), MetricsError> {
    if !(0.0..=100.0).contains(&p) {
        return Err(MetricsError::InvalidPercentile(p));
    }
    Ok(())
}

/// Lower/upper percentile levels of an envelope, e.g. P10-P90.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercentilePair {
    pub lo: f64,
    pub hi: f64,
}

impl PercentilePair {
    pub fn new(lo: f64, hi: f64) -> Result<Self, MetricsError> {
        check_percentile(lo)?;
        check_percentile(hi)?;
        if lo >= hi {
            return Err(MetricsError::InvalidPercentilePair { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub const P10_P90: PercentilePair = PercentilePair { lo: 10.0, hi: 90.0 };
    pub const P25_P75: PercentilePair = PercentilePair { lo: 25.0, hi: 75.0 };
}

/// `(P_lo, P_hi)` of one sample.
pub fn percentile_pair<T: Scalar>(values: &[T], pair: PercentilePair) -> Result<(T, T), MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyValues);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("percentile input must not contain NaN"));
    Ok((percentile_sorted(&sorted, pair.lo), percentile_sorted(&sorted, pair.hi)))
}

/// Per-position lower and upper percentile bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub percentiles: PercentilePair,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> Envelope<T> {
    /// Envelope over columns of `samples`: `samples[member][position]`.
    pub fn from_samples(samples: &[Vec<T>], percentiles: PercentilePair) -> Result<Self, MetricsError> {
        let width = samples.first().ok_or(MetricsError::EmptyValues)?.len();
        let mut lower = Vec::with_capacity(width);
        let mut upper = Vec::with_capacity(width);
        let mut column = Vec::with_capacity(samples.len());
        for pos in 0..width {
            column.clear();
            column.extend(samples.iter().map(|s| s[pos]));
            let (lo, hi) = percentile_pair(&column, percentiles)?;
            lower.push(lo);
            upper.push(hi);
        }
        Ok(Self { percentiles, lower, upper })
    }
}
