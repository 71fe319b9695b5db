use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Envelope, MetricsError, PercentilePair};
use crate::grid::{CategoricalGrid, Ensemble, FaciesCode, Shape};
use crate::scalar::Scalar;

/// Unit lag step in cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagDirection {
    pub d_row: i32,
    pub d_col: i32,
}

impl LagDirection {
    /// Along columns, i.e. along the channels.
    pub const MAJOR: LagDirection = LagDirection { d_row: 0, d_col: 1 };
    /// Along rows, across the channels.
    pub const MINOR: LagDirection = LagDirection { d_row: 1, d_col: 0 };

    pub fn new(d_row: i32, d_col: i32) -> Result<Self, MetricsError> {
        if d_row == 0 && d_col == 0 {
            return Err(MetricsError::ZeroDirection);
        }
        Ok(Self { d_row, d_col })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagValue<T> {
    pub h: usize,
    pub gamma: T,
    pub n_pairs: usize,
}

/// Experimental semivariogram along one direction. Lags without pairs are omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Semivariogram<T> {
    pub direction: LagDirection,
    pub lags: Vec<LagValue<T>>,
}

impl<T: Scalar> Semivariogram<T> {
    pub fn gammas(&self) -> Vec<T> {
        self.lags.iter().map(|l| l.gamma).collect()
    }
}

/// Indicator semivariogram of `positive`: for lag `h`, half the mean squared
/// difference over all in-bounds pairs `(u, u + h * direction)`.
pub fn directional_semivariogram<T: Scalar>(
    grid: &CategoricalGrid,
    positive: FaciesCode,
    direction: LagDirection,
    max_lag: usize,
) -> Result<Semivariogram<T>, MetricsError> {
    let values = grid.indicator::<T>(positive);
    semivariogram_of_values(&values, grid.shape(), direction, max_lag)
}

pub(crate) fn semivariogram_of_values<T: Scalar>(
    values: &[T],
    shape: Shape,
    direction: LagDirection,
    max_lag: usize,
) -> Result<Semivariogram<T>, MetricsError> {
    LagDirection::new(direction.d_row, direction.d_col)?;
    if max_lag < 1 {
        return Err(MetricsError::InvalidMaxLag);
    }
    let (rows, cols) = (shape.n_rows as i64, shape.n_cols as i64);
    let two = T::lit(2.0);
    let mut lags = Vec::with_capacity(max_lag);
    for h in 1..=max_lag as i64 {
        let dr = h * direction.d_row as i64;
        let dc = h * direction.d_col as i64;
        // rows r with 0 <= r, r + dr < rows; same for columns
        let (r_lo, r_hi) = (0.max(-dr), rows.min(rows - dr));
        let (c_lo, c_hi) = (0.max(-dc), cols.min(cols - dc));
        if r_lo >= r_hi || c_lo >= c_hi {
            continue;
        }
        let width = (c_hi - c_lo) as usize;
        let mut sum = T::zero();
        for r in r_lo..r_hi {
            let head = (r * cols + c_lo) as usize;
            let tail = ((r + dr) * cols + dc + c_lo) as usize;
            sum = values[head..head + width]
                .iter()
                .zip(&values[tail..tail + width])
                .fold(sum, |acc, (&a, &b)| acc + (a - b) * (a - b));
        }
        let n_pairs = ((r_hi - r_lo) * (c_hi - c_lo)) as usize;
        lags.push(LagValue { h: h as usize, gamma: sum / (two * T::from_count(n_pairs)), n_pairs });
    }
    Ok(Semivariogram { direction, lags })
}

/// Gamma values of a real-valued raster for lags `1..=max_lag` that have pairs.
pub(crate) fn variogram_values<T: Scalar>(
    values: &[T],
    shape: Shape,
    direction: LagDirection,
    max_lag: usize,
) -> Result<Vec<T>, MetricsError> {
    Ok(semivariogram_of_values(values, shape, direction, max_lag)?.gammas())
}

/// Per-lag percentile band of member semivariograms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemivariogramEnvelope<T> {
    pub direction: LagDirection,
    pub lags: Vec<usize>,
    pub mean: Vec<T>,
    pub envelope: Envelope<T>,
}

pub fn ensemble_semivariogram_envelope<T: Scalar>(
    ensemble: &Ensemble,
    positive: FaciesCode,
    direction: LagDirection,
    max_lag: usize,
    percentiles: PercentilePair,
) -> Result<SemivariogramEnvelope<T>, MetricsError> {
    let members = ensemble
        .members()
        .par_iter()
        .map(|m| directional_semivariogram::<T>(m, positive, direction, max_lag))
        .collect::<Result<Vec<_>, _>>()?;
    // every member has the same shape, so the same lags survive
    let lags: Vec<usize> = members[0].lags.iter().map(|l| l.h).collect();
    let samples: Vec<Vec<T>> = members.iter().map(Semivariogram::gammas).collect();
    let n = T::from_count(samples.len());
    let mean = (0..lags.len()).map(|i| samples.iter().map(|s| s[i]).sum::<T>() / n).collect();
    let envelope = if lags.is_empty() {
        Envelope { percentiles, lower: vec![], upper: vec![] }
    } else {
        Envelope::from_samples(&samples, percentiles)?
    };
    Ok(SemivariogramEnvelope { direction, lags, mean, envelope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Provenance;

    fn alternating_columns() -> CategoricalGrid {
        let row: &[u8] = &[0, 1, 0, 1];
        CategoricalGrid::from_rows(&[row, row, row, row]).unwrap()
    }

    #[test]
    fn constant_grid_has_zero_gamma() {
        let g = CategoricalGrid::filled(Shape::new(5, 6).unwrap(), 1);
        for dir in [LagDirection::MAJOR, LagDirection::MINOR, LagDirection::new(1, 1).unwrap()] {
            let v: Semivariogram<f64> = directional_semivariogram(&g, 1, dir, 4).unwrap();
            assert!(v.lags.iter().all(|l| l.gamma == 0.0 && l.n_pairs > 0));
        }
    }

    #[test]
    fn alternating_columns_major() {
        let v: Semivariogram<f64> = directional_semivariogram(&alternating_columns(), 1, LagDirection::MAJOR, 3).unwrap();
        let gammas: Vec<(usize, f64, usize)> = v.lags.iter().map(|l| (l.h, l.gamma, l.n_pairs)).collect();
        assert_eq!(gammas, vec![(1, 0.5, 12), (2, 0.0, 8), (3, 0.5, 4)]);
    }

    #[test]
    fn alternating_columns_minor_is_flat() {
        let v: Semivariogram<f64> = directional_semivariogram(&alternating_columns(), 1, LagDirection::MINOR, 3).unwrap();
        assert_eq!(v.lags.len(), 3);
        assert!(v.lags.iter().all(|l| l.gamma == 0.0));
    }

    #[test]
    fn lags_beyond_grid_are_omitted() {
        let v: Semivariogram<f64> = directional_semivariogram(&alternating_columns(), 1, LagDirection::MAJOR, 10).unwrap();
        assert_eq!(v.lags.iter().map(|l| l.h).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn negative_direction_mirrors_positive() {
        let g = CategoricalGrid::from_rows(&[&[1, 0, 0], &[1, 1, 0], &[0, 1, 1]]).unwrap();
        let a: Semivariogram<f64> = directional_semivariogram(&g, 1, LagDirection::new(1, -1).unwrap(), 2).unwrap();
        let b: Semivariogram<f64> = directional_semivariogram(&g, 1, LagDirection::new(-1, 1).unwrap(), 2).unwrap();
        assert_eq!(a.gammas(), b.gammas());
    }

    #[test]
    fn errors() {
        let g = alternating_columns();
        assert_eq!(
            directional_semivariogram::<f64>(&g, 1, LagDirection { d_row: 0, d_col: 0 }, 2),
            Err(MetricsError::ZeroDirection)
        );
        assert_eq!(directional_semivariogram::<f64>(&g, 1, LagDirection::MAJOR, 0), Err(MetricsError::InvalidMaxLag));
    }

    #[test]
    fn envelope_of_identical_members() {
        let g = alternating_columns();
        let e = Ensemble::new(vec![g.clone(), g.clone(), g.clone()], Provenance::Unconditional).unwrap();
        let env: SemivariogramEnvelope<f64> =
            ensemble_semivariogram_envelope(&e, 1, LagDirection::MAJOR, 3, PercentilePair::P10_P90).unwrap();
        let single: Semivariogram<f64> = directional_semivariogram(&g, 1, LagDirection::MAJOR, 3).unwrap();
        assert_eq!(env.envelope.lower, single.gammas());
        assert_eq!(env.envelope.upper, single.gammas());
        assert_eq!(env.lags, vec![1, 2, 3]);
    }
}
