//! Statistics-based realism score used in place of a trained discriminator.
//!
//! `score = logistic(-w * dev)` where `dev` is the absolute proportion error
//! plus the mean absolute semivariogram error over the first `k` lags of the
//! major and minor directions. A grid matching the reference statistics
//! scores exactly 0.5; larger deviations score lower.

use serde::{Deserialize, Serialize};

use super::{Discriminator, DiscriminatorKind, GeneratorError};
use crate::grid::{CategoricalGrid, FaciesCode, RealGrid, Shape};
use crate::metrics::{self, LagDirection};
use crate::scalar::{logistic, Scalar};

pub const DEFAULT_PLAUSIBILITY_WEIGHT: f64 = 10.0;
const DEFAULT_LAGS: usize = 8;

/// Reference statistics of a training image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TIStats<T> {
    pub shape: Shape,
    pub target_proportion: T,
    pub target_gamma_major: Vec<T>,
    pub target_gamma_minor: Vec<T>,
}

impl<T: Scalar> TIStats<T> {
    /// Proportion and first `lags` semivariogram values of `positive` in `ti`.
    pub fn from_ti(ti: &CategoricalGrid, positive: FaciesCode, lags: usize) -> Self {
        let values = ti.indicator::<T>(positive);
        Self::from_values(&values, ti.shape(), lags)
    }

    /// Averages the statistics of several grids, e.g. an unconditional ensemble.
    pub fn from_ensemble(members: &[CategoricalGrid], positive: FaciesCode, lags: usize) -> Self {
        assert!(!members.is_empty(), "need at least one grid");
        let all: Vec<Self> = members.iter().map(|m| Self::from_ti(m, positive, lags)).collect();
        let n = T::from_count(all.len());
        let mean_of = |pick: &dyn Fn(&Self) -> &Vec<T>| -> Vec<T> {
            (0..pick(&all[0]).len()).map(|i| all.iter().map(|s| pick(s)[i]).sum::<T>() / n).collect()
        };
        Self {
            shape: all[0].shape,
            target_proportion: all.iter().map(|s| s.target_proportion).sum::<T>() / n,
            target_gamma_major: mean_of(&|s| &s.target_gamma_major),
            target_gamma_minor: mean_of(&|s| &s.target_gamma_minor),
        }
    }

    fn from_values(values: &[T], shape: Shape, lags: usize) -> Self {
        let lags = lags.max(1);
        let gammas = |dir| {
            metrics::variogram_values(values, shape, dir, lags).expect("valid direction and lag count")
        };
        Self {
            shape,
            target_proportion: values.iter().copied().sum::<T>() / T::from_count(values.len()),
            target_gamma_major: gammas(LagDirection::MAJOR),
            target_gamma_minor: gammas(LagDirection::MINOR),
        }
    }

    fn deviation(&self, values: &[T], shape: Shape) -> Result<T, GeneratorError> {
        if shape != self.shape {
            return Err(GeneratorError::ShapeMismatch { expected: self.shape, found: shape });
        }
        let other = Self::from_values(values, shape, self.target_gamma_major.len());
        let gamma_err: Vec<T> = self
            .target_gamma_major
            .iter()
            .zip(&other.target_gamma_major)
            .chain(self.target_gamma_minor.iter().zip(&other.target_gamma_minor))
            .map(|(a, b)| (*a - *b).abs())
            .collect();
        let mean_gamma_err = if gamma_err.is_empty() {
            T::zero()
        } else {
            gamma_err.iter().copied().sum::<T>() / T::from_count(gamma_err.len())
        };
        Ok((other.target_proportion - self.target_proportion).abs() + mean_gamma_err)
    }
}

/// `logistic(-weight * deviation)`.
pub fn plausibility_from_deviation<T: Scalar>(deviation: T, weight: T) -> T {
    logistic(-weight * deviation)
}

#[derive(Debug, Clone)]
pub struct PlausibilityScorer<T> {
    pub stats: TIStats<T>,
    pub weight: T,
}

impl<T: Scalar> PlausibilityScorer<T> {
    pub fn new(stats: TIStats<T>) -> Self {
        Self { stats, weight: T::lit(DEFAULT_PLAUSIBILITY_WEIGHT) }
    }

    /// Scorer built from a training image with the default weight and 8 lags.
    pub fn from_ti(ti: &CategoricalGrid, positive: FaciesCode) -> Self {
        Self::new(TIStats::from_ti(ti, positive, DEFAULT_LAGS.min(ti.n_rows().min(ti.n_cols()).saturating_sub(1)).max(1)))
    }

    /// Scores a facies grid through its indicator of `positive`.
    pub fn score_categorical(&self, grid: &CategoricalGrid, positive: FaciesCode) -> Result<T, GeneratorError> {
        let dev = self.stats.deviation(&grid.indicator::<T>(positive), grid.shape())?;
        Ok(plausibility_from_deviation(dev, self.weight))
    }

    /// Scores a real grid, reading its `[0, 1]` values as a soft indicator.
    pub fn score_real(&self, grid: &RealGrid<T>) -> Result<T, GeneratorError> {
        let dev = self.stats.deviation(grid.cells(), grid.shape())?;
        Ok(plausibility_from_deviation(dev, self.weight))
    }
}

impl<T: Scalar> Discriminator<T> for PlausibilityScorer<T> {
    fn kind(&self) -> DiscriminatorKind {
        DiscriminatorKind::Plausibility
    }

    fn score(&self, grid: &RealGrid<T>) -> Result<T, GeneratorError> {
        self.score_real(grid)
    }
}
