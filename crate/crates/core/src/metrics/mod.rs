//! Acceptance checks for realization ensembles.
//!
//! Binary checks take the positive facies code as a parameter; every cell
//! holding another code counts as negative.

mod confusion;
mod entropy;
mod geobody;
mod percentile;
mod proportion;
mod variogram;
mod window;

use thiserror::Error;

use crate::grid::GridError;

pub use confusion::{confusion_at_points, f1_score, ConfusionCounts};
pub use entropy::{binary_entropy, entropy_at_points, entropy_map};
pub use geobody::{count_geobodies, Connectivity, GeobodyLabeling};
pub use percentile::{percentile, percentile_pair, Envelope, PercentilePair};
pub use proportion::{facies_proportion, pixel_average_map, pixel_dispersion_map, proportion_histogram, Histogram};
pub use variogram::{
    directional_semivariogram, ensemble_semivariogram_envelope, LagDirection, LagValue, Semivariogram,
    SemivariogramEnvelope,
};
pub(crate) use variogram::variogram_values;
pub use window::{moving_window_proportions, window_envelope, window_scatter, WindowEnvelope, WindowSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("conditioning set is empty")]
    EmptyConditioningSet,
    #[error("confusion counts are all zero")]
    NoEvaluatedPoints,
    #[error("cannot take a percentile of an empty list")]
    EmptyValues,
    #[error("percentile {0} outside [0, 100]")]
    InvalidPercentile(f64),
    #[error("percentile pair must satisfy lo < hi, got ({lo}, {hi})")]
    InvalidPercentilePair { lo: f64, hi: f64 },
    #[error("histogram bin width must be positive and finite, got {0}")]
    InvalidBinWidth(f64),
    #[error("window {window} does not fit in a {n_rows}x{n_cols} grid")]
    WindowTooLarge { window: usize, n_rows: usize, n_cols: usize },
    #[error("window and stride must be at least 1")]
    InvalidWindow,
    #[error("lag direction must be non-zero")]
    ZeroDirection,
    #[error("max lag must be at least 1")]
    InvalidMaxLag,
    #[error(transparent)]
    Grid(#[from] GridError),
}
