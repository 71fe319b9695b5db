//! Latent-vector generators and realism scorers.
//!
//! A [`Generator`] maps a latent vector to a real-valued grid in `[0, 1]`
//! (thresholded at 0.5 to obtain facies). A [`Discriminator`] scores how
//! realistic a grid looks, in `(0, 1)`.

mod external;
mod plausibility;
mod procedural;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridError, RealGrid, Shape};
use crate::scalar::Scalar;

pub use external::{ExternalGenerator, DEFAULT_TIMEOUT};
pub use plausibility::{plausibility_from_deviation, PlausibilityScorer, TIStats, DEFAULT_PLAUSIBILITY_WEIGHT};
pub use procedural::{ChannelParams, ProceduralGenerator, DEFAULT_CHANNELS, PARAMS_PER_CHANNEL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("latent vector has dimension {found}, generator expects {expected}")]
    LatentDimension { expected: usize, found: usize },
    #[error("latent vector holds a non-finite value")]
    NonFiniteLatent,
    #[error("grid shape {found} does not match generator shape {expected}")]
    ShapeMismatch { expected: Shape, found: Shape },
    #[error("failed to start generator process: {0}")]
    Spawn(String),
    #[error("generator protocol violation: {0}")]
    Protocol(String),
    #[error("generator reported an error: {0}")]
    Remote(String),
    #[error("generator did not answer within {0:?}")]
    Timeout(std::time::Duration),
    #[error("generator session is no longer usable after an earlier failure")]
    SessionFailed,
    #[error("generator does not provide a discriminator")]
    NoDiscriminator,
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Input noise of a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatentVector<T>(Vec<T>);

impl<T: Scalar> LatentVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self, GeneratorError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GeneratorError::NonFiniteLatent);
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![T::zero(); dim])
    }
}

impl<T> LatentVector<T> {
    #[inline]
    pub fn values(&self) -> &[T] {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_values(self) -> Vec<T> {
        self.0
    }
}

/// Standard-normal latent vector, reproducible per seed.
pub fn sample_latent<T: Scalar>(seed: u64, latent_dim: usize) -> LatentVector<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LatentVector(
        (0..latent_dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                T::lit(z)
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub latent_dim: usize,
    pub n_rows: usize,
    pub n_cols: usize,
    pub supports_discriminator: bool,
    pub name: String,
}

impl GeneratorInfo {
    pub fn shape(&self) -> Shape {
        Shape { n_rows: self.n_rows, n_cols: self.n_cols }
    }

    fn check_latent<T>(&self, z: &LatentVector<T>) -> Result<(), GeneratorError> {
        if z.dim() != self.latent_dim {
            return Err(GeneratorError::LatentDimension { expected: self.latent_dim, found: z.dim() });
        }
        Ok(())
    }
}

/// Deterministic map from latent vectors to grids with values in `[0, 1]`.
pub trait Generator<T: Scalar>: Send + Sync {
    fn info(&self) -> &GeneratorInfo;
    fn generate(&self, z: &LatentVector<T>) -> Result<RealGrid<T>, GeneratorError>;
}

/// Which realism score fills the adversarial term of the conditioning loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscriminatorKind {
    /// Statistics-based stand-in scored against training-image statistics.
    Plausibility,
    /// A trained discriminator served by an external process.
    External,
}

pub trait Discriminator<T: Scalar>: Send + Sync {
    fn kind(&self) -> DiscriminatorKind;
    /// Realism score in `(0, 1)`.
    fn score(&self, grid: &RealGrid<T>) -> Result<T, GeneratorError>;
}

impl<T: Scalar, G: Generator<T> + ?Sized> Generator<T> for &G {
    fn info(&self) -> &GeneratorInfo {
        (**self).info()
    }
    fn generate(&self, z: &LatentVector<T>) -> Result<RealGrid<T>, GeneratorError> {
        (**self).generate(z)
    }
}

impl<T: Scalar, D: Discriminator<T> + ?Sized> Discriminator<T> for &D {
    fn kind(&self) -> DiscriminatorKind {
        (**self).kind()
    }
    fn score(&self, grid: &RealGrid<T>) -> Result<T, GeneratorError> {
        (**self).score(grid)
    }
}
