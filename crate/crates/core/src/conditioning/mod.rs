//! Conditioning a generator to well data by optimizing its latent input.
//!
//! The loss for a latent vector `z` is
//!
//! ```text
//! loss(z) = lambda * mean_{conditioned cells} |y - G(z)|
//!         + ln(1 - clamp(D(G(z) * (1 - M) + y * M), eps, 1 - eps))
//! ```
//!
//! with `M` the binary mask of conditioned cells and `y` the 0/1 indicator of
//! the positive facies at those cells. `y` is undefined elsewhere and never
//! enters a masked sum.

mod experiment;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{sample_latent, Discriminator, DiscriminatorKind, Generator, GeneratorError, LatentVector};
use crate::grid::{threshold_grid, CategoricalGrid, ConditioningSet, FaciesCode, GridError, RealGrid, Shape, CHANNEL};
use crate::metrics::{confusion_at_points, f1_score, MetricsError};
use crate::optimizer::{try_minimize, OptError, OptOptions};
use crate::scalar::Scalar;

pub use experiment::{
    derive_seed, run_experiment, sample_locations, ConditionalRunSummary, ExperimentCase, ExperimentConfig,
    ExperimentReport, ExperimentSettings, GridIdentity, SummaryRow, SummaryTable, UnconditionalSection,
};

#[derive(Debug, Error)]
pub enum ConditioningError {
    #[error("conditioning needs at least one data point")]
    EmptyData,
    #[error("invalid conditioning configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("optimizer: {0}")]
    Optimizer(#[from] OptError<GeneratorError>),
}

/// Binary mask of conditioned cells with the weight of the data-mismatch term.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask<T> {
    shape: Shape,
    cells: Vec<bool>,
    weight: T,
    conditioned: Vec<usize>,
}

impl<T: Scalar> Mask<T> {
    #[inline]
    pub fn shape(&self) -> Shape {
        self.shape
    }

    #[inline]
    pub fn weight(&self) -> T {
        self.weight
    }

    #[inline]
    pub fn conditioned_count(&self) -> usize {
        self.conditioned.len()
    }

    #[inline]
    pub fn is_conditioned(&self, row: usize, col: usize) -> bool {
        self.cells[self.shape.index(row, col)]
    }

    /// Row-major indices of conditioned cells, in data order.
    pub fn conditioned_indices(&self) -> &[usize] {
        &self.conditioned
    }

    /// Mask as a 0/1 raster.
    pub fn to_grid(&self) -> RealGrid<T> {
        let cells = self.cells.iter().map(|&m| if m { T::one() } else { T::zero() }).collect();
        RealGrid::new(self.shape, cells).expect("mask values are finite")
    }
}

/// Data values on the mask support; `None` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct DataImage<T> {
    shape: Shape,
    values: Vec<Option<T>>,
}

impl<T: Scalar> DataImage<T> {
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<T> {
        self.values[self.shape.index(row, col)]
    }

    #[inline]
    pub fn at_index(&self, index: usize) -> Option<T> {
        self.values[index]
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }
}

/// Mask and data image for `data`; `y` is 1 where the datum equals `positive`.
pub fn build_mask<T: Scalar>(
    data: &ConditioningSet,
    shape: Shape,
    lambda: T,
    positive: FaciesCode,
) -> Result<(Mask<T>, DataImage<T>), ConditioningError> {
    if data.is_empty() {
        return Err(ConditioningError::EmptyData);
    }
    if !(lambda >= T::zero() && lambda.is_finite()) {
        return Err(ConditioningError::InvalidConfig(format!("lambda must be finite and non-negative, got {lambda}")));
    }
    data.ensure_shape(shape)?;
    let mut cells = vec![false; shape.len()];
    let mut values = vec![None; shape.len()];
    let mut conditioned = Vec::with_capacity(data.len());
    for p in data.points() {
        let i = shape.index(p.row, p.col);
        cells[i] = true;
        values[i] = Some(if p.facies == positive { T::one() } else { T::zero() });
        conditioned.push(i);
    }
    Ok((Mask { shape, cells, weight: lambda, conditioned }, DataImage { shape, values }))
}

/// `generated * (1 - M) + y * M`: data values replace generated ones on the mask.
pub fn composite<T: Scalar>(
    generated: &RealGrid<T>,
    data: &DataImage<T>,
    mask: &Mask<T>,
) -> Result<RealGrid<T>, ConditioningError> {
    for s in [data.shape, mask.shape] {
        if s != generated.shape() {
            return Err(GridError::ShapeMismatch { expected: generated.shape(), found: s }.into());
        }
    }
    let mut cells = generated.cells().to_vec();
    for &i in &mask.conditioned {
        cells[i] = data.values[i].expect("data defined on mask support");
    }
    Ok(RealGrid::new(generated.shape(), cells)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditioningConfig<T> {
    /// Weight of the data-mismatch term; 0 disables it.
    pub lambda: T,
    /// Clamp applied to the discriminator output inside the log term.
    pub epsilon_clamp: T,
    pub optimizer: OptOptions<T>,
    /// Cutoff mapping generator output to facies.
    pub threshold: T,
    pub positive: FaciesCode,
    pub discriminator_mode: DiscriminatorKind,
}

impl<T: Scalar> ConditioningConfig<T> {
    pub fn for_latent_dim(latent_dim: usize) -> Self {
        Self {
            lambda: T::lit(5.0),
            epsilon_clamp: T::lit(1e-6),
            optimizer: OptOptions::for_dimension(latent_dim),
            threshold: T::lit(0.5),
            positive: CHANNEL,
            discriminator_mode: DiscriminatorKind::Plausibility,
        }
    }

    pub fn content_term_disabled(&self) -> bool {
        self.lambda == T::zero()
    }

    pub fn validate(&self, latent_dim: usize) -> Result<(), ConditioningError> {
        if !(self.lambda >= T::zero() && self.lambda.is_finite()) {
            return Err(ConditioningError::InvalidConfig("lambda must be finite and non-negative".into()));
        }
        if !(self.epsilon_clamp > T::zero() && self.epsilon_clamp < T::lit(0.5)) {
            return Err(ConditioningError::InvalidConfig("epsilon_clamp must lie in (0, 0.5)".into()));
        }
        self.optimizer.validate(latent_dim).map_err(ConditioningError::InvalidConfig)
    }
}

/// Loss split into its two terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossTerms<T> {
    pub content: T,
    pub adversarial: T,
}

impl<T: Scalar> LossTerms<T> {
    pub fn total(&self) -> T {
        self.content + self.adversarial
    }
}

/// Both loss terms for an already generated grid.
pub fn loss_terms_for_grid<T: Scalar, D: Discriminator<T> + ?Sized>(
    generated: &RealGrid<T>,
    disc: &D,
    data: &DataImage<T>,
    mask: &Mask<T>,
    epsilon: T,
) -> Result<LossTerms<T>, ConditioningError> {
    let mut abs_sum = T::zero();
    for &i in &mask.conditioned {
        let y = data.values[i].expect("data defined on mask support");
        abs_sum = abs_sum + (y - generated.cells()[i]).abs();
    }
    let content = if mask.weight == T::zero() {
        T::zero()
    } else {
        mask.weight * abs_sum / T::from_count(mask.conditioned.len())
    };
    let d = disc.score(&composite(generated, data, mask)?)?;
    let d = d.max(epsilon).min(T::one() - epsilon);
    Ok(LossTerms { content, adversarial: (T::one() - d).ln() })
}

pub fn conditioning_loss<T, G, D>(
    z: &LatentVector<T>,
    gen: &G,
    disc: &D,
    data: &DataImage<T>,
    mask: &Mask<T>,
    cfg: &ConditioningConfig<T>,
) -> Result<T, ConditioningError>
where
    T: Scalar,
    G: Generator<T> + ?Sized,
    D: Discriminator<T> + ?Sized,
{
    let generated = gen.generate(z)?;
    Ok(loss_terms_for_grid(&generated, disc, data, mask, cfg.epsilon_clamp)?.total())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalRealization<T> {
    #[serde(skip)]
    pub grid: Option<CategoricalGrid>,
    #[serde(skip)]
    pub raw: Option<RealGrid<T>>,
    pub seed: u64,
    pub z_opt: LatentVector<T>,
    pub loss_initial: T,
    pub loss_final: T,
    pub f1_at_data: T,
    pub accuracy_at_data: T,
    pub evaluations: usize,
    pub converged: bool,
    pub restart_index: usize,
}

impl<T: Scalar> ConditionalRealization<T> {
    pub fn facies(&self) -> &CategoricalGrid {
        self.grid.as_ref().expect("realization grid present")
    }
}

/// Optimizer seed used for a conditioning run with the given seed.
pub fn optimizer_seed(seed: u64) -> u64 {
    derive_seed(seed, 0x6f70_7469, 0)
}

/// Conditions one realization: starts from `sample_latent(seed)` and
/// minimizes the conditioning loss over the latent vector.
pub fn condition<T, G, D>(
    gen: &G,
    disc: &D,
    data: &ConditioningSet,
    cfg: &ConditioningConfig<T>,
    seed: u64,
) -> Result<ConditionalRealization<T>, ConditioningError>
where
    T: Scalar,
    G: Generator<T> + ?Sized,
    D: Discriminator<T> + ?Sized,
{
    let info = gen.info();
    let shape = info.shape();
    cfg.validate(info.latent_dim)?;
    if data.shape() != shape {
        data.ensure_shape(shape)?;
    }
    let (mask, image) = build_mask(data, shape, cfg.lambda, cfg.positive)?;

    let z0: LatentVector<T> = sample_latent(seed, info.latent_dim);
    let objective = |x: &[T]| -> Result<T, GeneratorError> {
        let generated = gen.generate(&LatentVector::new(x.to_vec())?)?;
        loss_terms_for_grid(&generated, disc, &image, &mask, cfg.epsilon_clamp)
            .map(|t| t.total())
            .map_err(|e| match e {
                ConditioningError::Generator(g) => g,
                other => GeneratorError::Protocol(other.to_string()),
            })
    };
    let loss_initial = objective(z0.values())?;
    let opts = OptOptions { seed: optimizer_seed(seed), ..cfg.optimizer.clone() };
    let result = try_minimize(objective, z0.values(), &opts)?;

    let z_opt = LatentVector::new(result.x_opt)?;
    let raw = gen.generate(&z_opt)?;
    let grid = threshold_grid(&raw, cfg.threshold)?;
    let counts = confusion_at_points(&grid, data, cfg.positive)?;
    Ok(ConditionalRealization {
        f1_at_data: f1_score(&counts)?,
        accuracy_at_data: counts.accuracy()?,
        grid: Some(grid),
        raw: Some(raw),
        seed,
        z_opt,
        loss_initial,
        loss_final: result.f_opt,
        evaluations: result.evaluations,
        converged: result.converged,
        restart_index: result.restart_index,
    })
}
