//! Data conditioning of latent-variable facies generators and acceptance
//! checks for the resulting realization ensembles.
//!
//! The numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common `f64` instantiation.

pub mod conditioning;
pub mod generator;
pub mod grid;
pub mod metrics;
pub mod optimizer;
pub mod report;
mod scalar;

pub use scalar::Scalar;

pub type RealGrid64 = grid::RealGrid<f64>;
pub type RealGrid32 = grid::RealGrid<f32>;
pub type LatentVector64 = generator::LatentVector<f64>;
pub type OptOptions64 = optimizer::OptOptions<f64>;
pub type OptResult64 = optimizer::OptResult<f64>;
pub type ConditioningConfig64 = conditioning::ConditioningConfig<f64>;
pub type ConditionalRealization64 = conditioning::ConditionalRealization<f64>;
pub type ProceduralGenerator64 = generator::ProceduralGenerator<f64>;
pub type PlausibilityScorer64 = generator::PlausibilityScorer<f64>;

/// Tool name embedded in reports.
pub const TOOL_NAME: &str = "facies-qc";
/// Crate version embedded in reports.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
