//! Generator and discriminator selected on the command line.

use anyhow::{bail, Context};
use facies_qc::conditioning::derive_seed;
use facies_qc::generator::{
    sample_latent, Discriminator, DiscriminatorKind, ExternalGenerator, Generator, GeneratorError, GeneratorInfo,
    LatentVector, PlausibilityScorer, ProceduralGenerator, TIStats, PARAMS_PER_CHANNEL,
};
use facies_qc::grid::{threshold_grid, CategoricalGrid, RealGrid, Shape};

use crate::args::GeneratorArgs;

/// Unconditional draws used for reference statistics when no TI is given.
const REFERENCE_SAMPLES: u64 = 32;
const STREAM_REFERENCE: u64 = 20;

pub enum GeneratorHandle {
    Procedural(ProceduralGenerator<f64>),
    External(ExternalGenerator),
}

impl GeneratorHandle {
    pub fn open(args: &GeneratorArgs) -> anyhow::Result<Self> {
        if args.generator == "procedural" {
            let latent_dim = args.latent_dim.unwrap_or(15);
            if latent_dim == 0 || latent_dim % PARAMS_PER_CHANNEL != 0 {
                bail!("--latent-dim must be a positive multiple of {PARAMS_PER_CHANNEL} for the procedural generator");
            }
            let shape = Shape::new(args.rows.unwrap_or(64), args.cols.unwrap_or(64))?;
            return Ok(Self::Procedural(ProceduralGenerator::new(shape, latent_dim / PARAMS_PER_CHANNEL)?));
        }
        let Some(command) = args.generator.strip_prefix("exec:") else {
            bail!("--generator must be `procedural` or `exec:<command>`, got `{}`", args.generator);
        };
        let ext = ExternalGenerator::from_command_line(command, args.timeout()?)
            .with_context(|| format!("external generator `{command}`"))?;
        let info = Generator::<f64>::info(&ext);
        for (flag, wanted, declared) in [
            ("--latent-dim", args.latent_dim, info.latent_dim),
            ("--rows", args.rows, info.n_rows),
            ("--cols", args.cols, info.n_cols),
        ] {
            if let Some(w) = wanted {
                if w != declared {
                    bail!("{flag} {w} does not match the external generator's declared {declared}");
                }
            }
        }
        Ok(Self::External(ext))
    }

    pub fn info(&self) -> &GeneratorInfo {
        Generator::<f64>::info(self)
    }

    pub fn default_discriminator(&self) -> DiscriminatorKind {
        if self.info().supports_discriminator {
            DiscriminatorKind::External
        } else {
            DiscriminatorKind::Plausibility
        }
    }

    /// Realism score of the requested kind. Plausibility uses `ti` when given,
    /// otherwise the mean statistics of seeded unconditional draws.
    pub fn discriminator(
        &self,
        kind: DiscriminatorKind,
        ti: Option<&CategoricalGrid>,
        positive: u8,
        seed: u64,
        threshold: f64,
    ) -> anyhow::Result<DiscriminatorHandle<'_>> {
        match kind {
            DiscriminatorKind::External => match self {
                Self::External(ext) if Generator::<f64>::info(ext).supports_discriminator => Ok(DiscriminatorHandle::External(ext)),
                _ => bail!("the generator does not provide a discriminator; use --discriminator plausibility"),
            },
            DiscriminatorKind::Plausibility => {
                if let Some(ti) = ti {
                    if ti.shape() != self.info().shape() {
                        bail!("TI shape {} does not match generator shape {}", ti.shape(), self.info().shape());
                    }
                    return Ok(DiscriminatorHandle::Plausibility(PlausibilityScorer::from_ti(ti, positive)));
                }
                let dim = self.info().latent_dim;
                let members = (0..REFERENCE_SAMPLES)
                    .map(|i| {
                        let z = sample_latent(derive_seed(seed, STREAM_REFERENCE, i), dim);
                        Ok(threshold_grid(&self.generate(&z)?, threshold)?)
                    })
                    .collect::<anyhow::Result<Vec<_>>>()?;
                let shape = self.info().shape();
                let lags = 8.min(shape.n_rows.min(shape.n_cols).saturating_sub(1)).max(1);
                Ok(DiscriminatorHandle::Plausibility(PlausibilityScorer::new(TIStats::from_ensemble(
                    &members, positive, lags,
                ))))
            }
        }
    }
}

impl Generator<f64> for GeneratorHandle {
    fn info(&self) -> &GeneratorInfo {
        match self {
            Self::Procedural(g) => g.info(),
            Self::External(g) => Generator::<f64>::info(g),
        }
    }

    fn generate(&self, z: &LatentVector<f64>) -> Result<RealGrid<f64>, GeneratorError> {
        match self {
            Self::Procedural(g) => g.generate(z),
            Self::External(g) => g.generate(z),
        }
    }
}

pub enum DiscriminatorHandle<'a> {
    Plausibility(PlausibilityScorer<f64>),
    External(&'a ExternalGenerator),
}

impl Discriminator<f64> for DiscriminatorHandle<'_> {
    fn kind(&self) -> DiscriminatorKind {
        match self {
            Self::Plausibility(_) => DiscriminatorKind::Plausibility,
            Self::External(_) => DiscriminatorKind::External,
        }
    }

    fn score(&self, grid: &RealGrid<f64>) -> Result<f64, GeneratorError> {
        match self {
            Self::Plausibility(d) => d.score(grid),
            Self::External(d) => d.score(grid),
        }
    }
}
