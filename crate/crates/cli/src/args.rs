use std::time::Duration;

use clap::Args;
use facies_qc::conditioning::ConditioningConfig;
use facies_qc::generator::{DiscriminatorKind, DEFAULT_TIMEOUT};
use facies_qc::metrics::PercentilePair;

#[derive(Args, Debug, Clone)]
pub struct GeneratorArgs {
    /// `procedural` or `exec:<command line>`.
    #[arg(long, default_value = "procedural")]
    pub generator: String,
    /// Latent dimension; for the procedural generator a multiple of 5 (5 per channel).
    #[arg(long)]
    pub latent_dim: Option<usize>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// Per-request timeout for external generators, in seconds.
    #[arg(long, default_value_t = DEFAULT_TIMEOUT.as_secs_f64())]
    pub timeout_secs: f64,
}

impl GeneratorArgs {
    pub fn timeout(&self) -> anyhow::Result<Duration> {
        Duration::try_from_secs_f64(self.timeout_secs).map_err(|e| anyhow::anyhow!("--timeout-secs: {e}"))
    }
}

#[derive(Args, Debug, Clone)]
pub struct ConditioningArgs {
    /// Weight of the data-mismatch term; 0 disables it.
    #[arg(long, default_value_t = 5.0)]
    pub lambda: f64,
    /// Clamp on the realism score inside the log term.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Evaluation budget per restart [default: 500 x latent dimension].
    #[arg(long)]
    pub max_evaluations: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1.0)]
    pub initial_step: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// `plausibility` or `external` [default: external when the generator provides one].
    #[arg(long, value_parser = parse_discriminator)]
    pub discriminator: Option<DiscriminatorKind>,
    /// Positive facies code.
    #[arg(long, default_value_t = 1)]
    pub positive: u8,
}

impl ConditioningArgs {
    pub fn config(&self, latent_dim: usize, kind: DiscriminatorKind) -> ConditioningConfig<f64> {
        let mut cfg = ConditioningConfig::for_latent_dim(latent_dim);
        cfg.lambda = self.lambda;
        cfg.epsilon_clamp = self.epsilon;
        cfg.threshold = self.threshold;
        cfg.positive = self.positive;
        cfg.discriminator_mode = kind;
        if let Some(m) = self.max_evaluations {
            cfg.optimizer.max_evaluations = m;
        }
        cfg.optimizer.restarts = self.restarts;
        cfg.optimizer.initial_step = self.initial_step;
        cfg.optimizer.tolerance = self.tolerance;
        cfg
    }

    pub fn uses_default_budget(&self) -> bool {
        self.max_evaluations.is_none() && self.restarts == 3 && self.tolerance == 1e-6
    }
}

pub fn parse_discriminator(s: &str) -> Result<DiscriminatorKind, String> {
    match s {
        "plausibility" => Ok(DiscriminatorKind::Plausibility),
        "external" => Ok(DiscriminatorKind::External),
        _ => Err(format!("expected `plausibility` or `external`, got `{s}`")),
    }
}

/// `LO,HI`, e.g. `25,75`.
pub fn parse_percentiles(s: &str) -> Result<PercentilePair, String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected LO,HI, got `{s}`"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("`{lo}`: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("`{hi}`: {e}"))?;
    PercentilePair::new(lo, hi).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_pairs() {
        assert_eq!(parse_percentiles("10, 90").unwrap(), PercentilePair::P10_P90);
        assert!(parse_percentiles("90,10").is_err());
        assert!(parse_percentiles("50").is_err());
    }
}
