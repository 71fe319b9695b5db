//! Sweep over the number of conditioning points.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{condition, ConditionalRealization, ConditioningConfig, ConditioningError};
use crate::generator::{sample_latent, Discriminator, Generator, GeneratorInfo};
use crate::grid::{threshold_grid, write_gslib_categorical, CategoricalGrid, ConditioningSet, Ensemble, Provenance, WellPoint};
use crate::report::{
    analyze_ensemble, f1_section, sha256_hex, ti_reference, CheckSettings, EnsembleSection, F1Section, TiReference,
    ToolInfo, SCHEMA_VERSION,
};

const STREAM_LOCATIONS: u64 = 1;
const STREAM_CONDITIONAL: u64 = 2;
const STREAM_UNCONDITIONAL: u64 = 3;

/// Seed for item `index` of `stream`, independent of evaluation order.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(master ^ mix(stream.rotate_left(32) ^ mix(index)))
}

/// `n` distinct cells of `truth`, uniformly without replacement, in raster order.
pub fn sample_locations(truth: &CategoricalGrid, n: usize, seed: u64) -> Result<ConditioningSet, ConditioningError> {
    let shape = truth.shape();
    if n == 0 || n > shape.len() {
        return Err(ConditioningError::InvalidConfig(format!("cannot sample {n} locations from {} cells", shape.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = index::sample(&mut rng, shape.len(), n).into_vec();
    cells.sort_unstable();
    let locations: Vec<(usize, usize)> = cells.iter().map(|&i| (i / shape.n_cols, i % shape.n_cols)).collect();
    Ok(ConditioningSet::sample_from(truth, &locations)?)
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub realizations_per_n: usize,
    pub unconditional_count: usize,
    pub ti: CategoricalGrid,
    pub truth: CategoricalGrid,
    /// Seeds the TI and truth grids were generated from, when they were.
    pub ti_seed: Option<u64>,
    pub truth_seed: Option<u64>,
    pub master_seed: u64,
    pub conditioning: ConditioningConfig<f64>,
    pub checks: CheckSettings,
}

impl ExperimentConfig {
    pub fn validate(&self, info: &GeneratorInfo) -> Result<(), ConditioningError> {
        let invalid = |m: String| Err(ConditioningError::InvalidConfig(m));
        let shape = info.shape();
        if self.n_values.is_empty() {
            return invalid("at least one N value is required".into());
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("N values must be strictly increasing".into());
        }
        if self.n_values[0] == 0 || *self.n_values.last().unwrap() > shape.len() {
            return invalid(format!("every N must lie in 1..={}", shape.len()));
        }
        if self.realizations_per_n == 0 || self.unconditional_count == 0 {
            return invalid("realization counts must be at least 1".into());
        }
        for (name, g) in [("ti", &self.ti), ("truth", &self.truth)] {
            if g.shape() != shape {
                return invalid(format!("{name} shape {} does not match generator shape {shape}", g.shape()));
            }
        }
        self.conditioning.validate(info.latent_dim)
    }
}

/// Echo of the experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    pub n_values: Vec<usize>,
    pub realizations_per_n: usize,
    pub unconditional_count: usize,
    pub generator: GeneratorInfo,
    pub conditioning: ConditioningConfig<f64>,
    pub content_term_disabled: bool,
    pub checks: CheckSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridIdentity {
    pub seed: Option<u64>,
    /// SHA-256 of the grid written in the categorical Geo-EAS format.
    pub sha256: String,
    pub proportion: f64,
}

impl GridIdentity {
    fn of(grid: &CategoricalGrid, seed: Option<u64>, positive: u8) -> Self {
        Self {
            seed,
            sha256: sha256_hex(write_gslib_categorical(grid).as_bytes()),
            proportion: crate::metrics::facies_proportion(grid, positive),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnconditionalSection {
    pub seeds: Vec<u64>,
    pub section: EnsembleSection,
}

pub type ConditionalRunSummary = ConditionalRealization<f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentCase {
    pub n: usize,
    pub location_seed: u64,
    pub data: Vec<WellPoint>,
    pub runs: Vec<ConditionalRunSummary>,
    pub conditional: EnsembleSection,
    /// Unconditional members scored at this case's data locations.
    pub baseline_f1: F1Section,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub check: String,
    /// One value per column; `None` where a check does not apply.
    pub values: Vec<Option<f64>>,
}

/// Mean of each check per ensemble: a TI column followed by one column per N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub columns: Vec<String>,
    pub rows: Vec<SummaryRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub master_seed: u64,
    pub settings: ExperimentSettings,
    pub ti: GridIdentity,
    pub truth: GridIdentity,
    pub ti_reference: TiReference,
    pub unconditional: UnconditionalSection,
    pub cases: Vec<ExperimentCase>,
    pub summary: SummaryTable,
}

/// Runs the N sweep. Conditioning runs execute in parallel; results are
/// assembled in `(N, realization)` order, so the report depends only on the
/// configuration.
pub fn run_experiment<G, D>(cfg: &ExperimentConfig, gen: &G, disc: &D) -> Result<ExperimentReport, ConditioningError>
where
    G: Generator<f64> + ?Sized,
    D: Discriminator<f64> + ?Sized,
{
    let info = gen.info().clone();
    cfg.validate(&info)?;
    let positive = cfg.conditioning.positive;
    let threshold = cfg.conditioning.threshold;
    let master = cfg.master_seed;

    let unconditional_seeds: Vec<u64> =
        (0..cfg.unconditional_count as u64).map(|i| derive_seed(master, STREAM_UNCONDITIONAL, i)).collect();
    let unconditional_members = unconditional_seeds
        .par_iter()
        .map(|&s| Ok(threshold_grid(&gen.generate(&sample_latent(s, info.latent_dim))?, threshold)?))
        .collect::<Result<Vec<_>, ConditioningError>>()?;
    let unconditional = Ensemble::new(unconditional_members, Provenance::Unconditional)?;

    let data_sets = cfg
        .n_values
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let seed = derive_seed(master, STREAM_LOCATIONS, k as u64);
            Ok((n, seed, sample_locations(&cfg.truth, n, seed)?))
        })
        .collect::<Result<Vec<_>, ConditioningError>>()?;

    let jobs: Vec<(usize, u64)> = (0..data_sets.len())
        .flat_map(|k| {
            (0..cfg.realizations_per_n as u64)
                .map(move |r| (k, derive_seed(master, STREAM_CONDITIONAL, ((k as u64) << 32) | r)))
        })
        .collect();
    let mut runs = jobs
        .par_iter()
        .map(|&(k, seed)| condition(gen, disc, &data_sets[k].2, &cfg.conditioning, seed))
        .collect::<Result<Vec<_>, ConditioningError>>()?
        .into_iter();

    let mut cases = Vec::with_capacity(data_sets.len());
    for (n, location_seed, data) in &data_sets {
        let mut case_runs: Vec<ConditionalRealization<f64>> = runs.by_ref().take(cfg.realizations_per_n).collect();
        let members: Vec<CategoricalGrid> = case_runs.iter_mut().map(|r| r.grid.take().expect("fresh run")).collect();
        for r in &mut case_runs {
            r.raw = None;
        }
        let ensemble = Ensemble::new(members, Provenance::Conditional { n: *n })?;
        cases.push(ExperimentCase {
            n: *n,
            location_seed: *location_seed,
            data: data.points().to_vec(),
            runs: case_runs,
            conditional: analyze_ensemble(&cfg.ti, &ensemble, Some(data), &cfg.checks)?,
            baseline_f1: f1_section(unconditional.members(), data, positive, cfg.checks.f1_percentiles)?,
        });
    }

    let ti_ref = ti_reference(&cfg.ti, &cfg.checks)?;
    let summary = summary_table(&ti_ref, &cases);
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        master_seed: master,
        settings: ExperimentSettings {
            n_values: cfg.n_values.clone(),
            realizations_per_n: cfg.realizations_per_n,
            unconditional_count: cfg.unconditional_count,
            generator: info,
            content_term_disabled: cfg.conditioning.content_term_disabled(),
            conditioning: cfg.conditioning.clone(),
            checks: cfg.checks.clone(),
        },
        ti: GridIdentity::of(&cfg.ti, cfg.ti_seed, positive),
        truth: GridIdentity::of(&cfg.truth, cfg.truth_seed, positive),
        ti_reference: ti_ref,
        unconditional: UnconditionalSection {
            seeds: unconditional_seeds,
            section: analyze_ensemble(&cfg.ti, &unconditional, None, &cfg.checks)?,
        },
        cases,
        summary,
    })
}

fn summary_table(ti: &TiReference, cases: &[ExperimentCase]) -> SummaryTable {
    let mut columns = vec!["TI".to_string()];
    columns.extend(cases.iter().map(|c| format!("N={}", c.n)));
    let row = |check: &str, ti_value: Option<f64>, per_case: &dyn Fn(&ExperimentCase) -> Option<f64>| SummaryRow {
        check: check.into(),
        values: std::iter::once(ti_value).chain(cases.iter().map(per_case)).collect(),
    };
    SummaryTable {
        columns,
        rows: vec![
            row("F1", None, &|c| c.conditional.f1.as_ref().map(|f| f.mean)),
            row("Channel Proportions", Some(ti.proportion), &|c| Some(c.conditional.proportions.mean)),
            row("Number of Geobodies", Some(ti.geobody_count as f64), &|c| Some(c.conditional.geobodies.mean)),
        ],
    }
}
