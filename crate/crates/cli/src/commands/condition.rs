use std::path::PathBuf;

use anyhow::bail;
use facies_qc::conditioning::{condition, derive_seed, ConditionalRealization, ConditioningConfig};
use facies_qc::generator::{DiscriminatorKind, GeneratorInfo};
use facies_qc::grid::write_gslib_categorical;
use facies_qc::report::{InputDigest, ToolInfo, SCHEMA_VERSION};
use rayon::prelude::*;
use serde::Serialize;

use super::STREAM_CONDITION;
use crate::args::{ConditioningArgs, GeneratorArgs};
use crate::handles::GeneratorHandle;
use crate::io::{create_out_dir, read_grid, read_points, realization_name, write_file, write_json};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[command(flatten)]
    pub conditioning: ConditioningArgs,
    /// Well data, CSV with header `row,col,facies`.
    #[arg(long)]
    pub data: PathBuf,
    /// Training image for the plausibility score.
    #[arg(long)]
    pub ti: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Serialize)]
struct Entry {
    grid: String,
    record: String,
    seed: u64,
    f1_at_data: f64,
}

#[derive(Serialize)]
struct Manifest {
    schema_version: u32,
    tool: ToolInfo,
    command: &'static str,
    generator: GeneratorInfo,
    discriminator: DiscriminatorKind,
    inputs: Vec<InputDigest>,
    master_seed: u64,
    config: ConditioningConfig<f64>,
    content_term_disabled: bool,
    notes: Vec<String>,
    realizations: Vec<Entry>,
}

pub fn run(args: Args) -> anyhow::Result<()> {
    if args.count == 0 {
        bail!("--count must be at least 1");
    }
    let gen = GeneratorHandle::open(&args.generator)?;
    let info = gen.info().clone();
    let (data, data_digest) = read_points(&args.data, info.shape())?;
    let mut inputs = vec![data_digest];
    let ti = match &args.ti {
        Some(p) => {
            let (g, d) = read_grid(p, "ti")?;
            inputs.push(d);
            Some(g)
        }
        None => None,
    };
    let kind = args.conditioning.discriminator.unwrap_or_else(|| gen.default_discriminator());
    let cfg = args.conditioning.config(info.latent_dim, kind);
    let disc = gen.discriminator(kind, ti.as_ref(), cfg.positive, args.seed, cfg.threshold)?;

    let seeds: Vec<u64> = (0..args.count as u64).map(|i| derive_seed(args.seed, STREAM_CONDITION, i)).collect();
    let runs = seeds
        .par_iter()
        .map(|&s| condition(&gen, &disc, &data, &cfg, s))
        .collect::<Result<Vec<ConditionalRealization<f64>>, _>>()?;

    create_out_dir(&args.out_dir)?;
    let mut realizations = Vec::with_capacity(runs.len());
    for (i, r) in runs.iter().enumerate() {
        let name = realization_name(i);
        let grid = format!("{name}.gslib");
        let record = format!("{name}.json");
        write_file(&args.out_dir.join(&grid), write_gslib_categorical(r.facies()).as_bytes())?;
        write_json(&args.out_dir.join(&record), r)?;
        realizations.push(Entry { grid, record, seed: r.seed, f1_at_data: r.f1_at_data });
    }

    let mut notes = Vec::new();
    if cfg.content_term_disabled() {
        notes.push("lambda = 0: the data-mismatch term is disabled".to_string());
    }
    if args.conditioning.uses_default_budget() {
        notes.push("optimizer budget, tolerance and restarts are engineering defaults".to_string());
    }
    if kind == DiscriminatorKind::Plausibility && ti.is_none() {
        notes.push("plausibility statistics taken from seeded unconditional draws (no --ti)".to_string());
    }
    write_json(
        &args.out_dir.join("manifest.json"),
        &Manifest {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::current(),
            command: "condition",
            generator: info,
            discriminator: kind,
            inputs,
            master_seed: args.seed,
            content_term_disabled: cfg.content_term_disabled(),
            config: cfg,
            notes,
            realizations,
        },
    )
}
