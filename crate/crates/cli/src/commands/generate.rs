use std::path::PathBuf;

use anyhow::bail;
use facies_qc::conditioning::derive_seed;
use facies_qc::generator::{sample_latent, Generator, GeneratorInfo};
use facies_qc::grid::{threshold_grid, write_gslib_categorical};
use facies_qc::report::{sha256_hex, ToolInfo, SCHEMA_VERSION};
use rayon::prelude::*;
use serde::Serialize;

use super::STREAM_GENERATE;
use crate::args::GeneratorArgs;
use crate::handles::GeneratorHandle;
use crate::io::{create_out_dir, realization_name, write_file, write_json};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

#[derive(Serialize)]
struct Entry {
    file: String,
    seed: u64,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    schema_version: u32,
    tool: ToolInfo,
    command: &'static str,
    generator: GeneratorInfo,
    master_seed: u64,
    threshold: f64,
    realizations: Vec<Entry>,
}

pub fn run(args: Args) -> anyhow::Result<()> {
    if args.count == 0 {
        bail!("--count must be at least 1");
    }
    let gen = GeneratorHandle::open(&args.generator)?;
    let info = gen.info().clone();
    let seeds: Vec<u64> = (0..args.count as u64).map(|i| derive_seed(args.seed, STREAM_GENERATE, i)).collect();
    let texts = seeds
        .par_iter()
        .map(|&s| {
            let raw = gen.generate(&sample_latent(s, info.latent_dim))?;
            Ok(write_gslib_categorical(&threshold_grid(&raw, args.threshold)?))
        })
        .collect::<anyhow::Result<Vec<String>>>()?;

    create_out_dir(&args.out_dir)?;
    let mut realizations = Vec::with_capacity(texts.len());
    for (i, (text, &seed)) in texts.iter().zip(&seeds).enumerate() {
        let file = format!("{}.gslib", realization_name(i));
        write_file(&args.out_dir.join(&file), text.as_bytes())?;
        realizations.push(Entry { file, seed, sha256: sha256_hex(text.as_bytes()) });
    }
    write_json(
        &args.out_dir.join("manifest.json"),
        &Manifest {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::current(),
            command: "generate",
            generator: info,
            master_seed: args.seed,
            threshold: args.threshold,
            realizations,
        },
    )
}
