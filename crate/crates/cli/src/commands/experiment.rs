use std::path::PathBuf;

use anyhow::bail;
use facies_qc::conditioning::{derive_seed, run_experiment, ExperimentConfig};
use facies_qc::generator::{sample_latent, Generator};
use facies_qc::grid::{threshold_grid, CategoricalGrid};
use facies_qc::report::CheckSettings;

use super::{STREAM_TI, STREAM_TRUTH};
use crate::args::{ConditioningArgs, GeneratorArgs};
use crate::handles::GeneratorHandle;
use crate::io::{create_out_dir, read_grid, write_csv, write_json};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[command(flatten)]
    pub conditioning: ConditioningArgs,
    /// Grid the well data are sampled from: a Geo-EAS file, or an integer
    /// seed for a generated truth.
    #[arg(long)]
    pub truth: Option<String>,
    /// Training image [default: a generated grid].
    #[arg(long)]
    pub ti: Option<PathBuf>,
    #[arg(long, default_value = "1,2,4,8", value_delimiter = ',')]
    pub n_values: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub per_n: usize,
    #[arg(long, default_value_t = 20)]
    pub unconditional: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let gen = GeneratorHandle::open(&args.generator)?;
    let info = gen.info().clone();
    let threshold = args.conditioning.threshold;
    let generated = |seed: u64| -> anyhow::Result<CategoricalGrid> {
        Ok(threshold_grid(&gen.generate(&sample_latent(seed, info.latent_dim))?, threshold)?)
    };

    let (truth, truth_seed) = match args.truth.as_deref() {
        None => {
            let s = derive_seed(args.seed, STREAM_TRUTH, 0);
            (generated(s)?, Some(s))
        }
        Some(t) => match t.parse::<u64>() {
            Ok(s) => (generated(s)?, Some(s)),
            Err(_) => (read_grid(&PathBuf::from(t), "truth")?.0, None),
        },
    };
    let (ti, ti_seed) = match &args.ti {
        Some(p) => (read_grid(p, "ti")?.0, None),
        None => {
            let s = derive_seed(args.seed, STREAM_TI, 0);
            (generated(s)?, Some(s))
        }
    };
    if args.n_values.is_empty() {
        bail!("--n-values needs at least one count");
    }

    let kind = args.conditioning.discriminator.unwrap_or_else(|| gen.default_discriminator());
    let conditioning = args.conditioning.config(info.latent_dim, kind);
    let disc = gen.discriminator(kind, Some(&ti), conditioning.positive, args.seed, threshold)?;
    let mut checks = CheckSettings::for_shape(info.shape());
    checks.positive = conditioning.positive;
    let cfg = ExperimentConfig {
        n_values: args.n_values.clone(),
        realizations_per_n: args.per_n,
        unconditional_count: args.unconditional,
        ti,
        truth,
        ti_seed,
        truth_seed,
        master_seed: args.seed,
        conditioning,
        checks,
    };
    let report = run_experiment(&cfg, &gen, &disc)?;

    create_out_dir(&args.out_dir)?;
    write_json(&args.out_dir.join("report.json"), &report)?;
    let mut header = vec!["check"];
    header.extend(report.summary.columns.iter().map(String::as_str));
    let rows = report.summary.rows.iter().map(|r| {
        std::iter::once(r.check.clone())
            .chain(r.values.iter().map(|v| v.map_or(String::new(), |x| x.to_string())))
            .collect::<Vec<_>>()
    });
    write_csv(&args.out_dir.join("summary.csv"), &header, rows)?;

    let mut rows = Vec::new();
    for case in &report.cases {
        for (label, f1) in [("conditional", case.conditional.f1.as_ref()), ("unconditional", Some(&case.baseline_f1))] {
            if let Some(f1) = f1 {
                for (m, v) in f1.values.iter().enumerate() {
                    rows.push(vec![case.n.to_string(), label.to_string(), m.to_string(), v.to_string()]);
                }
            }
        }
    }
    write_csv(&args.out_dir.join("f1_box.csv"), &["n", "ensemble", "member", "f1"], rows)
}
