use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use facies_qc::grid::{ConditioningSet, Ensemble, Provenance};
use facies_qc::metrics::{Connectivity, Histogram, PercentilePair, SemivariogramEnvelope, WindowSpec};
use facies_qc::report::{analyze_ensemble, ti_reference, CheckReport, CheckSettings, EnsembleSection, ToolInfo, SCHEMA_VERSION};

use crate::args::parse_percentiles;
use crate::io::{create_out_dir, read_ensemble_dir, read_grid, read_points, write_csv, write_json};

pub const REPORT_SCHEMA: &str = include_str!("../../schema/check_report.schema.json");

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Training image (Geo-EAS grid).
    #[arg(long)]
    pub ti: PathBuf,
    /// Directory of realization grids (`*.gslib`).
    #[arg(long)]
    pub ensemble: PathBuf,
    /// Directory of baseline (e.g. unconditional) grids.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// Well data for F1 and at-data entropy.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Moving-window size [default: half the shorter grid side].
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Largest semivariogram lag [default: half the shorter grid side].
    #[arg(long)]
    pub max_lag: Option<usize>,
    /// Geobody neighbourhood, 4 or 8.
    #[arg(long, default_value_t = 8, value_parser = parse_connectivity)]
    pub connectivity: u8,
    /// Percentile pair `LO,HI` applied to every envelope.
    #[arg(long, value_parser = parse_percentiles)]
    pub percentiles: Option<PercentilePair>,
    #[arg(long, value_parser = parse_percentiles)]
    pub f1_percentiles: Option<PercentilePair>,
    #[arg(long, value_parser = parse_percentiles)]
    pub variogram_percentiles: Option<PercentilePair>,
    #[arg(long, value_parser = parse_percentiles)]
    pub window_percentiles: Option<PercentilePair>,
    #[arg(long, default_value_t = 1)]
    pub positive: u8,
    #[arg(long, default_value_t = 0.02)]
    pub proportion_bin_width: f64,
    #[arg(long, default_value_t = 0.1)]
    pub entropy_bin_width: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_connectivity(s: &str) -> Result<u8, String> {
    match s {
        "4" => Ok(4),
        "8" => Ok(8),
        _ => Err(format!("expected 4 or 8, got `{s}`")),
    }
}

impl Args {
    fn settings(&self, shape: facies_qc::grid::Shape) -> anyhow::Result<CheckSettings> {
        let mut s = CheckSettings::for_shape(shape);
        s.positive = self.positive;
        if let Some(w) = self.window {
            s.window.window = w;
        }
        s.window = WindowSpec::new(s.window.window, self.stride)?;
        s.window.output_shape(shape)?;
        if let Some(l) = self.max_lag {
            if l == 0 {
                bail!("--max-lag must be at least 1");
            }
            s.max_lag = l;
        }
        s.connectivity = Connectivity::from_count(self.connectivity).expect("validated by the parser");
        if let Some(p) = self.percentiles {
            s.f1_percentiles = p;
            s.variogram_percentiles = p;
            s.window_percentiles = p;
        }
        s.f1_percentiles = self.f1_percentiles.unwrap_or(s.f1_percentiles);
        s.variogram_percentiles = self.variogram_percentiles.unwrap_or(s.variogram_percentiles);
        s.window_percentiles = self.window_percentiles.unwrap_or(s.window_percentiles);
        s.proportion_bin_width = self.proportion_bin_width;
        s.entropy_bin_width = self.entropy_bin_width;
        Ok(s)
    }
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let (ti, ti_digest) = read_grid(&args.ti, "ti")?;
    let shape = ti.shape();
    let settings = args.settings(shape)?;
    let mut inputs = vec![ti_digest];

    let load = |dir: &Path, role: &str| -> anyhow::Result<_> {
        let (members, digests) = read_ensemble_dir(dir)?;
        if let Some(m) = members.iter().find(|m| m.shape() != shape) {
            bail!("{role} member shape {} does not match TI shape {shape}", m.shape());
        }
        let e = Ensemble::new(members, Provenance::External { label: role.into() })
            .with_context(|| format!("{role} in {}", dir.display()))?;
        Ok((e, digests))
    };
    let (ensemble, members) = load(&args.ensemble, "ensemble")?;
    let baseline = args.baseline.as_deref().map(|d| load(d, "baseline")).transpose()?;
    let data: Option<ConditioningSet> = match &args.data {
        Some(p) => {
            let (d, digest) = read_points(p, shape)?;
            inputs.push(digest);
            Some(d)
        }
        None => None,
    };

    let section = analyze_ensemble(&ti, &ensemble, data.as_ref(), &settings)?;
    let baseline_section =
        baseline.as_ref().map(|(e, _)| analyze_ensemble(&ti, e, data.as_ref(), &settings)).transpose()?;
    let report = CheckReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        inputs,
        members,
        baseline_members: baseline.map(|(_, d)| d),
        settings: settings.clone(),
        ti_reference: ti_reference(&ti, &settings)?,
        ensemble: section,
        baseline: baseline_section,
    };

    create_out_dir(&args.out_dir)?;
    write_json(&args.out_dir.join("report.json"), &report)?;
    write_series(&args.out_dir, &report)
}

fn labelled(report: &CheckReport) -> Vec<(&'static str, &EnsembleSection)> {
    let mut v = vec![("ensemble", &report.ensemble)];
    if let Some(b) = &report.baseline {
        v.push(("baseline", b));
    }
    v
}

fn histogram_rows<'a>(label: &'a str, scope: &'a str, h: &'a Histogram<f64>) -> impl Iterator<Item = Vec<String>> + 'a {
    h.counts.iter().enumerate().map(move |(i, c)| {
        vec![label.into(), scope.into(), h.edges[i].to_string(), h.edges[i + 1].to_string(), c.to_string()]
    })
}

/// Plot-ready CSV files, one per figure type.
fn write_series(dir: &Path, report: &CheckReport) -> anyhow::Result<()> {
    let sections = labelled(report);
    let shape = report.ensemble.shape;
    let rc = |i: usize| [(i / shape.n_cols).to_string(), (i % shape.n_cols).to_string()];

    if sections.iter().any(|(_, s)| s.f1.is_some()) {
        let mut rows = Vec::new();
        for (label, s) in &sections {
            if let Some(f1) = &s.f1 {
                for (m, (f, a)) in f1.values.iter().zip(&f1.accuracy).enumerate() {
                    rows.push(vec![label.to_string(), m.to_string(), f.to_string(), a.to_string()]);
                }
            }
        }
        write_csv(&dir.join("f1_box.csv"), &["ensemble", "member", "f1", "accuracy"], rows)?;
    }

    let mut rows = Vec::new();
    for (label, s) in &sections {
        rows.extend(histogram_rows(label, "map", &s.entropy.histogram));
        if let Some(h) = &s.entropy.at_data_histogram {
            rows.extend(histogram_rows(label, "data", h));
        }
    }
    write_csv(&dir.join("entropy_hist.csv"), &["ensemble", "scope", "bin_lo", "bin_hi", "count"], rows)?;

    let mut rows = Vec::new();
    for (label, s) in &sections {
        for (i, v) in s.entropy.map.iter().enumerate() {
            let [r, c] = rc(i);
            rows.push(vec![label.to_string(), r, c, v.to_string()]);
        }
    }
    write_csv(&dir.join("entropy_map.csv"), &["ensemble", "row", "col", "entropy"], rows)?;

    for (file, pick, ti) in [
        (
            "semivariogram_major.csv",
            (|s: &EnsembleSection| &s.semivariograms.major) as fn(&EnsembleSection) -> &SemivariogramEnvelope<f64>,
            &report.ti_reference.semivariogram_major,
        ),
        ("semivariogram_minor.csv", |s: &EnsembleSection| &s.semivariograms.minor, &report.ti_reference.semivariogram_minor),
    ] {
        let mut rows = Vec::new();
        for (label, s) in &sections {
            let env = pick(s);
            for (i, h) in env.lags.iter().enumerate() {
                let ti_gamma = ti.lags.iter().find(|l| l.h == *h).map_or(String::new(), |l| l.gamma.to_string());
                rows.push(vec![
                    label.to_string(),
                    h.to_string(),
                    env.mean[i].to_string(),
                    env.envelope.lower[i].to_string(),
                    env.envelope.upper[i].to_string(),
                    ti_gamma,
                ]);
            }
        }
        write_csv(&dir.join(file), &["ensemble", "lag", "mean", "p_lo", "p_hi", "ti"], rows)?;
    }

    let mut rows = Vec::new();
    for (label, s) in &sections {
        for (m, p) in s.proportions.values.iter().enumerate() {
            rows.push(vec![label.to_string(), m.to_string(), p.to_string()]);
        }
    }
    write_csv(&dir.join("proportions.csv"), &["ensemble", "member", "proportion"], rows)?;

    let mut rows = Vec::new();
    for (label, s) in &sections {
        rows.extend(histogram_rows(label, "members", &s.proportions.histogram));
    }
    write_csv(&dir.join("proportion_hist.csv"), &["ensemble", "scope", "bin_lo", "bin_hi", "count"], rows)?;

    let mut rows = Vec::new();
    for (label, s) in &sections {
        for (i, (a, d)) in s.pixel_maps.average.iter().zip(&s.pixel_maps.dispersion).enumerate() {
            let [r, c] = rc(i);
            rows.push(vec![label.to_string(), r, c, a.to_string(), d.to_string()]);
        }
    }
    write_csv(&dir.join("pixel_maps.csv"), &["ensemble", "row", "col", "average", "dispersion"], rows)?;

    let mut rows = Vec::new();
    for (label, s) in &sections {
        let w = &s.window.envelope;
        for i in 0..w.ti.len() {
            rows.push(vec![
                label.to_string(),
                (i / w.positions.n_cols).to_string(),
                (i % w.positions.n_cols).to_string(),
                w.ti[i].to_string(),
                w.envelope.lower[i].to_string(),
                w.envelope.upper[i].to_string(),
            ]);
        }
    }
    write_csv(&dir.join("window_envelope.csv"), &["ensemble", "window_row", "window_col", "ti", "p_lo", "p_hi"], rows)?;

    let mut rows = Vec::new();
    for (label, s) in &sections {
        for p in &s.window.scatter_sample {
            rows.push(vec![label.to_string(), p.member.to_string(), p.ti.to_string(), p.realization.to_string()]);
        }
    }
    write_csv(&dir.join("window_scatter.csv"), &["ensemble", "member", "ti", "realization"], rows)?;

    let mut rows = Vec::new();
    for (label, s) in &sections {
        for (m, c) in s.geobodies.counts.iter().enumerate() {
            rows.push(vec![label.to_string(), m.to_string(), c.to_string()]);
        }
    }
    write_csv(&dir.join("geobodies.csv"), &["ensemble", "member", "count"], rows)
}
