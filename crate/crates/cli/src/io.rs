use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use facies_qc::grid::{parse_gslib_grid, parse_points_csv, CategoricalGrid, ConditioningSet, GslibOptions, Shape};
use facies_qc::report::{sha256_hex, InputDigest};
use serde::Serialize;

pub fn read_bytes(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn digest(role: &str, path: &Path, bytes: &[u8]) -> InputDigest {
    InputDigest { role: role.into(), path: path.display().to_string(), sha256: sha256_hex(bytes) }
}

pub fn read_grid(path: &Path, role: &str) -> anyhow::Result<(CategoricalGrid, InputDigest)> {
    let bytes = read_bytes(path)?;
    let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let grid = parse_gslib_grid::<f64>(text, &GslibOptions::categorical())
        .with_context(|| format!("cannot parse {}", path.display()))?
        .into_categorical()
        .expect("categorical option yields a categorical grid");
    Ok((grid, digest(role, path, &bytes)))
}

pub fn read_points(path: &Path, shape: Shape) -> anyhow::Result<(ConditioningSet, InputDigest)> {
    let bytes = read_bytes(path)?;
    let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let data = parse_points_csv(text, shape).with_context(|| format!("cannot parse {}", path.display()))?;
    Ok((data, digest("data", path, &bytes)))
}

/// Every `*.gslib` file in `dir`, sorted by file name; the digest path is the file name.
pub fn read_ensemble_dir(dir: &Path) -> anyhow::Result<(Vec<CategoricalGrid>, Vec<InputDigest>)> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .with_context(|| format!("cannot list {}", dir.display()))?;
    files.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "gslib"));
    files.sort();
    if files.is_empty() {
        bail!("no .gslib files in {}", dir.display());
    }
    let mut grids = Vec::with_capacity(files.len());
    let mut digests = Vec::with_capacity(files.len());
    for f in &files {
        let (g, mut d) = read_grid(f, "member")?;
        d.path = f.file_name().expect("listed file").to_string_lossy().into_owned();
        grids.push(g);
        digests.push(d);
    }
    Ok((grids, digests))
}

pub fn create_out_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

pub fn write_file(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

/// Writes `header` then `rows` as CSV.
pub fn write_csv<R, I>(path: &Path, header: &[&str], rows: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
    write_file(path, &bytes)
}

pub fn realization_name(i: usize) -> String {
    format!("real_{i:04}")
}
