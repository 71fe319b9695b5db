//! Serializable reports assembled from the metrics suite.
//!
//! Reports are plain data in `f64`; every section can be recomputed from the
//! inputs (identified by SHA-256) and the recorded seeds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::grid::{CategoricalGrid, ConditioningSet, Ensemble, FaciesCode, Shape, CHANNEL};
use crate::metrics::{
    confusion_at_points, count_geobodies, ensemble_semivariogram_envelope, entropy_at_points, entropy_map,
    f1_score, facies_proportion, percentile_pair, pixel_average_map, pixel_dispersion_map, directional_semivariogram,
    window_envelope, window_scatter, Connectivity, Histogram, LagDirection, MetricsError, PercentilePair,
    Semivariogram, SemivariogramEnvelope, WindowEnvelope, WindowSpec,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Members whose window pairs go into the scatter sample.
const SCATTER_MEMBERS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        Self { name: crate::TOOL_NAME.into(), version: crate::TOOL_VERSION.into() }
    }
}

/// Content hash of an input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parameters of the check suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSettings {
    pub positive: FaciesCode,
    pub max_lag: usize,
    pub window: WindowSpec,
    pub connectivity: Connectivity,
    pub f1_percentiles: PercentilePair,
    pub variogram_percentiles: PercentilePair,
    pub window_percentiles: PercentilePair,
    pub proportion_bin_width: f64,
    pub entropy_bin_width: f64,
}

impl CheckSettings {
    /// Defaults for a grid: lags and window up to half the shorter side, stride 1.
    pub fn for_shape(shape: Shape) -> Self {
        let half = (shape.n_rows.min(shape.n_cols) / 2).max(1);
        Self {
            positive: CHANNEL,
            max_lag: half,
            window: WindowSpec { window: half, stride: 1 },
            connectivity: Connectivity::Eight,
            f1_percentiles: PercentilePair::P25_P75,
            variogram_percentiles: PercentilePair::P10_P90,
            window_percentiles: PercentilePair::P25_P75,
            proportion_bin_width: 0.02,
            entropy_bin_width: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiReference {
    pub proportion: f64,
    pub geobody_count: usize,
    pub semivariogram_major: Semivariogram<f64>,
    pub semivariogram_minor: Semivariogram<f64>,
}

pub fn ti_reference(ti: &CategoricalGrid, settings: &CheckSettings) -> Result<TiReference, MetricsError> {
    Ok(TiReference {
        proportion: facies_proportion(ti, settings.positive),
        geobody_count: count_geobodies(ti, settings.positive, settings.connectivity).count,
        semivariogram_major: directional_semivariogram(ti, settings.positive, LagDirection::MAJOR, settings.max_lag)?,
        semivariogram_minor: directional_semivariogram(ti, settings.positive, LagDirection::MINOR, settings.max_lag)?,
    })
}

/// Per-realization F1 at the data locations with its summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F1Section {
    pub values: Vec<f64>,
    pub accuracy: Vec<f64>,
    pub mean: f64,
    pub percentiles: PercentilePair,
    pub p_lo: f64,
    pub p_hi: f64,
}

pub fn f1_section(
    members: &[CategoricalGrid],
    data: &ConditioningSet,
    positive: FaciesCode,
    percentiles: PercentilePair,
) -> Result<F1Section, MetricsError> {
    let pairs = members
        .par_iter()
        .map(|m| {
            let c = confusion_at_points(m, data, positive)?;
            Ok((f1_score::<f64>(&c)?, c.accuracy::<f64>()?))
        })
        .collect::<Result<Vec<(f64, f64)>, MetricsError>>()?;
    let (values, accuracy): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (p_lo, p_hi) = percentile_pair(&values, percentiles)?;
    Ok(F1Section { mean: mean(&values), values, accuracy, percentiles, p_lo, p_hi })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySection {
    /// Row-major entropy map.
    pub map: Vec<f64>,
    pub mean: f64,
    pub histogram: Histogram<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_data: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_data_histogram: Option<Histogram<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemivariogramSection {
    pub major: SemivariogramEnvelope<f64>,
    pub minor: SemivariogramEnvelope<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionSection {
    pub values: Vec<f64>,
    pub mean: f64,
    pub histogram: Histogram<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelMaps {
    pub average: Vec<f64>,
    pub dispersion: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub member: usize,
    pub ti: f64,
    pub realization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSection {
    pub envelope: WindowEnvelope<f64>,
    /// All window pairs of the first few members.
    pub scatter_sample: Vec<ScatterPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeobodySection {
    pub connectivity: Connectivity,
    pub counts: Vec<usize>,
    pub mean: f64,
}

/// Full check suite for one ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSection {
    pub members: usize,
    pub shape: Shape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<F1Section>,
    pub entropy: EntropySection,
    pub semivariograms: SemivariogramSection,
    pub proportions: ProportionSection,
    pub pixel_maps: PixelMaps,
    pub window: WindowSection,
    pub geobodies: GeobodySection,
}

/// Runs every check on `ensemble`; F1 and at-data entropy need `data`.
pub fn analyze_ensemble(
    ti: &CategoricalGrid,
    ensemble: &Ensemble,
    data: Option<&ConditioningSet>,
    settings: &CheckSettings,
) -> Result<EnsembleSection, MetricsError> {
    let positive = settings.positive;
    let members = ensemble.members();
    let shape = ensemble.shape();
    if ti.shape() != shape {
        return Err(crate::grid::GridError::ShapeMismatch { expected: ti.shape(), found: shape }.into());
    }

    let f1 = data.map(|d| f1_section(members, d, positive, settings.f1_percentiles)).transpose()?;

    let ent = entropy_map::<f64>(ensemble, positive);
    let at_data = data.map(|d| entropy_at_points(&ent, d)).transpose()?;
    let at_data_histogram =
        at_data.as_ref().map(|v| Histogram::from_values(v, settings.entropy_bin_width, 0.0)).transpose()?;
    let entropy = EntropySection {
        mean: mean(ent.cells()),
        histogram: Histogram::from_values(ent.cells(), settings.entropy_bin_width, 0.0)?,
        map: ent.into_cells(),
        at_data,
        at_data_histogram,
    };

    let semivariograms = SemivariogramSection {
        major: ensemble_semivariogram_envelope(
            ensemble,
            positive,
            LagDirection::MAJOR,
            settings.max_lag,
            settings.variogram_percentiles,
        )?,
        minor: ensemble_semivariogram_envelope(
            ensemble,
            positive,
            LagDirection::MINOR,
            settings.max_lag,
            settings.variogram_percentiles,
        )?,
    };

    let values: Vec<f64> = members.par_iter().map(|m| facies_proportion(m, positive)).collect();
    let proportions = ProportionSection {
        mean: mean(&values),
        histogram: Histogram::from_values(&values, settings.proportion_bin_width, 0.0)?,
        values,
    };

    let pixel_maps = PixelMaps {
        average: pixel_average_map::<f64>(ensemble, positive).into_cells(),
        dispersion: pixel_dispersion_map::<f64>(ensemble, positive).into_cells(),
    };

    let mut scatter_sample = Vec::new();
    for (k, m) in members.iter().take(SCATTER_MEMBERS).enumerate() {
        for (t, r) in window_scatter::<f64>(ti, m, positive, settings.window)? {
            scatter_sample.push(ScatterPoint { member: k, ti: t, realization: r });
        }
    }
    let window = WindowSection {
        envelope: window_envelope(ti, ensemble, positive, settings.window, settings.window_percentiles)?,
        scatter_sample,
    };

    let counts: Vec<usize> =
        members.par_iter().map(|m| count_geobodies(m, positive, settings.connectivity).count).collect();
    let geobodies = GeobodySection {
        connectivity: settings.connectivity,
        mean: counts.iter().sum::<usize>() as f64 / counts.len() as f64,
        counts,
    };

    Ok(EnsembleSection {
        members: members.len(),
        shape,
        f1,
        entropy,
        semivariograms,
        proportions,
        pixel_maps,
        window,
        geobodies,
    })
}

/// Output of the `check` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub inputs: Vec<InputDigest>,
    /// Ensemble member files in the order they were analyzed.
    pub members: Vec<InputDigest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_members: Option<Vec<InputDigest>>,
    pub settings: CheckSettings,
    pub ti_reference: TiReference,
    pub ensemble: EnsembleSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<EnsembleSection>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Provenance, WellPoint};

    fn grid(rows: &[&[u8]]) -> CategoricalGrid {
        CategoricalGrid::from_rows(rows).unwrap()
    }

    #[test]
    fn sha256_of_known_string() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn ti_alone_is_degenerate() {
        let ti = grid(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1], &[0, 0, 0, 1]]);
        let settings = CheckSettings::for_shape(ti.shape());
        let e = Ensemble::new(vec![ti.clone()], Provenance::Unconditional).unwrap();
        let s = analyze_ensemble(&ti, &e, None, &settings).unwrap();
        assert!(s.f1.is_none());
        assert!(s.entropy.map.iter().all(|&v| v == 0.0));
        assert_eq!(s.proportions.histogram.counts, vec![1]);
        assert!(s.proportions.histogram.edges[0] <= 7.0 / 16.0 && 7.0 / 16.0 < s.proportions.histogram.edges[1]);
        assert_eq!(s.geobodies.counts, vec![1]);
        assert_eq!(s.window.envelope.ti, s.window.envelope.envelope.lower);
    }

    #[test]
    fn data_enables_f1_and_at_data_entropy() {
        let ti = grid(&[&[1, 0], &[0, 1]]);
        let other = grid(&[&[1, 1], &[0, 0]]);
        let e = Ensemble::new(vec![ti.clone(), other], Provenance::Unconditional).unwrap();
        let data =
            ConditioningSet::new(ti.shape(), vec![WellPoint { row: 0, col: 0, facies: 1 }, WellPoint { row: 1, col: 1, facies: 1 }])
                .unwrap();
        let s = analyze_ensemble(&ti, &e, Some(&data), &CheckSettings::for_shape(ti.shape())).unwrap();
        let f1 = s.f1.unwrap();
        assert_eq!(f1.values, vec![1.0, 2.0 / 3.0]);
        assert_eq!(s.entropy.at_data.unwrap(), vec![0.0, 1.0]);
    }
}
