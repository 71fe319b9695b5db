use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::grid::{CategoricalGrid, Ensemble, FaciesCode, RealGrid};
use crate::scalar::Scalar;

/// Fraction of cells holding `code`.
pub fn facies_proportion<T: Scalar>(grid: &CategoricalGrid, code: FaciesCode) -> T {
    let hits = grid.cells().iter().filter(|&&c| c == code).count();
    T::from_count(hits) / T::from_count(grid.cells().len())
}

/// Fixed-width histogram. Edges are aligned to multiples of `bin_width` from
/// `origin`; bins run from the one holding the minimum to the one holding the
/// maximum. Bins are `[lo, hi)`, the last one closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram<T> {
    pub bin_width: T,
    pub edges: Vec<T>,
    pub counts: Vec<usize>,
}

impl<T: Scalar> Histogram<T> {
    pub fn from_values(values: &[T], bin_width: T, origin: T) -> Result<Self, MetricsError> {
        if !(bin_width > T::zero() && bin_width.is_finite()) {
            return Err(MetricsError::InvalidBinWidth(bin_width.as_f64()));
        }
        if values.is_empty() {
            return Err(MetricsError::EmptyValues);
        }
        // Values a hair below an edge (e.g. 0.3 vs 3 * 0.1) belong to the upper bin.
        let slack = T::lit(1e-9);
        let bin_of = |v: T| ((v - origin) / bin_width + slack).floor().to_i64().expect("finite histogram value");
        let indices: Vec<i64> = values.iter().map(|&v| bin_of(v)).collect();
        let first = *indices.iter().min().expect("non-empty");
        let last = *indices.iter().max().expect("non-empty");
        let n_bins = (last - first + 1) as usize;
        let mut counts = vec![0usize; n_bins];
        for i in indices {
            counts[(i - first) as usize] += 1;
        }
        let edges = (0..=n_bins as i64)
            .map(|k| origin + bin_width * T::lit((first + k) as f64))
            .collect();
        Ok(Self { bin_width, edges, counts })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Histogram of member proportions of `code`, bins aligned to zero.
pub fn proportion_histogram<T: Scalar>(
    ensemble: &Ensemble,
    code: FaciesCode,
    bin_width: T,
) -> Result<Histogram<T>, MetricsError> {
    let props: Vec<T> = ensemble.members().par_iter().map(|g| facies_proportion(g, code)).collect();
    Histogram::from_values(&props, bin_width, T::zero())
}

/// Number of members holding `positive` at each pixel.
pub(crate) fn positive_counts(ensemble: &Ensemble, positive: FaciesCode) -> Vec<usize> {
    let mut counts = vec![0usize; ensemble.shape().len()];
    for m in ensemble.members() {
        for (k, &c) in counts.iter_mut().zip(m.cells()) {
            *k += usize::from(c == positive);
        }
    }
    counts
}

/// Per-pixel mean of the positive indicator.
pub fn pixel_average_map<T: Scalar>(ensemble: &Ensemble, positive: FaciesCode) -> RealGrid<T> {
    let n = T::from_count(ensemble.len());
    let cells = positive_counts(ensemble, positive).into_iter().map(|k| T::from_count(k) / n).collect();
    RealGrid::new(ensemble.shape(), cells).expect("averages are finite")
}

/// Per-pixel population variance of the positive indicator.
pub fn pixel_dispersion_map<T: Scalar>(ensemble: &Ensemble, positive: FaciesCode) -> RealGrid<T> {
    let n = T::from_count(ensemble.len());
    let mean = pixel_average_map::<T>(ensemble, positive);
    let mut sq = vec![T::zero(); ensemble.shape().len()];
    for m in ensemble.members() {
        for ((acc, &c), &mu) in sq.iter_mut().zip(m.cells()).zip(mean.cells()) {
            let i = if c == positive { T::one() } else { T::zero() };
            *acc = *acc + (i - mu) * (i - mu);
        }
    }
    RealGrid::new(ensemble.shape(), sq.into_iter().map(|s| s / n).collect()).expect("variances are finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Provenance, Shape};

    fn grid_with_positives(shape: Shape, k: usize) -> CategoricalGrid {
        let cells = (0..shape.len()).map(|i| u8::from(i < k)).collect();
        CategoricalGrid::binary(shape, cells).unwrap()
    }

    #[test]
    fn proportions() {
        let shape = Shape::new(10, 10).unwrap();
        assert_eq!(facies_proportion::<f64>(&CategoricalGrid::filled(shape, 1), 1), 1.0);
        assert_eq!(facies_proportion::<f64>(&grid_with_positives(shape, 28), 1), 0.28);
    }

    #[test]
    fn histogram_single_member() {
        let shape = Shape::new(10, 10).unwrap();
        let e = Ensemble::new(vec![grid_with_positives(shape, 28)], Provenance::Unconditional).unwrap();
        for w in [0.01, 0.05, 0.1, 0.5] {
            let h = proportion_histogram(&e, 1, w).unwrap();
            assert_eq!(h.counts, vec![1]);
        }
    }

    #[test]
    fn histogram_hand_binned() {
        let shape = Shape::new(10, 10).unwrap();
        let members = vec![
            grid_with_positives(shape, 10),
            grid_with_positives(shape, 10),
            grid_with_positives(shape, 30),
        ];
        let e = Ensemble::new(members, Provenance::Unconditional).unwrap();
        let h = proportion_histogram(&e, 1, 0.1f64).unwrap();
        assert_eq!(h.counts, vec![2, 0, 1]);
        let expected_edges = [0.1, 0.2, 0.3, 0.4];
        for (e, x) in h.edges.iter().zip(expected_edges) {
            assert!((e - x).abs() < 1e-12);
        }
        for w in [0.01, 0.03, 0.25, 1.0] {
            assert_eq!(proportion_histogram(&e, 1, w).unwrap().total(), 3);
        }
    }

    #[test]
    fn histogram_rejects_bad_width() {
        assert_eq!(
            Histogram::from_values(&[0.1f64], 0.0, 0.0),
            Err(MetricsError::InvalidBinWidth(0.0))
        );
        assert!(Histogram::from_values(&[0.1f64], -1.0, 0.0).is_err());
    }

    #[test]
    fn pixel_maps_for_opposite_members() {
        let shape = Shape::new(3, 4).unwrap();
        let e = Ensemble::new(
            vec![CategoricalGrid::filled(shape, 0), CategoricalGrid::filled(shape, 1)],
            Provenance::Unconditional,
        )
        .unwrap();
        let avg: RealGrid<f64> = pixel_average_map(&e, 1);
        let disp: RealGrid<f64> = pixel_dispersion_map(&e, 1);
        assert!(avg.cells().iter().all(|&v| v == 0.5));
        assert!(disp.cells().iter().all(|&v| v == 0.25));
    }

    #[test]
    fn identical_members_have_no_dispersion() {
        let g = CategoricalGrid::from_rows(&[&[1, 0], &[0, 1]]).unwrap();
        let e = Ensemble::new(vec![g.clone(), g], Provenance::Unconditional).unwrap();
        let disp: RealGrid<f64> = pixel_dispersion_map(&e, 1);
        assert!(disp.cells().iter().all(|&v| v == 0.0));
    }
}
