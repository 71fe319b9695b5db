use super::MetricsError;
use crate::grid::{ConditioningSet, Ensemble, FaciesCode, GridError, RealGrid};
use crate::scalar::Scalar;

/// Binary Shannon entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy<T: Scalar>(p: T) -> T {
    let term = |q: T| if q > T::zero() { -q * q.log2() } else { T::zero() };
    let h = term(p) + term(T::one() - p);
    h.max(T::zero()).min(T::one())
}

/// Per-pixel entropy of the positive-facies indicator across the ensemble.
pub fn entropy_map<T: Scalar>(ensemble: &Ensemble, positive: FaciesCode) -> RealGrid<T> {
    let counts = super::proportion::positive_counts(ensemble, positive);
    let n = T::from_count(ensemble.len());
    let cells = counts.into_iter().map(|k| binary_entropy(T::from_count(k) / n)).collect();
    RealGrid::new(ensemble.shape(), cells).expect("entropy values are finite")
}

/// Samples `map` at the conditioning locations, in point order.
pub fn entropy_at_points<T: Scalar>(map: &RealGrid<T>, data: &ConditioningSet) -> Result<Vec<T>, MetricsError> {
    let shape = map.shape();
    data.points()
        .iter()
        .map(|p| {
            if shape.contains(p.row, p.col) {
                Ok(map.get(p.row, p.col))
            } else {
                Err(GridError::OutOfBounds { row: p.row, col: p.col, shape }.into())
            }
        })
        .collect()
}
