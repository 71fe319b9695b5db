use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::grid::{CategoricalGrid, ConditioningSet, FaciesCode};
use crate::scalar::Scalar;

/// Agreement between a realization and well data, positive class vs. the rest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy<T: Scalar>(&self) -> Result<T, MetricsError> {
        if self.total() == 0 {
            return Err(MetricsError::NoEvaluatedPoints);
        }
        Ok(T::from_count(self.tp + self.tn) / T::from_count(self.total()))
    }
}

pub fn confusion_at_points(
    realization: &CategoricalGrid,
    data: &ConditioningSet,
    positive: FaciesCode,
) -> Result<ConfusionCounts, MetricsError> {
    if data.is_empty() {
        return Err(MetricsError::EmptyConditioningSet);
    }
    data.ensure_shape(realization.shape())?;
    let mut c = ConfusionCounts::default();
    for p in data.points() {
        let truth = p.facies == positive;
        let predicted = realization.get(p.row, p.col) == positive;
        match (truth, predicted) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// F1 as `2 P R / (P + R)`.
///
/// With no true positives the score is 0 when anything was misclassified and
/// 1 when every evaluated point is a true negative.
pub fn f1_score<T: Scalar>(c: &ConfusionCounts) -> Result<T, MetricsError> {
    if c.total() == 0 {
        return Err(MetricsError::NoEvaluatedPoints);
    }
    if c.tp == 0 {
        return Ok(if c.fp + c.fn_ == 0 { T::one() } else { T::zero() });
    }
    // 2PR/(P+R) reduces to 2tp / (2tp + fp + fn).
    let two_tp = T::from_count(2 * c.tp);
    Ok(two_tp / (two_tp + T::from_count(c.fp + c.fn_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Shape, WellPoint};

    fn points(shape: Shape, pts: &[(usize, usize, u8)]) -> ConditioningSet {
        ConditioningSet::new(shape, pts.iter().map(|&(row, col, facies)| WellPoint { row, col, facies }).collect())
            .unwrap()
    }

    fn counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> ConfusionCounts {
        ConfusionCounts { tp, fp, fn_, tn }
    }

    #[test]
    fn perfect_agreement() {
        let g = CategoricalGrid::from_rows(&[&[1, 0], &[1, 0]]).unwrap();
        let d = points(g.shape(), &[(0, 0, 1), (1, 0, 1), (0, 1, 0), (1, 1, 0)]);
        assert_eq!(confusion_at_points(&g, &d, 1).unwrap(), counts(2, 0, 0, 2));
    }

    #[test]
    fn one_of_each() {
        let g = CategoricalGrid::from_rows(&[&[1, 0], &[1, 0]]).unwrap();
        let d = points(g.shape(), &[(0, 0, 1), (0, 1, 1), (1, 0, 0), (1, 1, 0)]);
        assert_eq!(confusion_at_points(&g, &d, 1).unwrap(), counts(1, 1, 1, 1));
    }

    #[test]
    fn all_mud() {
        let g = CategoricalGrid::filled(Shape::new(2, 2).unwrap(), 0);
        let d = points(g.shape(), &[(0, 0, 0), (0, 1, 0), (1, 1, 0)]);
        assert_eq!(confusion_at_points(&g, &d, 1).unwrap(), counts(0, 0, 0, 3));
    }

    #[test]
    fn empty_data_rejected() {
        let g = CategoricalGrid::filled(Shape::new(2, 2).unwrap(), 0);
        let d = points(g.shape(), &[]);
        assert_eq!(confusion_at_points(&g, &d, 1), Err(MetricsError::EmptyConditioningSet));
    }

    #[test]
    fn f1_cases() {
        assert_eq!(f1_score::<f64>(&counts(2, 0, 0, 2)).unwrap(), 1.0);
        assert_eq!(f1_score::<f64>(&counts(2, 1, 1, 0)).unwrap(), 2.0 / 3.0);
        assert_eq!(f1_score::<f64>(&counts(0, 0, 0, 3)).unwrap(), 1.0);
        assert_eq!(f1_score::<f64>(&counts(0, 2, 1, 0)).unwrap(), 0.0);
        assert_eq!(f1_score::<f64>(&counts(0, 0, 0, 0)), Err(MetricsError::NoEvaluatedPoints));
    }

    #[test]
    fn f1_matches_precision_recall_form() {
        for tp in 1..6 {
            for fp in 0..6 {
                for fn_ in 0..6 {
                    let p = tp as f64 / (tp + fp) as f64;
                    let r = tp as f64 / (tp + fn_) as f64;
                    let expected = 2.0 * p * r / (p + r);
                    let got: f64 = f1_score(&counts(tp, fp, fn_, 1)).unwrap();
                    assert!((got - expected).abs() < 1e-14);
                    assert!((0.0..=1.0).contains(&got));
                    assert_eq!(got == 1.0, fp == 0 && fn_ == 0);
                }
            }
        }
    }
}
