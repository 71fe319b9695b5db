mod support;

use facies_qc::conditioning::{build_mask, composite};
use facies_qc::grid::{CategoricalGrid, ConditioningSet, Ensemble, Provenance, RealGrid, Shape, WellPoint};
use facies_qc::metrics::{
    binary_entropy, entropy_map, f1_score, percentile, pixel_average_map, pixel_dispersion_map, ConfusionCounts,
};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracles::random_binary_grid;

#[test]
fn entropy_is_bounded_and_zero_only_when_unanimous() {
    let shape = Shape::new(3, 3).unwrap();
    for base in 0u32..512 {
        let a: Vec<u8> = (0..9).map(|i| ((base >> i) & 1) as u8).collect();
        for flip in 0..9 {
            let mut b = a.clone();
            b[flip] ^= 1;
            for pair in [(a.clone(), b.clone()), (a.clone(), a.clone())] {
                let e = Ensemble::new(
                    vec![
                        CategoricalGrid::binary(shape, pair.0.clone()).unwrap(),
                        CategoricalGrid::binary(shape, pair.1.clone()).unwrap(),
                    ],
                    Provenance::Unconditional,
                )
                .unwrap();
                let h: RealGrid<f64> = entropy_map(&e, 1);
                for (i, &v) in h.cells().iter().enumerate() {
                    assert!((0.0..=1.0).contains(&v));
                    assert_eq!(v == 0.0, pair.0[i] == pair.1[i]);
                }
            }
        }
    }
}

#[test]
fn dispersion_is_mean_times_complement() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let n = rng.random_range(1..12);
        let members = (0..n).map(|_| random_binary_grid(&mut rng, 9, 7)).collect();
        let e = Ensemble::new(members, Provenance::Unconditional).unwrap();
        let m: RealGrid<f64> = pixel_average_map(&e, 1);
        let d: RealGrid<f64> = pixel_dispersion_map(&e, 1);
        for (mi, di) in m.cells().iter().zip(d.cells()) {
            assert!((di - mi * (1.0 - mi)).abs() <= 1e-12);
        }
    }
}

#[test]
fn f1_hand_cases() {
    let c = |tp, fp, fn_, tn| ConfusionCounts { tp, fp, fn_, tn };
    assert_eq!(f1_score::<f64>(&c(2, 1, 1, 0)).unwrap(), 2.0 / 3.0);
    assert_eq!(f1_score::<f64>(&c(0, 1, 0, 3)).unwrap(), 0.0);
    assert_eq!(f1_score::<f64>(&c(0, 0, 0, 3)).unwrap(), 1.0);
    // 2PR/(P+R) with P = 3/4, R = 3/5
    let p = 0.75;
    let r = 0.6;
    assert!((f1_score::<f64>(&c(3, 1, 2, 9)).unwrap() - 2.0 * p * r / (p + r)).abs() < 1e-15);
}

#[test]
fn entropy_endpoints_and_symmetry() {
    assert_eq!(binary_entropy(0.0f64), 0.0);
    assert_eq!(binary_entropy(1.0f64), 0.0);
    assert_eq!(binary_entropy(0.5f64), 1.0);
    for k in 1..10 {
        let p = k as f64 / 10.0;
        assert!((binary_entropy(p) - binary_entropy(1.0 - p)).abs() < 1e-15);
    }
}

#[test]
fn percentile_interpolates_between_ranks() {
    let v = [10.0, 20.0, 30.0, 40.0, 50.0];
    assert_eq!(percentile(&v, 25.0).unwrap(), 20.0);
    assert_eq!(percentile(&v, 10.0).unwrap(), 14.0);
    assert!(percentile(&v, 101.0).is_err());
}

#[test]
fn composite_then_remask_recovers_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let (rows, cols) = (rng.random_range(1..12), rng.random_range(1..12));
        let shape = Shape::new(rows, cols).unwrap();
        let generated = RealGrid::new(shape, (0..rows * cols).map(|_| rng.random::<f64>()).collect()).unwrap();
        let n = rng.random_range(1..=rows * cols);
        let points: Vec<WellPoint> = index::sample(&mut rng, rows * cols, n)
            .into_iter()
            .map(|i| WellPoint { row: i / cols, col: i % cols, facies: rng.random_range(0..2) })
            .collect();
        let data = ConditioningSet::new(shape, points.clone()).unwrap();
        let (mask, image) = build_mask(&data, shape, 5.0, 1).unwrap();
        let c = composite(&generated, &image, &mask).unwrap();
        for p in &points {
            assert_eq!(c.get(p.row, p.col), f64::from(p.facies));
        }
        let masked: usize = (0..rows * cols).filter(|&i| c.cells()[i] != generated.cells()[i]).count();
        assert!(masked <= n);
        for i in 0..rows * cols {
            if !mask.is_conditioned(i / cols, i % cols) {
                assert_eq!(c.cells()[i], generated.cells()[i]);
            }
        }
    }
}
