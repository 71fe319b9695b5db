mod support;

use facies_qc::grid::{Alphabet, CategoricalGrid, Ensemble, Provenance, Shape};
use facies_qc::metrics::{
    count_geobodies, directional_semivariogram, moving_window_proportions, window_scatter, Connectivity,
    LagDirection, WindowSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::oracles::{flood_fill_count, random_binary_grid, semivariogram_pairs, window_recount};

const DIRECTIONS: [(i32, i32); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];

fn check_all(grid: &CategoricalGrid, positive: u8) {
    let (rows, cols) = (grid.n_rows(), grid.n_cols());
    let cells = grid.cells();
    let max_lag = rows.max(cols);
    for (dr, dc) in DIRECTIONS {
        let sv = directional_semivariogram::<f64>(grid, positive, LagDirection::new(dr, dc).unwrap(), max_lag).unwrap();
        let oracle = semivariogram_pairs(cells, rows, cols, positive, (dr as i64, dc as i64), max_lag);
        assert_eq!(sv.lags.len(), oracle.len(), "{grid:?} dir ({dr},{dc})");
        for (lag, (h, gamma, n)) in sv.lags.iter().zip(oracle) {
            assert_eq!((lag.h, lag.n_pairs), (h, n));
            assert!((lag.gamma - gamma).abs() <= 1e-12);
        }
    }
    for (conn, eight) in [(Connectivity::Four, false), (Connectivity::Eight, true)] {
        assert_eq!(count_geobodies(grid, positive, conn).count, flood_fill_count(cells, rows, cols, positive, eight));
    }
    for window in 1..=rows.min(cols) {
        for stride in 1..=3 {
            let got = moving_window_proportions::<f64>(grid, positive, WindowSpec::new(window, stride).unwrap()).unwrap();
            let expected: Vec<f64> = window_recount(cells, rows, cols, positive, window, stride).concat();
            assert_eq!(got.cells(), expected.as_slice());
        }
    }
}

#[test]
fn exhaustive_binary_grids_up_to_nine_cells() {
    for (rows, cols) in [(1, 1), (1, 4), (4, 1), (2, 2), (2, 3), (3, 2), (3, 3), (1, 9)] {
        let n = rows * cols;
        for bits in 0u32..(1 << n) {
            let cells = (0..n).map(|i| ((bits >> i) & 1) as u8).collect();
            let grid = CategoricalGrid::binary(Shape::new(rows, cols).unwrap(), cells).unwrap();
            check_all(&grid, 1);
        }
    }
}

#[test]
fn exhaustive_ternary_two_by_three() {
    for code in 0u32..3u32.pow(6) {
        let cells: Vec<u8> = (0..6).map(|i| ((code / 3u32.pow(i)) % 3) as u8).collect();
        let grid = CategoricalGrid::new(Shape::new(2, 3).unwrap(), cells, Alphabet::from_codes([0, 1, 2])).unwrap();
        for positive in 0..3 {
            check_all(&grid, positive);
        }
    }
}

fn ternary_grid() -> impl Strategy<Value = CategoricalGrid> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(rows, cols)| {
        prop::collection::vec(0u8..3, rows * cols).prop_map(move |cells| {
            CategoricalGrid::new(Shape::new(rows, cols).unwrap(), cells, Alphabet::from_codes([0, 1, 2])).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_grids_up_to_eight_by_eight(grid in ternary_grid(), positive in 0u8..3) {
        check_all(&grid, positive);
    }
}

#[test]
fn random_sixteen_by_sixteen_semivariograms() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let g = random_binary_grid(&mut rng, 16, 16);
        for (dir, d) in [(LagDirection::MAJOR, (0, 1)), (LagDirection::MINOR, (1, 0))] {
            let sv = directional_semivariogram::<f64>(&g, 1, dir, 15).unwrap();
            let oracle = semivariogram_pairs(g.cells(), 16, 16, 1, d, 15);
            for (lag, (h, gamma, n)) in sv.lags.iter().zip(&oracle) {
                assert_eq!((lag.h, lag.n_pairs), (*h, *n));
                assert!((lag.gamma - gamma).abs() <= 1e-12);
                assert!(lag.gamma >= 0.0);
            }
            assert!(sv.lags.windows(2).all(|w| w[0].h < w[1].h));
        }
    }
}

#[test]
fn window_scatter_pairs_match_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let ti = random_binary_grid(&mut rng, 12, 10);
        let r = random_binary_grid(&mut rng, 12, 10);
        let spec = WindowSpec::new(4, 2).unwrap();
        let pairs = window_scatter::<f64>(&ti, &r, 1, spec).unwrap();
        let out = spec.output_shape(ti.shape()).unwrap();
        assert_eq!(pairs.len(), out.len());
        let a = window_recount(ti.cells(), 12, 10, 1, 4, 2).concat();
        let b = window_recount(r.cells(), 12, 10, 1, 4, 2).concat();
        let expected: Vec<(f64, f64)> = a.into_iter().zip(b).collect();
        assert_eq!(pairs, expected);
    }
}

#[test]
fn ensemble_needs_matching_members() {
    let a = CategoricalGrid::filled(Shape::new(2, 2).unwrap(), 0);
    let b = CategoricalGrid::filled(Shape::new(2, 3).unwrap(), 0);
    assert!(Ensemble::new(vec![a, b], Provenance::Unconditional).is_err());
    assert!(Ensemble::new(vec![], Provenance::Unconditional).is_err());
}
