//! Brute-force reference implementations, written without reusing library code.

#![allow(dead_code)]

use std::collections::VecDeque;

use facies_qc::grid::{CategoricalGrid, Shape};
use rand::Rng;

/// Random binary grid with a channel fraction drawn per grid.
pub fn random_binary_grid<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CategoricalGrid {
    let p: f64 = rng.random_range(0.1..0.9);
    let cells = (0..rows * cols).map(|_| u8::from(rng.random_bool(p))).collect();
    CategoricalGrid::binary(Shape::new(rows, cols).unwrap(), cells).unwrap()
}

/// Semivariogram by enumerating every ordered pair of cells and keeping the
/// pairs whose offset is `h * (d_row, d_col)` for some `1 <= h <= max_lag`.
/// Returns `(h, gamma, n_pairs)` for lags with at least one pair.
pub fn semivariogram_pairs(
    cells: &[u8],
    rows: usize,
    cols: usize,
    positive: u8,
    dir: (i64, i64),
    max_lag: usize,
) -> Vec<(usize, f64, usize)> {
    let mut sq = vec![0.0f64; max_lag + 1];
    let mut n = vec![0usize; max_lag + 1];
    let z = |i: usize| if cells[i] == positive { 1.0 } else { 0.0 };
    for u in 0..rows * cols {
        let (ur, uc) = ((u / cols) as i64, (u % cols) as i64);
        for v in 0..rows * cols {
            let (vr, vc) = ((v / cols) as i64, (v % cols) as i64);
            let (dr, dc) = (vr - ur, vc - uc);
            for h in 1..=max_lag as i64 {
                if dr == h * dir.0 && dc == h * dir.1 {
                    let d: f64 = z(u) - z(v);
                    sq[h as usize] += d * d;
                    n[h as usize] += 1;
                }
            }
        }
    }
    (1..=max_lag).filter(|&h| n[h] > 0).map(|h| (h, sq[h] / (2.0 * n[h] as f64), n[h])).collect()
}

/// Connected components of `code` by breadth-first flood fill.
pub fn flood_fill_count(cells: &[u8], rows: usize, cols: usize, code: u8, eight: bool) -> usize {
    let mut seen = vec![false; rows * cols];
    let mut offsets = vec![(-1i64, 0i64), (1, 0), (0, -1), (0, 1)];
    if eight {
        offsets.extend([(-1, -1), (-1, 1), (1, -1), (1, 1)]);
    }
    let mut count = 0;
    for start in 0..rows * cols {
        if cells[start] != code || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (r, c) = ((i / cols) as i64, (i % cols) as i64);
            for (dr, dc) in &offsets {
                let (nr, nc) = (r + dr, c + dc);
                if nr < 0 || nc < 0 || nr >= rows as i64 || nc >= cols as i64 {
                    continue;
                }
                let j = nr as usize * cols + nc as usize;
                if cells[j] == code && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    count
}

/// Window proportions by counting every cell of every window.
pub fn window_recount(cells: &[u8], rows: usize, cols: usize, code: u8, window: usize, stride: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut r0 = 0;
    while r0 + window <= rows {
        let mut line = Vec::new();
        let mut c0 = 0;
        while c0 + window <= cols {
            let mut hits = 0usize;
            for r in r0..r0 + window {
                for c in c0..c0 + window {
                    if cells[r * cols + c] == code {
                        hits += 1;
                    }
                }
            }
            line.push(hits as f64 / (window * window) as f64);
            c0 += stride;
        }
        out.push(line);
        r0 += stride;
    }
    out
}
