use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Envelope, MetricsError, PercentilePair};
use crate::grid::{CategoricalGrid, Ensemble, FaciesCode, GridError, RealGrid, Shape};
use crate::scalar::Scalar;

/// Square moving window scanned over the valid region (no padding).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub window: usize,
    pub stride: usize,
}

impl WindowSpec {
    pub fn new(window: usize, stride: usize) -> Result<Self, MetricsError> {
        if window == 0 || stride == 0 {
            return Err(MetricsError::InvalidWindow);
        }
        Ok(Self { window, stride })
    }

    /// Shape of the proportion map produced on a grid of `shape`.
    pub fn output_shape(&self, shape: Shape) -> Result<Shape, MetricsError> {
        if self.window == 0 || self.stride == 0 {
            return Err(MetricsError::InvalidWindow);
        }
        if self.window > shape.n_rows.min(shape.n_cols) {
            return Err(MetricsError::WindowTooLarge {
                window: self.window,
                n_rows: shape.n_rows,
                n_cols: shape.n_cols,
            });
        }
        Ok(Shape {
            n_rows: (shape.n_rows - self.window) / self.stride + 1,
            n_cols: (shape.n_cols - self.window) / self.stride + 1,
        })
    }
}

/// Proportion of `code` inside each window position.
pub fn moving_window_proportions<T: Scalar>(
    grid: &CategoricalGrid,
    code: FaciesCode,
    spec: WindowSpec,
) -> Result<RealGrid<T>, MetricsError> {
    let out = spec.output_shape(grid.shape())?;
    let (rows, cols) = (grid.n_rows(), grid.n_cols());

    // summed-area table with a zero border: sat[(r, c)] = hits in [0, r) x [0, c)
    let w = cols + 1;
    let mut sat = vec![0usize; (rows + 1) * w];
    for r in 0..rows {
        let mut run = 0usize;
        for c in 0..cols {
            run += usize::from(grid.get(r, c) == code);
            sat[(r + 1) * w + c + 1] = sat[r * w + c + 1] + run;
        }
    }

    let area = T::from_count(spec.window * spec.window);
    let mut cells = Vec::with_capacity(out.len());
    for i in 0..out.n_rows {
        let (r0, r1) = (i * spec.stride, i * spec.stride + spec.window);
        for j in 0..out.n_cols {
            let (c0, c1) = (j * spec.stride, j * spec.stride + spec.window);
            let hits = sat[r1 * w + c1] + sat[r0 * w + c0] - sat[r0 * w + c1] - sat[r1 * w + c0];
            cells.push(T::from_count(hits) / area);
        }
    }
    Ok(RealGrid::new(out, cells)?)
}

/// `(ti_proportion, realization_proportion)` at identical window positions, row-major.
pub fn window_scatter<T: Scalar>(
    ti: &CategoricalGrid,
    realization: &CategoricalGrid,
    code: FaciesCode,
    spec: WindowSpec,
) -> Result<Vec<(T, T)>, MetricsError> {
    if ti.shape() != realization.shape() {
        return Err(GridError::ShapeMismatch { expected: ti.shape(), found: realization.shape() }.into());
    }
    let a = moving_window_proportions::<T>(ti, code, spec)?;
    let b = moving_window_proportions::<T>(realization, code, spec)?;
    Ok(a.cells().iter().copied().zip(b.cells().iter().copied()).collect())
}

/// Ensemble band of window proportions at every window position, paired
/// with the TI proportion at that position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowEnvelope<T> {
    pub spec: WindowSpec,
    pub positions: Shape,
    pub ti: Vec<T>,
    pub envelope: Envelope<T>,
}

pub fn window_envelope<T: Scalar>(
    ti: &CategoricalGrid,
    ensemble: &Ensemble,
    code: FaciesCode,
    spec: WindowSpec,
    percentiles: PercentilePair,
) -> Result<WindowEnvelope<T>, MetricsError> {
    if ti.shape() != ensemble.shape() {
        return Err(GridError::ShapeMismatch { expected: ti.shape(), found: ensemble.shape() }.into());
    }
    let ti_map = moving_window_proportions::<T>(ti, code, spec)?;
    let samples = ensemble
        .members()
        .par_iter()
        .map(|m| moving_window_proportions::<T>(m, code, spec).map(RealGrid::into_cells))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WindowEnvelope {
        spec,
        positions: ti_map.shape(),
        ti: ti_map.into_cells(),
        envelope: Envelope::from_samples(&samples, percentiles)?,
    })
}
