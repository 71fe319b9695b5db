//! Rasters, ensembles and point data.
//!
//! Every grid is stored row-major with row 0 at the top. Cells are addressed
//! as `(row, col)` throughout the crate.

mod gslib;
mod points;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use gslib::{parse_gslib_grid, write_gslib_categorical, write_gslib_grid, write_gslib_real, GridKind, GslibGrid, GslibOptions};
pub use points::{parse_points_csv, write_points_csv};

/// Small non-negative facies code. `0` is mud and `1` is channel by default.
pub type FaciesCode = u8;

pub const MUD: FaciesCode = 0;
pub const CHANNEL: FaciesCode = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid dimensions must be positive, got {n_rows}x{n_cols}")]
    EmptyShape { n_rows: usize, n_cols: usize },
    #[error("expected {expected} cells for the grid shape, got {found}")]
    CellCount { expected: usize, found: usize },
    #[error("cell {index} holds facies code {code}, which is not in the alphabet {alphabet}")]
    CodeOutsideAlphabet { index: usize, code: FaciesCode, alphabet: Alphabet },
    #[error("cell {index} holds a non-finite value")]
    NonFinite { index: usize },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: Shape, found: Shape },
    #[error("alphabet mismatch between ensemble members")]
    AlphabetMismatch,
    #[error("an ensemble needs at least one member")]
    EmptyEnsemble,
    #[error("point ({row}, {col}) lies outside the {shape} grid")]
    OutOfBounds { row: usize, col: usize, shape: Shape },
    #[error("duplicate conditioning location ({row}, {col})")]
    DuplicateLocation { row: usize, col: usize },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: cannot parse {token:?} as {expected}")]
    BadValue { line: usize, token: String, expected: &'static str },
    #[error("csv: {0}")]
    Csv(String),
}

/// Grid dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub n_rows: usize,
    pub n_cols: usize,
}

impl Shape {
    pub fn new(n_rows: usize, n_cols: usize) -> Result<Self, GridError> {
        if n_rows == 0 || n_cols == 0 {
            return Err(GridError::EmptyShape { n_rows, n_cols });
        }
        Ok(Self { n_rows, n_cols })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_rows * self.n_cols
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        row * self.n_cols + col
    }

    #[inline]
    pub fn contains(&self, row: usize, col: usize) -> bool {
        row < self.n_rows && col < self.n_cols
    }

    fn ensure_same(&self, other: Shape) -> Result<(), GridError> {
        if *self != other {
            return Err(GridError::ShapeMismatch { expected: *self, found: other });
        }
        Ok(())
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_rows, self.n_cols)
    }
}

/// Set of facies codes a categorical grid may contain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alphabet(BTreeSet<FaciesCode>);

impl Alphabet {
    pub fn binary() -> Self {
        Self([MUD, CHANNEL].into_iter().collect())
    }

    pub fn from_codes<I: IntoIterator<Item = FaciesCode>>(codes: I) -> Self {
        Self(codes.into_iter().collect())
    }

    #[inline]
    pub fn contains(&self, code: FaciesCode) -> bool {
        self.0.contains(&code)
    }

    pub fn codes(&self) -> impl Iterator<Item = FaciesCode> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn union(&self, other: &Alphabet) -> Alphabet {
        Alphabet(self.0.union(&other.0).copied().collect())
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self::binary()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", codes.join(","))
    }
}

/// A raster of facies codes: one realization, a training image, or a truth model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CategoricalGrid {
    shape: Shape,
    cells: Vec<FaciesCode>,
    alphabet: Alphabet,
}

impl CategoricalGrid {
    pub fn new(shape: Shape, cells: Vec<FaciesCode>, alphabet: Alphabet) -> Result<Self, GridError> {
        Shape::new(shape.n_rows, shape.n_cols)?;
        if cells.len() != shape.len() {
            return Err(GridError::CellCount { expected: shape.len(), found: cells.len() });
        }
        if let Some((index, &code)) = cells.iter().enumerate().find(|(_, c)| !alphabet.contains(**c)) {
            return Err(GridError::CodeOutsideAlphabet { index, code, alphabet });
        }
        Ok(Self { shape, cells, alphabet })
    }

    /// Binary grid over the default `{mud, channel}` alphabet.
    pub fn binary(shape: Shape, cells: Vec<FaciesCode>) -> Result<Self, GridError> {
        Self::new(shape, cells, Alphabet::binary())
    }

    /// Builds a grid from nested rows, mostly for tests and small examples.
    pub fn from_rows(rows: &[&[FaciesCode]]) -> Result<Self, GridError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let shape = Shape::new(n_rows, n_cols)?;
        let cells: Vec<FaciesCode> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        let alphabet = Alphabet::binary().union(&Alphabet::from_codes(cells.iter().copied()));
        Self::new(shape, cells, alphabet)
    }

    pub fn filled(shape: Shape, code: FaciesCode) -> Self {
        let alphabet = Alphabet::binary().union(&Alphabet::from_codes([code]));
        Self { shape, cells: vec![code; shape.len()], alphabet }
    }

    #[inline]
    pub fn shape(&self) -> Shape {
        self.shape
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.shape.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.shape.n_cols
    }

    #[inline]
    pub fn cells(&self) -> &[FaciesCode] {
        &self.cells
    }

    #[inline]
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> FaciesCode {
        self.cells[self.shape.index(row, col)]
    }

    /// 0/1 indicator of `code`, row-major.
    pub fn indicator<T: Scalar>(&self, code: FaciesCode) -> Vec<T> {
        self.cells.iter().map(|&c| if c == code { T::one() } else { T::zero() }).collect()
    }

    pub fn into_cells(self) -> Vec<FaciesCode> {
        self.cells
    }
}

/// A raster of real values: raw generator output or a derived statistic map.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid<T> {
    shape: Shape,
    cells: Vec<T>,
}

impl<T: Scalar> RealGrid<T> {
    pub fn new(shape: Shape, cells: Vec<T>) -> Result<Self, GridError> {
        Shape::new(shape.n_rows, shape.n_cols)?;
        if cells.len() != shape.len() {
            return Err(GridError::CellCount { expected: shape.len(), found: cells.len() });
        }
        if let Some(index) = cells.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite { index });
        }
        Ok(Self { shape, cells })
    }

    pub fn from_rows(rows: &[&[T]]) -> Result<Self, GridError> {
        let shape = Shape::new(rows.len(), rows.first().map_or(0, |r| r.len()))?;
        Self::new(shape, rows.iter().flat_map(|r| r.iter().copied()).collect())
    }

    pub fn filled(shape: Shape, value: T) -> Self {
        assert!(value.is_finite(), "fill value must be finite");
        Self { shape, cells: vec![value; shape.len()] }
    }

    /// Indicator raster of `code` as reals.
    pub fn from_indicator(grid: &CategoricalGrid, code: FaciesCode) -> Self {
        Self { shape: grid.shape(), cells: grid.indicator(code) }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.cells[self.shape.index(row, col)]
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(&self) -> RealGrid<U> {
        RealGrid { shape: self.shape, cells: self.cells.iter().map(|v| U::lit(v.as_f64())).collect() }
    }
}

impl<T> RealGrid<T> {
    #[inline]
    pub fn shape(&self) -> Shape {
        self.shape
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.shape.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.shape.n_cols
    }

    #[inline]
    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<T> {
        self.cells
    }
}

/// Maps continuous values to binary facies: `1` where `value >= cutoff`, else `0`.
pub fn threshold_grid<T: Scalar>(grid: &RealGrid<T>, cutoff: T) -> Result<CategoricalGrid, GridError> {
    if let Some(index) = grid.cells.iter().position(|v| !v.is_finite()) {
        return Err(GridError::NonFinite { index });
    }
    let cells = grid.cells.iter().map(|&v| if v >= cutoff { CHANNEL } else { MUD }).collect();
    CategoricalGrid::binary(grid.shape, cells)
}

/// Where an ensemble came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Unconditional,
    Conditional { n: usize },
    External { label: String },
}

/// Non-empty, same-shaped collection of realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<CategoricalGrid>,
    provenance: Provenance,
}

impl Ensemble {
    pub fn new(members: Vec<CategoricalGrid>, provenance: Provenance) -> Result<Self, GridError> {
        let first = members.first().ok_or(GridError::EmptyEnsemble)?;
        for m in &members[1..] {
            first.shape().ensure_same(m.shape())?;
            if m.alphabet() != first.alphabet() {
                return Err(GridError::AlphabetMismatch);
            }
        }
        Ok(Self { members, provenance })
    }

    #[inline]
    pub fn members(&self) -> &[CategoricalGrid] {
        &self.members
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always false; kept for API symmetry with `len`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn shape(&self) -> Shape {
        self.members[0].shape()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// One well datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WellPoint {
    pub row: usize,
    pub col: usize,
    pub facies: FaciesCode,
}

/// Conditioning data: in-bounds points at distinct locations, in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditioningSet {
    shape: Shape,
    points: Vec<WellPoint>,
}

impl ConditioningSet {
    pub fn new(shape: Shape, points: Vec<WellPoint>) -> Result<Self, GridError> {
        let mut seen = BTreeSet::new();
        for p in &points {
            if !shape.contains(p.row, p.col) {
                return Err(GridError::OutOfBounds { row: p.row, col: p.col, shape });
            }
            if !seen.insert((p.row, p.col)) {
                return Err(GridError::DuplicateLocation { row: p.row, col: p.col });
            }
        }
        Ok(Self { shape, points })
    }

    /// Reads the facies of `truth` at the given locations.
    pub fn sample_from(truth: &CategoricalGrid, locations: &[(usize, usize)]) -> Result<Self, GridError> {
        let shape = truth.shape();
        let mut points = Vec::with_capacity(locations.len());
        for &(row, col) in locations {
            if !shape.contains(row, col) {
                return Err(GridError::OutOfBounds { row, col, shape });
            }
            points.push(WellPoint { row, col, facies: truth.get(row, col) });
        }
        Self::new(shape, points)
    }

    #[inline]
    pub fn points(&self) -> &[WellPoint] {
        &self.points
    }

    #[inline]
    pub fn shape(&self) -> Shape {
        self.shape
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub(crate) fn ensure_shape(&self, shape: Shape) -> Result<(), GridError> {
        for p in &self.points {
            if !shape.contains(p.row, p.col) {
                return Err(GridError::OutOfBounds { row: p.row, col: p.col, shape });
            }
        }
        Ok(())
    }
}
