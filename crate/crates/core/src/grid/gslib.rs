//! Geo-EAS / GSLIB ASCII grids.
//!
//! Layout: a title line, a line with the variable count `V`, `V` variable
//! names, then whitespace-separated values. Values are row-major starting at
//! the top row. The title carries the dimensions as integer tokens `nx ny`
//! (`nx` = columns, `ny` = rows, an optional third token `nz` must be 1),
//! and may carry an `alphabet=0,1,...` token for categorical grids.

use std::fmt::Write as _;

use super::{Alphabet, CategoricalGrid, FaciesCode, GridError, RealGrid, Shape};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Categorical,
    Real,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GslibGrid<T> {
    Categorical(CategoricalGrid),
    Real(RealGrid<T>),
}

impl<T> GslibGrid<T> {
    pub fn into_categorical(self) -> Option<CategoricalGrid> {
        match self {
            GslibGrid::Categorical(g) => Some(g),
            GslibGrid::Real(_) => None,
        }
    }

    pub fn into_real(self) -> Option<RealGrid<T>> {
        match self {
            GslibGrid::Real(g) => Some(g),
            GslibGrid::Categorical(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GslibOptions {
    pub kind: GridKind,
    /// Overrides the dimensions in the title line.
    pub shape: Option<Shape>,
    /// Overrides the `alphabet=` token; when both are absent the alphabet is
    /// `{0, 1}` joined with every code present in the file.
    pub alphabet: Option<Alphabet>,
    /// Zero-based variable column to read when the file has several.
    pub variable: usize,
}

impl GslibOptions {
    pub fn categorical() -> Self {
        Self { kind: GridKind::Categorical, shape: None, alphabet: None, variable: 0 }
    }

    pub fn real() -> Self {
        Self { kind: GridKind::Real, ..Self::categorical() }
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = Some(shape);
        self
    }
}

pub fn parse_gslib_grid<T: Scalar>(text: &str, opts: &GslibOptions) -> Result<GslibGrid<T>, GridError> {
    let mut lines = text.lines().enumerate();
    let (_, title) = lines.next().ok_or_else(|| GridError::MalformedHeader("missing title line".into()))?;

    let (n_vars_line, n_vars_text) =
        lines.next().ok_or_else(|| GridError::MalformedHeader("missing variable count line".into()))?;
    let n_vars: usize = n_vars_text
        .split_whitespace()
        .next()
        .and_then(|t| t.parse().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            GridError::MalformedHeader(format!("line {}: invalid variable count {:?}", n_vars_line + 1, n_vars_text))
        })?;
    if opts.variable >= n_vars {
        return Err(GridError::MalformedHeader(format!(
            "variable column {} requested but the file declares {} variable(s)",
            opts.variable, n_vars
        )));
    }
    for i in 0..n_vars {
        lines
            .next()
            .ok_or_else(|| GridError::MalformedHeader(format!("missing name for variable {}", i + 1)))?;
    }

    let (title_shape, title_alphabet) = parse_title(title)?;
    let shape = match (opts.shape, title_shape) {
        (Some(s), _) => s,
        (None, Some(s)) => s,
        (None, None) => {
            return Err(GridError::MalformedHeader(
                "title line carries no `nx ny` dimensions and none were supplied".into(),
            ))
        }
    };

    let expected = shape.len() * n_vars;
    let mut raw: Vec<(usize, &str)> = Vec::with_capacity(expected);
    for (line_no, line) in lines {
        raw.extend(line.split_whitespace().map(|t| (line_no + 1, t)));
    }
    if raw.len() != expected {
        return Err(GridError::CellCount { expected, found: raw.len() });
    }
    let picked = raw.into_iter().skip(opts.variable).step_by(n_vars);

    match opts.kind {
        GridKind::Categorical => {
            let mut cells = Vec::with_capacity(shape.len());
            for (line, token) in picked {
                cells.push(parse_code(token).ok_or_else(|| GridError::BadValue {
                    line,
                    token: token.to_string(),
                    expected: "an integer facies code in 0..=255",
                })?);
            }
            let alphabet = match opts.alphabet.clone().or(title_alphabet) {
                Some(a) => a,
                None => Alphabet::binary().union(&Alphabet::from_codes(cells.iter().copied())),
            };
            Ok(GslibGrid::Categorical(CategoricalGrid::new(shape, cells, alphabet)?))
        }
        GridKind::Real => {
            let mut cells = Vec::with_capacity(shape.len());
            for (line, token) in picked {
                let v: f64 = token.parse().map_err(|_| GridError::BadValue {
                    line,
                    token: token.to_string(),
                    expected: "a real number",
                })?;
                if !v.is_finite() {
                    return Err(GridError::BadValue { line, token: token.to_string(), expected: "a finite real number" });
                }
                cells.push(T::lit(v));
            }
            Ok(GslibGrid::Real(RealGrid::new(shape, cells)?))
        }
    }
}

fn parse_code(token: &str) -> Option<FaciesCode> {
    if let Ok(v) = token.parse::<FaciesCode>() {
        return Some(v);
    }
    // Many GSLIB writers emit integer codes as "1.0" or "1.000000".
    let v: f64 = token.parse().ok()?;
    if v.is_finite() && v.fract() == 0.0 && (0.0..=FaciesCode::MAX as f64).contains(&v) {
        Some(v as FaciesCode)
    } else {
        None
    }
}

fn parse_title(title: &str) -> Result<(Option<Shape>, Option<Alphabet>), GridError> {
    let mut dims = Vec::new();
    let mut alphabet = None;
    for token in title.split_whitespace() {
        if let Some(list) = token.strip_prefix("alphabet=") {
            let codes: Result<Vec<FaciesCode>, _> = list.split(',').map(str::parse).collect();
            let codes = codes.map_err(|_| GridError::MalformedHeader(format!("invalid alphabet token {token:?}")))?;
            alphabet = Some(Alphabet::from_codes(codes));
        } else if let Ok(n) = token.parse::<usize>() {
            dims.push(n);
        }
    }
    let shape = match dims.as_slice() {
        [] | [_] => None,
        [nx, ny] | [nx, ny, 1] => Some(Shape::new(*ny, *nx)?),
        [_, _, nz] => {
            return Err(GridError::MalformedHeader(format!("only 2D grids are supported, title declares nz = {nz}")))
        }
        _ => return Err(GridError::MalformedHeader(format!("ambiguous dimensions in title {title:?}"))),
    };
    Ok((shape, alphabet))
}

pub fn write_gslib_grid<T: Scalar>(grid: &GslibGrid<T>) -> String {
    match grid {
        GslibGrid::Categorical(g) => write_gslib_categorical(g),
        GslibGrid::Real(g) => write_gslib_real(g),
    }
}

pub fn write_gslib_categorical(grid: &CategoricalGrid) -> String {
    let codes: Vec<String> = grid.alphabet().codes().map(|c| c.to_string()).collect();
    let mut out = String::with_capacity(grid.cells().len() * 2 + 64);
    let _ = writeln!(out, "categorical {} {} 1 alphabet={}", grid.n_cols(), grid.n_rows(), codes.join(","));
    out.push_str("1\nfacies\n");
    for c in grid.cells() {
        let _ = writeln!(out, "{c}");
    }
    out
}

/// Values are written with 17 significant digits so they re-parse bit-exactly.
pub fn write_gslib_real<T: Scalar>(grid: &RealGrid<T>) -> String {
    let mut out = String::with_capacity(grid.cells().len() * 24 + 64);
    let _ = writeln!(out, "real {} {} 1", grid.n_cols(), grid.n_rows());
    out.push_str("1\nvalue\n");
    for v in grid.cells() {
        let _ = writeln!(out, "{:.16e}", v.as_f64());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_file_parses() {
        let text = "2 2\n1\nfacies\n0 1 1 0\n";
        let g = parse_gslib_grid::<f64>(text, &GslibOptions::categorical()).unwrap().into_categorical().unwrap();
        assert_eq!(g, CategoricalGrid::from_rows(&[&[0, 1], &[1, 0]]).unwrap());
    }

    #[test]
    fn value_count_mismatch() {
        let text = "2 2\n1\nfacies\n0 1 1\n";
        let err = parse_gslib_grid::<f64>(text, &GslibOptions::categorical()).unwrap_err();
        assert_eq!(err, GridError::CellCount { expected: 4, found: 3 });
    }

    #[test]
    fn non_integer_categorical_value() {
        let text = "1 2\n1\nfacies\n0\n0.5\n";
        let err = parse_gslib_grid::<f64>(text, &GslibOptions::categorical()).unwrap_err();
        assert!(matches!(err, GridError::BadValue { line: 5, .. }), "{err:?}");
    }

    #[test]
    fn integral_floats_accepted_as_codes() {
        let text = "1 2\n1\nfacies\n1.0\n0.000\n";
        let g = parse_gslib_grid::<f64>(text, &GslibOptions::categorical()).unwrap().into_categorical().unwrap();
        assert_eq!(g.cells(), &[1, 0]);
    }

    #[test]
    fn non_finite_real_value() {
        let text = "2 1\n1\nv\n1.0 inf\n";
        assert!(parse_gslib_grid::<f64>(text, &GslibOptions::real()).is_err());
    }

    #[test]
    fn missing_dimensions_without_override() {
        let text = "my model\n1\nfacies\n0 1 1 0\n";
        assert!(matches!(
            parse_gslib_grid::<f64>(text, &GslibOptions::categorical()),
            Err(GridError::MalformedHeader(_))
        ));
        let g = parse_gslib_grid::<f64>(text, &GslibOptions::categorical().with_shape(Shape::new(1, 4).unwrap()))
            .unwrap();
        assert_eq!(g.into_categorical().unwrap().shape(), Shape::new(1, 4).unwrap());
    }

    #[test]
    fn malformed_variable_count() {
        let text = "2 2\nx\nfacies\n0 1 1 0\n";
        assert!(matches!(
            parse_gslib_grid::<f64>(text, &GslibOptions::categorical()),
            Err(GridError::MalformedHeader(_))
        ));
    }

    #[test]
    fn selects_variable_column_and_accepts_crlf() {
        let text = "3 1\r\n2\r\nporo\r\nfacies\r\n0.1 1\r\n0.2 0\r\n0.3 1\r\n";
        let opts = GslibOptions { variable: 1, ..GslibOptions::categorical() };
        let g = parse_gslib_grid::<f64>(text, &opts).unwrap().into_categorical().unwrap();
        assert_eq!(g.cells(), &[1, 0, 1]);
    }

    #[test]
    fn rejects_3d_title() {
        let text = "2 2 3\n1\nf\n0 0 0 0\n";
        assert!(parse_gslib_grid::<f64>(text, &GslibOptions::categorical()).is_err());
    }

    #[test]
    fn one_by_one_grid_writes_single_value_line() {
        let g = CategoricalGrid::from_rows(&[&[5]]).unwrap();
        let text = write_gslib_categorical(&g);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "1");
        assert_eq!(lines[3], "5");
        let back = parse_gslib_grid::<f64>(&text, &GslibOptions::categorical()).unwrap();
        assert_eq!(back, GslibGrid::Categorical(g));
    }

    #[test]
    fn tenth_round_trips_exactly() {
        let g = RealGrid::from_rows(&[&[0.1f64, 1.0 / 3.0, -2.5e-300]]).unwrap();
        let text = write_gslib_real(&g);
        // the written digits alone pin the value: independent of our parser
        let line = text.lines().nth(3).unwrap();
        assert_eq!(line.parse::<f64>().unwrap().to_bits(), 0.1f64.to_bits());
        let back = parse_gslib_grid::<f64>(&text, &GslibOptions::real()).unwrap().into_real().unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn f32_round_trips_exactly() {
        let g = RealGrid::from_rows(&[&[0.1f32, 0.7, 1.0e-30]]).unwrap();
        let back = parse_gslib_grid::<f32>(&write_gslib_real(&g), &GslibOptions::real()).unwrap();
        assert_eq!(back.into_real().unwrap(), g);
    }

    fn categorical_grid() -> impl Strategy<Value = CategoricalGrid> {
        (1usize..12, 1usize..12, 1u8..5).prop_flat_map(|(r, c, k)| {
            proptest::collection::vec(0u8..k, r * c).prop_map(move |cells| {
                let alphabet = Alphabet::from_codes(0..k.max(2));
                CategoricalGrid::new(Shape::new(r, c).unwrap(), cells, alphabet).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn categorical_round_trip(g in categorical_grid()) {
            let back = parse_gslib_grid::<f64>(&write_gslib_categorical(&g), &GslibOptions::categorical()).unwrap();
            prop_assert_eq!(back, GslibGrid::Categorical(g));
        }

        #[test]
        fn real_round_trip(r in 1usize..8, c in 1usize..8, seed in proptest::collection::vec(-1e6f64..1e6, 64)) {
            let g = RealGrid::new(Shape::new(r, c).unwrap(), seed[..r * c].to_vec()).unwrap();
            let back = parse_gslib_grid::<f64>(&write_gslib_real(&g), &GslibOptions::real()).unwrap();
            prop_assert_eq!(back.into_real().unwrap(), g);
        }
    }
}
