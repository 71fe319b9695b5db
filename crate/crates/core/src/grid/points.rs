//! Point data as `row,col,facies` CSV.

use std::fmt::Write as _;

use super::{ConditioningSet, FaciesCode, GridError, Shape, WellPoint};

const HEADER: [&str; 3] = ["row", "col", "facies"];

pub fn parse_points_csv(text: &str, shape: Shape) -> Result<ConditioningSet, GridError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader.headers().map_err(|e| GridError::Csv(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(GridError::Csv(format!("expected header \"row,col,facies\", found {:?}", headers.as_slice())));
    }

    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| GridError::Csv(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(GridError::Csv(format!("line {line}: expected 3 fields, found {}", record.len())));
        }
        let field = |i: usize, expected: &'static str| GridError::BadValue {
            line,
            token: record[i].to_string(),
            expected,
        };
        let row: usize = record[0].parse().map_err(|_| field(0, "a row index"))?;
        let col: usize = record[1].parse().map_err(|_| field(1, "a column index"))?;
        let facies: FaciesCode = record[2].parse().map_err(|_| field(2, "a facies code"))?;
        points.push(WellPoint { row, col, facies });
    }
    ConditioningSet::new(shape, points)
}

pub fn write_points_csv(data: &ConditioningSet) -> String {
    let mut out = String::from("row,col,facies\n");
    for p in data.points() {
        let _ = writeln!(out, "{},{},{}", p.row, p.col, p.facies);
    }
    out
}
