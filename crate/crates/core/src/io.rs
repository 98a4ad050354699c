//! Point set serialization: CSV (one point per row, optional header) and JSON
//! (array of arrays).
//!
//! Coordinates are written with the shortest decimal form that parses back to
//! the identical `f64`, so write/read round trips are exact.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Parses CSV text. A first row that does not parse as numbers is taken as a
/// header; every other row must hold exactly `d` finite numbers.
pub fn parse_csv(text: &str) -> Result<PointSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                if let Some(c) = row.iter().find(|c| !c.is_finite()) {
                    return Err(Error::Parse(format!("row {}: non-finite value {c}", line + 1)));
                }
                if let Some(first) = rows.first() {
                    if first.len() != row.len() {
                        return Err(Error::Parse(format!(
                            "row {}: expected {} columns, found {}",
                            line + 1,
                            first.len(),
                            row.len()
                        )));
                    }
                }
                rows.push(row);
            }
            Err(e) if line == 0 => {
                log::debug!("treating first CSV row as header ({e})");
            }
            Err(e) => return Err(Error::Parse(format!("row {}: {e}", line + 1))),
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("no points in CSV input".into()));
    }
    PointSet::from_rows(rows).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_json(text: &str) -> Result<PointSet> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    PointSet::from_rows(rows).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses either format, choosing JSON when the text starts with `[`.
pub fn parse_points(text: &str) -> Result<PointSet> {
    if text.trim_start().starts_with('[') {
        parse_json(text)
    } else {
        parse_csv(text)
    }
}

/// Parses a single comma-separated point such as `0.5,-1`.
pub fn parse_point(text: &str) -> Result<Vec<f64>> {
    let coords: std::result::Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|e| Error::Parse(format!("point {text:?}: {e}")))?;
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::Parse(format!("point {text:?} has non-finite coordinates")));
    }
    Ok(coords)
}

pub fn write_csv<W: Write>(points: &PointSet, mut w: W) -> Result<()> {
    for p in points.iter() {
        let row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn to_csv_string(points: &PointSet) -> String {
    let mut buf = Vec::new();
    write_csv(points, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

pub fn to_json_string(points: &PointSet) -> String {
    serde_json::to_string(points).expect("point sets always serialize")
}
