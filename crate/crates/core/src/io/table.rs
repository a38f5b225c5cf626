//! CSV tables with a fixed numeric format.

use std::path::Path;

use crate::{Error, Result};

/// `x` with 12 significant digits: positional notation for exponents in
/// `[-5, 12)`, scientific otherwise. Trailing zeros are kept so columns align
/// and reruns are byte-identical.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..12).contains(&exp) {
        format!("{:.*}", (11 - exp) as usize, x)
    } else {
        sci
    }
}

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Header plus rows, written as RFC 4180 CSV.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Two-column `quantity,value` table.
    pub fn key_values<'a>(items: impl IntoIterator<Item = (&'a str, Cell)>) -> Self {
        let mut t = Table::new(&["quantity", "value"]);
        for (k, v) in items {
            t.push(vec![k.into(), v]);
        }
        t
    }

    /// Points of several polylines, one row per point.
    pub fn polylines(lines: &[Vec<[f64; 2]>]) -> Self {
        let mut t = Table::new(&["line", "x", "y"]);
        for (i, l) in lines.iter().enumerate() {
            for p in l {
                t.push(vec![i.into(), p[0].into(), p[1].into()]);
            }
        }
        t
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        let err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }
}

/// Reads a CSV written by [`Table::write`] back as strings.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let err = |e: csv::Error| Error::Config(e.to_string());
    let header = r.headers().map_err(err)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(err)?.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(8.0), "8.00000000000");
        assert_eq!(fmt_num(-2.0816), "-2.08160000000");
        assert_eq!(fmt_num(1234.5), "1234.50000000");
        assert_eq!(fmt_num(9.99999999999999), "10.0000000000");
        assert_eq!(fmt_num(1e-9), "1.00000000000e-9");
        assert_eq!(fmt_num(0.0), "0");
        for x in [std::f64::consts::PI, 1e-4, 3.3e7, -7.25e-12] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs());
        }
    }

    #[test]
    fn csv_round_trip_quotes_text() {
        let mut t = Table::new(&["name", "value"]);
        t.push(vec!["a, b".into(), 1.5.into()]);
        let (h, rows) = read_csv(&t.to_csv().unwrap()).unwrap();
        assert_eq!(h, ["name", "value"]);
        assert_eq!(rows[0], ["a, b", "1.50000000000"]);
    }
}
