//! Sweep tables and their CSV form.

use std::io::{Read, Write};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// 17 significant digits, which round-trips every `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn parse_float(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| Cell::Num(*v)).collect());
    }

    pub fn column(&self, name: &str) -> CliResult<usize> {
        self.header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| CliError::parse(format!("missing column {name}")))
    }

    pub fn num(&self, row: usize, col: usize) -> CliResult<f64> {
        match &self.rows[row][col] {
            Cell::Num(v) => Ok(*v),
            Cell::Text(s) => Err(CliError::parse(format!("row {row}: {s:?} is not a number"))),
        }
    }

    pub fn text(&self, row: usize, col: usize) -> CliResult<&str> {
        match &self.rows[row][col] {
            Cell::Text(s) => Ok(s),
            Cell::Num(_) => Err(CliError::parse(format!("row {row}: expected text"))),
        }
    }

    pub fn nums(&self, name: &str) -> CliResult<Vec<f64>> {
        let c = self.column(name)?;
        (0..self.rows.len()).map(|r| self.num(r, c)).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header).map_err(|e| CliError::Runtime(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(|e| CliError::Runtime(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a CSV whose header must equal `header`; `text` names the columns kept as strings.
    pub fn read_csv<R: Read>(input: R, header: &[&'static str], text: &[&str]) -> CliResult<Self> {
        let mut rd = csv::ReaderBuilder::new().flexible(true).from_reader(input);
        let found = rd.headers().map_err(CliError::parse)?.clone();
        if found.iter().ne(header.iter().copied()) {
            return Err(CliError::parse(format!("unexpected CSV header {:?}", found.iter().collect::<Vec<_>>())));
        }
        let mut table = Table::new(header);
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(CliError::parse)?;
            if rec.len() != header.len() {
                return Err(CliError::parse(format!("row {i} has {} fields, expected {}", rec.len(), header.len())));
            }
            let mut row = Vec::with_capacity(rec.len());
            for (name, field) in header.iter().zip(rec.iter()) {
                if text.contains(name) {
                    row.push(Cell::Text(field.to_string()));
                } else {
                    let v = parse_float(field).ok_or_else(|| CliError::parse(format!("row {i}: bad number {field:?}")))?;
                    row.push(Cell::Num(v));
                }
            }
            table.rows.push(row);
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(parse_float(&format_float(v)).unwrap().to_bits(), v.to_bits());
        }
        assert!(parse_float(&format_float(f64::NAN)).unwrap().is_nan());
        assert_eq!(parse_float(&format_float(f64::INFINITY)), Some(f64::INFINITY));
    }

    #[test]
    fn csv_round_trip_and_header_check() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Num(0.1), Cell::Text("x/y".into())]);
        t.push(vec![Cell::Num(-3.0), Cell::Text("inf".into())]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = Table::read_csv(&buf[..], &["a", "b"], &["b"]).unwrap();
        assert_eq!(back, t);
        assert!(Table::read_csv(&buf[..], &["a", "c"], &["c"]).is_err());
    }

    #[test]
    fn short_row_is_a_parse_error() {
        let data = b"a,b\n1.0,2.0\n3.0\n";
        assert!(matches!(Table::read_csv(&data[..], &["a", "b"], &[]), Err(CliError::Parse(_))));
    }
}
