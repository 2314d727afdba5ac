//! Tabular report emission (CSV and JSON) with frozen float formatting.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

/// How floats are rendered in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Six significant digits, `%g` style.
    #[default]
    Sig6,
    /// Shortest representation that round-trips.
    Raw,
}

impl Precision {
    pub fn format(self, x: f64) -> String {
        match self {
            Precision::Sig6 => format_sig(x, 6),
            Precision::Raw => {
                if x == 0.0 {
                    "0".into()
                } else {
                    format!("{x}")
                }
            }
        }
    }

    pub fn round(self, x: f64) -> f64 {
        match self {
            Precision::Sig6 => format_sig(x, 6).parse().unwrap_or(x),
            Precision::Raw => x,
        }
    }
}

/// Formats `x` with `digits` significant digits, dropping trailing zeros.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// A header plus rows of cells; the common shape of every report.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self, precision: Precision) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => precision.format(*x),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(s) => csv_escape(s),
                    Cell::Empty => String::new(),
                })
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Array of objects keyed by header, in header order.
    pub fn to_json(&self, precision: Precision) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(k, c)| (k.clone(), cell_json(c, precision)))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn render(&self, format: OutputFormat, precision: Precision) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(precision),
            OutputFormat::Json => json_string(&self.to_json(precision)),
        }
    }
}

pub(crate) fn cell_json(c: &Cell, precision: Precision) -> Value {
    match c {
        Cell::Num(x) => num(*x, precision),
        Cell::Int(i) => Value::from(*i),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Empty => Value::Null,
    }
}

/// JSON number with report rounding; non-finite values become `null`.
pub fn num(x: f64, precision: Precision) -> Value {
    Number::from_f64(precision.round(x)).map_or(Value::Null, Value::Number)
}

pub fn json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// Guesses from the file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

/// Writes `contents` to a temp file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(format_sig(-0.0, 6), "0");
        assert_eq!(format_sig(35.0, 6), "35");
        assert_eq!(format_sig(1.0 / 3.0, 6), "0.333333");
        assert_eq!(format_sig(123456.7, 6), "123457");
        assert_eq!(format_sig(1234567.0, 6), "1.23457e6");
        assert_eq!(format_sig(9.9999996, 6), "10");
        assert_eq!(format_sig(-0.000012345678, 6), "-1.23457e-5");
        assert_eq!(format_sig(0.00012345678, 6), "0.000123457");
        assert_eq!(format_sig(f64::NAN, 6), "NaN");
    }

    #[test]
    fn csv_and_json() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![Cell::Num(2.0 / 3.0), Cell::Int(4), "x,y".into()]);
        t.push(vec![Cell::Empty, Cell::Num(f64::INFINITY), Cell::Text("ok".into())]);
        assert_eq!(t.to_csv(Precision::Sig6), "a,b,c\n0.666667,4,\"x,y\"\n,inf,ok\n");
        let j = t.to_json(Precision::Sig6);
        assert_eq!(j[0]["a"], Value::from(0.666667));
        assert_eq!(j[1]["b"], Value::Null);
        assert_eq!(t.to_json(Precision::Raw)[0]["a"], Value::from(2.0 / 3.0));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert_eq!(OutputFormat::from_path(&p), OutputFormat::Csv);
        assert_eq!(OutputFormat::from_path(Path::new("x.JSON")), OutputFormat::Json);
    }
}
