//! Report envelopes: a result table with the parameters and tolerances that
//! produced it and a pass/fail flag per in-command assertion.
//!
//! CSV layout: `#`-prefixed metadata lines (`# command=…`, `# param k=v`,
//! `# tolerance k=v`, `# assert PASS|FAIL name value=… tolerance=…`), then a
//! header row and one line per table row. The JSON mirror is a single object
//! with `command`, `params`, `tolerances`, `rows` (objects keyed by the CSV
//! header) and `assertions`.

use std::io::Write;

use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::Result;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

/// Shortest round-trip text of `v`: plain decimals for magnitudes in
/// `[1e-4, 1e15)`, exponent notation otherwise.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            // JSON has no NaN or infinities; those become strings.
            Cell::Num(v) if !v.is_finite() => s.serialize_str(&v.to_string()),
            Cell::Num(v) => s.serialize_f64(*v),
            Cell::Int(v) => s.serialize_i64(*v),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

/// A named check `value ≤ tolerance` (or an explicit flag) with its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Assertion {
    /// Passes when `value` is finite and `value < tolerance`.
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: value.is_finite() && value < tolerance,
            value,
            tolerance,
        }
    }

    /// Passes when `value` is finite and `value ≥ bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value.is_finite() && value >= bound,
            value,
            tolerance: bound,
        }
    }
}

impl Serialize for Assertion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Assertion", 4)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("passed", &self.passed)?;
        st.serialize_field("value", &Cell::Num(self.value))?;
        st.serialize_field("tolerance", &Cell::Num(self.tolerance))?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub tolerances: Vec<(String, f64)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub assertions: Vec<Assertion>,
}

struct Pairs<'a, V>(&'a [(String, V)]);

impl<V: Serialize> Serialize for Pairs<'_, V> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

struct Row<'a>(&'a [String], &'a [Cell]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl Serialize for Report {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let tolerances: Vec<(String, Cell)> = self
            .tolerances
            .iter()
            .map(|(k, v)| (k.clone(), Cell::Num(*v)))
            .collect();
        let rows: Vec<Row> = self.rows.iter().map(|r| Row(&self.columns, r)).collect();
        let mut st = s.serialize_struct("Report", 5)?;
        st.serialize_field("command", &self.command)?;
        st.serialize_field("params", &Pairs(&self.params))?;
        st.serialize_field("tolerances", &Pairs(&tolerances))?;
        st.serialize_field("rows", &rows)?;
        st.serialize_field("assertions", &self.assertions)?;
        st.end()
    }
}

impl Report {
    pub fn new(command: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            command: command.into(),
            params: Vec::new(),
            tolerances: Vec::new(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
            assertions: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.tolerances.push((key.to_owned(), value));
        self
    }

    /// Appends a row; panics if its width differs from the header.
    pub fn row(&mut self, cells: Vec<Cell>) -> &mut Self {
        assert_eq!(
            cells.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(cells);
        self
    }

    pub fn assert(&mut self, a: Assertion) -> &mut Self {
        self.assertions.push(a);
        self
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }

    /// 0 when every assertion passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# command={}", self.command)?;
        for (k, v) in &self.params {
            writeln!(out, "# param {k}={v}")?;
        }
        for (k, v) in &self.tolerances {
            writeln!(out, "# tolerance {k}={}", format_f64(*v))?;
        }
        for a in &self.assertions {
            let flag = if a.passed { "PASS" } else { "FAIL" };
            writeln!(
                out,
                "# assert {flag} {} value={} tolerance={}",
                a.name,
                format_f64(a.value),
                format_f64(a.tolerance)
            )?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("reports are UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", &["H", "E", "note"]);
        r.param("H", "0.5").tolerance("energy", 1e-8);
        r.row(vec![0.5.into(), std::f64::consts::PI.into(), "ok".into()]);
        r.row(vec![1.0.into(), f64::NAN.into(), "a,b".into()]);
        r.assert(Assertion::below("E=pi [H=0.5]", 0.0, 1e-8));
        r
    }

    #[test]
    fn csv_layout() {
        let s = sample().to_csv_string();
        let expect = "# command=demo\n# param H=0.5\n# tolerance energy=1e-8\n\
                      # assert PASS E=pi [H=0.5] value=0 tolerance=1e-8\n\
                      H,E,note\n0.5,3.141592653589793,ok\n1,NaN,\"a,b\"\n";
        assert_eq!(s, expect);
    }

    #[test]
    fn json_mirrors_columns() {
        let mut buf = Vec::new();
        sample().write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["command"], "demo");
        assert_eq!(v["params"]["H"], "0.5");
        assert_eq!(v["rows"][0]["E"], std::f64::consts::PI);
        assert_eq!(v["rows"][1]["E"], "NaN");
        assert_eq!(v["assertions"][0]["passed"], true);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.find("\"H\"").unwrap() < text.find("\"note\"").unwrap());
    }

    #[test]
    fn number_format_round_trips() {
        for v in [0.0, 1e-8, 2.5e-16, 3.25, 1234.5, 6.02e23, -7e-5, f64::NAN] {
            let t = format_f64(v);
            let back: f64 = t.parse().unwrap();
            assert!(back == v || v.is_nan(), "{t}");
        }
        assert_eq!(format_f64(1e-8), "1e-8");
        assert_eq!(format_f64(0.5), "0.5");
    }

    #[test]
    fn exit_codes() {
        let mut r = sample();
        assert_eq!(r.exit_code(), 0);
        r.assert(Assertion::below("nan fails", f64::NAN, 1.0));
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.failures().count(), 1);
        assert!(!Assertion::at_least("low", 1.0, 2.0).passed);
    }
}
