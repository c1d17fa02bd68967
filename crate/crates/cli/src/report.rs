//! Suite reports and their JSON / CSV encodings.

use std::fmt::Write as _;

use hyperlab_core::Rational;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1";

/// Column order of the CSV encoding: one row per reported field.
pub const CSV_HEADER: &str = "suite,check,passed,field,value";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?}; expected json or csv")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Int(i64),
    Float(f64),
    Rational(Rational),
    Text(String),
    Bool(bool),
}

/// `x` rounded to 12 significant digits, with `-0` folded into `0`.
fn round12(x: f64) -> f64 {
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn non_finite(x: f64) -> &'static str {
    if x.is_nan() {
        "nan"
    } else if x > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

impl Field {
    /// Text form used in CSV cells.
    pub fn render(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Float(x) if x.is_finite() => round12(*x).to_string(),
            Field::Float(x) => non_finite(*x).into(),
            Field::Rational(q) => format!("{}/{}", q.numer(), q.denom()),
            Field::Text(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Int(v) => s.serialize_i64(*v),
            Field::Float(x) if x.is_finite() => s.serialize_f64(round12(*x)),
            Field::Bool(b) => s.serialize_bool(*b),
            other => s.serialize_str(&other.render()),
        }
    }
}

/// Named values in insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Fields(pub Vec<(String, Field)>);

impl Fields {
    pub fn new() -> Self {
        Fields::default()
    }

    pub fn int(mut self, k: &str, v: impl TryInto<i64>) -> Self {
        self.0.push((k.into(), Field::Int(v.try_into().unwrap_or(i64::MAX))));
        self
    }

    pub fn float(mut self, k: &str, v: f64) -> Self {
        self.0.push((k.into(), Field::Float(v)));
        self
    }

    pub fn rational(mut self, k: &str, v: Rational) -> Self {
        self.0.push((k.into(), Field::Rational(v)));
        self
    }

    pub fn text(mut self, k: &str, v: impl Into<String>) -> Self {
        self.0.push((k.into(), Field::Text(v.into())));
        self
    }

    pub fn bool(mut self, k: &str, v: bool) -> Self {
        self.0.push((k.into(), Field::Bool(v)));
        self
    }

    pub fn get(&self, k: &str) -> Option<&Field> {
        self.0.iter().find(|(n, _)| n == k).map(|(_, v)| v)
    }
}

impl Serialize for Fields {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Enough to rerun a failing case: the seed and the offending elements.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub seed: u64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub fields: Fields,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema_version: &'static str,
    pub suite: String,
    pub group: String,
    pub metric: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: &str, group: &str, metric: &str, seed: u64, checks: Vec<Check>) -> Self {
        SuiteReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.into(),
            group: group.into(),
            metric: metric.into(),
            seed,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn emit(report: &SuiteReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("reports serialize");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for c in &report.checks {
                let mut rows: Vec<(String, String)> =
                    c.fields.0.iter().map(|(k, v)| (k.clone(), v.render())).collect();
                if let Some(w) = &c.witness {
                    rows.push(("witness_seed".into(), w.seed.to_string()));
                    rows.push(("witness".into(), w.detail.clone()));
                }
                if rows.is_empty() {
                    rows.push((String::new(), String::new()));
                }
                for (k, v) in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        csv_cell(&c.suite),
                        csv_cell(&c.name),
                        c.passed,
                        csv_cell(&k),
                        csv_cell(&v)
                    );
                }
            }
            out.into_bytes()
        }
    }
}
