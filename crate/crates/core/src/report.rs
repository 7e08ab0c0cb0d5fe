//! Versioned machine-readable reports in JSON or CSV.
//!
//! A CSV report starts with the line `# nctori-report v<version> <command> seed=<seed>`
//! followed by a fixed header row. A JSON report is an object with the fields
//! `version`, `command`, `seed` and `rows`; every row has the same fields as
//! the CSV columns, with absent values as `null`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{Error, Result};

pub const REPORT_VERSION: u32 = 1;

/// A row type together with the command that produces it.
pub trait ReportRow: Serialize + DeserializeOwned {
    const COMMAND: &'static str;
}

/// One tabulated curvature value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureRow {
    /// `K`, `H`, `K~`, `H~`, `B21` or `B22`.
    pub quantity: String,
    pub t0: f64,
    pub t1: f64,
    pub t2: Option<f64>,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub value: f64,
    /// Sign class of `det(P2(t1) - P2(t0))` for two-dimensional metrics.
    pub branch: Option<String>,
    /// `closed_form` or `engine`.
    pub method: String,
    /// Engine value minus closed form, on engine rows that have one.
    pub delta: Option<f64>,
}

impl ReportRow for CurvatureRow {
    const COMMAND: &'static str = "curvature";
}

/// One T-function value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TFuncRow {
    /// Space separated tensor indices.
    pub n: String,
    pub alpha: String,
    pub t: String,
    pub method: String,
    pub branch: Option<String>,
    pub value: f64,
}

impl ReportRow for TFuncRow {
    const COMMAND: &'static str = "tfunc";
}

/// Outcome of one verification check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub id: u32,
    pub name: String,
    pub tolerance: f64,
    pub observed: f64,
    pub passed: bool,
    pub detail: String,
}

impl ReportRow for CheckRow {
    const COMMAND: &'static str = "verify";
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<R> {
    pub version: u32,
    pub command: String,
    pub seed: u64,
    pub rows: Vec<R>,
}

/// Space separated list, as used in the vector-valued columns.
pub fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn csv_error(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

impl<R: ReportRow> Report<R> {
    pub fn new(seed: u64, rows: Vec<R>) -> Self {
        Report { version: REPORT_VERSION, command: R::COMMAND.to_string(), seed, rows }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(format!("json: {e}")))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = format!("# nctori-report v{} {} seed={}\n", self.version, self.command, self.seed);
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).map_err(csv_error)?;
        }
        if self.rows.is_empty() {
            return Ok(out);
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }

    pub fn encode(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("json: {e}")))?;
        r.check_header()?;
        Ok(r)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (first, body) = text.split_once('\n').unwrap_or((text, ""));
        let bad = || Error::Config(format!("malformed report header `{first}`"));
        let mut parts = first.strip_prefix("# nctori-report v").ok_or_else(bad)?.split(' ');
        let version = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let command = parts.next().ok_or_else(bad)?.to_string();
        let seed = parts
            .next()
            .and_then(|s| s.strip_prefix("seed="))
            .and_then(|s| s.parse().ok())
            .ok_or_else(bad)?;
        let rows = csv::Reader::from_reader(body.as_bytes())
            .deserialize()
            .collect::<std::result::Result<Vec<R>, _>>()
            .map_err(csv_error)?;
        let r = Report { version, command, seed, rows };
        r.check_header()?;
        Ok(r)
    }

    fn check_header(&self) -> Result<()> {
        if self.version != REPORT_VERSION {
            return Err(Error::Config(format!("unsupported report version {}", self.version)));
        }
        if self.command != R::COMMAND {
            return Err(Error::Config(format!("expected a `{}` report, found `{}`", R::COMMAND, self.command)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report<CurvatureRow> {
        let row = |q: &str, v: f64, delta: Option<f64>| CurvatureRow {
            quantity: q.into(),
            t0: 0.1,
            t1: -1.0 / 3.0,
            t2: None,
            i: Some(0),
            j: None,
            value: v,
            branch: Some("positive".into()),
            method: "engine".into(),
            delta,
        };
        Report::new(9, vec![row("K", std::f64::consts::PI, Some(1.234e-17)), row("H", -2.5e-300, None)])
    }

    #[test]
    fn csv_and_json_round_trip() {
        let r = sample();
        assert_eq!(Report::from_json(&r.to_json().unwrap()).unwrap(), r);
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("# nctori-report v1 curvature seed=9\nquantity,t0,t1,t2,i,j,value,branch,method,delta\n"));
        assert_eq!(Report::from_csv(&csv).unwrap(), r);
    }

    #[test]
    fn wrong_command_is_rejected() {
        let csv = sample().to_csv().unwrap();
        assert!(Report::<CheckRow>::from_csv(&csv).is_err());
    }
}
