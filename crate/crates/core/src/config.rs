//! Declarative run configuration read from TOML.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dd_calculus::parse_function;
use crate::error::{Error, Result};
use crate::metrics::{FunctionalMetric, MatrixFunction};
use crate::quadrature::QuadratureSpec;
use crate::tfunc::TFunctionQuery;
use crate::verify::VerifyConfig;

/// Output encoding of reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format `{other}`, expected json or csv"))),
        }
    }
}

/// A functional metric described by whitelist function names and constant matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    /// Lower metric `f(t)^{-1} g`.
    Conformal { f: String, g: Vec<Vec<f64>> },
    /// Lower metric `f(t)^{-1} g (+) gt`.
    Twisted { f: String, g: Vec<Vec<f64>>, gt: Vec<Vec<f64>> },
    /// Lower metric `f(t)^{-1} g (+) ft(t)^{-1} gt`.
    DoublyTwisted { f: String, ft: String, g: Vec<Vec<f64>>, gt: Vec<Vec<f64>> },
    /// Lower metric given entry by entry.
    General { entries: Vec<Vec<String>> },
}

fn matrix(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config(format!("`{name}` must be a nonempty square matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl MetricSpec {
    pub fn build(&self) -> Result<FunctionalMetric> {
        match self {
            MetricSpec::Conformal { f, g } => FunctionalMetric::conformal(parse_function(f)?, matrix(g, "g")?),
            MetricSpec::Twisted { f, g, gt } => {
                FunctionalMetric::twisted(parse_function(f)?, matrix(g, "g")?, matrix(gt, "gt")?)
            }
            MetricSpec::DoublyTwisted { f, ft, g, gt } => FunctionalMetric::doubly_twisted(
                parse_function(f)?,
                parse_function(ft)?,
                matrix(g, "g")?,
                matrix(gt, "gt")?,
            ),
            MetricSpec::General { entries } => {
                let n = entries.len();
                if n == 0 || entries.iter().any(|r| r.len() != n) {
                    return Err(Error::Config("`entries` must be a nonempty square table".into()));
                }
                let parsed = entries
                    .iter()
                    .map(|r| r.iter().map(|s| parse_function(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(FunctionalMetric::general(MatrixFunction::new(parsed)?))
            }
        }
    }
}

/// Sample points `lo + k (hi - lo) / (n - 1)` for every argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridAxis {
    pub fn points(&self) -> Vec<f64> {
        match self.n {
            0 => vec![],
            1 => vec![self.lo],
            n => (0..n).map(|k| self.lo + (self.hi - self.lo) * k as f64 / (n - 1) as f64).collect(),
        }
    }
}

impl Default for GridAxis {
    fn default() -> Self {
        GridAxis { lo: -0.5, hi: 0.5, n: 3 }
    }
}

/// Parameters of the `curvature` command.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvatureConfig {
    pub grid: GridAxis,
    /// Also evaluate the densities through the symbolic engine.
    pub engine: bool,
}

/// Parameters of the `tfunc` command.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TFuncConfig {
    pub queries: Vec<TFunctionQuery>,
}

/// Interval containing the spectrum of `h`, on which the metric must be positive definite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spectrum {
    pub lo: f64,
    pub hi: f64,
}

impl Default for Spectrum {
    fn default() -> Self {
        Spectrum { lo: -1.0, hi: 1.0 }
    }
}

/// Everything a batch run needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    pub metric: Option<MetricSpec>,
    pub spectrum: Spectrum,
    pub quadrature: QuadratureSpec,
    pub curvature: CurvatureConfig,
    pub tfunc: TFuncConfig,
    pub verify: VerifyConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// The configured metric, checked for positive definiteness on the spectrum.
    pub fn metric(&self) -> Result<FunctionalMetric> {
        let spec = self.metric.as_ref().ok_or_else(|| Error::Config("no `[metric]` table".into()))?;
        let m = spec.build()?;
        m.check_positive_definite(self.spectrum.lo, self.spectrum.hi)?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_family() {
        let text = r#"
            seed = 3
            format = "csv"
            [metric]
            family = "doubly_twisted"
            f = "exp(t)"
            ft = "1 + t^2"
            g = [[1.0, 0.1], [0.1, 2.0]]
            gt = [[1.0, 0.0], [0.0, 1.0]]
            [curvature.grid]
            lo = 0.0
            hi = 1.0
            n = 2
        "#;
        let cfg = RunConfig::from_toml(text).unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.metric().unwrap().dim(), 4);
        assert_eq!(cfg.curvature.grid.points(), vec![0.0, 1.0]);
        let general = RunConfig::from_toml(
            "[metric]\nfamily = \"general\"\nentries = [[\"2 + sin(t)\", \"0.1\"], [\"0.1\", \"exp(t)\"]]\n",
        )
        .unwrap();
        assert_eq!(general.metric().unwrap().dim(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        let cfg = RunConfig::from_toml("[metric]\nfamily = \"conformal\"\nf = \"t\"\ng = [[1.0]]\n").unwrap();
        assert!(cfg.metric().is_err());
        let cfg = RunConfig::from_toml("[metric]\nfamily = \"conformal\"\nf = \"exp(t)\"\ng = [[1.0, 2.0]]\n").unwrap();
        assert!(cfg.metric().is_err());
    }
}
