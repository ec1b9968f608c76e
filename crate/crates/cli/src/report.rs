use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::CliError;

pub const SCHEMA_VERSION: &str = "vortex-lab-report/1";
/// Version of the sign/normalisation conventions documented in the README.
pub const CONVENTION_VERSION: &str = "conventions/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// |value − expected| ≤ tolerance
    Absolute,
    /// |value − expected| ≤ tolerance·|expected|
    Relative,
    /// value ≤ tolerance (expected is 0)
    UpperBound,
    /// value > expected
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// Acceptance criterion (1–9) the check belongs to.
    pub criterion: u8,
    /// The statement being checked.
    pub anchor: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Diagnostics are reported but do not decide the criterion.
    pub gating: bool,
}

impl CheckRecord {
    pub fn new(
        id: impl Into<String>,
        criterion: u8,
        anchor: impl Into<String>,
        value: f64,
        expected: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let err = (value - expected).abs();
        let pass = value.is_finite()
            && match comparison {
                Comparison::Absolute => err <= tolerance,
                Comparison::Relative => err <= tolerance * expected.abs(),
                Comparison::UpperBound => value <= tolerance,
                Comparison::LowerBound => value > expected,
            };
        CheckRecord {
            id: id.into(),
            criterion,
            anchor: anchor.into(),
            value,
            expected,
            tolerance,
            comparison,
            pass,
            gating: true,
        }
    }

    pub fn diagnostic(mut self) -> Self {
        self.gating = false;
        self
    }
}

/// A numeric side table written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package_version: String,
    pub os: String,
    pub arch: String,
    pub threads: usize,
    pub quadrature: String,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            threads: rayon_threads(),
            quadrature: vortex_quillen::sphere_geometry::QuadratureScheme::GaussLegendreUniform
                .id()
                .to_string(),
        }
    }
}

fn rayon_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: String,
    pub convention_version: String,
    pub command: String,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    /// Errors raised by the numerical pipelines.
    pub diagnostics: Vec<String>,
    pub all_pass: bool,
    pub environment: Environment,
    /// Seconds since the Unix epoch; the only field that differs between
    /// identical runs.
    pub generated_at: u64,
}

impl VerificationReport {
    pub fn new(config: &RunConfig, checks: Vec<CheckRecord>, diagnostics: Vec<String>) -> Self {
        let all_pass = diagnostics.is_empty() && checks.iter().filter(|c| c.gating).all(|c| c.pass);
        VerificationReport {
            schema_version: SCHEMA_VERSION.to_string(),
            convention_version: CONVENTION_VERSION.to_string(),
            command: config.command.name().to_string(),
            config: config.clone(),
            checks,
            diagnostics,
            all_pass,
            environment: Environment::current(),
            generated_at: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Criteria touched by this report with their verdicts.
    pub fn criteria(&self) -> Vec<(u8, bool)> {
        let mut ids: Vec<u8> = self.checks.iter().map(|c| c.criterion).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter()
            .map(|k| {
                (
                    k,
                    self.checks.iter().filter(|c| c.criterion == k && c.gating).all(|c| c.pass),
                )
            })
            .collect()
    }
}

/// Write `report.json`, `checks.csv` and the side tables into `dir`.
pub fn write_outputs(dir: &Path, report: &VerificationReport, tables: &[Table]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    let path = dir.join("report.json");
    fs::write(&path, report.to_json() + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    written.push(path);

    let path = dir.join("checks.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Io(e.to_string()))?;
    w.write_record(["id", "criterion", "value", "expected", "tolerance", "comparison", "pass", "gating"])
        .map_err(|e| CliError::Io(e.to_string()))?;
    for c in &report.checks {
        w.write_record([
            c.id.clone(),
            c.criterion.to_string(),
            c.value.to_string(),
            c.expected.to_string(),
            c.tolerance.to_string(),
            serde_json::to_string(&c.comparison).unwrap().trim_matches('"').to_string(),
            c.pass.to_string(),
            c.gating.to_string(),
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    written.push(path);

    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Io(e.to_string()))?;
        w.write_record(&t.header).map_err(|e| CliError::Io(e.to_string()))?;
        for row in &t.rows {
            w.write_record(row.iter().map(|x| x.to_string())).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        written.push(path);
    }
    Ok(written)
}
