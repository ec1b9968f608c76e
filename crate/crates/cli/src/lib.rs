//! Configuration-driven runs of the vortex-quillen pipelines with JSON
//! verification reports and CSV side tables.

pub mod checks;
pub mod config;
pub mod report;

use checks::Outcome;
use config::{Command, CurvatureFamily, RunConfig};
use report::{Table, VerificationReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] vortex_quillen::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

/// Exit status: 0 all checks pass, 1 some check failed, 2 configuration
/// error, 3 numerical failure.
pub fn exit_code(report: &VerificationReport) -> i32 {
    if !report.diagnostics.is_empty() {
        3
    } else if report.all_pass {
        0
    } else {
        1
    }
}

fn command_outcome(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let pos = cfg.positions_complex();
    let r2 = cfg.r_squared;
    Ok(match cfg.command {
        Command::Solve => {
            let mut out = checks::flux_check(cfg, r2, pos)?;
            if cfg.n > 0 {
                out.records.extend(checks::bradlow_check_for(cfg, cfg.n)?.records);
            }
            out
        }
        Command::Metric => {
            let mut out = checks::kahler_checks(cfg, r2, pos.clone())?;
            if cfg.n > 0 {
                out.tables.push(checks::metric_table(cfg, r2, pos)?);
            }
            out
        }
        Command::CycleIntegral => {
            if cfg.n == 0 {
                return Err(CliError::Config("cycle-integral needs n ≥ 1".into()));
            }
            checks::cycle_check(cfg, r2, &pos[1..])?
        }
        Command::Spectrum => {
            let mut out = checks::spectral_checks(cfg, cfg.n, r2, pos)?;
            let z = checks::zeta_reference_checks(cfg)?;
            out.records.extend(z.records);
            out.tables.extend(z.tables);
            out
        }
        Command::Zeta => checks::gauge_descent_checks(cfg, r2, pos, 20)?,
        Command::Curvature => match cfg.family {
            CurvatureFamily::Affine => checks::affine_checks(cfg, cfg.n, r2, pos)?,
            CurvatureFamily::Moduli => checks::moduli_checks(cfg, r2, pos)?,
        },
        Command::Embed => checks::embedding_checks(cfg, cfg.k)?,
        Command::VerifyAll => unreachable!("handled by run"),
    })
}

/// Execute the configured command. Numerical failures are recorded as
/// diagnostics in the report; configuration errors are returned.
pub fn run(cfg: &RunConfig) -> Result<(VerificationReport, Vec<Table>), CliError> {
    cfg.validate()?;
    let mut records = Vec::new();
    let mut tables = Vec::new();
    let mut diagnostics = Vec::new();
    if cfg.command == Command::VerifyAll {
        for k in 1..=9u8 {
            match checks::criterion(k, cfg) {
                Ok(o) => {
                    records.extend(o.records);
                    tables.extend(o.tables);
                }
                Err(CliError::Config(m)) => return Err(CliError::Config(m)),
                Err(e) => diagnostics.push(format!("criterion {k}: {e}")),
            }
        }
    } else {
        match command_outcome(cfg) {
            Ok(o) => {
                records = o.records;
                tables = o.tables;
            }
            Err(CliError::Config(m)) => return Err(CliError::Config(m)),
            Err(e) => diagnostics.push(e.to_string()),
        }
    }
    Ok((VerificationReport::new(cfg, records, diagnostics), tables))
}
