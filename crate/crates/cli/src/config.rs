use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use vortex_quillen::moduli_metric::CycleGrid;
use vortex_quillen::quillen_spectral::ZetaParams;
use vortex_quillen::vortex_solver::TaubesParams;

use crate::CliError;

/// Environment variable overriding `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "VORTEX_LAB_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Metric,
    CycleIntegral,
    Spectrum,
    Zeta,
    Curvature,
    Embed,
    VerifyAll,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Metric => "metric",
            Command::CycleIntegral => "cycle-integral",
            Command::Spectrum => "spectrum",
            Command::Zeta => "zeta",
            Command::Curvature => "curvature",
            Command::Embed => "embed",
            Command::VerifyAll => "verify-all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureFamily {
    /// Unitary affine family through the symmetric connection.
    Affine,
    /// Displacements of the first vortex.
    Moduli,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdSteps {
    /// Chart-coordinate step for ∂b̄/∂z in the moduli metric.
    pub metric: f64,
    /// Step of the mixed-derivative stencil for curvature checks.
    pub curvature: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        FdSteps {
            metric: 1e-3,
            curvature: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralSettings {
    /// Highest background level n kept in the Ritz basis.
    pub cutoff: usize,
    pub zeta: ZetaParams,
}

impl Default for SpectralSettings {
    fn default() -> Self {
        SpectralSettings {
            cutoff: 16,
            zeta: ZetaParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub r_squared: f64,
    /// Vortex positions as [re, im] in the north chart; empty selects the
    /// default layout for `n`.
    pub positions: Vec<[f64; 2]>,
    pub resolution: usize,
    pub family: CurvatureFamily,
    /// Highest tensor power for `embed`.
    pub k: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub solver: TaubesParams,
    pub fd: FdSteps,
    pub spectral: SpectralSettings,
    pub cycle_grid: CycleGrid,
    /// Sweep grid for the integral of the moduli curvature.
    pub curvature_grid: CycleGrid,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::VerifyAll,
            n: 1,
            r_squared: 1.5,
            positions: Vec::new(),
            resolution: 32,
            solver: TaubesParams::default(),
            fd: FdSteps::default(),
            spectral: SpectralSettings::default(),
            cycle_grid: CycleGrid::default(),
            curvature_grid: CycleGrid { ntheta: 4, nphi: 8 },
            family: CurvatureFamily::Affine,
            k: 3,
            output_dir: PathBuf::from("vortex-lab-out"),
            seed: 20_240_601,
        }
    }
}

/// Spread-out default layout: the origin for one vortex, otherwise points
/// on two rings with distinct radii.
pub fn default_positions(n: usize) -> Vec<Complex64> {
    match n {
        0 => Vec::new(),
        1 => vec![Complex64::new(0.0, 0.0)],
        _ => (0..n)
            .map(|r| {
                let rad = if r % 2 == 0 { 0.6 } else { 1.4 };
                Complex64::from_polar(rad, 2.0 * std::f64::consts::PI * (r as f64 + 0.15) / n as f64)
            })
            .collect(),
    }
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg.into()))
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, CliError> {
        let c: RunConfig = toml::from_str(s).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let s = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn positions_complex(&self) -> Vec<Complex64> {
        if self.positions.is_empty() {
            default_positions(self.n)
        } else {
            self.positions.iter().map(|p| Complex64::new(p[0], p[1])).collect()
        }
    }

    /// Output directory after the environment override.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => self.output_dir.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        check(self.n <= 8, "n must be at most 8")?;
        check(self.r_squared.is_finite() && self.r_squared > 0.0, "r_squared must be positive")?;
        check(
            self.positions.is_empty() || self.positions.len() == self.n,
            format!("{} positions given for n = {}", self.positions.len(), self.n),
        )?;
        check(
            self.positions.iter().flatten().all(|x| x.is_finite()),
            "positions must be finite",
        )?;
        check(
            self.resolution.is_power_of_two() && (8..=128).contains(&self.resolution),
            "resolution must be a power of two in [8, 128]",
        )?;
        let s = &self.solver;
        check(s.tolerance > 0.0 && s.tolerance < 1e-2, "solver.tolerance must lie in (0, 1e-2)")?;
        check((1..=500).contains(&s.max_iterations), "solver.max_iterations must lie in [1, 500]")?;
        check((2..=64).contains(&s.lmax), "solver.lmax must lie in [2, 64]")?;
        check(s.cg_tolerance > 0.0 && s.cg_tolerance < 1e-2, "solver.cg_tolerance must lie in (0, 1e-2)")?;
        check(s.cg_max_iterations >= 1, "solver.cg_max_iterations must be positive")?;
        for (name, h) in [("fd.metric", self.fd.metric), ("fd.curvature", self.fd.curvature)] {
            check(h > 0.0 && h <= 0.1, format!("{name} must lie in (0, 0.1]"))?;
        }
        check((4..=30).contains(&self.spectral.cutoff), "spectral.cutoff must lie in [4, 30]")?;
        let z = &self.spectral.zeta;
        check(z.tau > 0.0 && z.fit_span > 1.0, "spectral.zeta.tau > 0 and fit_span > 1 required")?;
        check(
            z.fit_terms >= 1 && z.fit_points > z.fit_terms,
            "spectral.zeta.fit_points must exceed fit_terms",
        )?;
        check(z.fit_threshold > 0.0, "spectral.zeta.fit_threshold must be positive")?;
        for (name, g) in [("cycle_grid", self.cycle_grid), ("curvature_grid", self.curvature_grid)] {
            check(g.ntheta >= 1 && g.nphi >= 1 && g.ntheta * g.nphi <= 4096, format!("{name} must have 1..4096 samples"))?;
        }
        check((1..=12).contains(&self.k), "k must lie in [1, 12]")?;
        check(self.seed <= i64::MAX as u64, "seed must fit in a TOML integer (at most 2^63 − 1)")?;
        Ok(())
    }
}
