use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use vortex_lab::config::{Command, CurvatureFamily, RunConfig};
use vortex_lab::report::write_outputs;
use vortex_lab::{exit_code, run, CliError};

/// Vortex moduli, Quillen determinants and embedding checks on the round
/// sphere.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// Pipeline to run.
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Vortex number.
    #[arg(long)]
    n: Option<usize>,
    /// Sphere radius squared.
    #[arg(long)]
    r_squared: Option<f64>,
    /// Vortex position "re,im" (repeat for each vortex).
    #[arg(long = "position", value_parser = parse_position)]
    positions: Vec<[f64; 2]>,
    /// Grid resolution (number of colatitude nodes).
    #[arg(long)]
    resolution: Option<usize>,
    /// Highest spectral level kept.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Curvature family for `curvature`.
    #[arg(long, value_enum)]
    family: Option<CurvatureFamily>,
    /// Highest tensor power for `embed`.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overridden by VORTEX_LAB_OUTPUT_DIR).
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Write the effective configuration as TOML to stdout and exit.
    #[arg(long)]
    print_config: bool,
}

fn parse_position(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected re,im")?;
    let re = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let im = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok([re, im])
}

fn build_config(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.command = args.command;
    if let Some(n) = args.n {
        cfg.n = n;
        if args.positions.is_empty() && cfg.positions.len() != n {
            cfg.positions.clear();
        }
    }
    if let Some(r2) = args.r_squared {
        cfg.r_squared = r2;
    }
    if !args.positions.is_empty() {
        cfg.positions = args.positions.clone();
        if args.n.is_none() {
            cfg.n = cfg.positions.len();
        }
    }
    if let Some(r) = args.resolution {
        cfg.resolution = r;
    }
    if let Some(c) = args.cutoff {
        cfg.spectral.cutoff = c;
    }
    if let Some(f) = args.family {
        cfg.family = f;
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(d) = &args.output_dir {
        cfg.output_dir = d.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if args.print_config {
        print!("{}", cfg.to_toml_string());
        return ExitCode::SUCCESS;
    }
    let (report, tables) = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let dir = cfg.resolved_output_dir().join(cfg.command.name());
    if let Err(e) = write_outputs(&dir, &report, &tables) {
        eprintln!("{e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    for (k, pass) in report.criteria() {
        println!("criterion {k}: {}", if pass { "PASS" } else { "FAIL" });
    }
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    println!("report: {}", dir.join("report.json").display());
    ExitCode::from(exit_code(&report) as u8)
}
