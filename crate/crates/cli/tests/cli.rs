use std::path::PathBuf;

use proptest::prelude::*;
use vortex_lab::config::*;
use vortex_lab::report::write_outputs;
use vortex_lab::{exit_code, run, CliError};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(
        n in 0usize..5,
        r2 in 0.1f64..20.0,
        pos in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 0..5),
        cutoff in 4usize..30,
        seed in 0..=i64::MAX as u64,
        fd in 1e-5f64..0.1,
        k in 1usize..12,
    ) {
        let cfg = RunConfig {
            command: Command::Curvature,
            n: pos.len().max(n),
            r_squared: r2,
            positions: if pos.len() >= n { pos.iter().map(|(a, b)| [*a, *b]).collect() } else { Vec::new() },
            family: CurvatureFamily::Moduli,
            k,
            seed,
            output_dir: PathBuf::from("out/dir"),
            fd: FdSteps { metric: fd, curvature: fd },
            spectral: SpectralSettings { cutoff, ..Default::default() },
            ..Default::default()
        };
        let text = cfg.to_toml_string();
        let back = RunConfig::from_toml_str(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn partial_config_uses_defaults() {
    let cfg = RunConfig::from_toml_str("command = \"solve\"\nn = 2\nr_squared = 2.5\n[solver]\ntolerance = 1e-9\n").unwrap();
    assert_eq!(cfg.command, Command::Solve);
    assert_eq!(cfg.solver.tolerance, 1e-9);
    assert_eq!(cfg.solver.max_iterations, 50);
    assert_eq!(cfg.positions_complex().len(), 2);
}

#[test]
fn invalid_configs_are_rejected() {
    for text in [
        "resolution = 24",
        "r_squared = -1.0",
        "n = 2\npositions = [[0.0, 0.0]]",
        "[spectral]\ncutoff = 2",
        "unknown_key = 1",
        "command = \"dance\"",
    ] {
        let e = RunConfig::from_toml_str(text).unwrap_err();
        assert!(matches!(e, CliError::Config(_)), "{text}");
        assert_eq!(e.exit_code(), 2);
    }
}

#[test]
fn oversized_seed_is_rejected() {
    let cfg = RunConfig {
        seed: u64::MAX,
        ..Default::default()
    };
    assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
}

#[test]
fn bradlow_violation_exits_with_numerical_status() {
    let cfg = RunConfig {
        command: Command::Solve,
        n: 2,
        r_squared: 1.0,
        ..Default::default()
    };
    let (report, _) = run(&cfg).unwrap();
    assert_eq!(exit_code(&report), 3);
    assert!(report.diagnostics[0].contains("Bradlow"));
}

#[test]
fn embed_reports_are_deterministic() {
    let cfg = RunConfig {
        command: Command::Embed,
        k: 3,
        ..Default::default()
    };
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut texts = Vec::new();
    for d in &dirs {
        let (mut report, tables) = run(&cfg).unwrap();
        assert_eq!(exit_code(&report), 0);
        let dev = report.checks.iter().find(|c| c.id == "C8.pointwise.k1").unwrap();
        assert!(dev.pass && dev.value < 1e-10);
        report.generated_at = 0;
        write_outputs(d.path(), &report, &tables).unwrap();
        let json = std::fs::read_to_string(d.path().join("report.json")).unwrap();
        let csv = std::fs::read_to_string(d.path().join("embedding.csv")).unwrap();
        texts.push((json, csv));
    }
    assert_eq!(texts[0], texts[1]);
    let v: serde_json::Value = serde_json::from_str(&texts[0].0).unwrap();
    assert_eq!(v["schema_version"], "vortex-lab-report/1");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["criterion"] == 8));
}

#[test]
fn output_directory_override() {
    let cfg = RunConfig::default();
    std::env::set_var(OUTPUT_DIR_ENV, "/tmp/elsewhere");
    assert_eq!(cfg.resolved_output_dir(), PathBuf::from("/tmp/elsewhere"));
    std::env::remove_var(OUTPUT_DIR_ENV);
    assert_eq!(cfg.resolved_output_dir(), PathBuf::from("vortex-lab-out"));
}

#[test]
fn report_keys_match_published_schema() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let keys = |v: &serde_json::Value| {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    let required = |v: &serde_json::Value| {
        let mut k: Vec<String> = v["required"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect();
        k.sort();
        k
    };
    let cfg = RunConfig {
        command: Command::Embed,
        k: 1,
        ..Default::default()
    };
    let (report, _) = run(&cfg).unwrap();
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(keys(&v), required(&schema));
    assert_eq!(keys(&v["environment"]), required(&schema["properties"]["environment"]));
    assert_eq!(keys(&v["checks"][0]), required(&schema["$defs"]["check"]));
    for c in v["checks"].as_array().unwrap() {
        assert!(c["id"].as_str().unwrap().starts_with(&format!("C{}.", c["criterion"])));
    }
}
