//! Checks for the nine acceptance criteria, shared by the CLI commands and
//! the `acceptance` test target.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vortex_quillen::embedding_checks::embedding_report;
use vortex_quillen::error::Error;
use vortex_quillen::moduli_metric::{integrate_over_cycle, MetricParams};
use vortex_quillen::quillen_spectral::*;
use vortex_quillen::sphere_geometry::SphereGeometry;
use vortex_quillen::vortex_solver::*;

use crate::config::{default_positions, RunConfig};
use crate::report::{CheckRecord, Comparison, Table};
use crate::CliError;

/// ζ′(0) of the scalar Laplacian on the unit sphere, 4ζ′_R(−1) − ½.
pub const ROUND_SPHERE_ZETA_PRIME: f64 = 4.0 * -0.165_421_143_700_451 - 0.5;

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub records: Vec<CheckRecord>,
    pub tables: Vec<Table>,
}

impl Outcome {
    fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    fn extend(&mut self, other: Outcome) {
        self.records.extend(other.records);
        self.tables.extend(other.tables);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().filter(|r| r.gating).all(|r| r.pass)
    }
}

type Res = Result<Outcome, CliError>;

fn geometry(cfg: &RunConfig, r2: f64) -> Result<SphereGeometry, CliError> {
    Ok(SphereGeometry::new(r2, cfg.resolution)?)
}

fn solve_fields(cfg: &RunConfig, r2: f64, positions: Vec<Complex64>) -> Result<(TaubesSolution, FieldData), CliError> {
    let config = VortexConfiguration::new(geometry(cfg, r2)?, positions)?;
    let sol = solve_taubes(&config, &cfg.solver)?;
    let fields = reconstruct_fields(&sol);
    Ok((sol, fields))
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn rng(cfg: &RunConfig, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

// ---------------------------------------------------------------- 1, 2

/// Flux of the vortex solution for the given data.
pub fn flux_check(cfg: &RunConfig, r2: f64, positions: Vec<Complex64>) -> Res {
    let n = positions.len();
    let (sol, f) = solve_fields(cfg, r2, positions)?;
    let mut out = Outcome::default();
    let tag = format!("N{n}.R2={r2}");
    out.push(CheckRecord::new(
        format!("C1.flux.{tag}"),
        1,
        "flux ∫(1−|Ψ|²)dμ equals 4πN",
        flux(&f),
        4.0 * PI * n as f64,
        1e-6,
        Comparison::Relative,
    ));
    out.push(
        CheckRecord::new(
            format!("C1.taubes_residual.{tag}"),
            1,
            "Taubes residual below solver tolerance",
            sol.residual_norm,
            0.0,
            cfg.solver.tolerance,
            Comparison::UpperBound,
        )
        .diagnostic(),
    );
    out.push(
        CheckRecord::new(
            format!("C1.moment_map.{tag}"),
            1,
            "sup|μ| vanishes on the solution",
            sup_abs(&moment_map_nodes(&f)),
            0.0,
            1e-8,
            Comparison::UpperBound,
        )
        .diagnostic(),
    );
    let mut t = Table::new(&format!("fields_{tag}"), &["theta", "phi", "v", "psi_abs2", "curvature"]);
    let b = f.curvature();
    for i in 0..f.geom.node_count() {
        let (th, ph) = f.geom.node_angles(i);
        t.push(vec![th, ph, sol.v_nodes[i], f.psi[i].norm_sqr(), b[i]]);
    }
    out.tables.push(t);
    Ok(out)
}

pub fn criterion_1(cfg: &RunConfig) -> Res {
    let mut out = Outcome::default();
    for n in 1..=3 {
        out.extend(flux_check(cfg, n as f64 + 0.5, default_positions(n))?);
    }
    Ok(out)
}

pub fn bradlow_check_for(cfg: &RunConfig, n: usize) -> Res {
    let mut out = Outcome::default();
    let pos = default_positions(n);
    for (label, r2, want_ok) in [("above", n as f64 + 1e-2, true), ("below", n as f64 - 1e-2, false)] {
        let outcome = geometry(cfg, r2).and_then(|g| {
            VortexConfiguration::new(g, pos.clone())
                .and_then(|c| solve_taubes(&c, &cfg.solver))
                .map_err(CliError::from)
        });
        let ok = matches!(
            (&outcome, want_ok),
            (Ok(_), true) | (Err(CliError::Numerical(Error::BradlowViolation { .. })), false)
        );
        let anchor = if want_ok {
            "solve succeeds for 4πR² > 4πN"
        } else {
            "BradlowViolation for 4πR² < 4πN"
        };
        out.push(CheckRecord::new(
            format!("C2.bradlow.N{n}.{label}"),
            2,
            anchor,
            if ok { 1.0 } else { 0.0 },
            1.0,
            0.0,
            Comparison::Absolute,
        ));
    }
    Ok(out)
}

pub fn criterion_2(cfg: &RunConfig) -> Res {
    let mut out = bradlow_check_for(cfg, 1)?;
    out.extend(bradlow_check_for(cfg, 2)?);
    Ok(out)
}

// ---------------------------------------------------------------- 3

pub fn cycle_check(cfg: &RunConfig, r2: f64, fixed: &[Complex64]) -> Res {
    let n = fixed.len() + 1;
    let geom = geometry(cfg, r2)?;
    let params = MetricParams {
        fd_step: cfg.fd.metric,
        taubes: cfg.solver,
    };
    let ci = integrate_over_cycle(&geom, fixed, &cfg.cycle_grid, &params)?;
    let mut out = Outcome::default();
    let tag = format!("N{n}.R2={r2}");
    out.push(CheckRecord::new(
        format!("C3.cycle.{tag}"),
        3,
        "(1/2π)∫ω_MN over a one-vortex sweep equals 2(R²−N)",
        ci.value,
        2.0 * (r2 - n as f64),
        0.02,
        Comparison::Relative,
    ));
    let mut t = Table::new(&format!("cycle_{tag}"), &["re_z", "im_z", "m11"]);
    for s in &ci.samples {
        t.push(vec![s.z.re, s.z.im, s.m11]);
    }
    out.tables.push(t);
    Ok(out)
}

pub fn criterion_3(cfg: &RunConfig) -> Res {
    let mut out = cycle_check(cfg, 1.5, &[])?;
    out.extend(cycle_check(cfg, 2.0, &[])?);
    out.extend(cycle_check(cfg, 2.5, &[Complex64::new(1.0, 0.0)])?);
    Ok(out)
}

// ---------------------------------------------------------------- 4

pub fn kahler_checks(cfg: &RunConfig, r2: f64, positions: Vec<Complex64>) -> Res {
    let n = positions.len();
    let (_, f) = solve_fields(cfg, r2, positions)?;
    let geom = &f.geom;
    let mut r = rng(cfg, 4);
    let mut compat: f64 = 0.0;
    let mut min_g = f64::INFINITY;
    let mut i2: f64 = 0.0;
    for _ in 0..100 {
        let x = TangentPair::random(geom, n, 4, &mut r);
        let y = TangentPair::random(geom, n, 4, &mut r);
        let lhs = metric_g(&complex_i(&x), &y, geom);
        let rhs = 2.0 * symplectic_omega(&x, &y, geom);
        let gxx = metric_g(&x, &x, geom);
        let scale = rhs.abs().max(1e-12 * (gxx * metric_g(&y, &y, geom)).sqrt());
        compat = compat.max((lhs - rhs).abs() / scale);
        min_g = min_g.min(gxx / x.eta.iter().chain(&x.beta).map(|c| c.norm_sqr()).fold(0.0, f64::max));
        let ii = complex_i(&complex_i(&x));
        let d = ii
            .eta
            .iter()
            .zip(&x.eta)
            .chain(ii.beta.iter().zip(&x.beta))
            .map(|(a, b)| (a + b).norm())
            .fold(0.0, f64::max);
        i2 = i2.max(d);
    }
    let mut ham: f64 = 0.0;
    for _ in 0..10 {
        let g = GaugeElement::random(geom, 3, 1.0, &mut r);
        let x = TangentPair::random(geom, n, 4, &mut r);
        let lhs = symplectic_omega(&gauge_vector_field(&f, &g), &x, geom);
        let rhs = hamiltonian_differential(&f, &g, &x, 1e-3);
        ham = ham.max((lhs - rhs).abs() / lhs.abs().max(1e-12));
    }
    let mut out = Outcome::default();
    out.push(CheckRecord::new(
        "C4.compatibility",
        4,
        "𝒢(ℐX,Y) = 2Ω(X,Y), max relative error over 100 pairs",
        compat,
        0.0,
        1e-8,
        Comparison::UpperBound,
    ));
    out.push(CheckRecord::new(
        "C4.positivity",
        4,
        "𝒢(X,X) > 0 (minimum of 𝒢(X,X)/sup|X|² over samples)",
        min_g,
        0.0,
        0.0,
        Comparison::LowerBound,
    ));
    out.push(CheckRecord::new(
        "C4.complex_structure",
        4,
        "ℐ² = −1, sup|ℐ²X + X|",
        i2,
        0.0,
        1e-14,
        Comparison::UpperBound,
    ));
    out.push(CheckRecord::new(
        "C4.hamiltonian",
        4,
        "Ω(X_ζ, X) = dH_ζ(X), max relative error",
        ham,
        0.0,
        1e-6,
        Comparison::UpperBound,
    ));
    Ok(out)
}

pub fn criterion_4(cfg: &RunConfig) -> Res {
    kahler_checks(cfg, 2.5, default_positions(2))
}

/// Moduli metric matrix as a side table.
pub fn metric_table(cfg: &RunConfig, r2: f64, positions: Vec<Complex64>) -> Result<Table, CliError> {
    let config = VortexConfiguration::new(geometry(cfg, r2)?, positions)?;
    let params = MetricParams {
        fd_step: cfg.fd.metric,
        taubes: cfg.solver,
    };
    let m = vortex_quillen::moduli_metric::assemble_metric(&config, &params)?;
    let mut t = Table::new("moduli_metric", &["r", "s", "re", "im"]);
    for r in 0..config.n() {
        for s in 0..config.n() {
            let v = m.m(r, s);
            t.push(vec![r as f64, s as f64, v.re, v.im]);
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------- 5

fn kernel_records(out: &mut Outcome, label: &str, n: usize, spec: &SpectralData) {
    out.push(CheckRecord::new(
        format!("C5.kernel_dim.{label}"),
        5,
        "dim Ker Δ_A = N+1",
        spec.kernel_dim as f64,
        (n + 1) as f64,
        0.0,
        Comparison::Absolute,
    ));
    out.push(CheckRecord::new(
        format!("C5.gap_ratio.{label}"),
        5,
        "λ_{N+1}/λ_{N+2} < 1e-6",
        spec.eigenvalues[n].abs() / spec.eigenvalues[n + 1],
        0.0,
        1e-6,
        Comparison::UpperBound,
    ));
}

pub fn spectral_checks(cfg: &RunConfig, n: usize, r2: f64, positions: Vec<Complex64>) -> Res {
    let mut out = Outcome::default();
    let geom = geometry(cfg, r2)?;
    let basis = DolbeaultBasis::new(&geom, n, cfg.spectral.cutoff)?;
    kernel_records(&mut out, &format!("N{n}.symmetric"), n, &basis.background_spectrum());
    if n > 0 {
        let (_, f) = solve_fields(cfg, r2, positions)?;
        let spec = basis.ritz_spectrum(&f.a01_nodes())?;
        kernel_records(&mut out, &format!("N{n}.vortex"), n, &spec);
        let mut t = Table::new(&format!("spectrum_N{n}"), &["index", "eigenvalue"]);
        for (i, l) in spec.eigenvalues.iter().enumerate() {
            t.push(vec![i as f64, *l]);
        }
        out.tables.push(t);
    }
    Ok(out)
}

pub fn zeta_reference_checks(cfg: &RunConfig) -> Res {
    let mut out = Outcome::default();
    let z = zeta_prime_zero(
        &background_spectrum(0, &geometry(cfg, 1.0)?, cfg.spectral.cutoff)?,
        &cfg.spectral.zeta,
    )?;
    out.push(CheckRecord::new(
        "C5.zeta_prime.round_sphere",
        5,
        "ζ′(0) of the scalar Laplacian on S², R=1, matches the exact spectrum value",
        z.zeta_prime_zero,
        ROUND_SPHERE_ZETA_PRIME,
        1e-4,
        Comparison::Absolute,
    ));
    let spec = background_spectrum(1, &geometry(cfg, 1.5)?, cfg.spectral.cutoff)?;
    let z1 = zeta_prime_zero(&spec, &cfg.spectral.zeta)?;
    let z2 = zeta_prime_zero(&spec.scaled(2.0), &cfg.spectral.zeta)?;
    out.push(CheckRecord::new(
        "C5.scaling",
        5,
        "ζ′_{cΔ}(0) = ζ′_Δ(0) − ζ_Δ(0) log c at c = 2",
        z2.zeta_prime_zero,
        z1.zeta_prime_zero - z1.zeta_zero * 2f64.ln(),
        1e-6,
        Comparison::Absolute,
    ));
    let mut t = Table::new("zeta_cutoff_series", &["cutoff", "zeta_prime"]);
    for (c, v) in &z1.cutoff_series {
        t.push(vec![*c as f64, *v]);
    }
    out.tables.push(t);
    Ok(out)
}

pub fn criterion_5(cfg: &RunConfig) -> Res {
    let mut out = Outcome::default();
    for n in 0..=3 {
        out.extend(spectral_checks(cfg, n, n as f64 + 0.5, default_positions(n))?);
    }
    out.extend(zeta_reference_checks(cfg)?);
    Ok(out)
}

// ---------------------------------------------------------------- 6

fn alpha_from(x: &TangentPair) -> Vec<Complex64> {
    x.eta.iter().map(|e| Complex64::i() * e).collect()
}

pub fn affine_checks(cfg: &RunConfig, n: usize, r2: f64, positions: Vec<Complex64>) -> Res {
    let geom = geometry(cfg, r2)?;
    let basis = DolbeaultBasis::new(&geom, n, cfg.spectral.cutoff)?;
    let mut r = rng(cfg, 6);
    let mut out = Outcome::default();
    for j in 0..2 {
        let x = TangentPair::random(&geom, n, 3, &mut r);
        let alpha = alpha_from(&x);
        let c = affine_curvature_check(&basis, &alpha, cfg.fd.curvature, &cfg.spectral.zeta)?;
        out.push(CheckRecord::new(
            format!("C6.affine.alpha{j}"),
            6,
            "∂_w∂_w̄ ζ′(0) along A₀ + wα − w̄ᾱ equals (1/2π)Ω(α,ℐα)",
            c.numeric,
            c.analytic,
            0.05,
            Comparison::Relative,
        ));
        let k = affine_curvature_with_kernel(&basis, &alpha, cfg.fd.curvature, &cfg.spectral.zeta)?;
        out.push(
            CheckRecord::new(
                format!("C6.affine_with_kernel.alpha{j}"),
                6,
                "same family with log det of the L² kernel Gram matrix added",
                k.numeric,
                k.analytic,
                0.05,
                Comparison::Relative,
            )
            .diagnostic(),
        );
    }
    let (_, f) = solve_fields(cfg, r2, positions)?;
    for j in 0..2 {
        let x = TangentPair::random(&geom, n, 4, &mut r);
        let c = higgs_curvature_check(&geom, &f.psi, &x.beta);
        out.push(CheckRecord::new(
            format!("C6.higgs.beta{j}"),
            6,
            "∂_w∂_w̄ (1/4π)∫|Ψ+wβ|² equals (1/4π)∫|β|²",
            c.numeric,
            c.analytic,
            1e-8,
            Comparison::Relative,
        ));
    }
    Ok(out)
}

pub fn criterion_6(cfg: &RunConfig) -> Res {
    affine_checks(cfg, 1, 1.5, default_positions(1))
}

// ---------------------------------------------------------------- 7

fn moduli_params(cfg: &RunConfig) -> ModuliCurvatureParams {
    ModuliCurvatureParams {
        fd_step: cfg.fd.curvature,
        nmax: cfg.spectral.cutoff,
        zeta: cfg.spectral.zeta,
        taubes: cfg.solver,
        metric: MetricParams {
            fd_step: cfg.fd.metric,
            taubes: cfg.solver,
        },
    }
}

pub fn moduli_checks(cfg: &RunConfig, r2: f64, positions: Vec<Complex64>) -> Res {
    let config = VortexConfiguration::new(geometry(cfg, r2)?, positions)?;
    let params = moduli_params(cfg);
    let c = moduli_curvature(&config, &params)?;
    let mut out = Outcome::default();
    out.push(CheckRecord::new(
        "C7.moduli_curvature",
        7,
        "∂∂̄(−log‖σ‖²) in the vortex position equals (1/2π)M₁₁",
        c.numeric,
        c.analytic,
        0.1,
        Comparison::Relative,
    ));
    let total = moduli_curvature_integral(&config, &cfg.curvature_grid, &params)?;
    out.push(CheckRecord::new(
        "C7.moduli_degree",
        7,
        "∫ of the curvature dx dy over the moduli CP¹ equals 1",
        total,
        1.0,
        0.1,
        Comparison::Relative,
    ));
    Ok(out)
}

pub fn criterion_7(cfg: &RunConfig) -> Res {
    moduli_checks(cfg, 1.5, vec![Complex64::new(0.0, 0.0)])
}

// ---------------------------------------------------------------- 8

pub fn embedding_checks(cfg: &RunConfig, kmax: usize) -> Res {
    let geom = geometry(cfg, 1.0)?;
    let mut out = Outcome::default();
    let mut t = Table::new("embedding", &["k", "deviation", "class"]);
    for k in 1..=kmax {
        let r = embedding_report(k, &geom)?;
        out.push(CheckRecord::new(
            format!("C8.class.k{k}"),
            8,
            "(1/2π)∫φ_k*Ω_k = k",
            r.class_value,
            k as f64,
            1e-10,
            Comparison::Absolute,
        ));
        out.push(CheckRecord::new(
            format!("C8.pointwise.k{k}"),
            8,
            "sup|φ_k*Ω_k − k ω_FS|",
            r.deviation,
            0.0,
            if k == 1 { 1e-10 } else { 1e-8 },
            Comparison::UpperBound,
        ));
        t.push(vec![k as f64, r.deviation, r.class_value]);
    }
    out.tables.push(t);
    Ok(out)
}

pub fn criterion_8(cfg: &RunConfig) -> Res {
    embedding_checks(cfg, 3)
}

// ---------------------------------------------------------------- 9

pub fn gauge_descent_checks(cfg: &RunConfig, r2: f64, positions: Vec<Complex64>, samples: usize) -> Res {
    let n = positions.len();
    let (_, f) = solve_fields(cfg, r2, positions)?;
    let basis = DolbeaultBasis::new(&f.geom, n, cfg.spectral.cutoff)?;
    let z = fields_zeta(&basis, &f, &cfg.spectral.zeta)?;
    let q = modified_quillen_norm(&z, &f);
    let truncation = 10.0 * z.stability();
    let mu0 = sup_abs(&moment_map_nodes(&f));
    let f0 = flux(&f);
    let mut r = rng(cfg, 9);
    let (mut dflux, mut dmu, mut dz, mut dq) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut t = Table::new("gauge_samples", &["sample", "flux", "mu_sup", "zeta_prime", "minus_log_norm"]);
    for s in 0..samples {
        let g = GaugeElement::random(&f.geom, 3, 0.5, &mut r);
        let h = gauge_transform(&f, &g);
        let zh = fields_zeta(&basis, &h, &cfg.spectral.zeta)?;
        let qh = modified_quillen_norm(&zh, &h);
        let mu = sup_abs(&moment_map_nodes(&h));
        dflux = dflux.max((flux(&h) - f0).abs() / f0.abs().max(1e-300));
        dmu = dmu.max((mu - mu0).abs());
        dz = dz.max((zh.zeta_prime_zero - z.zeta_prime_zero).abs());
        dq = dq.max((qh.minus_log_norm - q.minus_log_norm).abs());
        t.push(vec![s as f64, flux(&h), mu, zh.zeta_prime_zero, qh.minus_log_norm]);
    }
    let mut out = Outcome::default();
    out.push(CheckRecord::new(
        "C9.flux",
        9,
        "flux is gauge invariant (max relative change)",
        dflux,
        0.0,
        1e-8,
        Comparison::UpperBound,
    ));
    out.push(CheckRecord::new(
        "C9.moment_map",
        9,
        "sup|μ| is gauge invariant (max change)",
        dmu,
        0.0,
        1e-8,
        Comparison::UpperBound,
    ));
    out.push(CheckRecord::new(
        "C9.zeta_prime",
        9,
        "ζ′(0) is gauge invariant within truncation tolerance",
        dz,
        0.0,
        truncation,
        Comparison::UpperBound,
    ));
    out.push(CheckRecord::new(
        "C9.quillen_norm",
        9,
        "modified Quillen norm is gauge invariant within truncation tolerance",
        dq,
        0.0,
        truncation,
        Comparison::UpperBound,
    ));
    out.push(
        CheckRecord::new(
            "C9.quillen_norm_absolute",
            9,
            "modified Quillen norm change below 1e-8",
            dq,
            0.0,
            1e-8,
            Comparison::UpperBound,
        )
        .diagnostic(),
    );
    out.tables.push(t);
    Ok(out)
}

pub fn criterion_9(cfg: &RunConfig) -> Res {
    gauge_descent_checks(cfg, 1.5, vec![Complex64::new(0.3, 0.1)], 20)
}

/// Run the checks of one criterion at its fixed acceptance cases.
pub fn criterion(k: u8, cfg: &RunConfig) -> Res {
    match k {
        1 => criterion_1(cfg),
        2 => criterion_2(cfg),
        3 => criterion_3(cfg),
        4 => criterion_4(cfg),
        5 => criterion_5(cfg),
        6 => criterion_6(cfg),
        7 => criterion_7(cfg),
        8 => criterion_8(cfg),
        9 => criterion_9(cfg),
        _ => Err(CliError::Config(format!("no criterion {k}"))),
    }
}

/// One summary line per criterion.
pub fn summary_line(k: u8, outcome: &Result<Outcome, CliError>) -> String {
    match outcome {
        Ok(o) => {
            let worst = o
                .records
                .iter()
                .filter(|r| r.gating && !r.pass)
                .map(|r| format!("{}={:.6e} (expected {:.6e}, tol {:.1e})", r.id, r.value, r.expected, r.tolerance))
                .collect::<Vec<_>>();
            if worst.is_empty() {
                format!("criterion {k}: PASS ({} checks)", o.records.iter().filter(|r| r.gating).count())
            } else {
                format!("criterion {k}: FAIL {}", worst.join("; "))
            }
        }
        Err(e) => format!("criterion {k}: FAIL error: {e}"),
    }
}
