use num_complex::Complex64;
use vortex_quillen::error::Error;
use vortex_quillen::moduli_metric::*;
use vortex_quillen::sphere_geometry::{conformal_factor, unit_vector, SphereGeometry};
use vortex_quillen::vortex_solver::{solve_taubes, TaubesParams, VortexConfiguration};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn config(r2: f64, pos: Vec<Complex64>) -> VortexConfiguration {
    VortexConfiguration::new(SphereGeometry::new(r2, 32).unwrap(), pos).unwrap()
}

#[test]
fn bradlow_check_examples() {
    assert!(bradlow_check(1, 1.5));
    assert!(!bradlow_check(2, 1.5));
    assert!(bradlow_check(0, 1e-3));
}

#[test]
fn centred_vortex_has_vanishing_b() {
    let sol = solve_taubes(&config(1.5, vec![c(0.0, 0.0)]), &TaubesParams::default()).unwrap();
    let b = samols_coefficients(&sol).unwrap();
    assert!(b[0].b.norm() < 1e-10);
}

/// Rotation oracle: the vortex at z₁ is the centred solution composed with
/// a rotation, so u depends only on the angle to z₁. b₁ is read off by
/// central differences of u − log|z − z₁|² around z₁.
#[test]
fn b_matches_rotated_centred_solution() {
    let centred = solve_taubes(&config(1.5, vec![c(0.0, 0.0)]), &TaubesParams::default()).unwrap();
    let z1 = c(0.5, 0.0);
    let p1 = unit_vector(z1);
    let regular = |z: Complex64| {
        let p = unit_vector(z);
        let cosang = p[0] * p1[0] + p[1] * p1[1] + p[2] * p1[2];
        let ang = cosang.clamp(-1.0, 1.0).acos();
        let v = centred.v_at(Complex64::new((ang / 2.0).tan(), 0.0));
        (0.5 * (1.0 - cosang)).ln() + v - (z - z1).norm_sqr().ln()
    };
    let h = 1e-4;
    let dx = (regular(z1 + h) - regular(z1 - h)) / (2.0 * h);
    let dy = (regular(z1 + c(0.0, h)) - regular(z1 - c(0.0, h))) / (2.0 * h);
    let oracle = 2.0 * 0.5 * c(dx, -dy);
    let sol = solve_taubes(&config(1.5, vec![z1]), &TaubesParams::default()).unwrap();
    let b = samols_coefficients(&sol).unwrap()[0].b;
    assert!((b - oracle).norm() < 1e-4, "{b} vs {oracle}");
}

#[test]
fn reflected_pair_has_opposite_b() {
    let sol = solve_taubes(&config(2.5, vec![c(0.7, 0.0), c(-0.7, 0.0)]), &TaubesParams::default()).unwrap();
    let b = samols_coefficients(&sol).unwrap();
    assert!((b[0].b + b[1].b).norm() < 1e-8);
}

#[test]
fn close_vortices_are_rejected() {
    let sol = solve_taubes(&config(2.5, vec![c(0.3, 0.0), c(0.31, 0.0)]), &TaubesParams::default()).unwrap();
    assert!(matches!(samols_coefficients(&sol), Err(Error::CoincidentZeros { .. })));
    assert!(sol.b_coeffs.is_empty());
}

#[test]
fn single_vortex_metric_is_fubini_study_multiple() {
    let params = MetricParams::default();
    for z in [c(0.0, 0.0), c(0.4, -0.3), c(1.7, 0.9)] {
        let cfg = config(1.5, vec![z]);
        let m = assemble_metric(&cfg, &params).unwrap();
        assert_eq!(m.first_term[0], conformal_factor(z, cfg.geom()));
        let scaled = m.m(0, 0).re * (1.0 + z.norm_sqr()).powi(2);
        assert!((scaled - 2.0).abs() < 0.02, "{scaled}");
        assert!(m.m(0, 0).im.abs() < 1e-8);
    }
}

#[test]
fn two_vortex_metric_is_hermitian_positive() {
    let params = MetricParams::default();
    let cfg = config(2.5, vec![c(0.3, 0.2), c(-0.5, 0.6)]);
    let m = assemble_metric(&cfg, &params).unwrap();
    assert!(m.hermiticity_defect() < 10.0 * params.fd_step.powi(2), "{}", m.hermiticity_defect());
    let det = m.m(0, 0).re * m.m(1, 1).re - m.m(0, 1).norm_sqr();
    assert!(m.m(0, 0).re > 0.0 && det > 0.0);
}

#[test]
fn metric_converges_in_fd_step() {
    let cfg = config(2.5, vec![c(0.3, 0.2), c(-0.5, 0.6)]);
    let coarse = assemble_metric(&cfg, &MetricParams { fd_step: 2e-3, ..Default::default() }).unwrap();
    let fine = assemble_metric(&cfg, &MetricParams { fd_step: 1e-3, ..Default::default() }).unwrap();
    for r in 0..2 {
        for s in 0..2 {
            assert!((coarse.m(r, s) - fine.m(r, s)).norm() < 1e-4);
        }
    }
}

#[test]
fn single_vortex_cycle_integral() {
    let geom = SphereGeometry::new(2.0, 32).unwrap();
    let ci = integrate_over_cycle(&geom, &[], &CycleGrid { ntheta: 4, nphi: 8 }, &MetricParams::default()).unwrap();
    assert!((ci.value - 2.0).abs() < 0.04, "{}", ci.value);
}
