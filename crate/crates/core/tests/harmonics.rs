use std::sync::Arc;

use num_complex::Complex64;
use vortex_quillen::harmonics::{spin_harmonic, Grid, SpinCoeffs, SpinTransform};

fn grid() -> Arc<Grid> {
    Arc::new(Grid::new(16, 32))
}

#[test]
fn gauss_weights_integrate_polynomials() {
    let g = grid();
    let s: f64 = g.gauss_weights.iter().sum();
    assert!((s - 2.0).abs() < 1e-14);
    let m: f64 = g.gauss_weights.iter().zip(&g.cos_theta).map(|(w, x)| w * x.powi(20)).sum();
    assert!((m - 2.0 / 21.0).abs() < 1e-14);
}

#[test]
fn round_trip_integer_and_half_integer_spin() {
    let g = grid();
    for s2 in [-2, -1, 0, 1, 2, 3] {
        let t = SpinTransform::new(g.clone(), s2, 25);
        let mut c = SpinCoeffs::zeros(s2, t.l2max());
        for (k, v) in c.data.iter_mut().enumerate() {
            *v = Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos());
        }
        let back = t.analyze(&t.synthesize(&c));
        let err = back.data.iter().zip(&c.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "s2={s2} err={err}");
    }
}

#[test]
fn synthesis_matches_pointwise_harmonics() {
    let g = grid();
    let t = SpinTransform::new(g.clone(), 1, 9);
    let mut c = SpinCoeffs::zeros(1, 9);
    let i = c.index(7, -3);
    c.data[i] = Complex64::new(1.0, 0.0);
    let vals = t.synthesize(&c);
    for j in [0, 5, 11] {
        for k in [0, 3, 17] {
            let y = spin_harmonic(1, 7, -3, g.theta[j], g.phi[k]);
            assert!((vals[g.index(j, k)] - y).norm() < 1e-13);
        }
    }
    assert!((c.eval(0.7, 1.3) - spin_harmonic(1, 7, -3, 0.7, 1.3)).norm() < 1e-13);
}

/// `ð⁺ f` computed by finite differences in θ, φ against the ladder rule.
#[test]
fn raising_operator_matches_finite_differences() {
    for s2 in [0, 1, 2] {
        let (l2, m2) = (s2 + 4, s2);
        let s = s2 as f64 / 2.0;
        let (th, ph, h) = (1.1, 0.4, 1e-5);
        let f = |t: f64, p: f64| spin_harmonic(s2, l2, m2, t, p);
        let dth = (f(th + h, ph) - f(th - h, ph)) / (2.0 * h);
        let dph = (f(th, ph + h) - f(th, ph - h)) / (2.0 * h);
        let lhs = dth + Complex64::i() * dph / th.sin() - s * th.cos() / th.sin() * f(th, ph);
        let mut c = SpinCoeffs::zeros(s2, l2);
        let i = c.index(l2, m2);
        c.data[i] = Complex64::new(1.0, 0.0);
        let rhs = c.raise().eval(th, ph);
        assert!((lhs - rhs).norm() < 1e-8, "s2={s2}: {lhs} vs {rhs}");
        let lhs_lower = dth - Complex64::i() * dph / th.sin() + s * th.cos() / th.sin() * f(th, ph);
        let rhs_lower = c.lower().eval(th, ph);
        assert!((lhs_lower - rhs_lower).norm() < 1e-8, "s2={s2}: {lhs_lower} vs {rhs_lower}");
    }
}
