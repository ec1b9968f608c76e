//! Randomised invariants of the affine Kähler structure, gauge action,
//! spectral continuation and Fubini–Study form.

use std::sync::OnceLock;

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vortex_quillen::embedding_checks::random_unitary;
use vortex_quillen::quillen_spectral::*;
use vortex_quillen::sphere_geometry::*;
use vortex_quillen::vortex_solver::*;

fn geom() -> &'static SphereGeometry {
    static G: OnceLock<SphereGeometry> = OnceLock::new();
    G.get_or_init(|| SphereGeometry::new(2.5, 32).unwrap())
}

fn fields() -> &'static FieldData {
    static F: OnceLock<FieldData> = OnceLock::new();
    F.get_or_init(|| {
        let cfg = VortexConfiguration::new(geom().clone(), vec![Complex64::new(0.4, -0.2), Complex64::new(-0.9, 0.7)]).unwrap();
        reconstruct_fields(&solve_taubes(&cfg, &TaubesParams::default()).unwrap())
    })
}

fn pair(seed: u64) -> TangentPair {
    TangentPair::random(geom(), 2, 4, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn complex_structure_squares_to_minus_one(seed in any::<u64>()) {
        let x = pair(seed);
        let ii = complex_i(&complex_i(&x));
        let minus = x.scaled(-1.0);
        prop_assert!(max_diff(&ii.eta, &minus.eta) < 1e-15);
        prop_assert!(max_diff(&ii.beta, &minus.beta) < 1e-15);
    }

    #[test]
    fn metric_is_symmetric_and_positive(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (x, y) = (pair(s1), pair(s2));
        let gxy = metric_g(&x, &y, geom());
        prop_assert!((gxy - metric_g(&y, &x, geom())).abs() <= 1e-12 * gxy.abs().max(1.0));
        prop_assert!(metric_g(&x, &x, geom()) > 0.0);
    }

    #[test]
    fn omega_is_antisymmetric(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (x, y) = (pair(s1), pair(s2));
        let o = symplectic_omega(&x, &y, geom());
        prop_assert!((o + symplectic_omega(&y, &x, geom())).abs() < 1e-12 * o.abs().max(1.0));
        prop_assert!(symplectic_omega(&x, &x, geom()).abs() < 1e-14);
    }

    #[test]
    fn metric_and_omega_are_compatible(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (x, y) = (pair(s1), pair(s2));
        let lhs = metric_g(&complex_i(&x), &y, geom());
        let rhs = 2.0 * symplectic_omega(&x, &y, geom());
        prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1e-12), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn gauge_action_is_hamiltonian(s1 in any::<u64>(), s2 in any::<u64>()) {
        let f = fields();
        let mut rng = ChaCha8Rng::seed_from_u64(s1);
        let g = GaugeElement::random(geom(), 3, 1.0, &mut rng);
        let x = pair(s2);
        let lhs = symplectic_omega(&gauge_vector_field(f, &g), &x, geom());
        let rhs = hamiltonian_differential(f, &g, &x, 1e-3);
        prop_assert!((lhs - rhs).abs() <= 1e-6 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn gauge_invariant_scalars(seed in any::<u64>(), amp in 0.1f64..2.0) {
        let f = fields();
        let g = GaugeElement::random(geom(), 4, amp, &mut ChaCha8Rng::seed_from_u64(seed));
        let h = gauge_transform(f, &g);
        prop_assert!((flux(&h) - flux(f)).abs() < 1e-10 * flux(f));
        let density: Vec<f64> = h.psi.iter().zip(&f.psi).map(|(a, b)| a.norm() - b.norm()).collect();
        prop_assert!(density.iter().all(|d| d.abs() < 1e-14));
        // tangent vectors transform by β ↦ e^{−iχ}β, α fixed
        let chi = g.chi_nodes(geom());
        let act = |x: &TangentPair| TangentPair {
            eta: x.eta.clone(),
            beta: x.beta.iter().zip(&chi).map(|(b, c)| b * Complex64::from_polar(1.0, -c)).collect(),
        };
        let (x, y) = (pair(seed ^ 1), pair(seed ^ 2));
        let (gx, gy) = (act(&x), act(&y));
        let (m0, m1) = (metric_g(&x, &y, geom()), metric_g(&gx, &gy, geom()));
        prop_assert!((m0 - m1).abs() < 1e-8 * m0.abs().max(1e-12));
        let (o0, o1) = (symplectic_omega(&x, &y, geom()), symplectic_omega(&gx, &gy, geom()));
        prop_assert!((o0 - o1).abs() < 1e-8 * o0.abs().max(1e-12));
    }

    #[test]
    fn fubini_study_form_is_hermitian_and_invariant(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(n, &mut rng);
        let p: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64 + 0.5, 1.0 - i as f64)).collect();
        let v: Vec<Complex64> = (0..n).map(|i| Complex64::new(0.3 * i as f64, -0.2)).collect();
        let f = fubini_study_form(&p).unwrap();
        prop_assert!(f.hermiticity_defect() < 1e-15);
        let rot = |w: &[Complex64]| -> Vec<Complex64> {
            (0..n).map(|i| (0..n).map(|j| u.get(i, j) * w[j]).sum()).collect()
        };
        let fu = fubini_study_form(&rot(&p)).unwrap();
        let a = f.form(&v, &v);
        let b = fu.form(&rot(&v), &rot(&v));
        prop_assert!((a - b).norm() < 1e-12);
        // projective invariance
        let scaled: Vec<Complex64> = p.iter().map(|x| x * Complex64::new(0.0, 2.0)).collect();
        let fs = fubini_study_form(&scaled).unwrap();
        let pv: Vec<Complex64> = v.iter().map(|x| x * Complex64::new(0.0, 2.0)).collect();
        prop_assert!((fs.form(&pv, &pv) - a).norm() < 1e-12);
    }

    #[test]
    fn conformal_factor_is_positive(re in -50.0f64..50.0, im in -50.0f64..50.0, r2 in 0.1f64..10.0) {
        let g = SphereGeometry::new(r2, 8).unwrap();
        prop_assert!(conformal_factor(Complex64::new(re, im), &g) > 0.0);
    }

    #[test]
    fn mixed_derivative_is_symmetric_in_directions(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
        let f = move |w: Complex64| Ok(a * w.re * w.re + b * w.im * w.im + c * w.re * w.im + (w.re * 3.0).sin());
        let swapped = move |w: Complex64| f(Complex64::new(w.im, w.re));
        let d1 = mixed_derivative(f, 1e-3).unwrap();
        let d2 = mixed_derivative(swapped, 1e-3).unwrap();
        prop_assert!((d1 - d2).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn zeta_scaling_identity(c in 0.25f64..8.0) {
        static SPEC: OnceLock<SpectralData> = OnceLock::new();
        let spec = SPEC.get_or_init(|| background_spectrum(2, &SphereGeometry::new(2.5, 32).unwrap(), 16).unwrap());
        let p = ZetaParams::default();
        let z = zeta_prime_zero(spec, &p).unwrap();
        let zc = zeta_prime_zero(&spec.scaled(c), &p).unwrap();
        prop_assert!((zc.zeta_prime_zero - (z.zeta_prime_zero - z.zeta_zero * c.ln())).abs() < 1e-6);
        prop_assert_eq!(zc.zeta_zero, z.zeta_zero);
    }
}

#[test]
fn hodge_star_on_dz_coefficient() {
    let a = |z: Complex64| Complex64::new(0.3, -0.1) + z * 0.2 / (1.0 + z.norm_sqr());
    let zero = vec![Complex64::new(0.0, 0.0); geom().node_count()];
    let x = TangentPair::from_dz_coefficient(geom(), a, zero);
    let ix = complex_i(&x);
    for i in (0..geom().node_count()).step_by(53) {
        let want = -Complex64::i() * x.dz_coefficient(geom(), i);
        assert!((ix.dz_coefficient(geom(), i) - want).norm() < 1e-12);
    }
}

#[test]
fn metric_diagonal_formula() {
    let a = |z: Complex64| Complex64::new((-z.norm_sqr()).exp(), 0.0);
    let beta: Vec<Complex64> = (0..geom().node_count()).map(|i| Complex64::new(0.0, geom().node_z(i).re.tanh())).collect();
    let x = TangentPair::from_dz_coefficient(geom(), a, beta.clone());
    let unit = geom().grid().unit_weights();
    // ∫4|a|² dx dy + ∫|β|² h² dx dy, with dx dy = (1+|z|²)²/4 dΩ
    let mut expected = 0.0;
    for (i, w) in unit.iter().enumerate() {
        let z = geom().node_z(i);
        let dxdy = (1.0 + z.norm_sqr()).powi(2) / 4.0;
        expected += w * dxdy * (4.0 * a(z).norm_sqr() + beta[i].norm_sqr() * conformal_factor(z, geom()));
    }
    assert_relative_eq!(metric_g(&x, &x, geom()), expected, max_relative = 1e-12);
    let zero = TangentPair::zero(geom());
    assert_eq!(metric_g(&zero, &zero, geom()), 0.0);
}
