use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vortex_quillen::embedding_checks::*;
use vortex_quillen::sphere_geometry::SphereGeometry;

fn geom() -> SphereGeometry {
    SphereGeometry::new(1.5, 32).unwrap()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

#[test]
fn degree_one_gram_is_diagonal() {
    let b = section_gram(1, &geom()).unwrap();
    assert!(b.gram.get(0, 1).norm() < 1e-12);
    assert!(b.gram.get(1, 0).norm() < 1e-12);
}

/// ∫ |z|^{2j} (1+|z|²)^{−k} ω = 2π ∫₀^∞ t^j (1+t)^{−k−2} dt = 2π B(j+1, k−j+1).
#[test]
fn degree_two_gram_matches_beta_integrals() {
    let k = 2;
    let b = section_gram(k, &geom()).unwrap();
    for j in 0..=k {
        let beta = factorial(j) * factorial(k - j) / factorial(k + 1);
        assert!((b.gram.get(j, j).re - 2.0 * PI * beta).abs() < 1e-8);
    }
}

#[test]
fn gram_is_conjugate_symmetric() {
    for k in 1..6 {
        let g = section_gram(k, &geom()).unwrap().gram;
        assert!(g.hermiticity_defect() < 1e-14);
    }
}

#[test]
fn identity_embedding() {
    let g = geom();
    assert!(veronese_pullback_check(1, &g, &default_samples(&g)).unwrap() < 1e-10);
}

/// Symbolic oracle: in the orthonormal basis |φ₃|² ∝ (1+|z|²)³, so the
/// pullback coefficient is ∂∂̄ log (1+|z|²)³ = 3/(1+|z|²)².
#[test]
fn cubic_veronese_pullback() {
    let g = geom();
    let b = section_gram(3, &g).unwrap();
    for z in [Complex64::new(0.0, 0.0), Complex64::new(0.7, -1.2), Complex64::new(-3.0, 2.0)] {
        let oracle = 3.0 / (1.0 + z.norm_sqr()).powi(2);
        assert!((b.pullback_coefficient(z).unwrap() - oracle).abs() < 1e-8);
    }
    assert!(veronese_pullback_check(3, &g, &default_samples(&g)).unwrap() < 1e-8);
}

#[test]
fn degree_additivity() {
    let g = geom();
    for k in 1..=5 {
        let r = embedding_report(k, &g).unwrap();
        assert!(r.deviation < 1e-8, "k={k}: {}", r.deviation);
        assert!((r.class_value - k as f64).abs() < 1e-10, "k={k}: {}", r.class_value);
    }
}

#[test]
fn unitary_basis_change_leaves_pullback() {
    let g = geom();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let samples = default_samples(&g);
    for k in [2, 4] {
        let b = section_gram(k, &g).unwrap();
        let u = random_unitary(k + 1, &mut rng);
        let bu = b.with_unitary(&u);
        for z in samples.iter().step_by(37) {
            let d = (b.pullback_coefficient(*z).unwrap() - bu.pullback_coefficient(*z).unwrap()).abs();
            assert!(d < 1e-10);
        }
    }
}
