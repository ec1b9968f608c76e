//! Kodaira-type embeddings of CP¹ by sections of O(k): Gram matrices of the
//! monomial sections, the orthonormal Veronese map and its Fubini–Study
//! pullback.
//!
//! Sections of O(k) are polynomials of degree ≤ k in the north chart, with
//! pointwise norm |s|² / (1+|z|²)^k. Integration uses ω = dμ / 2R², which is
//! the Fubini–Study form of total mass 2π.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere_geometry::{fubini_study_chart_coefficient, fubini_study_form, ComplexMatrix, SphereGeometry};

#[derive(Debug, Clone, PartialEq)]
pub struct SectionBasis {
    pub k: usize,
    /// G_ij = ∫ z^i z̄^j (1+|z|²)^{−k} ω.
    pub gram: ComplexMatrix,
    /// T with T G T† = I; row i holds the coefficients of the i-th
    /// orthonormal section in the monomials.
    pub orthonormal_transform: ComplexMatrix,
}

pub fn section_gram(k: usize, geom: &SphereGeometry) -> Result<SectionBasis> {
    if k == 0 {
        return Err(Error::InvalidParameter("tensor power must be at least 1".into()));
    }
    let n = k + 1;
    let r2 = geom.r_squared();
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    let mut vals = vec![Complex64::new(0.0, 0.0); n];
    for (idx, w) in geom.weights().iter().enumerate() {
        let (theta, phi) = geom.node_angles(idx);
        let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        // z^j (1+|z|²)^{−k/2}
        for (j, v) in vals.iter_mut().enumerate() {
            *v = Complex64::from_polar(s.powi(j as i32) * c.powi((k - j) as i32), j as f64 * phi);
        }
        let wt = w / (2.0 * r2);
        for i in 0..n {
            for j in 0..n {
                gram[i * n + j] += vals[i] * vals[j].conj() * wt;
            }
        }
    }
    let gram = ComplexMatrix { n, data: gram };
    let orthonormal_transform = inverse_cholesky(&gram)?;
    Ok(SectionBasis {
        k,
        gram,
        orthonormal_transform,
    })
}

/// L^{-1} for G = L L†.
fn inverse_cholesky(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = g.n;
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = g.get(i, j);
            for p in 0..j {
                sum -= l[i * n + p] * l[j * n + p].conj();
            }
            if i == j {
                if sum.re <= 0.0 {
                    return Err(Error::LinearAlgebra("Gram matrix is not positive definite".into()));
                }
                l[i * n + i] = Complex64::new(sum.re.sqrt(), 0.0);
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    // forward substitution column by column
    let mut inv = vec![Complex64::new(0.0, 0.0); n * n];
    for c in 0..n {
        for i in 0..n {
            let mut sum = if i == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            for p in 0..i {
                sum -= l[i * n + p] * inv[p * n + c];
            }
            inv[i * n + c] = sum / l[i * n + i];
        }
    }
    Ok(ComplexMatrix { n, data: inv })
}

impl SectionBasis {
    /// φ_k(z) in the orthonormal basis.
    pub fn embed(&self, z: Complex64) -> Vec<Complex64> {
        let mono: Vec<Complex64> = (0..=self.k).map(|j| z.powu(j as u32)).collect();
        self.apply(&mono)
    }

    /// ∂_z φ_k(z).
    pub fn embed_derivative(&self, z: Complex64) -> Vec<Complex64> {
        let mono: Vec<Complex64> = (0..=self.k)
            .map(|j| {
                if j == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    j as f64 * z.powu(j as u32 - 1)
                }
            })
            .collect();
        self.apply(&mono)
    }

    fn apply(&self, mono: &[Complex64]) -> Vec<Complex64> {
        let t = &self.orthonormal_transform;
        (0..t.n)
            .map(|i| (0..t.n).map(|j| t.get(i, j) * mono[j]).sum())
            .collect()
    }

    /// The same embedding composed with a unitary change of basis U.
    pub fn with_unitary(&self, u: &ComplexMatrix) -> SectionBasis {
        let n = self.orthonormal_transform.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = (0..n).map(|p| u.get(i, p) * self.orthonormal_transform.get(p, j)).sum();
            }
        }
        SectionBasis {
            k: self.k,
            gram: self.gram.clone(),
            orthonormal_transform: ComplexMatrix { n, data },
        }
    }

    /// Chart coefficient g with φ_k*Ω_k = 2g dx∧dy.
    pub fn pullback_coefficient(&self, z: Complex64) -> Result<f64> {
        let f = fubini_study_form(&self.embed(z))?;
        let v = self.embed_derivative(z);
        Ok(f.form(&v, &v).re)
    }
}

/// Chart points of the sphere grid, used as default sample set.
pub fn default_samples(geom: &SphereGeometry) -> Vec<Complex64> {
    (0..geom.node_count()).map(|i| geom.node_z(i)).collect()
}

/// sup over samples of |φ_k*Ω_k − k ω_FS|, coefficient-wise in the north chart.
pub fn veronese_pullback_check(k: usize, geom: &SphereGeometry, sample_grid: &[Complex64]) -> Result<f64> {
    pullback_deviation(&section_gram(k, geom)?, sample_grid)
}

pub fn pullback_deviation(basis: &SectionBasis, sample_grid: &[Complex64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in sample_grid {
        let g = basis.pullback_coefficient(*z)?;
        let fs = fubini_study_chart_coefficient(*z)?;
        worst = worst.max((g - basis.k as f64 * fs).abs());
    }
    Ok(worst)
}

/// (1/2π) ∫ φ_k*Ω_k by quadrature on the sphere grid.
pub fn pullback_class(basis: &SectionBasis, geom: &SphereGeometry) -> Result<f64> {
    let unit = geom.grid().unit_weights();
    let mut total = 0.0;
    for (i, w) in unit.iter().enumerate() {
        let z = geom.node_z(i);
        let dxdy = (1.0 + z.norm_sqr()).powi(2) / 4.0;
        total += 2.0 * basis.pullback_coefficient(z)? * dxdy * w;
    }
    Ok(total / (2.0 * PI))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub k: usize,
    pub deviation: f64,
    pub class_value: f64,
    pub sample_count: usize,
}

pub fn embedding_report(k: usize, geom: &SphereGeometry) -> Result<EmbeddingReport> {
    let basis = section_gram(k, geom)?;
    let samples = default_samples(geom);
    Ok(EmbeddingReport {
        k,
        deviation: pullback_deviation(&basis, &samples)?,
        class_value: pullback_class(&basis, geom)?,
        sample_count: samples.len(),
    })
}

/// Haar-like random unitary: Gram–Schmidt on a matrix of uniform entries.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        for r in &rows {
            let d: Complex64 = r.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(r).for_each(|(x, a)| *x -= d * a);
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            rows.push(v);
        }
    }
    ComplexMatrix {
        n,
        data: rows.into_iter().flatten().collect(),
    }
}
