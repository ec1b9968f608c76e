//! Samols coefficients, the Manton–Nasir Kähler form on the vortex moduli
//! space and its integral over one-vortex cycles.
//!
//! Expansion convention at a zero z_s:
//! `u = 2 log|z − z_s| + a_s + ½ b_s (z − z_s) + ½ b̄_s (z̄ − z̄_s) + O(|z − z_s|²)`.
//! The metric coefficient matrix is
//! `M_rs = 4R² δ_rs/(1+|z_r|²)² + 2 ∂b̄_s/∂z_r`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::gauss_legendre;
use crate::sphere_geometry::{chart_of_unit_vector, conformal_factor, unit_vector, ComplexMatrix, SphereGeometry};
use crate::vortex_solver::{solve_taubes, TaubesParams, TaubesSolution, VortexConfiguration};

/// 4πR² > 4πN.
pub fn bradlow_check(n: usize, r_squared: f64) -> bool {
    r_squared > n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamolsCoefficient {
    pub a: f64,
    pub b: Complex64,
}

/// Angular distance between two chart points on the unit sphere.
pub fn angular_distance(z: Complex64, w: Complex64) -> f64 {
    let (p, q) = (unit_vector(z), unit_vector(w));
    (p[0] * q[0] + p[1] * q[1] + p[2] * q[2]).clamp(-1.0, 1.0).acos()
}

/// Smallest vortex separation that b_s extraction accepts.
pub fn separation_threshold(geom: &SphereGeometry) -> f64 {
    5.0 * geom.grid_spacing()
}

fn check_separation(positions: &[Complex64], geom: &SphereGeometry) -> Result<()> {
    let threshold = separation_threshold(geom);
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let distance = angular_distance(positions[i], positions[j]);
            if distance < threshold {
                return Err(Error::CoincidentZeros {
                    first: i,
                    second: j,
                    distance,
                    threshold,
                });
            }
        }
    }
    Ok(())
}

/// (a_s, b_s) with the singular term of the s-th zero removed analytically.
pub fn samols_coefficients(sol: &TaubesSolution) -> Result<Vec<SamolsCoefficient>> {
    let z = sol.config.positions();
    let n = z.len();
    check_separation(z, sol.config.geom())?;
    let log_norms: f64 = z.iter().map(|zr| (1.0 + zr.norm_sqr()).ln()).sum();
    Ok((0..n)
        .map(|s| {
            let zs = z[s];
            let d = 1.0 + zs.norm_sqr();
            let mut a = -(n as f64) * d.ln() - log_norms + sol.v_at(zs);
            let mut half_b = -(n as f64) * zs.conj() / d + sol.dz_v_at(zs);
            for (r, zr) in z.iter().enumerate() {
                if r != s {
                    a += (zs - zr).norm_sqr().ln();
                    half_b += 1.0 / (zs - zr);
                }
            }
            SamolsCoefficient { a, b: 2.0 * half_b }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricParams {
    /// Chart-coordinate step of the central differences in z_r.
    pub fd_step: f64,
    pub taubes: TaubesParams,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            fd_step: 1e-3,
            taubes: TaubesParams::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModuliKahlerForm {
    pub point: VortexConfiguration,
    /// Real (1,1)-coefficient matrix M (row r, column s).
    pub matrix: ComplexMatrix,
    pub fd_step: f64,
    /// 4R²/(1+|z_r|²)² for each r.
    pub first_term: Vec<f64>,
}

impl ModuliKahlerForm {
    pub fn m(&self, r: usize, s: usize) -> Complex64 {
        self.matrix.get(r, s)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.hermiticity_defect()
    }
}

/// ∂_z̄ v at each vortex, after re-solving for the given positions.
fn vbar_derivatives(config: &VortexConfiguration, positions: Vec<Complex64>, params: &TaubesParams) -> Result<Vec<Complex64>> {
    let c = config.with_positions(positions)?;
    let sol = solve_taubes(&c, params)?;
    Ok(c.positions().iter().map(|z| sol.dz_v_at(*z).conj()).collect())
}

/// Column r of M: M_{r,s} for every s.
pub fn metric_column(config: &VortexConfiguration, r: usize, params: &MetricParams) -> Result<Vec<Complex64>> {
    let n = config.n();
    let geom = config.geom();
    check_separation(config.positions(), geom)?;
    let h = params.fd_step;
    let shifts = [
        Complex64::new(h, 0.0),
        Complex64::new(-h, 0.0),
        Complex64::new(0.0, h),
        Complex64::new(0.0, -h),
    ];
    let evals: Vec<Result<Vec<Complex64>>> = shifts
        .par_iter()
        .map(|d| {
            let mut pos = config.positions().to_vec();
            pos[r] += d;
            vbar_derivatives(config, pos, &params.taubes)
        })
        .collect();
    let mut vals = Vec::with_capacity(4);
    for e in evals {
        vals.push(e?);
    }
    let zr = config.positions()[r];
    let d = 1.0 + zr.norm_sqr();
    Ok((0..n)
        .map(|s| {
            let dx = (vals[0][s] - vals[1][s]) / (2.0 * h);
            let dy = (vals[2][s] - vals[3][s]) / (2.0 * h);
            let dz = 0.5 * (dx - Complex64::i() * dy);
            let mut m = 4.0 * dz;
            if s == r {
                m += Complex64::new(conformal_factor(zr, geom) - 4.0 * n as f64 / (d * d), 0.0);
            }
            m
        })
        .collect())
}

/// Assemble M at a configuration (4N re-solves of the Taubes equation).
pub fn assemble_metric(config: &VortexConfiguration, params: &MetricParams) -> Result<ModuliKahlerForm> {
    let n = config.n();
    if !config.bradlow_holds() {
        return Err(Error::BradlowViolation {
            n,
            r_squared: config.geom().r_squared(),
        });
    }
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..n {
        let col = metric_column(config, r, params)?;
        for s in 0..n {
            data[r * n + s] = col[s];
        }
    }
    let first_term = config
        .positions()
        .iter()
        .map(|z| conformal_factor(*z, config.geom()))
        .collect();
    Ok(ModuliKahlerForm {
        point: config.clone(),
        matrix: ComplexMatrix { n, data },
        fd_step: params.fd_step,
        first_term,
    })
}

/// Quadrature on CP¹ for sweeping a vortex: Gauss nodes in the cosine of the
/// angle from a pole, equispaced (half-step offset) azimuths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CycleGrid {
    pub ntheta: usize,
    pub nphi: usize,
}

impl Default for CycleGrid {
    fn default() -> Self {
        CycleGrid { ntheta: 8, nphi: 16 }
    }
}

impl CycleGrid {
    /// Sample points (chart coordinates) and unit-sphere weights, with the
    /// pole of the rule at `pole`.
    pub fn samples(&self, pole: [f64; 3]) -> Vec<(Complex64, f64)> {
        let (e1, e2) = orthonormal_complement(pole);
        let (x, w) = gauss_legendre(self.ntheta);
        let dphi = 2.0 * PI / self.nphi as f64;
        let mut out = Vec::with_capacity(self.ntheta * self.nphi);
        for (c, wc) in x.iter().zip(&w) {
            let s = (1.0 - c * c).sqrt();
            for k in 0..self.nphi {
                let phi = (k as f64 + 0.5) * dphi;
                let (cp, sp) = (phi.cos(), phi.sin());
                let p = [0, 1, 2].map(|i| c * pole[i] + s * (cp * e1[i] + sp * e2[i]));
                out.push((chart_of_unit_vector(p), wc * dphi));
            }
        }
        out
    }
}

fn orthonormal_complement(p: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let a = if p[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = a[0] * p[0] + a[1] * p[1] + a[2] * p[2];
    let mut e1 = [a[0] - d * p[0], a[1] - d * p[1], a[2] - d * p[2]];
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|x| *x /= n);
    let e2 = [
        p[1] * e1[2] - p[2] * e1[1],
        p[2] * e1[0] - p[0] * e1[2],
        p[0] * e1[1] - p[1] * e1[0],
    ];
    (e1, e2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleSample {
    pub z: Complex64,
    pub m11: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleIntegral {
    pub n: usize,
    pub r_squared: f64,
    pub cycle_description: String,
    /// (1/2π) ∫ ω_MN over the cycle.
    pub value: f64,
    pub sample_count: usize,
    pub samples: Vec<CycleSample>,
}

/// Sweep vortex 1 over CP¹ with the others fixed and integrate
/// (1/2π) ∫ M₁₁ dx dy. The rule is centred on the first fixed vortex so no
/// sample lands on it.
pub fn integrate_over_cycle(
    geom: &SphereGeometry,
    fixed_positions: &[Complex64],
    sample_grid: &CycleGrid,
    params: &MetricParams,
) -> Result<CycleIntegral> {
    let n = fixed_positions.len() + 1;
    if !bradlow_check(n, geom.r_squared()) {
        return Err(Error::BradlowViolation {
            n,
            r_squared: geom.r_squared(),
        });
    }
    let pole = fixed_positions.first().map(|z| unit_vector(*z)).unwrap_or([0.0, 0.0, 1.0]);
    let samples = sample_grid.samples(pole);
    let values: Vec<Result<CycleSample>> = samples
        .par_iter()
        .map(|(z, _)| {
            let mut pos = vec![*z];
            pos.extend_from_slice(fixed_positions);
            let config = VortexConfiguration::new(geom.clone(), pos)?;
            let col = metric_column(&config, 0, params)?;
            Ok(CycleSample { z: *z, m11: col[0].re })
        })
        .collect();
    let mut out = Vec::with_capacity(values.len());
    let mut total = 0.0;
    for ((_, w), v) in samples.iter().zip(values) {
        let v = v?;
        let dxdy = (1.0 + v.z.norm_sqr()).powi(2) / 4.0;
        total += w * v.m11 * dxdy;
        out.push(v);
    }
    Ok(CycleIntegral {
        n,
        r_squared: geom.r_squared(),
        cycle_description: format!(
            "vortex 1 sweeps CP^1; fixed: {}",
            fixed_positions
                .iter()
                .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        value: total / (2.0 * PI),
        sample_count: out.len(),
        samples: out,
    })
}
