//! Spectra of the Dolbeault Laplacian D*D on the degree-N bundle, ζ′(0) by
//! heat-trace splitting, modified Quillen norms and finite-difference
//! curvature checks.
//!
//! D = ∂̄_{A_sym} + p acts on spin-N/2 fields; in the frame,
//! `D σ = (1/R) ð⁺σ + p σ`, with the truncation basis `e_j = sY_lm / R`
//! (unit-normalised on the sphere of radius R). For p = 0 the spectrum is
//! `n(n+N+1)/R²` with multiplicity N+1+2n.

use std::f64::consts::PI;

use faer::linalg::solvers::{Solve, SolveLstsq};
use faer::{c64, Mat, Side};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::SpinCoeffs;
use crate::moduli_metric::{assemble_metric, CycleGrid, MetricParams};
use crate::sphere_geometry::SphereGeometry;
use crate::vortex_solver::{reconstruct_fields, solve_taubes, FieldData, TaubesParams, VortexConfiguration};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Background eigenbasis sampled on the grid, with quadrature weights folded
/// in so that Gram matrices are plain products.
#[derive(Debug, Clone)]
pub struct DolbeaultBasis {
    geom: SphereGeometry,
    degree: usize,
    nmax: usize,
    levels: Vec<usize>,
    background: Vec<f64>,
    /// √w · e_j at the nodes (nodes × K).
    e: Mat<c64>,
    /// √w · D₀e_j at the nodes.
    de: Mat<c64>,
}

impl DolbeaultBasis {
    /// Basis of all background levels n ≤ nmax.
    pub fn new(geom: &SphereGeometry, degree: usize, nmax: usize) -> Result<Self> {
        let required = (degree + 2).max(4);
        if nmax + 1 < required {
            return Err(Error::CutoffTooSmall {
                levels: nmax + 1,
                required,
            });
        }
        let s2 = degree as i32;
        let l2max = s2 + 2 * nmax as i32;
        if l2max > geom.field_l2max() {
            return Err(Error::InvalidParameter(format!(
                "spectral cutoff {nmax} exceeds the grid resolution"
            )));
        }
        let r = geom.radius();
        let r2 = geom.r_squared();
        let t0 = geom.transform(s2, l2max);
        let t1 = geom.transform(s2 + 2, l2max);
        let sw: Vec<f64> = geom.weights().iter().map(|w| w.sqrt()).collect();
        let template = SpinCoeffs::zeros(s2, l2max);
        let modes: Vec<(i32, i32, usize)> = template.modes().collect();
        let k = modes.len();
        let columns: Vec<(Vec<Complex64>, Vec<Complex64>)> = modes
            .par_iter()
            .map(|&(_, _, idx)| {
                let mut c = SpinCoeffs::zeros(s2, l2max);
                c.data[idx] = Complex64::new(1.0 / r, 0.0);
                let vals = t0.synthesize(&c);
                let mut raised = c.raise();
                raised.data.iter_mut().for_each(|x| *x /= r);
                (vals, t1.synthesize(&raised))
            })
            .collect();
        let nodes = geom.node_count();
        let e = Mat::<c64>::from_fn(nodes, k, |i, j| columns[j].0[i] * sw[i]);
        let de = Mat::<c64>::from_fn(nodes, k, |i, j| columns[j].1[i] * sw[i]);
        let levels: Vec<usize> = modes.iter().map(|(l2, _, _)| ((l2 - s2) / 2) as usize).collect();
        let nf = degree as f64;
        let background = levels
            .iter()
            .map(|&n| n as f64 * (n as f64 + nf + 1.0) / r2)
            .collect();
        Ok(DolbeaultBasis {
            geom: geom.clone(),
            degree,
            nmax,
            levels,
            background,
            e,
            de,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn geom(&self) -> &SphereGeometry {
        &self.geom
    }

    pub fn basis_id(&self) -> String {
        format!(
            "spin-harmonic/N={}/nmax={}/res={}",
            self.degree,
            self.nmax,
            self.geom.resolution()
        )
    }

    /// Background eigenvalue of level n.
    pub fn level_eigenvalue(&self, n: usize) -> f64 {
        n as f64 * (n as f64 + self.degree as f64 + 1.0) / self.geom.r_squared()
    }

    /// Weighted samples of D e_j = D₀e_j + p e_j.
    fn operator_columns(&self, p: &[Complex64]) -> Mat<c64> {
        Mat::<c64>::from_fn(self.e.nrows(), self.e.ncols(), |i, j| self.de[(i, j)] + p[i] * self.e[(i, j)])
    }

    /// Matrix of D*D for the connection perturbation with (0,1) component p.
    pub fn laplacian_matrix(&self, p: &[Complex64]) -> Mat<c64> {
        let b = self.operator_columns(p);
        b.adjoint() * &b
    }

    /// Matrix elements ⟨D₀e_i, p e_j⟩.
    pub fn coupling_matrix(&self, p: &[Complex64]) -> Mat<c64> {
        let pe = Mat::<c64>::from_fn(self.e.nrows(), self.e.ncols(), |i, j| p[i] * self.e[(i, j)]);
        self.de.adjoint() * &pe
    }

    pub fn background_spectrum(&self) -> SpectralData {
        self.spectrum_from_matrix(&self.laplacian_matrix(&vec![Complex64::new(0.0, 0.0); self.e.nrows()]))
            .expect("background eigenproblem")
    }

    pub fn perturbed_spectrum(&self, p: &[Complex64]) -> Result<SpectralData> {
        let spec = self.ritz_spectrum(p)?;
        // The index fixes dim Ker = N+1; a missing kernel mode means the
        // perturbed kernel is not resolved by the basis.
        if spec.kernel_dim != self.degree + 1 {
            return Err(Error::CutoffTooSmall {
                levels: self.nmax + 1,
                required: self.nmax + 2,
            });
        }
        Ok(spec)
    }

    /// Ritz spectrum of D*D without the kernel-dimension check.
    pub fn ritz_spectrum(&self, p: &[Complex64]) -> Result<SpectralData> {
        if p.len() != self.e.nrows() {
            return Err(Error::InvalidParameter("perturbation sampled on a different grid".into()));
        }
        let m = self.laplacian_matrix(p);
        let mut spec = self.spectrum_from_matrix(&m)?;
        // How strongly the perturbation still acts at the cutoff level.
        let mut worst: f64 = 0.0;
        for j in 0..m.nrows() {
            if self.levels[j] == self.nmax {
                let lam = self.background[j];
                worst = worst.max((m[(j, j)].re - lam).abs() / lam);
            }
        }
        spec.truncation_indicator = worst;
        Ok(spec)
    }

    fn spectrum_from_matrix(&self, m: &Mat<c64>) -> Result<SpectralData> {
        let eig = m
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
        let n = self.degree;
        let r2 = self.geom.r_squared();
        let gap = self.level_eigenvalue(1);
        let kernel_dim = eig.iter().filter(|l| l.abs() < 1e-8 * gap).count();
        let n_ref = ((self.nmax as f64) * 0.5).round().max(1.0) as usize;
        Ok(SpectralData {
            degree: n,
            r_squared: r2,
            multiplicities: group_levels(&eig),
            eigenvalues: eig,
            cutoff_index: self.len(),
            kernel_dim,
            basis_id: self.basis_id(),
            nmax: self.nmax,
            reference_eigenvalue: self.level_eigenvalue(n_ref),
            heat_c_minus1: r2,
            heat_c0: n as f64 / 2.0 + 1.0 / 3.0,
            truncation_indicator: 0.0,
        })
    }

    /// log det of the L² Gram matrix of the holomorphic kernel frame
    /// s_a = (I + D₀⁺p)^{-1} e_a of D = D₀ + p.
    pub fn kernel_log_det(&self, p: &[Complex64]) -> Result<f64> {
        let k = self.len();
        let c = self.coupling_matrix(p);
        let t = Mat::<c64>::from_fn(k, k, |i, j| {
            let lam = self.background[i];
            let id = if i == j { 1.0 } else { 0.0 };
            let tij = if self.levels[i] == 0 { c64::new(0.0, 0.0) } else { c[(i, j)] / lam };
            c64::new(id, 0.0) + tij
        });
        let kernel: Vec<usize> = (0..k).filter(|i| self.levels[*i] == 0).collect();
        let rhs = Mat::<c64>::from_fn(k, kernel.len(), |i, a| {
            if i == kernel[a] {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        let s = t.partial_piv_lu().solve(&rhs);
        let gram = s.adjoint() * &s;
        let ev = gram
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
        Ok(ev.iter().map(|x| x.ln()).sum())
    }
}

fn group_levels(eig: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &l in eig {
        match out.last_mut() {
            Some((v, m)) if (l - *v).abs() <= 1e-8 * v.abs().max(1.0) => *m += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

/// Truncated spectrum with the data needed for the ζ continuation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub degree: usize,
    pub r_squared: f64,
    /// Ascending Ritz eigenvalues (kernel included).
    pub eigenvalues: Vec<f64>,
    /// Distinct values with multiplicities.
    pub multiplicities: Vec<(f64, usize)>,
    /// Rank of the truncation space.
    pub cutoff_index: usize,
    pub kernel_dim: usize,
    pub basis_id: String,
    pub nmax: usize,
    /// Background eigenvalue fixing the split point of the heat trace.
    pub reference_eigenvalue: f64,
    /// Leading heat coefficients Θ(t) ~ c₋₁/t + c₀: Area/4π and N/2 + 1/3.
    pub heat_c_minus1: f64,
    pub heat_c0: f64,
    /// max |M_jj − λ_j|/λ_j over the top level of the basis.
    pub truncation_indicator: f64,
}

impl SpectralData {
    /// The spectrum of cΔ.
    pub fn scaled(&self, c: f64) -> SpectralData {
        let mut s = self.clone();
        s.eigenvalues.iter_mut().for_each(|l| *l *= c);
        s.multiplicities.iter_mut().for_each(|(l, _)| *l *= c);
        s.reference_eigenvalue *= c;
        s.heat_c_minus1 /= c;
        s
    }

    pub fn nonzero(&self) -> &[f64] {
        &self.eigenvalues[self.kernel_dim..]
    }

    /// Θ(t) = Σ e^{−λt} over the computed spectrum.
    pub fn heat_trace(&self, t: f64) -> f64 {
        self.eigenvalues.iter().map(|l| (-l.max(0.0) * t).exp()).sum()
    }
}

pub fn background_spectrum(n: usize, geom: &SphereGeometry, cutoff: usize) -> Result<SpectralData> {
    Ok(DolbeaultBasis::new(geom, n, cutoff)?.background_spectrum())
}

pub fn perturbed_spectrum(base: &DolbeaultBasis, a01_perturbation: &[Complex64]) -> Result<SpectralData> {
    base.perturbed_spectrum(a01_perturbation)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZetaParams {
    /// t₀ = tau / λ_ref.
    pub tau: f64,
    /// Number of fitted coefficients c₁..c_m.
    pub fit_terms: usize,
    pub fit_points: usize,
    /// Fit window [t₀, span·t₀].
    pub fit_span: f64,
    /// Largest accepted relative fit residual.
    pub fit_threshold: f64,
}

impl Default for ZetaParams {
    fn default() -> Self {
        ZetaParams {
            tau: 15.0,
            fit_terms: 5,
            fit_points: 40,
            fit_span: 4.0,
            fit_threshold: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaResult {
    pub zeta_prime_zero: f64,
    /// ζ(0) = c₀ − dim Ker.
    pub zeta_zero: f64,
    /// Pinned leading heat coefficients (c₋₁, c₀).
    pub tail_coefficients: (f64, f64),
    pub fitted_coefficients: Vec<f64>,
    pub split_time: f64,
    pub fit_residual: f64,
    /// ζ′(0) recomputed with the spectrum cut at smaller levels.
    pub cutoff_series: Vec<(usize, f64)>,
}

impl ZetaResult {
    /// Change between the two largest cutoffs of the series.
    pub fn stability(&self) -> f64 {
        let n = self.cutoff_series.len();
        if n < 2 {
            return f64::NAN;
        }
        (self.cutoff_series[n - 1].1 - self.cutoff_series[n - 2].1).abs()
    }
}

/// Exponential integral E₁(x), x > 0.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// ζ′(0) from eigenvalues and a pinned heat expansion at split time t₀.
fn zeta_from(spec_vals: &[f64], kernel: usize, c_m1: f64, c0: f64, lambda_ref: f64, params: &ZetaParams) -> Result<(f64, Vec<f64>, f64, f64)> {
    let t0 = params.tau / lambda_ref;
    let m = params.fit_terms;
    let np = params.fit_points;
    let heat = |t: f64| -> f64 { spec_vals.iter().map(|l| (-l.max(0.0) * t).exp()).sum() };
    let mut a = Mat::<f64>::zeros(np, m);
    let mut y = Mat::<f64>::zeros(np, 1);
    let mut yscale: f64 = 0.0;
    for i in 0..np {
        let x = 1.0 + (params.fit_span - 1.0) * i as f64 / (np - 1) as f64;
        let t = x * t0;
        let theta = heat(t);
        yscale = yscale.max(theta.abs());
        y[(i, 0)] = theta - c_m1 / t - c0;
        for j in 0..m {
            a[(i, j)] = x.powi(j as i32 + 1);
        }
    }
    let d = a.qr().solve_lstsq(&y);
    let fitted = a.clone() * &d;
    let mut res: f64 = 0.0;
    for i in 0..np {
        res = res.max((fitted[(i, 0)] - y[(i, 0)]).abs());
    }
    let rel = res / yscale.max(1e-300);
    if rel > params.fit_threshold {
        return Err(Error::FitFailure {
            residual: rel,
            threshold: params.fit_threshold,
        });
    }
    let large: f64 = spec_vals[kernel..].iter().map(|l| exp_integral_e1(l * t0)).sum();
    let coeffs: Vec<f64> = (0..m).map(|j| d[(j, 0)] / t0.powi(j as i32 + 1)).collect();
    let series: f64 = (0..m).map(|j| d[(j, 0)] / (j + 1) as f64).sum();
    let z0 = c0 - kernel as f64;
    let value = large + z0 * (EULER_GAMMA + t0.ln()) - c_m1 / t0 + series;
    Ok((value, coeffs, t0, rel))
}

pub fn zeta_prime_zero(spec: &SpectralData, params: &ZetaParams) -> Result<ZetaResult> {
    let (value, fitted, t0, rel) = zeta_from(
        &spec.eigenvalues,
        spec.kernel_dim,
        spec.heat_c_minus1,
        spec.heat_c0,
        spec.reference_eigenvalue,
        params,
    )?;
    // Same continuation with the spectrum cut at lower levels.
    let scale = spec.reference_eigenvalue / level_value(spec, ((spec.nmax as f64) * 0.5).round() as usize);
    let mut series = Vec::new();
    for cut in [spec.nmax / 2, (3 * spec.nmax) / 4, spec.nmax] {
        if cut < 4 {
            continue;
        }
        let count = level_count(spec.degree, cut).min(spec.eigenvalues.len());
        let n_ref = ((cut as f64) * 0.5).round().max(1.0) as usize;
        let lref = level_value(spec, n_ref) * scale;
        if let Ok((v, _, _, _)) = zeta_from(
            &spec.eigenvalues[..count],
            spec.kernel_dim,
            spec.heat_c_minus1,
            spec.heat_c0,
            lref,
            params,
        ) {
            series.push((cut, v));
        }
    }
    Ok(ZetaResult {
        zeta_prime_zero: value,
        zeta_zero: spec.heat_c0 - spec.kernel_dim as f64,
        tail_coefficients: (spec.heat_c_minus1, spec.heat_c0),
        fitted_coefficients: fitted,
        split_time: t0,
        fit_residual: rel,
        cutoff_series: series,
    })
}

fn level_value(spec: &SpectralData, n: usize) -> f64 {
    n as f64 * (n as f64 + spec.degree as f64 + 1.0) / spec.r_squared
}

fn level_count(degree: usize, nmax: usize) -> usize {
    (0..=nmax).map(|n| degree + 1 + 2 * n).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuillenNorm {
    /// −log‖σ‖² = ζ′(0) + (1/4π)∫|Ψ|² dμ.
    pub minus_log_norm: f64,
    pub zeta_part: f64,
    pub higgs_part: f64,
}

pub fn higgs_factor(geom: &SphereGeometry, psi: &[Complex64]) -> f64 {
    let d: Vec<f64> = psi.iter().map(|p| p.norm_sqr()).collect();
    geom.integrate_nodes(&d) / (4.0 * PI)
}

pub fn modified_quillen_norm(z: &ZetaResult, fields: &FieldData) -> QuillenNorm {
    let higgs = higgs_factor(&fields.geom, &fields.psi);
    QuillenNorm {
        minus_log_norm: z.zeta_prime_zero + higgs,
        zeta_part: z.zeta_prime_zero,
        higgs_part: higgs,
    }
}

/// ζ′(0) of D₀ + p.
pub fn zeta_prime_for(basis: &DolbeaultBasis, p: &[Complex64], params: &ZetaParams) -> Result<f64> {
    Ok(zeta_prime_zero(&basis.perturbed_spectrum(p)?, params)?.zeta_prime_zero)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureCheck {
    pub numeric: f64,
    pub analytic: f64,
}

impl CurvatureCheck {
    pub fn relative_error(&self) -> f64 {
        (self.numeric - self.analytic).abs() / self.analytic.abs().max(1e-300)
    }
}

/// ∂_w∂_w̄ f at 0 from the five-point Laplacian stencil with step h.
pub fn mixed_derivative(f: impl Fn(Complex64) -> Result<f64> + Sync, h: f64) -> Result<f64> {
    let pts = [
        Complex64::new(0.0, 0.0),
        Complex64::new(h, 0.0),
        Complex64::new(-h, 0.0),
        Complex64::new(0.0, h),
        Complex64::new(0.0, -h),
    ];
    let vals: Vec<Result<f64>> = pts.par_iter().map(|w| f(*w)).collect();
    let mut v = [0.0; 5];
    for (i, r) in vals.into_iter().enumerate() {
        v[i] = r?;
    }
    Ok((v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]) / (4.0 * h * h))
}

/// Along A(w) = A₀ + wα^{0,1} − w̄ conj(α^{0,1}) with A₀ symmetric (p = w·α).
/// numeric: ∂_w∂_w̄ ζ′(0); analytic: (1/2π) Ω(α, ℐα) = (1/4π) ∫|α|² dμ.
pub fn affine_curvature_check(basis: &DolbeaultBasis, alpha: &[Complex64], fd_step: f64, params: &ZetaParams) -> Result<CurvatureCheck> {
    let numeric = mixed_derivative(
        |w| {
            let p: Vec<Complex64> = alpha.iter().map(|a| a * w).collect();
            zeta_prime_for(basis, &p, params)
        },
        fd_step,
    )?;
    Ok(CurvatureCheck {
        numeric,
        analytic: alpha_pairing(basis.geom(), alpha),
    })
}

/// Same family, with the L² metric on det Ker included in the Quillen norm:
/// numeric is ∂_w∂_w̄ (ζ′(0) + log det Gram(holomorphic kernel frame)).
pub fn affine_curvature_with_kernel(basis: &DolbeaultBasis, alpha: &[Complex64], fd_step: f64, params: &ZetaParams) -> Result<CurvatureCheck> {
    let numeric = mixed_derivative(
        |w| {
            let p: Vec<Complex64> = alpha.iter().map(|a| a * w).collect();
            Ok(zeta_prime_for(basis, &p, params)? + basis.kernel_log_det(&p)?)
        },
        fd_step,
    )?;
    Ok(CurvatureCheck {
        numeric,
        analytic: alpha_pairing(basis.geom(), alpha),
    })
}

/// (1/4π) ∫ |α|² dμ for α with (0,1) frame component p.
pub fn alpha_pairing(geom: &SphereGeometry, alpha: &[Complex64]) -> f64 {
    let d: Vec<f64> = alpha.iter().map(|a| a.norm_sqr()).collect();
    geom.integrate_nodes(&d) / (4.0 * PI)
}

/// numeric: ∂_w∂_w̄ of (1/4π)∫|Ψ + wβ|² dμ; analytic: (1/4π)∫|β|² dμ.
pub fn higgs_curvature_check(geom: &SphereGeometry, psi: &[Complex64], beta: &[Complex64]) -> CurvatureCheck {
    let f = |w: Complex64| -> Result<f64> {
        let s: Vec<Complex64> = psi.iter().zip(beta).map(|(p, b)| p + b * w).collect();
        Ok(higgs_factor(geom, &s))
    };
    let numeric = mixed_derivative(f, 1e-2).expect("infallible");
    CurvatureCheck {
        numeric,
        analytic: higgs_factor(geom, beta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModuliCurvatureParams {
    pub fd_step: f64,
    pub nmax: usize,
    pub zeta: ZetaParams,
    pub taubes: TaubesParams,
    pub metric: MetricParams,
}

impl Default for ModuliCurvatureParams {
    fn default() -> Self {
        ModuliCurvatureParams {
            fd_step: 1e-2,
            nmax: 12,
            zeta: ZetaParams::default(),
            taubes: TaubesParams::default(),
            metric: MetricParams::default(),
        }
    }
}

/// Modified Quillen norm −log‖σ‖² of the vortex determined by `config`.
pub fn vortex_quillen_norm(basis: &DolbeaultBasis, config: &VortexConfiguration, params: &ModuliCurvatureParams) -> Result<QuillenNorm> {
    let sol = solve_taubes(config, &params.taubes)?;
    let fields = reconstruct_fields(&sol);
    let spec = basis.perturbed_spectrum(&fields.a01_nodes())?;
    let z = zeta_prime_zero(&spec, &params.zeta)?;
    Ok(modified_quillen_norm(&z, &fields))
}

/// (numeric, metric_value): ∂∂̄ of the modified Quillen norm in the position
/// of vortex 1, and (1/2π) M₁₁ at the same point.
pub fn moduli_curvature(config: &VortexConfiguration, params: &ModuliCurvatureParams) -> Result<CurvatureCheck> {
    let basis = DolbeaultBasis::new(config.geom(), config.n(), params.nmax)?;
    let numeric = moduli_curvature_with(&basis, config, params)?;
    let m = assemble_metric(config, &params.metric)?;
    Ok(CurvatureCheck {
        numeric,
        analytic: m.m(0, 0).re / (2.0 * PI),
    })
}

fn moduli_curvature_with(basis: &DolbeaultBasis, config: &VortexConfiguration, params: &ModuliCurvatureParams) -> Result<f64> {
    let z0 = config.positions()[0];
    mixed_derivative(
        |w| {
            let mut pos = config.positions().to_vec();
            pos[0] = z0 + w;
            let c = config.with_positions(pos)?;
            Ok(vortex_quillen_norm(basis, &c, params)?.minus_log_norm)
        },
        params.fd_step,
    )
}

/// ∫ (numeric curvature) dx dy over the sweep of vortex 1 (others fixed).
pub fn moduli_curvature_integral(config: &VortexConfiguration, grid: &CycleGrid, params: &ModuliCurvatureParams) -> Result<f64> {
    let basis = DolbeaultBasis::new(config.geom(), config.n(), params.nmax)?;
    let fixed = &config.positions()[1..];
    let pole = fixed
        .first()
        .map(|z| crate::sphere_geometry::unit_vector(*z))
        .unwrap_or([0.0, 0.0, 1.0]);
    let mut total = 0.0;
    for (z, w) in grid.samples(pole) {
        let mut pos = vec![z];
        pos.extend_from_slice(fixed);
        let c = config.with_positions(pos)?;
        let k = moduli_curvature_with(&basis, &c, params)?;
        total += w * k * (1.0 + z.norm_sqr()).powi(2) / 4.0;
    }
    Ok(total)
}

/// Convenience: ζ′(0) for the fields' connection in a given basis.
pub fn fields_zeta(basis: &DolbeaultBasis, fields: &FieldData, params: &ZetaParams) -> Result<ZetaResult> {
    zeta_prime_zero(&basis.perturbed_spectrum(&fields.a01_nodes())?, params)
}
