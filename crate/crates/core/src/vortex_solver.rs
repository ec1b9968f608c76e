//! Vortex equations on the round sphere via the regularised Taubes equation,
//! field reconstruction, and the Kähler structure of the affine space of
//! pairs (A, Ψ).
//!
//! Internal representation: bundle sections are spin-weight N/2 fields
//! σ = e^{−iNφ/2}ψ_N; the connection is A_sym + α with α = i(c_θ θ̂* + c_φ φ̂*)
//! stored as η = c_θ + i c_φ (spin weight 1). The (0,1) part of α has
//! polar-frame component p = iη, and B denotes the curvature density with
//! F = −iB dμ. The Taubes equation for the smooth remainder v is
//! `Δ v = e^{u₀+v} − 1 + N/R²` with Δ the Laplace–Beltrami operator.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::SpinCoeffs;
use crate::moduli_metric;
use crate::sphere_geometry::{unit_vector, SphereGeometry, TwoChartField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct VortexConfiguration {
    positions: Vec<Complex64>,
    geom: SphereGeometry,
}

impl VortexConfiguration {
    pub fn new(geom: SphereGeometry, positions: Vec<Complex64>) -> Result<Self> {
        if positions.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter("vortex positions must be finite".into()));
        }
        Ok(VortexConfiguration { positions, geom })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Complex64] {
        &self.positions
    }

    pub fn geom(&self) -> &SphereGeometry {
        &self.geom
    }

    pub fn with_positions(&self, positions: Vec<Complex64>) -> Result<Self> {
        VortexConfiguration::new(self.geom.clone(), positions)
    }

    pub fn bradlow_holds(&self) -> bool {
        moduli_metric::bradlow_check(self.n(), self.geom.r_squared())
    }

    /// `e^{u₀}` at node i: Π_r (1 − p·p_r)/2 with p the unit vector.
    fn holomorphic_density(&self, p: [f64; 3]) -> f64 {
        self.positions
            .iter()
            .map(|z| {
                let q = unit_vector(*z);
                0.5 * (1.0 - (p[0] * q[0] + p[1] * q[1] + p[2] * q[2]))
            })
            .product()
    }

    pub(crate) fn holomorphic_density_nodes(&self) -> Vec<f64> {
        let g = &self.geom;
        (0..g.node_count())
            .map(|i| {
                let (t, p) = g.node_angles(i);
                self.holomorphic_density([t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaubesParams {
    /// Degree cutoff of the Galerkin expansion of v.
    pub lmax: usize,
    /// Sup-norm residual tolerance at the grid nodes.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub cg_tolerance: f64,
    pub cg_max_iterations: usize,
}

impl Default for TaubesParams {
    fn default() -> Self {
        TaubesParams {
            lmax: 24,
            tolerance: 1e-10,
            max_iterations: 50,
            cg_tolerance: 1e-14,
            cg_max_iterations: 400,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TaubesSolution {
    pub config: VortexConfiguration,
    pub params: TaubesParams,
    /// Spin-0 coefficients of v on the unit sphere.
    pub v_coeffs: SpinCoeffs,
    pub v_nodes: Vec<f64>,
    pub residual_norm: f64,
    pub newton_iterations: usize,
    /// Samols coefficients (empty when zeros are not resolvably separated).
    pub a_coeffs: Vec<f64>,
    pub b_coeffs: Vec<Complex64>,
    /// `|∫(1 − e^u) dμ − 4πN|`.
    pub solvability_defect: f64,
}

impl TaubesSolution {
    pub fn v(&self) -> TwoChartField {
        TwoChartField::from_real_global(self.config.geom(), &self.v_nodes)
    }

    /// v at a chart point.
    pub fn v_at(&self, z: Complex64) -> f64 {
        let (t, p) = crate::sphere_geometry::sphere_angles(z);
        self.v_coeffs.eval(t, p).re
    }

    /// ∂_z v at a north-chart point.
    pub fn dz_v_at(&self, z: Complex64) -> Complex64 {
        let (t, p) = crate::sphere_geometry::sphere_angles(z);
        let lowered = self.v_coeffs.lower().eval(t, p);
        lowered * Complex64::from_polar(1.0 / (1.0 + z.norm_sqr()), -p)
    }

    /// `e^{u₀+v}` (= |Ψ|²) at the nodes.
    pub fn density_nodes(&self) -> Vec<f64> {
        self.config
            .holomorphic_density_nodes()
            .iter()
            .zip(&self.v_nodes)
            .map(|(a, v)| a * v.exp())
            .collect()
    }
}

struct TaubesProblem<'a> {
    geom: &'a SphereGeometry,
    eu0: Vec<f64>,
    source: f64,
    l2max: i32,
}

impl TaubesProblem<'_> {
    fn synth_real(&self, c: &SpinCoeffs) -> Vec<f64> {
        self.geom
            .transform(0, self.l2max)
            .synthesize(c)
            .iter()
            .map(|x| x.re)
            .collect()
    }

    fn analyze_real(&self, f: &[f64]) -> SpinCoeffs {
        let c: Vec<Complex64> = f.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        self.geom.transform(0, self.l2max).analyze(&c)
    }

    fn laplacian(&self, c: &SpinCoeffs) -> SpinCoeffs {
        let r2 = self.geom.r_squared();
        let mut out = c.clone();
        out.scale_by_degree(|l| -l * (l + 1.0) / r2);
        out
    }

    /// Node residual Δv − e^{u₀+v} + 1 − N/R² and the density e^{u₀+v}.
    fn residual(&self, v: &SpinCoeffs) -> (Vec<f64>, Vec<f64>) {
        let vn = self.synth_real(v);
        let lap = self.synth_real(&self.laplacian(v));
        let eu: Vec<f64> = self.eu0.iter().zip(&vn).map(|(a, b)| a * b.exp()).collect();
        let r = lap
            .iter()
            .zip(&eu)
            .map(|(l, e)| l - e + self.source)
            .collect();
        (r, eu)
    }

    /// Solve (e^u − Δ)δ = rhs by preconditioned conjugate gradients.
    fn linear_solve(&self, eu: &[f64], rhs: &SpinCoeffs, tol: f64, maxit: usize) -> SpinCoeffs {
        let r2 = self.geom.r_squared();
        let mean_eu = self.geom.integrate_nodes(eu) / self.geom.area();
        let apply = |x: &SpinCoeffs| -> SpinCoeffs {
            let xn = self.synth_real(x);
            let prod: Vec<f64> = xn.iter().zip(eu).map(|(a, b)| a * b).collect();
            let mut out = self.analyze_real(&prod);
            let lap = self.laplacian(x);
            for (o, l) in out.data.iter_mut().zip(&lap.data) {
                *o -= l;
            }
            out
        };
        let mut precond = SpinCoeffs::zeros(0, self.l2max);
        for (l2, _, i) in precond.modes().collect::<Vec<_>>() {
            let l = 0.5 * l2 as f64;
            precond.data[i] = Complex64::new(1.0 / (l * (l + 1.0) / r2 + mean_eu.max(1e-12)), 0.0);
        }
        let dot = |a: &SpinCoeffs, b: &SpinCoeffs| -> f64 {
            a.data.iter().zip(&b.data).map(|(x, y)| (x.conj() * y).re).sum()
        };
        let mut x = SpinCoeffs::zeros(0, self.l2max);
        let mut r = rhs.clone();
        let mut z = r.clone();
        for (zi, pi) in z.data.iter_mut().zip(&precond.data) {
            *zi *= pi;
        }
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let rhs_norm = dot(rhs, rhs).sqrt().max(1e-300);
        for _ in 0..maxit {
            if dot(&r, &r).sqrt() <= tol * rhs_norm {
                break;
            }
            let ap = apply(&p);
            let alpha = rz / dot(&p, &ap);
            for i in 0..x.data.len() {
                x.data[i] += p.data[i] * alpha;
                r.data[i] -= ap.data[i] * alpha;
            }
            for i in 0..z.data.len() {
                z.data[i] = r.data[i] * precond.data[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..p.data.len() {
                p.data[i] = z.data[i] + p.data[i] * beta;
            }
        }
        x
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Solve the regularised Taubes equation by damped Newton iteration.
///
/// The initial iterate is the constant that satisfies the solvability
/// condition ∫e^{u₀+v} dμ = 4π(R² − N) exactly.
pub fn solve_taubes(config: &VortexConfiguration, params: &TaubesParams) -> Result<TaubesSolution> {
    let geom = config.geom();
    let n = config.n();
    if !config.bradlow_holds() {
        return Err(Error::BradlowViolation {
            n,
            r_squared: geom.r_squared(),
        });
    }
    let l2max = 2 * params.lmax.min(geom.grid().max_degree()) as i32;
    let problem = TaubesProblem {
        geom,
        eu0: config.holomorphic_density_nodes(),
        source: 1.0 - n as f64 / geom.r_squared(),
        l2max,
    };
    let mass0 = geom.integrate_nodes(&problem.eu0);
    let target = 4.0 * PI * (geom.r_squared() - n as f64);
    let mut v = SpinCoeffs::zeros(0, l2max);
    if n > 0 {
        v.data[0] = Complex64::new((target / mass0).ln() * (4.0 * PI).sqrt(), 0.0);
    }

    let (mut res, mut eu) = problem.residual(&v);
    let mut res_norm = sup(&res);
    let mut iterations = 0;
    while res_norm >= params.tolerance {
        if iterations >= params.max_iterations {
            return Err(Error::NonConvergence {
                iterations,
                residual: res_norm,
            });
        }
        iterations += 1;
        let rhs = problem.analyze_real(&res);
        let delta = problem.linear_solve(&eu, &rhs, params.cg_tolerance, params.cg_max_iterations);
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let mut trial = v.clone();
            for (t, d) in trial.data.iter_mut().zip(&delta.data) {
                *t += d * step;
            }
            let (r_t, eu_t) = problem.residual(&trial);
            let norm_t = sup(&r_t);
            if norm_t < res_norm {
                v = trial;
                res = r_t;
                eu = eu_t;
                res_norm = norm_t;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence {
                iterations,
                residual: res_norm,
            });
        }
    }
    let v_nodes = problem.synth_real(&v);
    let solvability_defect = (geom.integrate_nodes(&eu.iter().map(|e| 1.0 - e).collect::<Vec<_>>())
        - 4.0 * PI * n as f64)
        .abs();
    let mut sol = TaubesSolution {
        config: config.clone(),
        params: *params,
        v_coeffs: v,
        v_nodes,
        residual_norm: res_norm,
        newton_iterations: iterations,
        a_coeffs: Vec::new(),
        b_coeffs: Vec::new(),
        solvability_defect,
    };
    if let Ok(samols) = moduli_metric::samols_coefficients(&sol) {
        sol.a_coeffs = samols.iter().map(|c| c.a).collect();
        sol.b_coeffs = samols.iter().map(|c| c.b).collect();
    }
    Ok(sol)
}

/// Gauge-fixed pair (A, Ψ) on the grid.
#[derive(Debug, Clone)]
pub struct FieldData {
    pub geom: SphereGeometry,
    pub n: usize,
    /// σ = e^{−iNφ/2} ψ_N at the nodes.
    pub psi: Vec<Complex64>,
    /// η = c_θ + i c_φ of the connection perturbation α at the nodes.
    pub eta: Vec<Complex64>,
    /// Vortex positions used for zero excision.
    pub zeros: Vec<Complex64>,
    pub eq1_residual: f64,
    pub eq2_residual: f64,
    pub flux: f64,
}

impl FieldData {
    /// Assemble fields from raw samples and evaluate both equation residuals.
    pub fn from_parts(
        geom: &SphereGeometry,
        n: usize,
        psi: Vec<Complex64>,
        eta: Vec<Complex64>,
        zeros: Vec<Complex64>,
    ) -> Self {
        let mut f = FieldData {
            geom: geom.clone(),
            n,
            psi,
            eta,
            zeros,
            eq1_residual: 0.0,
            eq2_residual: 0.0,
            flux: 0.0,
        };
        f.refresh();
        f
    }

    fn refresh(&mut self) {
        let b = curvature_density(&self.geom, self.n, &self.eta);
        self.eq1_residual = self
            .psi
            .iter()
            .zip(&b)
            .map(|(p, b)| (b - 0.5 * (1.0 - p.norm_sqr())).abs())
            .fold(0.0, f64::max);
        let d = cauchy_riemann(&self.geom, self.n, &self.eta, &self.psi);
        let eps = 3.0 * self.geom.grid_spacing();
        let excl: Vec<[f64; 3]> = self.zeros.iter().map(|z| unit_vector(*z)).collect();
        let mut worst: f64 = 0.0;
        for (i, di) in d.iter().enumerate() {
            let (t, p) = self.geom.node_angles(i);
            let x = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
            let near = excl.iter().any(|q| {
                let c = (x[0] * q[0] + x[1] * q[1] + x[2] * q[2]).clamp(-1.0, 1.0);
                c.acos() < eps
            });
            if !near {
                worst = worst.max(di.norm());
            }
        }
        self.eq2_residual = worst;
        self.flux = flux_of(&self.geom, &self.psi);
    }

    /// Polar-frame (0,1) component p = iη of the connection perturbation.
    pub fn a01_nodes(&self) -> Vec<Complex64> {
        self.eta.iter().map(|e| Complex64::i() * e).collect()
    }

    pub fn a01(&self) -> TwoChartField {
        TwoChartField::from_global(&self.geom, self.n as i32 + 2, &self.a01_nodes())
    }

    pub fn psi_chart(&self) -> TwoChartField {
        TwoChartField::from_global(&self.geom, self.n as i32, &self.psi)
    }

    /// Curvature density B at the nodes (F = −iB dμ).
    pub fn curvature(&self) -> Vec<f64> {
        curvature_density(&self.geom, self.n, &self.eta)
    }

    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|p| p.norm_sqr()).collect()
    }
}

/// B = N/(2R²) − curl c, computed spectrally from η.
pub fn curvature_density(geom: &SphereGeometry, n: usize, eta: &[Complex64]) -> Vec<f64> {
    let l2 = geom.field_l2max();
    let c = geom.transform(2, l2).analyze(eta).lower();
    let lowered = geom.transform(0, l2).synthesize(&c);
    let r = geom.radius();
    let b0 = n as f64 / (2.0 * geom.r_squared());
    lowered.iter().map(|x| b0 - x.im / r).collect()
}

/// Polar-frame component of D σ = ∂̄_{A_sym} σ + p σ.
pub fn cauchy_riemann(geom: &SphereGeometry, n: usize, eta: &[Complex64], psi: &[Complex64]) -> Vec<Complex64> {
    let s2 = n as i32;
    let l2 = geom.field_l2max();
    let raised = geom.transform(s2, l2).analyze(psi).raise();
    let t = geom.transform(s2 + 2, l2);
    let d0 = t.synthesize(&raised);
    let r = geom.radius();
    d0.iter()
        .zip(eta)
        .zip(psi)
        .map(|((d, e), s)| d / r + Complex64::i() * e * s)
        .collect()
}

fn flux_of(geom: &SphereGeometry, psi: &[Complex64]) -> f64 {
    let f: Vec<f64> = psi.iter().map(|p| 1.0 - p.norm_sqr()).collect();
    geom.integrate_nodes(&f)
}

/// Reconstruct (A, Ψ) from a Taubes solution in the holomorphic-zero gauge.
pub fn reconstruct_fields(sol: &TaubesSolution) -> FieldData {
    fields_from_remainder(&sol.config, &sol.v_coeffs)
}

/// Fields for the remainder v given by spin-0 coefficients (need not solve
/// the Taubes equation).
pub fn fields_from_remainder(config: &VortexConfiguration, v: &SpinCoeffs) -> FieldData {
    let geom = config.geom();
    let n = config.n();
    let half = 0.5 * n as f64;
    let vt = geom.transform(0, v.l2max);
    let v_nodes = vt.synthesize(v);
    let psi: Vec<Complex64> = (0..geom.node_count())
        .map(|i| {
            let (t, p) = geom.node_angles(i);
            let (sh, ch) = ((t / 2.0).sin(), (t / 2.0).cos());
            let e = Complex64::from_polar(sh, p);
            let mut prod = Complex64::from_polar((0.5 * v_nodes[i].re).exp(), -half * p);
            for zr in config.positions() {
                prod *= (e - zr * ch) / (1.0 + zr.norm_sqr()).sqrt();
            }
            prod
        })
        .collect();
    // η = (i/R) ð⁺(v/2)
    let mut w = v.clone();
    w.data.iter_mut().for_each(|c| *c *= 0.5);
    let raised = w.raise();
    let t1 = geom.transform(2, v.l2max);
    let r = geom.radius();
    let eta: Vec<Complex64> = t1
        .synthesize(&raised)
        .iter()
        .map(|x| Complex64::i() * x / r)
        .collect();
    FieldData::from_parts(geom, n, psi, eta, config.positions().to_vec())
}

/// `∫(1 − |Ψ|²) dμ`.
pub fn flux(fields: &FieldData) -> f64 {
    flux_of(&fields.geom, &fields.psi)
}

/// μ = ½[B − ½(1 − |Ψ|²)] at the nodes.
pub fn moment_map(fields: &FieldData) -> TwoChartField {
    TwoChartField::from_real_global(&fields.geom, &moment_map_nodes(fields))
}

pub fn moment_map_nodes(fields: &FieldData) -> Vec<f64> {
    fields
        .curvature()
        .iter()
        .zip(&fields.psi)
        .map(|(b, p)| 0.5 * (b - 0.5 * (1.0 - p.norm_sqr())))
        .collect()
}

/// Infinitesimal gauge parameter ζ = iχ with χ a real band-limited function.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeElement {
    /// Spin-0 coefficients of χ.
    pub chi: SpinCoeffs,
}

impl GaugeElement {
    pub fn identity(lmax: usize) -> Self {
        GaugeElement {
            chi: SpinCoeffs::zeros(0, 2 * lmax as i32),
        }
    }

    /// χ built from real node samples (projected onto degree ≤ lmax).
    pub fn from_real_nodes(geom: &SphereGeometry, lmax: usize, chi: &[f64]) -> Self {
        let c: Vec<Complex64> = chi.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        GaugeElement {
            chi: geom.transform(0, 2 * lmax as i32).analyze(&c),
        }
    }

    /// Random smooth gauge function with sup-norm about `amplitude`.
    pub fn random(geom: &SphereGeometry, lmax: usize, amplitude: f64, rng: &mut impl Rng) -> Self {
        let t = geom.transform(0, 2 * lmax as i32);
        let mut c = SpinCoeffs::zeros(0, 2 * lmax as i32);
        for x in c.data.iter_mut() {
            *x = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let vals: Vec<f64> = t.synthesize(&c).iter().map(|x| x.re).collect();
        let s = sup(&vals).max(1e-300);
        let vals: Vec<f64> = vals.iter().map(|x| x * amplitude / s).collect();
        Self::from_real_nodes(geom, lmax, &vals)
    }

    pub fn chi_nodes(&self, geom: &SphereGeometry) -> Vec<f64> {
        geom.transform(0, self.chi.l2max)
            .synthesize(&self.chi)
            .iter()
            .map(|x| x.re)
            .collect()
    }

    /// ζ = iχ at the nodes.
    pub fn zeta(&self, geom: &SphereGeometry) -> TwoChartField {
        let z: Vec<Complex64> = self
            .chi_nodes(geom)
            .iter()
            .map(|x| Complex64::new(0.0, *x))
            .collect();
        TwoChartField::from_global(geom, 0, &z)
    }

    /// η-representation of dχ, i.e. (1/R) ð⁺χ.
    pub fn gradient(&self, geom: &SphereGeometry) -> Vec<Complex64> {
        let r = geom.radius();
        geom.transform(2, self.chi.l2max)
            .synthesize(&self.chi.raise())
            .iter()
            .map(|x| x / r)
            .collect()
    }
}

/// A ↦ A + i dχ, Ψ ↦ e^{−iχ} Ψ.
pub fn gauge_transform(fields: &FieldData, g: &GaugeElement) -> FieldData {
    let geom = &fields.geom;
    let chi = g.chi_nodes(geom);
    let grad = g.gradient(geom);
    let eta = fields.eta.iter().zip(&grad).map(|(e, d)| e + d).collect();
    let psi = fields
        .psi
        .iter()
        .zip(&chi)
        .map(|(p, c)| p * Complex64::from_polar(1.0, -c))
        .collect();
    FieldData::from_parts(geom, fields.n, psi, eta, fields.zeros.clone())
}

/// Tangent vector X = (α, β) at a point of the affine space.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentPair {
    /// η = c_θ + i c_φ of α at the nodes.
    pub eta: Vec<Complex64>,
    /// β in the σ gauge at the nodes.
    pub beta: Vec<Complex64>,
}

impl TangentPair {
    pub fn zero(geom: &SphereGeometry) -> Self {
        TangentPair {
            eta: vec![ZERO; geom.node_count()],
            beta: vec![ZERO; geom.node_count()],
        }
    }

    /// α = a dz − ā dz̄ from the north-chart coefficient a(z); β given at
    /// the nodes.
    pub fn from_dz_coefficient(geom: &SphereGeometry, a: impl Fn(Complex64) -> Complex64, beta: Vec<Complex64>) -> Self {
        let r = geom.radius();
        let eta = (0..geom.node_count())
            .map(|i| {
                let z = geom.node_z(i);
                let h = 2.0 * r / (1.0 + z.norm_sqr());
                let phi = geom.node_angles(i).1;
                2.0 * Complex64::i() * a(z).conj() * Complex64::from_polar(1.0 / h, -phi)
            })
            .collect();
        TangentPair { eta, beta }
    }

    /// Chart coefficient a of α = a dz − ā dz̄ at node i (inverse of
    /// `from_dz_coefficient`).
    pub fn dz_coefficient(&self, geom: &SphereGeometry, i: usize) -> Complex64 {
        let z = geom.node_z(i);
        let h = 2.0 * geom.radius() / (1.0 + z.norm_sqr());
        let phi = geom.node_angles(i).1;
        (self.eta[i] * Complex64::from_polar(h / 2.0, phi) / Complex64::i()).conj()
    }

    /// Random smooth tangent vector with components up to degree `lmax`.
    pub fn random(geom: &SphereGeometry, n: usize, lmax: usize, rng: &mut impl Rng) -> Self {
        let mut draw = |s2: i32| {
            let l2max = 2 * lmax as i32 + s2.rem_euclid(2);
            let mut c = SpinCoeffs::zeros(s2, l2max);
            for x in c.data.iter_mut() {
                *x = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
            geom.transform(s2, c.l2max).synthesize(&c)
        };
        let eta = draw(2);
        let beta = draw(n as i32);
        TangentPair { eta, beta }
    }

    pub fn scaled(&self, s: f64) -> Self {
        TangentPair {
            eta: self.eta.iter().map(|x| x * s).collect(),
            beta: self.beta.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &TangentPair) -> Self {
        TangentPair {
            eta: self.eta.iter().zip(&other.eta).map(|(a, b)| a + b).collect(),
            beta: self.beta.iter().zip(&other.beta).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn alpha(&self, geom: &SphereGeometry) -> TwoChartField {
        TwoChartField::from_global(geom, 2, &self.eta)
    }
}

/// 𝒢(X, Y) = ∫ (c₁·c₂ + Re β₁β̄₂) dμ.
pub fn metric_g(x: &TangentPair, y: &TangentPair, geom: &SphereGeometry) -> f64 {
    let f: Vec<f64> = (0..geom.node_count())
        .map(|i| (x.eta[i] * y.eta[i].conj()).re + (x.beta[i] * y.beta[i].conj()).re)
        .collect();
    geom.integrate_nodes(&f)
}

/// ℐ = (Hodge star on α, multiplication by i on β).
pub fn complex_i(x: &TangentPair) -> TangentPair {
    let i = Complex64::i();
    TangentPair {
        eta: x.eta.iter().map(|e| i * e).collect(),
        beta: x.beta.iter().map(|b| i * b).collect(),
    }
}

/// Ω(X, Y) = ½∫(c₁_θ c₂_φ − c₁_φ c₂_θ) dμ − ½∫ Im(β₁β̄₂) dμ.
pub fn symplectic_omega(x: &TangentPair, y: &TangentPair, geom: &SphereGeometry) -> f64 {
    let f: Vec<f64> = (0..geom.node_count())
        .map(|i| {
            let (a, b) = (x.eta[i], y.eta[i]);
            0.5 * (a.re * b.im - a.im * b.re) - 0.5 * (x.beta[i] * y.beta[i].conj()).im
        })
        .collect();
    geom.integrate_nodes(&f)
}

/// Infinitesimal action X_ζ = (dχ, −iχΨ) of ζ = iχ at the given fields.
pub fn gauge_vector_field(fields: &FieldData, g: &GaugeElement) -> TangentPair {
    let geom = &fields.geom;
    let chi = g.chi_nodes(geom);
    TangentPair {
        eta: g.gradient(geom),
        beta: fields
            .psi
            .iter()
            .zip(&chi)
            .map(|(p, c)| -Complex64::i() * c * p)
            .collect(),
    }
}

/// H_ζ = ½∫ χ (B − ½(1 − |Ψ|²)) dμ at the pair (η, σ).
pub fn hamiltonian(geom: &SphereGeometry, n: usize, eta: &[Complex64], psi: &[Complex64], g: &GaugeElement) -> f64 {
    let chi = g.chi_nodes(geom);
    let b = curvature_density(geom, n, eta);
    let f: Vec<f64> = (0..geom.node_count())
        .map(|i| 0.5 * chi[i] * (b[i] - 0.5 * (1.0 - psi[i].norm_sqr())))
        .collect();
    geom.integrate_nodes(&f)
}

/// dH_ζ(X) by a central difference of H_ζ along X (exact: H is quadratic).
pub fn hamiltonian_differential(fields: &FieldData, g: &GaugeElement, x: &TangentPair, step: f64) -> f64 {
    let at = |t: f64| {
        let eta: Vec<Complex64> = fields.eta.iter().zip(&x.eta).map(|(a, b)| a + b * t).collect();
        let psi: Vec<Complex64> = fields.psi.iter().zip(&x.beta).map(|(a, b)| a + b * t).collect();
        hamiltonian(&fields.geom, fields.n, &eta, &psi, g)
    };
    (at(step) - at(-step)) / (2.0 * step)
}

/// Linearised curvature −curl c of a tangent α (used by diagnostics).
pub fn tangent_curvature(geom: &SphereGeometry, x: &TangentPair) -> Vec<f64> {
    curvature_density(geom, 0, &x.eta)
}
