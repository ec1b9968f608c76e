//! Round sphere of radius R: conformal factor, charts, quadrature and the
//! Fubini–Study form.
//!
//! Chart conventions: the north chart is `z = tan(θ/2) e^{iφ}`, the south
//! chart `w = 1/z`. Both carry `h² = 4R²/(1+|·|²)²`. All integrals use the
//! real area element `dμ = h² dx dy`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{Grid, SpinTransform};

/// Fixed quadrature rule used by every integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureScheme {
    /// Gauss–Legendre in cos θ times the trapezoid rule in φ.
    GaussLegendreUniform,
}

impl QuadratureScheme {
    pub fn id(&self) -> &'static str {
        match self {
            QuadratureScheme::GaussLegendreUniform => "gauss-legendre-cos-theta x uniform-phi/v1",
        }
    }
}

/// Spin transforms keyed by doubled (spin, lmax), shared between clones.
type TransformCache = Arc<Mutex<HashMap<(i32, i32), Arc<SpinTransform>>>>;

#[derive(Debug, Clone)]
pub struct SphereGeometry {
    r_squared: f64,
    resolution: usize,
    quadrature: QuadratureScheme,
    grid: Arc<Grid>,
    weights: Arc<Vec<f64>>,
    transforms: TransformCache,
}

impl SphereGeometry {
    /// `resolution` is the number of latitude nodes (a power of two ≥ 8);
    /// there are twice as many longitudes.
    pub fn new(r_squared: f64, resolution: usize) -> Result<Self> {
        if !(r_squared.is_finite() && r_squared > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "R^2 must be positive, got {r_squared}"
            )));
        }
        if resolution < 8 || !resolution.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "resolution must be a power of two >= 8, got {resolution}"
            )));
        }
        let grid = Arc::new(Grid::new(resolution, 2 * resolution));
        let weights = Arc::new(grid.unit_weights().iter().map(|w| w * r_squared).collect());
        Ok(SphereGeometry {
            r_squared,
            resolution,
            quadrature: QuadratureScheme::GaussLegendreUniform,
            grid,
            weights,
            transforms: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    pub fn r_squared(&self) -> f64 {
        self.r_squared
    }

    pub fn radius(&self) -> f64 {
        self.r_squared.sqrt()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn quadrature(&self) -> QuadratureScheme {
        self.quadrature
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn node_count(&self) -> usize {
        self.grid.len()
    }

    /// Area weights `dμ` at the nodes.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn area(&self) -> f64 {
        4.0 * PI * self.r_squared
    }

    pub fn integrate_nodes(&self, values: &[f64]) -> f64 {
        values.iter().zip(self.weights.iter()).map(|(v, w)| v * w).sum()
    }

    /// Same geometry with a different radius.
    pub fn with_r_squared(&self, r_squared: f64) -> Result<Self> {
        SphereGeometry::new(r_squared, self.resolution)
    }

    /// Polar angles of node `i`.
    pub fn node_angles(&self, i: usize) -> (f64, f64) {
        let g = &self.grid;
        (g.theta[i / g.nlon], g.phi[i % g.nlon])
    }

    /// North-chart coordinate of node `i`.
    pub fn node_z(&self, i: usize) -> Complex64 {
        let (t, p) = self.node_angles(i);
        chart_coordinate(t, p)
    }

    /// Cached spin-weighted transform for doubled spin `s2` and doubled
    /// degree cutoff `l2max`.
    pub fn transform(&self, s2: i32, l2max: i32) -> Arc<SpinTransform> {
        let mut cache = self.transforms.lock().expect("transform cache poisoned");
        cache
            .entry((s2, l2max))
            .or_insert_with(|| Arc::new(SpinTransform::new(self.grid.clone(), s2, l2max)))
            .clone()
    }

    /// Doubled degree cutoff used for fields sampled on the grid.
    pub fn field_l2max(&self) -> i32 {
        2 * self.grid.max_degree() as i32
    }

    /// Nominal grid spacing π/nlon used for excision and separation
    /// thresholds.
    pub fn grid_spacing(&self) -> f64 {
        PI / self.grid.nlon as f64
    }

    /// Angular spacing between adjacent longitudes.
    pub fn longitude_spacing(&self) -> f64 {
        2.0 * PI / self.grid.nlon as f64
    }
}

/// `h²(z) = 4R²/(1+|z|²)²`.
pub fn conformal_factor(z: Complex64, geom: &SphereGeometry) -> f64 {
    let d = 1.0 + z.norm_sqr();
    4.0 * geom.r_squared() / (d * d)
}

/// North-chart coordinate of the point with polar angles (θ, φ).
pub fn chart_coordinate(theta: f64, phi: f64) -> Complex64 {
    Complex64::from_polar((theta / 2.0).tan(), phi)
}

/// Polar angles of the north-chart point z.
pub fn sphere_angles(z: Complex64) -> (f64, f64) {
    let theta = 2.0 * z.norm().atan();
    let phi = if z.norm() == 0.0 { 0.0 } else { z.arg() };
    (theta, phi)
}

/// Unit vector in R³ of the north-chart point z.
pub fn unit_vector(z: Complex64) -> [f64; 3] {
    let d = 1.0 + z.norm_sqr();
    [2.0 * z.re / d, 2.0 * z.im / d, (1.0 - z.norm_sqr()) / d]
}

/// North-chart coordinate of a unit vector (not the south pole).
pub fn chart_of_unit_vector(p: [f64; 3]) -> Complex64 {
    Complex64::new(p[0], p[1]) / (1.0 + p[2])
}

/// Smooth cutoff equal to 1 on the north cap θ ≤ π/3 and 0 for θ ≥ 2π/3.
pub fn north_partition(theta: f64) -> f64 {
    let (a, b) = (PI / 3.0, 2.0 * PI / 3.0);
    if theta <= a {
        return 1.0;
    }
    if theta >= b {
        return 0.0;
    }
    let t = (theta - a) / (b - a);
    let f = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    f(1.0 - t) / (f(1.0 - t) + f(t))
}

/// Polar-angle ranges of the two charts' grids.
const NORTH_CAP_MAX: f64 = 2.0 * PI / 3.0;
const SOUTH_CAP_MIN: f64 = PI / 3.0;

/// Samples of a function or bundle section in the two unitary chart frames.
///
/// For a section of the degree-N bundle the frames are related by the phase
/// ψ_S = (z/|z|)^{-N} ψ_N on the overlap annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoChartField {
    pub values_north: Vec<Complex64>,
    pub values_south: Vec<Complex64>,
    pub transition_weight: i32,
    north_nodes: Vec<usize>,
    south_nodes: Vec<usize>,
}

fn cap_nodes(geom: &SphereGeometry) -> (Vec<usize>, Vec<usize>) {
    let mut north = Vec::new();
    let mut south = Vec::new();
    for i in 0..geom.node_count() {
        let (t, _) = geom.node_angles(i);
        if t <= NORTH_CAP_MAX {
            north.push(i);
        }
        if t >= SOUTH_CAP_MIN {
            south.push(i);
        }
    }
    (north, south)
}

impl TwoChartField {
    /// Sample chart-local functions `north(z)` and `south(w)`.
    pub fn from_chart_functions(
        geom: &SphereGeometry,
        transition_weight: i32,
        north: impl Fn(Complex64) -> Complex64,
        south: impl Fn(Complex64) -> Complex64,
    ) -> Self {
        let (nn, sn) = cap_nodes(geom);
        let values_north = nn.iter().map(|&i| north(geom.node_z(i))).collect();
        let values_south = sn.iter().map(|&i| south(1.0 / geom.node_z(i))).collect();
        TwoChartField {
            values_north,
            values_south,
            transition_weight,
            north_nodes: nn,
            south_nodes: sn,
        }
    }

    /// Split global samples stored in the gauge σ = e^{-iNφ/2} ψ_N into chart
    /// frames.
    pub fn from_global(geom: &SphereGeometry, transition_weight: i32, values: &[Complex64]) -> Self {
        let (nn, sn) = cap_nodes(geom);
        let half = 0.5 * transition_weight as f64;
        let values_north = nn
            .iter()
            .map(|&i| values[i] * Complex64::from_polar(1.0, half * geom.node_angles(i).1))
            .collect();
        let values_south = sn
            .iter()
            .map(|&i| values[i] * Complex64::from_polar(1.0, -half * geom.node_angles(i).1))
            .collect();
        TwoChartField {
            values_north,
            values_south,
            transition_weight,
            north_nodes: nn,
            south_nodes: sn,
        }
    }

    pub fn from_real_global(geom: &SphereGeometry, values: &[f64]) -> Self {
        let c: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        Self::from_global(geom, 0, &c)
    }

    /// Largest overlap mismatch after applying the transition rule.
    pub fn overlap_deviation(&self, geom: &SphereGeometry) -> f64 {
        let n = self.transition_weight as f64;
        let mut south_at = std::collections::HashMap::new();
        for (v, &i) in self.values_south.iter().zip(&self.south_nodes) {
            south_at.insert(i, *v);
        }
        let mut dev: f64 = 0.0;
        for (vn, &i) in self.values_north.iter().zip(&self.north_nodes) {
            if let Some(vs) = south_at.get(&i) {
                let phi = geom.node_angles(i).1;
                let expected = vn * Complex64::from_polar(1.0, -n * phi);
                dev = dev.max((vs - expected).norm());
            }
        }
        dev
    }

    pub fn sup_norm(&self) -> f64 {
        self.values_north
            .iter()
            .chain(&self.values_south)
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Reassemble global samples in the σ gauge using the partition of unity.
    pub fn to_global(&self, geom: &SphereGeometry) -> Vec<Complex64> {
        let half = 0.5 * self.transition_weight as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); geom.node_count()];
        for (v, &i) in self.values_north.iter().zip(&self.north_nodes) {
            let (t, p) = geom.node_angles(i);
            out[i] += v * Complex64::from_polar(north_partition(t), -half * p);
        }
        for (v, &i) in self.values_south.iter().zip(&self.south_nodes) {
            let (t, p) = geom.node_angles(i);
            out[i] += v * Complex64::from_polar(1.0 - north_partition(t), half * p);
        }
        out
    }
}

/// `∫ f dμ` for a real function given in both charts.
pub fn integrate(f: &TwoChartField, geom: &SphereGeometry) -> Result<f64> {
    let deviation = f.overlap_deviation(geom);
    let tolerance = 1e-8 * f.sup_norm().max(f64::MIN_POSITIVE);
    if deviation > tolerance {
        return Err(Error::ChartInconsistency {
            deviation,
            tolerance,
        });
    }
    let mut total = 0.0;
    for (v, &i) in f.values_north.iter().zip(&f.north_nodes) {
        total += v.re * north_partition(geom.node_angles(i).0) * geom.weights()[i];
    }
    for (v, &i) in f.values_south.iter().zip(&f.south_nodes) {
        total += v.re * (1.0 - north_partition(geom.node_angles(i).0)) * geom.weights()[i];
    }
    Ok(total)
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Sesquilinear form `u† M v`.
    pub fn form(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                acc += u[i].conj() * self.get(i, j) * v[j];
            }
        }
        acc
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                d = d.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        d
    }
}

/// Fubini–Study metric coefficients at homogeneous coordinates Z of CP^n:
/// `(|Z|² I − Z Z†)/|Z|⁴`. With ω_FS = i ∂∂̄ log|Z|², `(1/2π)∫_{CP¹} ω_FS = 1`.
pub fn fubini_study_form(point: &[Complex64]) -> Result<ComplexMatrix> {
    let n = point.len();
    let norm2: f64 = point.iter().map(|c| c.norm_sqr()).sum();
    if n == 0 || norm2 == 0.0 || !norm2.is_finite() {
        return Err(Error::ZeroVector);
    }
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { norm2 } else { 0.0 };
            data[i * n + j] = (Complex64::new(delta, 0.0) - point[i] * point[j].conj()) / (norm2 * norm2);
        }
    }
    Ok(ComplexMatrix { n, data })
}

/// Chart coefficient g of ω_FS on CP¹ (ω_FS = i g dz∧dz̄ = 2g dx dy) obtained
/// by pulling the form back along z ↦ [1 : z].
pub fn fubini_study_chart_coefficient(z: Complex64) -> Result<f64> {
    let m = fubini_study_form(&[Complex64::new(1.0, 0.0), z])?;
    let tangent = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    Ok(m.form(&tangent, &tangent).re)
}

/// `(1/2π) ∫_{CP¹} ω_FS` by quadrature on the sphere grid.
pub fn fubini_study_class(geom: &SphereGeometry) -> Result<f64> {
    let unit = geom.grid().unit_weights();
    let mut total = 0.0;
    for (i, w) in unit.iter().enumerate() {
        let z = geom.node_z(i);
        let g = fubini_study_chart_coefficient(z)?;
        let dxdy = (1.0 + z.norm_sqr()).powi(2) / 4.0;
        total += 2.0 * g * dxdy * w;
    }
    Ok(total / (2.0 * PI))
}
