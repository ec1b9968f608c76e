//! Spin-weighted spherical harmonics on a Gauss–Legendre × uniform longitude grid.
//!
//! Spin weights and degrees may be half-integers, so every quantum number is
//! stored doubled (`s2 = 2s`, `l2 = 2l`, `m2 = 2m`). The basis is
//! `sY_lm(θ, φ) = sqrt((2l+1)/4π) d^l_{m,-s}(θ) e^{imφ}`, orthonormal on the
//! unit sphere. With `ð⁺ = ∂_θ + (i/sinθ)∂_φ − s cotθ` and
//! `ð⁻ = ∂_θ − (i/sinθ)∂_φ + s cotθ`,
//!
//! ```text
//! ð⁺ sY_lm = +sqrt((l−s)(l+s+1)) (s+1)Y_lm
//! ð⁻ sY_lm = −sqrt((l+s)(l−s+1)) (s−1)Y_lm
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Gauss–Legendre nodes and weights on [-1, 1], nodes in decreasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Tensor grid: `nlat` Gauss nodes in cos θ (θ increasing from the north
/// pole), `nlon` equispaced longitudes starting at φ = 0.
#[derive(Debug, Clone)]
pub struct Grid {
    pub nlat: usize,
    pub nlon: usize,
    pub theta: Vec<f64>,
    pub cos_theta: Vec<f64>,
    pub sin_theta: Vec<f64>,
    /// Gauss weights in cos θ (they sum to 2).
    pub gauss_weights: Vec<f64>,
    pub phi: Vec<f64>,
}

impl Grid {
    pub fn new(nlat: usize, nlon: usize) -> Self {
        let (x, w) = gauss_legendre(nlat);
        let theta: Vec<f64> = x.iter().map(|c| c.acos()).collect();
        let sin_theta = theta.iter().map(|t| t.sin()).collect();
        let phi = (0..nlon).map(|k| 2.0 * PI * k as f64 / nlon as f64).collect();
        Grid {
            nlat,
            nlon,
            theta,
            cos_theta: x,
            sin_theta,
            gauss_weights: w,
            phi,
        }
    }

    pub fn len(&self) -> usize {
        self.nlat * self.nlon
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.nlon + k
    }

    /// Quadrature weights of the unit sphere at every node.
    pub fn unit_weights(&self) -> Vec<f64> {
        let dphi = 2.0 * PI / self.nlon as f64;
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.nlat {
            for _ in 0..self.nlon {
                out.push(self.gauss_weights[j] * dphi);
            }
        }
        out
    }

    /// Largest degree resolved exactly by the quadrature for products of two
    /// band-limited fields of this degree.
    pub fn max_degree(&self) -> usize {
        (self.nlat - 1).min((self.nlon - 1) / 2)
    }
}

/// Natural logarithms of k! for k = 0..n.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for k in 1..=n {
        t[k] = t[k - 1] + (k as f64).ln();
    }
    t
}

fn jacobi(k: usize, a: f64, b: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for n in 2..=k {
        let n = n as f64;
        let c = 2.0 * n + a + b;
        let a1 = 2.0 * n * (n + a + b) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b);
        let a3 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * c;
        let p2 = (a2 * p1 - a3 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Wigner small-d `d^j_{m',m}(θ)` with doubled arguments.
pub fn wigner_d(j2: i32, mp2: i32, m2: i32, theta: f64) -> f64 {
    let lf = ln_factorials((j2 + 2).max(2) as usize);
    wigner_d_with(&lf, j2, mp2, m2, theta)
}

fn wigner_d_with(lf: &[f64], j2: i32, mp2: i32, m2: i32, theta: f64) -> f64 {
    if mp2.abs() > j2 || m2.abs() > j2 {
        return 0.0;
    }
    let cands = [(j2 + m2) / 2, (j2 - m2) / 2, (j2 + mp2) / 2, (j2 - mp2) / 2];
    let mut which = 0;
    for (i, c) in cands.iter().enumerate() {
        if *c < cands[which] {
            which = i;
        }
    }
    let k = cands[which];
    let (a, lam) = match which {
        0 => ((mp2 - m2) / 2, (mp2 - m2) / 2),
        1 => ((m2 - mp2) / 2, 0),
        2 => ((m2 - mp2) / 2, 0),
        _ => ((mp2 - m2) / 2, (mp2 - m2) / 2),
    };
    let b = j2 - 2 * k - a;
    let (ku, au, bu) = (k as usize, a as usize, b as usize);
    let twoj_k = (j2 - k) as usize;
    let ln_c1 = lf[twoj_k] - lf[ku + au] - lf[twoj_k - ku - au];
    let ln_c2 = lf[ku + bu] - lf[bu] - lf[ku];
    let c = (0.5 * (ln_c1 - ln_c2)).exp();
    let sign = if lam.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let (sh, ch) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    sign * c * sh.powi(a) * ch.powi(b) * jacobi(ku, a as f64, b as f64, theta.cos())
}

/// Value of `sY_lm(θ, φ)` (doubled arguments).
pub fn spin_harmonic(s2: i32, l2: i32, m2: i32, theta: f64, phi: f64) -> Complex64 {
    let norm = ((l2 as f64 + 1.0) / (4.0 * PI)).sqrt();
    let d = wigner_d(l2, m2, -s2, theta);
    Complex64::from_polar(norm * d, 0.5 * m2 as f64 * phi)
}

/// Coefficient vector of a spin-`s2/2` field truncated at degree `l2max/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinCoeffs {
    pub s2: i32,
    pub l2max: i32,
    pub data: Vec<Complex64>,
}

impl SpinCoeffs {
    pub fn zeros(s2: i32, l2max: i32) -> Self {
        let n = layout_len(s2, l2max);
        SpinCoeffs {
            s2,
            l2max,
            data: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn l2min(&self) -> i32 {
        self.s2.abs()
    }

    /// Index of (l2, m2) in `data`.
    #[inline]
    pub fn index(&self, l2: i32, m2: i32) -> usize {
        layout_offset(self.s2, l2) + ((m2 + l2) / 2) as usize
    }

    pub fn get(&self, l2: i32, m2: i32) -> Complex64 {
        if l2 < self.l2min() || l2 > self.l2max || m2.abs() > l2 {
            return Complex64::new(0.0, 0.0);
        }
        self.data[self.index(l2, m2)]
    }

    /// Iterate over (l2, m2, index).
    pub fn modes(&self) -> impl Iterator<Item = (i32, i32, usize)> + '_ {
        let s2 = self.s2;
        (0..)
            .map(move |n| s2.abs() + 2 * n)
            .take_while(move |l2| *l2 <= self.l2max)
            .flat_map(move |l2| (0..=l2).map(move |i| (l2, -l2 + 2 * i)))
            .map(move |(l2, m2)| (l2, m2, self.index(l2, m2)))
    }

    /// `ð⁺`: spin s → s+1.
    pub fn raise(&self) -> SpinCoeffs {
        let mut out = SpinCoeffs::zeros(self.s2 + 2, self.l2max);
        for (l2, m2, i) in self.modes() {
            let f = ((l2 - self.s2) * (l2 + self.s2 + 2)) as f64 / 4.0;
            if f > 0.0 && l2 >= out.l2min() {
                let j = out.index(l2, m2);
                out.data[j] = self.data[i] * f.sqrt();
            }
        }
        out
    }

    /// `ð⁻`: spin s → s−1.
    pub fn lower(&self) -> SpinCoeffs {
        let mut out = SpinCoeffs::zeros(self.s2 - 2, self.l2max);
        for (l2, m2, i) in self.modes() {
            let f = ((l2 + self.s2) * (l2 - self.s2 + 2)) as f64 / 4.0;
            if f > 0.0 && l2 >= out.l2min() {
                let j = out.index(l2, m2);
                out.data[j] = -self.data[i] * f.sqrt();
            }
        }
        out
    }

    /// Multiply each coefficient by `f(l)` (l undoubled).
    pub fn scale_by_degree(&mut self, f: impl Fn(f64) -> f64) {
        let modes: Vec<_> = self.modes().collect();
        for (l2, _, i) in modes {
            self.data[i] *= f(0.5 * l2 as f64);
        }
    }

    /// Largest coefficient magnitude among degrees above `l2` (tail monitor).
    pub fn tail_above(&self, l2: i32) -> f64 {
        self.modes()
            .filter(|(l, _, _)| *l > l2)
            .map(|(_, _, i)| self.data[i].norm())
            .fold(0.0, f64::max)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Evaluate the expansion at an arbitrary point of the unit sphere.
    pub fn eval(&self, theta: f64, phi: f64) -> Complex64 {
        let lf = ln_factorials((self.l2max + 4) as usize);
        let norm_base = 1.0 / (4.0 * PI);
        let mut acc = Complex64::new(0.0, 0.0);
        for (l2, m2, i) in self.modes() {
            let c = self.data[i];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let d = wigner_d_with(&lf, l2, m2, -self.s2, theta);
            let norm = ((l2 as f64 + 1.0) * norm_base).sqrt();
            acc += c * Complex64::from_polar(norm * d, 0.5 * m2 as f64 * phi);
        }
        acc
    }
}

fn layout_offset(s2: i32, l2: i32) -> usize {
    let lmin2 = s2.abs();
    let n = ((l2 - lmin2) / 2) as usize;
    n * (lmin2 as usize + 1) + n * n.saturating_sub(1)
}

fn layout_len(s2: i32, l2max: i32) -> usize {
    if l2max < s2.abs() {
        return 0;
    }
    let l2top = l2max - (l2max - s2.abs()).rem_euclid(2);
    layout_offset(s2, l2top + 2)
}

/// Analysis/synthesis for one spin weight and degree cutoff.
pub struct SpinTransform {
    grid: Arc<Grid>,
    s2: i32,
    l2max: i32,
    /// `tables[mi][j][n]`: θ-part of sY_lm at node j, l2 = l2min(m) + 2n.
    tables: Vec<Vec<Vec<f64>>>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpinTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpinTransform")
            .field("s2", &self.s2)
            .field("l2max", &self.l2max)
            .finish()
    }
}

impl SpinTransform {
    /// `l2max` is the doubled degree cutoff; it is rounded down to the
    /// parity of `s2`.
    pub fn new(grid: Arc<Grid>, s2: i32, l2max: i32) -> Self {
        let l2max = l2max - (l2max - s2.abs()).rem_euclid(2);
        assert!(
            (l2max as usize) < grid.nlon,
            "longitude grid too coarse for degree {}",
            l2max as f64 / 2.0
        );
        let lf = ln_factorials((l2max + 4).max(2) as usize);
        let mut tables = Vec::new();
        let par = s2.rem_euclid(2);
        let mut m2 = -l2max;
        while m2 <= l2max {
            let l2lo = s2.abs().max(m2.abs());
            let l2lo = l2lo + (l2lo - par).rem_euclid(2);
            let mut per_j = Vec::with_capacity(grid.nlat);
            for j in 0..grid.nlat {
                let mut row = Vec::new();
                let mut l2 = l2lo;
                while l2 <= l2max {
                    let norm = ((l2 as f64 + 1.0) / (4.0 * PI)).sqrt();
                    row.push(norm * wigner_d_with(&lf, l2, m2, -s2, grid.theta[j]));
                    l2 += 2;
                }
                per_j.push(row);
            }
            tables.push(per_j);
            m2 += 2;
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(grid.nlon);
        let ifft = planner.plan_fft_inverse(grid.nlon);
        SpinTransform {
            grid,
            s2,
            l2max,
            tables,
            fft,
            ifft,
        }
    }

    pub fn s2(&self) -> i32 {
        self.s2
    }

    pub fn l2max(&self) -> i32 {
        self.l2max
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn half_shift(&self) -> f64 {
        0.5 * self.s2.rem_euclid(2) as f64
    }

    /// Grid samples → coefficients (exact for band-limited input).
    pub fn analyze(&self, values: &[Complex64]) -> SpinCoeffs {
        let g = &*self.grid;
        assert_eq!(values.len(), g.len());
        let shift = self.half_shift();
        let dphi = 2.0 * PI / g.nlon as f64;
        let mut out = SpinCoeffs::zeros(self.s2, self.l2max);
        let mut buf = vec![Complex64::new(0.0, 0.0); g.nlon];
        for j in 0..g.nlat {
            for k in 0..g.nlon {
                buf[k] = values[g.index(j, k)] * Complex64::from_polar(1.0, -shift * g.phi[k]);
            }
            self.fft.process(&mut buf);
            let wj = g.gauss_weights[j] * dphi;
            for (mi, table) in self.tables.iter().enumerate() {
                let m2 = -self.l2max + 2 * mi as i32;
                let mint = ((m2 as f64 / 2.0) - shift).round() as i64;
                let f = buf[mint.rem_euclid(g.nlon as i64) as usize] * wj;
                let row = &table[j];
                let l2lo = self.l2max - 2 * (row.len() as i32 - 1);
                for (n, t) in row.iter().enumerate() {
                    let idx = out.index(l2lo + 2 * n as i32, m2);
                    out.data[idx] += f * *t;
                }
            }
        }
        out
    }

    /// Coefficients → grid samples.
    pub fn synthesize(&self, coeffs: &SpinCoeffs) -> Vec<Complex64> {
        let g = &*self.grid;
        assert_eq!(coeffs.s2, self.s2);
        let shift = self.half_shift();
        let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); g.nlon];
        for j in 0..g.nlat {
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            for (mi, table) in self.tables.iter().enumerate() {
                let m2 = -self.l2max + 2 * mi as i32;
                let mint = ((m2 as f64 / 2.0) - shift).round() as i64;
                let row = &table[j];
                let l2lo = self.l2max - 2 * (row.len() as i32 - 1);
                let mut acc = Complex64::new(0.0, 0.0);
                for (n, t) in row.iter().enumerate() {
                    acc += coeffs.get(l2lo + 2 * n as i32, m2) * *t;
                }
                buf[mint.rem_euclid(g.nlon as i64) as usize] += acc;
            }
            self.ifft.process(&mut buf);
            for k in 0..g.nlon {
                out[g.index(j, k)] = buf[k] * Complex64::from_polar(1.0, shift * g.phi[k]);
            }
        }
        out
    }
}
