//! Completed Whittaker functions of the minimal K-type of the generalized
//! principal series of GL(3).
//!
//! For `|m'| <= d`, `m' = e m` with `e = +-1`, `0 <= m <= d`,
//!
//! ```text
//! W_{m'}(y, r) = 2^{-d-1} pi^{-1} sqrt(C(2d, d+m)) sum_{l=0}^m e^l C(m, l)
//!     int int (2 pi y1)^{1-s1} (2 pi y2)^{1-s2} G(h+s1-r) G(h+s2+r)
//!     B((d-m+s1+2r)/2, (l+s2-2r)/2) ds / (2 pi i)^2,      h = (d-1)/2,
//! ```
//!
//! on any contour `Re s = (sigma1, sigma2)` with positive entries.  On a square
//! trapezoid grid every gamma factor depends on a single node index (the beta
//! denominator depends on `t1 + t2`, which lives on a lattice of `4J + 1`
//! values), so the integrand is assembled from one-dimensional tables.  The
//! y-dependence factors as `y1^{1-s1} y2^{1-s2}`, which lets a whole grid of
//! y-points be evaluated by two matrix products.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::gamma::{ln_gamma, ln_rgamma};
use crate::weyl_group::{sign_matrix, mat_mul, Weyl};
use crate::wigner::{wigner_d_int, DMatrix};
use crate::C64;

/// Spectral point `mu(r) = (h + r, -h + r, -2r)` with `h = (d-1)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub d: usize,
    pub r: C64,
}

impl SpectralPoint {
    pub fn new(d: usize, r: C64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("weight d = {d} must be at least 2")));
        }
        if !(r.re.is_finite() && r.im.is_finite()) {
            return Err(Error::NotFinite("spectral parameter".into()));
        }
        Ok(Self { d, r })
    }

    /// Point with purely imaginary parameter `r = i t`.
    pub fn imaginary(d: usize, t: f64) -> Result<Self> {
        Self::new(d, C64::new(0.0, t))
    }

    /// `(d - 1) / 2`.
    pub fn h(&self) -> f64 {
        (self.d as f64 - 1.0) / 2.0
    }

    pub fn mu(&self) -> [C64; 3] {
        let h = self.h();
        [self.r + h, self.r - h, -self.r * 2.0]
    }

    pub fn with_r(&self, r: C64) -> Self {
        Self { d: self.d, r }
    }
}

/// Point `y = diag(y1 y2, y1, 1)` of the positive torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    pub y1: f64,
    pub y2: f64,
}

impl TorusPoint {
    pub fn new(y1: f64, y2: f64) -> Result<Self> {
        if !(y1 > 0.0 && y2 > 0.0 && y1.is_finite() && y2.is_finite()) {
            return Err(Error::InvalidArgument(format!("torus point ({y1}, {y2}) must be positive")));
        }
        Ok(Self { y1, y2 })
    }

    /// Image `(y2, y1)` under `y -> w_l (y^{-1})^T w_l`, up to the center.
    pub fn dual(&self) -> Self {
        Self { y1: self.y2, y2: self.y1 }
    }
}

/// Row vector `(W_{-d}, ..., W_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhittakerVector {
    pub d: usize,
    pub entries: Vec<C64>,
}

impl WhittakerVector {
    pub fn get(&self, mprime: i64) -> C64 {
        self.entries[(mprime + self.d as i64) as usize]
    }

    /// Row vector times a Wigner matrix.
    pub fn times(&self, m: &DMatrix) -> WhittakerVector {
        let n = 2 * self.d + 1;
        let entries = (0..n).map(|j| (0..n).map(|i| self.entries[i] * m.data[i * n + j]).sum()).collect();
        WhittakerVector { d: self.d, entries }
    }

    pub fn max_abs_diff(&self, other: &WhittakerVector) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn lrg(z: C64) -> C64 {
    ln_rgamma(z).unwrap_or(C64::new(f64::NEG_INFINITY, 0.0))
}

/// Check that the abscissae separate the pole families of every entry.
fn check_abscissae(p: &SpectralPoint, sigma: [f64; 2]) -> Result<f64> {
    let h = p.h();
    let rr = p.r.re;
    let dist = [h + sigma[0] - rr, sigma[0] + 2.0 * rr, h + sigma[1] + rr, sigma[1] - 2.0 * rr];
    let labels = ["G(h+s1-r)", "B((d-m+s1+2r)/2, .)", "G(h+s2+r)", "B(., (l+s2-2r)/2)"];
    for (d, l) in dist.iter().zip(labels) {
        if d.abs() < crate::numerics::mb::POLE_MARGIN {
            return Err(Error::PoleOnContour { what: l.into(), distance: d.abs() });
        }
        if *d < 0.0 {
            return Err(Error::ContourSeparation(format!("factor {l} has poles right of the contour")));
        }
    }
    Ok(dist.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Precomputed quadrature of all `2d + 1` entries on one contour.
#[derive(Debug, Clone)]
pub struct WhittakerGrid {
    pub point: SpectralPoint,
    pub sigma: [f64; 2],
    pub step: f64,
    /// Imaginary parts `t_j = j h`, `|j| <= J`.
    pub nodes: Vec<f64>,
    // kernel[m' + d][j * n + k], y-independent
    kernel: Vec<Vec<C64>>,
}

impl WhittakerGrid {
    /// Build the grid for points with `|ln(2 pi y_i)| <= log_span`, accurate to
    /// about `tol` relative to the size of the integrand.
    pub fn new(p: &SpectralPoint, sigma: [f64; 2], tol: f64, log_span: f64) -> Result<Self> {
        let delta = 0.9 * check_abscissae(p, sigma)?.min(1.0);
        let lt = (1.0 / tol).ln();
        let step = 2.0 * PI * delta / (lt + 5.0 + delta * log_span.abs());
        let height = (lt + 10.0) / (PI / 2.0) + 3.0 * p.r.im.abs() + p.d as f64;
        Self::with_grid(p, sigma, step, height)
    }

    /// Build the grid with an explicit step and height.
    pub fn with_grid(p: &SpectralPoint, sigma: [f64; 2], step: f64, height: f64) -> Result<Self> {
        check_abscissae(p, sigma)?;
        let d = p.d;
        let di = d as i64;
        let (h, r) = (p.h(), p.r);
        let jmax = (height / step).ceil() as i64;
        let n = (2 * jmax + 1) as usize;
        let nodes: Vec<f64> = (-jmax..=jmax).map(|j| j as f64 * step).collect();
        let s1: Vec<C64> = nodes.iter().map(|&t| C64::new(sigma[0], t)).collect();
        let s2: Vec<C64> = nodes.iter().map(|&t| C64::new(sigma[1], t)).collect();
        let ln2pi = (2.0 * PI).ln();
        let lw = (step / (2.0 * PI)).ln();
        // one-dimensional factors (logs)
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for j in 0..n {
            a.push(ln_gamma(s1[j] + h - r)? + (1.0 - s1[j]) * ln2pi + lw);
            b.push(ln_gamma(s2[j] + h + r)? + (1.0 - s2[j]) * ln2pi + lw);
        }
        // G((d - m + s1 + 2r)/2) for m = 0..=d
        let mut am = vec![vec![C64::new(0.0, 0.0); n]; d + 1];
        for (m, row) in am.iter_mut().enumerate() {
            for j in 0..n {
                row[j] = (a[j] + ln_gamma((s1[j] + (d - m) as f64 + r * 2.0) / 2.0)?).exp();
            }
        }
        // G((l + s2 - 2r)/2) for l = 0..=d
        let mut nl = vec![vec![C64::new(0.0, 0.0); n]; d + 1];
        for (l, row) in nl.iter_mut().enumerate() {
            for k in 0..n {
                row[k] = (b[k] + ln_gamma((s2[k] + l as f64 - r * 2.0) / 2.0)?).exp();
            }
        }
        // 1 / G((q + s1 + s2)/2), q = 0..=d, on the lattice t1 + t2
        let nd = 2 * n - 1;
        let mut den = vec![vec![C64::new(0.0, 0.0); nd]; d + 1];
        for (q, row) in den.iter_mut().enumerate() {
            for (idx, v) in row.iter_mut().enumerate() {
                let t = (idx as i64 - 2 * jmax) as f64 * step;
                *v = lrg(C64::new(sigma[0] + sigma[1] + q as f64, t) / 2.0).exp();
            }
        }
        let kernel: Vec<Vec<C64>> = (-di..=di)
            .into_par_iter()
            .map(|mp| {
                let m = mp.unsigned_abs() as usize;
                let eps: f64 = if mp < 0 { -1.0 } else { 1.0 };
                let pref = binom(2 * d, d + m).sqrt() / (2f64.powi(d as i32 + 1) * PI);
                let coef: Vec<f64> = (0..=m).map(|l| pref * binom(m, l) * eps.powi(l as i32)).collect();
                let mut out = vec![C64::new(0.0, 0.0); n * n];
                for j in 0..n {
                    let aj = am[m][j];
                    for k in 0..n {
                        let mut g = C64::new(0.0, 0.0);
                        for (l, &c) in coef.iter().enumerate() {
                            g += nl[l][k] * den[d - m + l][j + k] * c;
                        }
                        out[j * n + k] = aj * g;
                    }
                }
                out
            })
            .collect();
        Ok(Self { point: *p, sigma, step, nodes, kernel })
    }

    fn powers(&self, sigma: f64, y: f64) -> Vec<C64> {
        let ly = y.ln();
        self.nodes.iter().map(|&t| ((1.0 - C64::new(sigma, t)) * ly).exp()).collect()
    }

    pub fn eval(&self, y: TorusPoint) -> WhittakerVector {
        let p1 = self.powers(self.sigma[0], y.y1);
        let p2 = self.powers(self.sigma[1], y.y2);
        let n = self.nodes.len();
        let entries = self
            .kernel
            .iter()
            .map(|ker| {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..n {
                    let row = &ker[j * n..(j + 1) * n];
                    let inner: C64 = row.iter().zip(&p2).map(|(a, b)| a * b).sum();
                    acc += inner * p1[j];
                }
                acc
            })
            .collect();
        WhittakerVector { d: self.point.d, entries }
    }

    /// Values on the tensor grid `y1s x y2s`, indexed `[i1][i2]`.
    pub fn eval_grid(&self, y1s: &[f64], y2s: &[f64]) -> Vec<Vec<WhittakerVector>> {
        let n = self.nodes.len();
        let p1: Vec<Vec<C64>> = y1s.iter().map(|&y| self.powers(self.sigma[0], y)).collect();
        let p2: Vec<Vec<C64>> = y2s.iter().map(|&y| self.powers(self.sigma[1], y)).collect();
        let nd = 2 * self.point.d + 1;
        let mut out = vec![vec![WhittakerVector { d: self.point.d, entries: vec![C64::new(0.0, 0.0); nd] }; y2s.len()]; y1s.len()];
        let per_entry: Vec<Vec<Vec<C64>>> = self
            .kernel
            .par_iter()
            .map(|ker| {
                // T[j][q] = sum_k ker[j][k] p2[q][k]
                let t: Vec<Vec<C64>> = (0..n)
                    .map(|j| {
                        let row = &ker[j * n..(j + 1) * n];
                        p2.iter().map(|pq| row.iter().zip(pq).map(|(a, b)| a * b).sum()).collect()
                    })
                    .collect();
                p1.iter()
                    .map(|pp| (0..y2s.len()).map(|q| (0..n).map(|j| t[j][q] * pp[j]).sum()).collect())
                    .collect()
            })
            .collect();
        for (e, vals) in per_entry.iter().enumerate() {
            for (i1, row) in vals.iter().enumerate() {
                for (i2, v) in row.iter().enumerate() {
                    out[i1][i2].entries[e] = *v;
                }
            }
        }
        out
    }
}

fn log_span(y: TorusPoint) -> f64 {
    (2.0 * PI * y.y1).ln().abs().max((2.0 * PI * y.y2).ln().abs())
}

/// Single entry `W_{m'}(y, r)` on the contour with abscissae `sigma`.
pub fn whittaker_entry(p: &SpectralPoint, y: TorusPoint, mprime: i64, sigma: [f64; 2], tol: f64) -> Result<C64> {
    if mprime.unsigned_abs() as usize > p.d {
        return Err(Error::InvalidArgument(format!("|m'| = {} exceeds d = {}", mprime.abs(), p.d)));
    }
    Ok(whittaker_vector(p, y, sigma, tol)?.get(mprime))
}

/// The full row vector `W(y, r)`.
pub fn whittaker_vector(p: &SpectralPoint, y: TorusPoint, sigma: [f64; 2], tol: f64) -> Result<WhittakerVector> {
    Ok(WhittakerGrid::new(p, sigma, tol, log_span(y))?.eval(y))
}

/// Completion factor `(-1)^d / pi (2 pi)^{-(d-1)/2 - 3r} G(d) G((d+1)/2 + 3r)`.
pub fn lambda_star(p: &SpectralPoint) -> Result<C64> {
    let d = p.d as f64;
    let sign = if p.d % 2 == 0 { 1.0 } else { -1.0 };
    let l = -(p.h() + p.r * 3.0) * (2.0 * PI).ln() + ln_gamma(C64::new(d, 0.0))? + ln_gamma(p.r * 3.0 + (d + 1.0) / 2.0)?;
    Ok(l.exp() * sign / PI)
}

/// Power function `p_{rho + mu}(y) = y1^{1 - mu3} y2^{1 + mu1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFunction {
    pub mu: [C64; 3],
}

impl PowerFunction {
    pub fn exponents(&self) -> [C64; 2] {
        [1.0 - self.mu[2], 1.0 + self.mu[0]]
    }

    pub fn eval(&self, y: TorusPoint) -> C64 {
        let [e1, e2] = self.exponents();
        (e1 * y.y1.ln() + e2 * y.y2.ln()).exp()
    }
}

/// Leading term `coefficient * p(y)` of a power-series expansion at `y -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingTerm {
    pub power: PowerFunction,
    pub coefficient: C64,
}

impl LeadingTerm {
    pub fn eval(&self, y: TorusPoint) -> C64 {
        self.coefficient * self.power.eval(y)
    }
}

/// The two leading terms coming from the residues at
/// `(s1, s2) = (-(d-1)/2 + r, 2r)` (`r1`) and `(-2r, -(d-1)/2 - r)` (`r2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingCoefficients {
    pub r1: LeadingTerm,
    pub r2: LeadingTerm,
}

/// `D^d(v_{--} w_l)`.
pub fn d_vmm_wl(d: usize) -> DMatrix {
    wigner_d_int(d, &mat_mul(&sign_matrix((-1, -1)), &Weyl::Wl.matrix()))
}

/// Leading coefficients of `W_{m'}(y, r)` as `y -> 0`:
/// `R1 = (-1)^d / pi D_{d,m'}(v_{--} w_l) (2 pi y1)^{(d+1)/2 - r} (2 pi y2)^{1 - 2r} G((d-1)/2 + 3r)`
/// and `R2 = delta_{m'=d} / pi (2 pi y1)^{1 + 2r} (2 pi y2)^{(d+1)/2 + r} G((d-1)/2 - 3r)`.
pub fn leading_coefficients(p: &SpectralPoint, mprime: i64) -> Result<LeadingCoefficients> {
    if p.r == C64::new(0.0, 0.0) {
        return Err(Error::DegenerateParameter("leading terms collide at r = 0".into()));
    }
    let d = p.d as i64;
    if mprime.abs() > d {
        return Err(Error::InvalidArgument(format!("|m'| = {} exceeds d = {d}", mprime.abs())));
    }
    let (h, r) = (p.h(), p.r);
    let mu = p.mu();
    let ln2pi = (2.0 * PI).ln();
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    let p1 = PowerFunction { mu: Weyl::W4.act(mu) };
    let [e1, e2] = p1.exponents();
    let c1 = d_vmm_wl(p.d).get(d, mprime) * sign / PI * ((e1 + e2) * ln2pi + ln_gamma(r * 3.0 + h)?).exp();
    let p2 = PowerFunction { mu };
    let [f1, f2] = p2.exponents();
    let c2 = if mprime == d { ((f1 + f2) * ln2pi + ln_gamma(-r * 3.0 + h)?).exp() / PI } else { C64::new(0.0, 0.0) };
    Ok(LeadingCoefficients { r1: LeadingTerm { power: p1, coefficient: c1 }, r2: LeadingTerm { power: p2, coefficient: c2 } })
}

/// Residual of the dual functional equation
/// `W(y, r) = (-1)^d W((y2, y1), -r) D^d(v_{--} w_l)`, maximised over entries.
pub fn dual_check(p: &SpectralPoint, y: TorusPoint, tol: f64) -> Result<f64> {
    let sigma = [1.0, 1.0];
    let lhs = whittaker_vector(p, y, sigma, tol)?;
    let rhs = whittaker_vector(&p.with_r(-p.r), y.dual(), sigma, tol)?.times(&d_vmm_wl(p.d));
    let sign = if p.d % 2 == 0 { 1.0 } else { -1.0 };
    Ok(lhs.entries.iter().zip(&rhs.entries).map(|(a, b)| (a - b * sign).norm()).fold(0.0, f64::max))
}
