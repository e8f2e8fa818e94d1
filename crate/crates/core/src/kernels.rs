//! Bessel kernels of the GL(3) Kuznetsov formula for the minimal K-type of
//! weight `d`.
//!
//! Two independent evaluations are provided.  The series path combines the
//! power-series solutions
//!
//! ```text
//! J_wl(y, mu) = |X1|^{1-mu3} |X2|^{1+mu1} sum_{n1,n2} G(n1+n2+mu1-mu3+1) X1^n1 X2^n2
//!               / prod_i G(n1+mu_i-mu3+1) G(n2+mu1-mu_i+1),      X_i = 4 pi^2 y_i,
//! J_w4(y, mu) = |Z|^{1-mu3} sum_n (-i Z)^n / (n! G(n+1+mu1-mu3) G(n+1+mu2-mu3)),
//!               Z = 8 pi^3 y1,
//! ```
//!
//! with `mu = mu(r)` permuted by Weyl elements, into
//!
//! ```text
//! 4 pi cos pi(d/2+3r) K_w4(y; r) = (-e1 i)^d J_w4(y, mu^w4) exp(-e1 i pi (h-3r)/2)
//!                                  - (-e1 i)^d J_w4(y, mu),
//! K_w5(y; r) = K_w4((-y2, y1); -r),
//! -4 pi cos pi(d/2+3r) K_wl(y; r) = [e1 = -1] e2^d J_wl(y, mu^w4) + [e2 = -1] (-e1)^d J_wl(y, mu)
//!                                  - [e1 e2 = -1] (-e1)^d J_wl(y, mu^w3),
//! ```
//!
//! where `e = (sgn y1, sgn y2)` and `h = (d-1)/2`.  The Mellin-Barnes path
//! integrates
//!
//! ```text
//! K_wl(y; r) = |y2/y1|^r / (4 pi^2) int int |X1|^{1-s1} |X2|^{1-s2} B^e(s, r) Q(s1) Q(s2),
//! K_w4(y; r) = (e1 i)^d / (4 pi^2) int |Z|^{1-r-s} Q(s) G(s+3r) exp(e1 i pi (s+3r)/2),
//! ```
//!
//! with `Q(s) = G(h+s)/G(h+1-s)` and `B^{--} = (-1)^d B(s1+3r, s2-3r)`,
//! `B^{-+} = B(s2-3r, 1-s1-s2)`, `B^{+-} = B(s1+3r, 1-s1-s2)`, `B^{++} = 0`.
//! These integrals do not converge absolutely on vertical lines, so they are
//! taken along parabolic loops opening to the left.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{finite, Error, Result};
use crate::numerics::ddmath::{self as dd, Dd};
use crate::numerics::gamma::{ln_gamma, ln_rgamma, near_gamma_pole};
use crate::numerics::hankel::LoopContour;
use crate::weyl_group::{Signs, Weyl};
use crate::whittaker::SpectralPoint;
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Threshold below which `cos pi(d/2 + 3r)` counts as zero.
pub const PREFACTOR_FLOOR: f64 = 1e-8;

/// Hard cap on the number of series terms (or diagonals).
const MAX_TERMS: usize = 4000;

/// Torus point with signs: `y = v_{e1,e2} diag(|y1 y2|, |y1|, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedTorusPoint {
    pub y1: f64,
    pub y2: f64,
}

impl SignedTorusPoint {
    pub fn new(y1: f64, y2: f64) -> Result<Self> {
        if !(y1.is_finite() && y2.is_finite()) || y1 == 0.0 || y2 == 0.0 {
            return Err(Error::InvalidArgument(format!("signed torus point ({y1}, {y2}) needs nonzero entries")));
        }
        Ok(Self { y1, y2 })
    }

    /// `(|y1|, |y2|)` with the sign pattern `e`.
    pub fn from_signs(e: Signs, a1: f64, a2: f64) -> Result<Self> {
        Self::new(e.0 as f64 * a1.abs(), e.1 as f64 * a2.abs())
    }

    pub fn signs(&self) -> Signs {
        (sgn(self.y1), sgn(self.y2))
    }

    /// Coordinate swap `y -> y^iota`.
    pub fn iota(&self) -> Self {
        Self { y1: self.y2, y2: self.y1 }
    }

    /// `v_{-+} y^iota = (-y2, y1)`, the argument at which `K_w5` reads `K_w4`.
    pub fn w5_argument(&self) -> Self {
        Self { y1: -self.y2, y2: self.y1 }
    }
}

fn sgn(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// Weyl elements carrying a Kuznetsov kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KernelTag {
    I,
    W4,
    W5,
    Wl,
}

impl KernelTag {
    pub const ALL: [KernelTag; 4] = [KernelTag::I, KernelTag::W4, KernelTag::W5, KernelTag::Wl];

    pub fn weyl(self) -> Weyl {
        match self {
            KernelTag::I => Weyl::I,
            KernelTag::W4 => Weyl::W4,
            KernelTag::W5 => Weyl::W5,
            KernelTag::Wl => Weyl::Wl,
        }
    }

    pub fn name(self) -> &'static str {
        self.weyl().name()
    }
}

impl fmt::Display for KernelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<Weyl>()? {
            Weyl::I => Ok(KernelTag::I),
            Weyl::W4 => Ok(KernelTag::W4),
            Weyl::W5 => Ok(KernelTag::W5),
            Weyl::Wl => Ok(KernelTag::Wl),
            w => Err(Error::InvalidArgument(format!("no Kuznetsov kernel is attached to {w}"))),
        }
    }
}

/// `Q(d, s) = G((d-1)/2 + s) / G((d+1)/2 - s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QFactor {
    pub d: usize,
    pub s: C64,
}

impl QFactor {
    pub fn ln_value(&self) -> Result<Option<C64>> {
        let h = (self.d as f64 - 1.0) / 2.0;
        let num = ln_gamma(self.s + h)?;
        Ok(ln_rgamma(C64::new(h + 1.0, 0.0) - self.s).map(|l| num + l))
    }

    pub fn value(&self) -> Result<C64> {
        Ok(self.ln_value()?.map_or(C64::new(0.0, 0.0), |l| l.exp()))
    }
}

/// `ln |x|^z = z ln |x|` as a complex exponent applied to a real base.
fn abs_pow(x: f64, z: C64) -> C64 {
    (z * x.abs().ln()).exp()
}

/// Number of leading `n >= 0` at which `1 / G(x + 1 + n)` vanishes.
fn zero_run(x: Dd) -> usize {
    let x = dd::to_c64(x);
    if near_gamma_pole(x + 1.0, 1e-10) {
        (1.0 - (x.re + 1.0).round()) as usize
    } else {
        0
    }
}

fn dd_pow(x: Dd, k: usize) -> Dd {
    (0..k).fold(dd::dd_real(1.0), |acc, _| acc * x)
}

/// Power series `J_wl(y, mu)`.
///
/// The coefficients are a constant gamma ratio times Pochhammer quotients.
/// Near `|4 pi^2 y| = 40` single terms exceed the sum by ten orders of
/// magnitude and the kernel combinations cancel further, so everything is
/// carried in double-double arithmetic.  When a denominator gamma vanishes
/// for the first few indices the sum is restarted past those rows.  A
/// numerator pole is allowed only where at least two denominator gammas
/// vanish with it, which is the case for every Weyl permutation of `mu(r)`.
pub fn j_wl_series(mu: [C64; 3], y: SignedTorusPoint, tol: f64) -> Result<C64> {
    finite(dd::to_c64(j_wl_dd(mu.map(dd::dd), y, tol)?), "J_wl series")
}

fn j_wl_dd(mu: [Dd; 3], y: SignedTorusPoint, tol: f64) -> Result<Dd> {
    let x1 = 4.0 * PI * PI * y.y1;
    let x2 = 4.0 * PI * PI * y.y2;
    let one = dd::dd_real(1.0);
    let a = mu[0] - mu[2];
    let b: [Dd; 3] = std::array::from_fn(|i| mu[i] - mu[2]);
    let c: [Dd; 3] = std::array::from_fn(|i| mu[0] - mu[i]);
    let runs_b = b.map(zero_run);
    let runs_c = c.map(zero_run);
    let k1 = runs_b.iter().copied().max().unwrap_or(0);
    let k2 = runs_c.iter().copied().max().unwrap_or(0);
    // poles of G(a + 1 + m) sit at m < poles; each needs two vanishing denominators
    let poles = zero_run(a);
    for m in 0..poles {
        for n1 in 0..=m {
            let n2 = m - n1;
            let zeros = runs_b.iter().filter(|&&k| n1 < k).count() + runs_c.iter().filter(|&&k| n2 < k).count();
            if zeros < 2 {
                return Err(Error::DegenerateParameter(format!(
                    "J_wl: numerator pole at index ({n1}, {n2}) is not cancelled"
                )));
            }
        }
    }
    if k1 + k2 < poles {
        return Err(Error::DegenerateParameter("J_wl: numerator poles outside the vanishing rows".into()));
    }
    // shifted parameters: n1 = k1 + p, n2 = k2 + q
    let a1 = a + dd::dd_real((k1 + k2) as f64 + 1.0);
    let b1 = b.map(|z| z + dd::dd_real(k1 as f64 + 1.0));
    let c1 = c.map(|z| z + dd::dd_real(k2 as f64 + 1.0));
    let mut den = one;
    for z in b1.iter().chain(c1.iter()) {
        den *= dd::gamma(*z);
    }
    let shifted = dd_pow(dd::dd_real(x1), k1) * dd_pow(dd::dd_real(x2), k2);
    let constant = dd::cdiv(dd::gamma(a1) * shifted, den);
    let (dx1, dx2) = (dd::dd_real(x1), dd::dd_real(x2));
    let guard = 2.0 * x1.abs().max(x2.abs());
    // cur[p] holds the term (p, m - p) of the current diagonal m
    let mut cur: Vec<Dd> = vec![one];
    let mut total = dd::dd_real(0.0);
    let mut small = 0;
    for m in 0..MAX_TERMS {
        let mut diag = dd::dd_real(0.0);
        for t in &cur {
            diag += *t;
        }
        total += diag;
        if dd::norm(diag) <= tol * dd::norm(total) {
            small += 1;
        } else {
            small = 0;
        }
        if small >= 3 && m as f64 > guard {
            let pre = dd::abs_pow(x1, one - mu[2]) * dd::abs_pow(x2, mu[0] + one);
            return Ok(pre * constant * total);
        }
        let mf = TwoFloat::from(m as f64);
        let mut next = Vec::with_capacity(cur.len() + 1);
        for (p, t) in cur.iter().enumerate() {
            let q = TwoFloat::from((m - p) as f64);
            let mut d = one;
            for ci in &c1 {
                d *= *ci + q;
            }
            next.push(dd::cdiv(*t * (a1 + mf) * dx2, d));
        }
        let mut d = one;
        for bi in &b1 {
            d *= *bi + mf;
        }
        next.push(dd::cdiv(cur[m] * (a1 + mf) * dx1, d));
        cur = next;
    }
    Err(Error::NonConvergent { what: "J_wl series".into(), iterations: MAX_TERMS })
}

/// Power series `J_w4(y, mu)`; only `y1` enters.
pub fn j_w4_series(mu: [C64; 3], y1: f64, tol: f64) -> Result<C64> {
    finite(dd::to_c64(j_w4_dd(mu.map(dd::dd), y1, tol)?), "J_w4 series")
}

fn j_w4_dd(mu: [Dd; 3], y1: f64, tol: f64) -> Result<Dd> {
    if !y1.is_finite() || y1 == 0.0 {
        return Err(Error::InvalidArgument(format!("J_w4 needs a nonzero y1, got {y1}")));
    }
    let z = 8.0 * PI * PI * PI * y1;
    let one = dd::dd_real(1.0);
    let a = mu[0] - mu[2];
    let b = mu[1] - mu[2];
    // restart past the indices where 1/G(n + 1 + a) or 1/G(n + 1 + b) vanishes
    let k = zero_run(a).max(zero_run(b));
    let shift = dd::dd_real(k as f64 + 1.0);
    let (a1, b1, n1) = (a + shift, b + shift, shift);
    let step = dd::dd(C64::new(0.0, -z));
    let constant = dd::cdiv(dd_pow(step, k), dd::gamma(a1) * dd::gamma(b1) * dd::gamma(n1));
    let guard = 2.0 * z.abs();
    let mut term = one;
    let mut total = dd::dd_real(0.0);
    let mut small = 0;
    for n in 0..MAX_TERMS {
        total += term;
        if dd::norm(term) <= tol * dd::norm(total) {
            small += 1;
        } else {
            small = 0;
        }
        if small >= 3 && n as f64 > guard {
            return Ok(dd::abs_pow(z, one - mu[2]) * constant * total);
        }
        let nf = TwoFloat::from(n as f64);
        term = dd::cdiv(term * step, (a1 + nf) * (b1 + nf) * (n1 + nf));
    }
    Err(Error::NonConvergent { what: "J_w4 series".into(), iterations: MAX_TERMS })
}

/// `cos pi(d/2 + 3r)`, rejected when it is too small to divide by.
pub fn kernel_prefactor(p: &SpectralPoint) -> Result<C64> {
    let c = (C64::new(PI * p.d as f64 / 2.0, 0.0) + p.r * (3.0 * PI)).cos();
    if c.norm() < PREFACTOR_FLOOR {
        return Err(Error::DegeneratePrefactor(format!("cos pi(d/2 + 3r) = {c} at d = {}, r = {}", p.d, p.r)));
    }
    Ok(c)
}

fn ipow(z: C64, n: usize) -> C64 {
    (0..n).fold(C64::new(1.0, 0.0), |acc, _| acc * z)
}

fn sign_pow(e: i8, d: usize) -> f64 {
    if e < 0 && d % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn kw4_series(p: &SpectralPoint, y1: f64, tol: f64) -> Result<C64> {
    let cos = kernel_prefactor(p)?;
    let mu = p.mu().map(dd::dd);
    let e = sgn(y1) as f64;
    // exp(-e i pi (h - 3r) / 2) with the argument kept in double-double
    let arg = dd::dd_real(p.h()) - dd::dd(p.r) * TwoFloat::from(3.0);
    let phase = dd::cexp(arg * dd::dd(C64::new(0.0, -e)) * (twofloat::consts::FRAC_PI_2));
    let a = j_w4_dd(Weyl::W4.act(mu), y1, tol)?;
    let b = j_w4_dd(mu, y1, tol)?;
    let unit = ipow(-I * e, p.d);
    finite(unit * dd::to_c64(a * phase - b) / (cos * (4.0 * PI)), "K_w4")
}

fn kwl_series(p: &SpectralPoint, y: SignedTorusPoint, tol: f64) -> Result<C64> {
    let (e1, e2) = y.signs();
    if e1 > 0 && e2 > 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let cos = kernel_prefactor(p)?;
    let mu = p.mu().map(dd::dd);
    let d = p.d;
    let mut acc = dd::dd_real(0.0);
    if e1 < 0 {
        acc += j_wl_dd(Weyl::W4.act(mu), y, tol)? * TwoFloat::from(sign_pow(e2, d));
    }
    if e2 < 0 {
        acc += j_wl_dd(mu, y, tol)? * TwoFloat::from(sign_pow(-e1, d));
    }
    if e1 * e2 < 0 {
        acc -= j_wl_dd(Weyl::W3.act(mu), y, tol)? * TwoFloat::from(sign_pow(-e1, d));
    }
    finite(-dd::to_c64(acc) / (cos * (4.0 * PI)), "K_wl")
}

/// Kernel `K_w(y; r)` from the power series.
pub fn kernel_eval_series(tag: KernelTag, p: &SpectralPoint, y: SignedTorusPoint, tol: f64) -> Result<C64> {
    match tag {
        KernelTag::I => Ok(C64::new(1.0, 0.0)),
        KernelTag::W4 => kw4_series(p, y.y1, tol),
        KernelTag::W5 => kw4_series(&p.with_r(-p.r), y.w5_argument().y1, tol),
        KernelTag::Wl => kwl_series(p, y, tol),
    }
}

/// Loop contours and trapezoid step for a Mellin-Barnes kernel integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelContour {
    pub loops: [LoopContour; 2],
    pub step: f64,
}

/// Largest `|ln X|` the automatic contour is sized for.
fn decay_radius(log_x: f64, tol: f64) -> f64 {
    // the integrand decays at least like X^R / G(R)^2 as Re s -> -R
    let target = (1.0 / tol).ln() + 12.0;
    let mut r: f64 = 4.0;
    while 2.0 * (r * r.ln() - r) - r * log_x.max(0.0) < target {
        r += 1.0;
    }
    r
}

fn make_loop(sigma: f64, c: f64, left: &[C64], radius: f64) -> (LoopContour, f64) {
    // pick the curvature so that every left pole keeps half its vertical-line clearance
    let mut a: f64 = 1.0;
    for p in left {
        let u = p.im / c;
        if u != 0.0 {
            a = a.min((sigma - p.re) / (2.0 * u * u));
        }
    }
    // clearance in the parameter u, via the speed |s'(u)| at each pole height
    let mut delta = f64::INFINITY;
    for p in left {
        let u = p.im / c;
        let speed = (c * c + 4.0 * a * a * u * u).sqrt();
        let gap = sigma - a * u * u - p.re;
        delta = delta.min(gap / speed);
    }
    let u_max = ((radius + sigma) / a).sqrt();
    (LoopContour { sigma, c, a, u_max }, delta)
}

impl KernelContour {
    /// Automatic contour for `tag` at sign pattern `e` covering `|X| <= x_max`.
    pub fn auto(tag: KernelTag, p: &SpectralPoint, e: Signs, x_max: f64, tol: f64) -> Result<Self> {
        let h = p.h();
        let r3 = p.r * 3.0;
        let q_pole = C64::new(-h, 0.0);
        let radius = decay_radius(x_max.ln(), tol);
        let c = 3.0;
        let digits = (1.0 / tol).ln() + 6.0;
        match tag {
            KernelTag::W4 | KernelTag::W5 => {
                let r3 = if tag == KernelTag::W5 { -r3 } else { r3 };
                let (l, delta) = make_loop(1.0, c, &[q_pole, -r3], radius);
                Ok(Self { loops: [l, l], step: 2.0 * PI * delta / digits })
            }
            KernelTag::Wl => {
                let mixed = e.0 != e.1;
                let sigma = if mixed { 0.3 } else { 0.5 };
                let mut left1 = vec![q_pole];
                let mut left2 = vec![q_pole];
                if e.0 < 0 && e.1 < 0 || e.0 > 0 {
                    left1.push(-r3);
                }
                if e.0 < 0 && e.1 < 0 || e.1 > 0 {
                    left2.push(r3);
                }
                let (l1, d1) = make_loop(sigma, c, &left1, radius);
                let (l2, d2) = make_loop(sigma, c, &left2, radius);
                let mut delta = d1.min(d2);
                if mixed {
                    // G(1 - s1 - s2) has its first pole at s1 + s2 = 1
                    delta = delta.min((1.0 - 2.0 * sigma) / (2.0 * c));
                }
                Ok(Self { loops: [l1, l2], step: 2.0 * PI * delta / digits })
            }
            KernelTag::I => Err(Error::InvalidArgument("K_I has no integral representation".into())),
        }
    }
}

fn nodes(l: &LoopContour, h: f64) -> Vec<(C64, C64, f64)> {
    let n = (l.u_max / h).ceil() as i64;
    (-n..=n)
        .map(|k| {
            let (s, ds) = l.point(k as f64 * h);
            (s, ds, if k % 2 == 0 { 1.0 } else { 0.0 })
        })
        .collect()
}

/// Step-halving test for the trapezoid rule on analytic integrands: the
/// error roughly squares when the step halves, so the finer value is accepted
/// once the two differ by less than `0.1 sqrt(tol)`.
fn converged(fine: &[C64], coarse: &[C64], tol: f64) -> bool {
    fine.iter().zip(coarse).all(|(f, c)| (f - c).norm() <= 0.1 * tol.sqrt() * f.norm().max(1e-300))
}

/// Upper bound for `ln |G(z)|` when `Re z > 0`.
fn ln_gamma_bound(x: f64) -> f64 {
    if x < 1.0 {
        -x.ln()
    } else {
        (x - 0.5) * x.ln() - x + 0.918_938_533_204_672_8 + 1.0 / (12.0 * x)
    }
}

/// Evaluate `K_w4` by its loop integral at several `y1` of one sign.
fn kw4_mb_many(p: &SpectralPoint, y1s: &[f64], contour: &KernelContour, tol: f64) -> Result<Vec<C64>> {
    let e = sgn(y1s[0]) as f64;
    let d = p.d;
    let h = p.h();
    let r3 = p.r * 3.0;
    let l = contour.loops[0];
    l.check(&[C64::new(-h, 0.0), -r3], &[], 1e-3)?;
    let ln_z: Vec<f64> = y1s.iter().map(|&y| (8.0 * PI * PI * PI * y.abs()).ln()).collect();
    let mut step = contour.step;
    for _ in 0..4 {
        let nodes = nodes(&l, step / 2.0);
        let mut fine = vec![C64::new(0.0, 0.0); y1s.len()];
        let mut coarse = vec![C64::new(0.0, 0.0); y1s.len()];
        for &(s, ds, even) in &nodes {
            let Some(lq) = (QFactor { d, s }).ln_value()? else { continue };
            let common = lq + ln_gamma(s + r3)? + I * (e * PI / 2.0) * (s + r3) + ds.ln();
            for (k, &lz) in ln_z.iter().enumerate() {
                let v = (common + (C64::new(1.0, 0.0) - p.r - s) * lz).exp();
                fine[k] += v;
                coarse[k] += v * even;
            }
        }
        let scale = ipow(I * e, d) / (4.0 * PI * PI) / C64::new(0.0, 2.0 * PI);
        let fine: Vec<C64> = fine.iter().map(|v| v * scale * (step / 2.0)).collect();
        let coarse: Vec<C64> = coarse.iter().map(|v| v * scale * step).collect();
        if converged(&fine, &coarse, tol) {
            for v in &fine {
                finite(*v, "K_w4 loop integral")?;
            }
            return Ok(fine);
        }
        step /= 2.0;
    }
    Err(Error::NonConvergent { what: "K_w4 loop integral".into(), iterations: 4 })
}

/// Evaluate `K_wl` by its double loop integral at several points of one sign pattern.
fn kwl_mb_many(p: &SpectralPoint, ys: &[SignedTorusPoint], contour: &KernelContour, tol: f64) -> Result<Vec<C64>> {
    let (e1, e2) = ys[0].signs();
    if e1 > 0 && e2 > 0 {
        return Ok(vec![C64::new(0.0, 0.0); ys.len()]);
    }
    let d = p.d;
    let h = p.h();
    let r3 = p.r * 3.0;
    let one = C64::new(1.0, 0.0);
    let both = e1 < 0 && e2 < 0;
    let [l1, l2] = contour.loops;
    let q = C64::new(-h, 0.0);
    match (e1 < 0, e2 < 0) {
        (true, true) => {
            l1.check(&[q, -r3], &[], 1e-3)?;
            l2.check(&[q, r3], &[], 1e-3)?;
        }
        (true, false) => {
            l1.check(&[q], &[], 1e-3)?;
            l2.check(&[q, r3], &[], 1e-3)?;
        }
        _ => {
            l1.check(&[q, -r3], &[], 1e-3)?;
            l2.check(&[q], &[], 1e-3)?;
        }
    }
    if !both && l1.sigma + l2.sigma >= 1.0 {
        return Err(Error::ContourSeparation("abscissae must satisfy sigma1 + sigma2 < 1".into()));
    }
    // one-dimensional factors of the integrand, the coupling is handled per pair
    let side = |s: C64, first: bool| -> Result<Option<C64>> {
        let Some(lq) = (QFactor { d, s }).ln_value()? else { return Ok(None) };
        let extra = match (both, e1 < 0, first) {
            (true, _, true) => ln_gamma(s + r3)?,
            (true, _, false) => ln_gamma(s - r3)?,
            // B^{-+} = G(s2 - 3r) G(1 - s1 - s2) / G(1 - s1 - 3r)
            (false, true, true) => match ln_rgamma(one - s - r3) {
                Some(v) => v,
                None => return Ok(None),
            },
            (false, true, false) => ln_gamma(s - r3)?,
            // B^{+-} = G(s1 + 3r) G(1 - s1 - s2) / G(1 - s2 + 3r)
            (false, false, true) => ln_gamma(s + r3)?,
            (false, false, false) => match ln_rgamma(one - s + r3) {
                Some(v) => v,
                None => return Ok(None),
            },
        };
        Ok(Some(lq + extra))
    };
    let lx: Vec<[f64; 2]> = ys
        .iter()
        .map(|y| [(4.0 * PI * PI * y.y1.abs()).ln(), (4.0 * PI * PI * y.y2.abs()).ln()])
        .collect();
    let lx_max = [
        lx.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max),
        lx.iter().map(|v| v[1]).fold(f64::NEG_INFINITY, f64::max),
    ];
    let cutoff = tol.ln() - 25.0;
    let mut step = contour.step;
    for _ in 0..3 {
        let hf = step / 2.0;
        let build = |l: &LoopContour, first: bool| -> Result<Vec<(C64, C64, f64, f64)>> {
            let mut out = Vec::new();
            for (s, ds, even) in nodes(l, hf) {
                if let Some(v) = side(s, first)? {
                    let v = v + ds.ln();
                    // magnitude bound at the largest X in the batch
                    let lm = v.re + (1.0 - s.re) * lx_max[if first { 0 } else { 1 }].max(0.0);
                    out.push((s, v, even, lm));
                }
            }
            Ok(out)
        };
        let n1 = build(&l1, true)?;
        let n2 = build(&l2, false)?;
        let peak1 = n1.iter().map(|t| t.3).fold(f64::NEG_INFINITY, f64::max);
        let peak2 = n2.iter().map(|t| t.3).fold(f64::NEG_INFINITY, f64::max);
        // y-dependent node factors, normalised per node so that only the
        // pair exponential can be large
        let table = |nodes: &[(C64, C64, f64, f64)], axis: usize| -> Vec<(f64, Vec<C64>)> {
            nodes
                .iter()
                .map(|&(s, v, _, _)| {
                    let logs: Vec<C64> = lx.iter().map(|l| v + (one - s) * l[axis]).collect();
                    let top = logs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
                    (top, logs.iter().map(|z| (z - top).exp()).collect())
                })
                .collect()
        };
        let t1 = table(&n1, 0);
        let t2 = table(&n2, 1);
        let rows: Vec<Result<(Vec<C64>, Vec<C64>)>> = n1
            .par_iter()
            .zip(t1.par_iter())
            .map(|(&(s1, _, ev1, m1), (top1, e1s))| {
                let mut fine = vec![C64::new(0.0, 0.0); ys.len()];
                let mut coarse = vec![C64::new(0.0, 0.0); ys.len()];
                for (&(s2, _, ev2, m2), (top2, e2s)) in n2.iter().zip(&t2) {
                    let z = s1 + s2;
                    let bound = if both {
                        // |1/G(z)| <= G(1 - Re z) cosh(pi Im z) / pi when Re z < 1
                        if z.re < 0.5 {
                            ln_gamma_bound(1.0 - z.re) + PI * z.im.abs() - PI.ln()
                        } else {
                            0.0
                        }
                    } else {
                        ln_gamma_bound(1.0 - z.re)
                    };
                    if m1 + m2 + bound < peak1 + peak2 + cutoff {
                        continue;
                    }
                    let coupling = if both {
                        match ln_rgamma(z) {
                            Some(v) => v,
                            None => continue,
                        }
                    } else {
                        ln_gamma(one - z)?
                    };
                    let w = (coupling + (top1 + top2)).exp();
                    let wc = w * (ev1 * ev2);
                    for k in 0..ys.len() {
                        let v = e1s[k] * e2s[k];
                        fine[k] += w * v;
                        coarse[k] += wc * v;
                    }
                }
                Ok((fine, coarse))
            })
            .collect();
        let mut fine = vec![C64::new(0.0, 0.0); ys.len()];
        let mut coarse = vec![C64::new(0.0, 0.0); ys.len()];
        for row in rows {
            let (f, c) = row?;
            for k in 0..ys.len() {
                fine[k] += f[k];
                coarse[k] += c[k];
            }
        }
        let sign = if both { sign_pow(-1, d) } else { 1.0 };
        let tp = C64::new(0.0, 2.0 * PI);
        let scale = sign / (4.0 * PI * PI) / (tp * tp);
        let fine: Vec<C64> = ys
            .iter()
            .zip(&fine)
            .map(|(y, v)| v * scale * hf * hf * abs_pow(y.y2 / y.y1, p.r))
            .collect();
        let coarse: Vec<C64> = ys
            .iter()
            .zip(&coarse)
            .map(|(y, v)| v * scale * step * step * abs_pow(y.y2 / y.y1, p.r))
            .collect();
        if converged(&fine, &coarse, tol) {
            for v in &fine {
                finite(*v, "K_wl loop integral")?;
            }
            return Ok(fine);
        }
        step /= 2.0;
    }
    Err(Error::NonConvergent { what: "K_wl loop integral".into(), iterations: 3 })
}

/// Kernel values from the Mellin-Barnes integrals at points sharing one sign pattern.
///
/// `K_w5` is routed through `K_w4` at the swapped argument.  With `contour`
/// unset an automatic loop is sized for the batch.
pub fn kernel_eval_mb_many(
    tag: KernelTag,
    p: &SpectralPoint,
    ys: &[SignedTorusPoint],
    contour: Option<KernelContour>,
    tol: f64,
) -> Result<Vec<C64>> {
    if ys.is_empty() {
        return Ok(Vec::new());
    }
    let e = ys[0].signs();
    if ys.iter().any(|y| y.signs() != e) {
        return Err(Error::InvalidArgument("batch points must share one sign pattern".into()));
    }
    match tag {
        KernelTag::I => Ok(vec![C64::new(1.0, 0.0); ys.len()]),
        KernelTag::W4 | KernelTag::W5 => {
            let (q, y1s): (SpectralPoint, Vec<f64>) = if tag == KernelTag::W4 {
                (*p, ys.iter().map(|y| y.y1).collect())
            } else {
                (p.with_r(-p.r), ys.iter().map(|y| y.w5_argument().y1).collect())
            };
            if y1s.iter().any(|&v| sgn(v) != sgn(y1s[0])) {
                return Err(Error::InvalidArgument("batch points must share one sign pattern".into()));
            }
            let x_max = y1s.iter().map(|y| 8.0 * PI * PI * PI * y.abs()).fold(0.0, f64::max);
            let c = match contour {
                Some(c) => c,
                None => KernelContour::auto(KernelTag::W4, &q, (sgn(y1s[0]), 1), x_max, tol)?,
            };
            kw4_mb_many(&q, &y1s, &c, tol * 0.1)
        }
        KernelTag::Wl => {
            let x_max = ys.iter().map(|y| 4.0 * PI * PI * y.y1.abs().max(y.y2.abs())).fold(0.0, f64::max);
            let c = match contour {
                Some(c) => c,
                None => KernelContour::auto(tag, p, e, x_max, tol)?,
            };
            kwl_mb_many(p, ys, &c, tol * 0.1)
        }
    }
}

/// Kernel `K_w(y; r)` from its Mellin-Barnes integral.
pub fn kernel_eval_mb(tag: KernelTag, p: &SpectralPoint, y: SignedTorusPoint, contour: Option<KernelContour>, tol: f64) -> Result<C64> {
    Ok(kernel_eval_mb_many(tag, p, &[y], contour, tol)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn q_factor_at_zero() {
        let q = QFactor { d: 2, s: C64::new(0.0, 0.0) }.value().unwrap();
        assert!((q - 2.0).norm() < 1e-14);
    }

    #[test]
    fn tags_parse() {
        for t in KernelTag::ALL {
            assert_eq!(t.name().parse::<KernelTag>().unwrap(), t);
        }
        assert!("w2".parse::<KernelTag>().is_err());
    }

    #[test]
    fn long_element_vanishes_on_positive_orthant() {
        let p = SpectralPoint::imaginary(3, 0.4).unwrap();
        let y = SignedTorusPoint::new(0.2, 0.3).unwrap();
        assert_eq!(kernel_eval_series(KernelTag::Wl, &p, y, 1e-12).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(kernel_eval_mb(KernelTag::Wl, &p, y, None, 1e-10).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(kernel_eval_series(KernelTag::I, &p, y, 1e-12).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn j_wl_sign_relations() {
        for d in [2usize, 3, 4] {
            let p = SpectralPoint::imaginary(d, 0.35).unwrap();
            let mu = p.mu();
            for (y1, y2) in [(0.05, -0.1), (-0.2, 0.07), (-0.1, -0.15)] {
                let y = SignedTorusPoint::new(y1, y2).unwrap();
                let s1 = sign_pow(sgn(y1), d - 1);
                let s2 = sign_pow(sgn(y2), d - 1);
                let base = j_wl_series(mu, y, 1e-15).unwrap();
                let a = j_wl_series(Weyl::W2.act(mu), y, 1e-15).unwrap();
                assert!(rel(a, base * s2) < 1e-10, "w2 relation d={d}");
                let b = j_wl_series(Weyl::Wl.act(mu), y, 1e-15).unwrap();
                let c = j_wl_series(Weyl::W4.act(mu), y, 1e-15).unwrap();
                assert!(rel(b, c * s1) < 1e-10, "wl relation d={d}");
                let f = j_wl_series(Weyl::W5.act(mu), y, 1e-15).unwrap();
                let g = j_wl_series(Weyl::W3.act(mu), y, 1e-15).unwrap();
                assert!(rel(f, g * s1 * s2) < 1e-10, "w5 relation d={d}");
            }
        }
    }

    #[test]
    fn j_w4_relation_and_truncation() {
        for d in [2usize, 3, 5] {
            let p = SpectralPoint::imaginary(d, 0.25).unwrap();
            let mu = p.mu();
            for y1 in [0.03, -0.2] {
                let a = j_w4_series(Weyl::W5.act(mu), y1, 1e-15).unwrap();
                let b = j_w4_series(Weyl::W4.act(mu), y1, 1e-15).unwrap();
                // shifting n -> n + d - 1 in the series gives (-i sgn y1)^{d-1}
                let unit = ipow(-I * sgn(y1) as f64, d - 1);
                assert!(rel(a, unit * b) < 1e-10, "d={d} y1={y1}");
            }
        }
        // |8 pi^3 y1| = 100 needs well over a hundred terms before the tail is small
        let p = SpectralPoint::imaginary(2, 0.3).unwrap();
        let y1 = 100.0 / (8.0 * PI * PI * PI);
        let full = j_w4_series(p.mu(), y1, 1e-14).unwrap();
        let loose = j_w4_series(p.mu(), y1, 1e-8).unwrap();
        assert!((full - loose).norm() < 1e-6 * full.norm());
    }

    #[test]
    fn series_matches_loop_integral() {
        let p = SpectralPoint::imaginary(2, 0.3).unwrap();
        let y = SignedTorusPoint::new(-0.1, -0.1).unwrap();
        let a = kernel_eval_series(KernelTag::Wl, &p, y, 1e-14).unwrap();
        let b = kernel_eval_mb(KernelTag::Wl, &p, y, None, 1e-9).unwrap();
        assert!(rel(b, a) < 1e-6, "{a} {b}");
        let p = SpectralPoint::imaginary(2, 0.4).unwrap();
        let y = SignedTorusPoint::new(0.05, 1.0).unwrap();
        let a = kernel_eval_series(KernelTag::W4, &p, y, 1e-14).unwrap();
        let b = kernel_eval_mb(KernelTag::W4, &p, y, None, 1e-9).unwrap();
        assert!(rel(b, a) < 1e-6, "{a} {b}");
    }

    #[test]
    fn degenerate_prefactor_is_reported() {
        // d = 3, r = 0: cos(3 pi / 2) = 0
        let p = SpectralPoint::imaginary(3, 0.0).unwrap();
        let y = SignedTorusPoint::new(-0.1, 0.1).unwrap();
        assert!(matches!(
            kernel_eval_series(KernelTag::Wl, &p, y, 1e-12),
            Err(Error::DegeneratePrefactor(_))
        ));
    }
}
