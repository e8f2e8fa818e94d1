//! Integral transforms against the Kuznetsov kernels, Kontorovich-Lebedev
//! inversion, the geometric side of the trace formula and the quantities
//! entering the Weyl law.
//!
//! The spectral side of the trace formula needs cusp form data and is out of
//! reach; only the geometric side is assembled, together with convergence
//! diagnostics of its `c`-sums.  The spectral measure enters through the Weyl
//! main term `(3 / 2 pi) int spec^d(r) dr`.
//!
//! Integrals over `Re r = 0` are written `int F(r) dr = i int F(i t) dt` and
//! evaluated by the midpoint rule, whose nodes avoid `r = 0` where the kernels
//! of odd weight have a removable singularity.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernels::{kernel_eval_series, KernelTag, SignedTorusPoint};
use crate::kloosterman::{compatible, kloosterman_fast, CharacterIndex, Modulus};
use crate::numerics::quadrature::logistic_01;
use crate::stade::spectral_weights;
use crate::weyl_group::{Signs, SIGNS};
use crate::whittaker::{SpectralPoint, TorusPoint, WhittakerGrid, WhittakerVector};
use crate::error::finite;
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Largest number of halvings of the midpoint step.
const MAX_HALVINGS: usize = 8;

/// A test function `F(r)` on a vertical strip.
#[derive(Clone)]
pub struct TestFunction {
    f: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
    /// `F` is holomorphic for `|Re r| < delta`.
    pub delta: f64,
    /// `|F(i t)|` is negligible for `|t - center|` beyond a few multiples of this.
    pub decay: f64,
    /// Imaginary part around which `|F|` is concentrated on `i R`.
    pub center: f64,
    /// `F(conj r) = conj F(r)`, so that `F(-i t) = conj F(i t)`.
    pub reflection_real: bool,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("delta", &self.delta)
            .field("decay", &self.decay)
            .field("center", &self.center)
            .field("reflection_real", &self.reflection_real)
            .finish()
    }
}

impl TestFunction {
    pub fn new(f: impl Fn(C64) -> C64 + Send + Sync + 'static, delta: f64, decay: f64) -> Result<Self> {
        if !(delta > 0.0 && decay > 0.0) {
            return Err(Error::InvalidArgument("holomorphy width and decay scale must be positive".into()));
        }
        Ok(Self { f: Arc::new(f), delta, decay, center: 0.0, reflection_real: false })
    }

    /// Declare `F(-i t) = conj F(i t)`, which halves the work of some transforms.
    pub fn with_reflection_real(mut self) -> Self {
        self.reflection_real = true;
        self
    }

    /// Declare where `|F|` is concentrated on `i R`.
    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    /// `exp((r - c)^2)`.
    pub fn gaussian(center: C64) -> Self {
        let real = center.re == 0.0 && center.im == 0.0;
        let g = Self { f: Arc::new(move |r| ((r - center) * (r - center)).exp()), delta: f64::INFINITY, decay: 1.0, center: center.im, reflection_real: false };
        if real {
            g.with_reflection_real()
        } else {
            g
        }
    }

    /// `r^2 exp(r^2)`, even and vanishing at the origin.
    pub fn gaussian_moment() -> Self {
        Self { f: Arc::new(|r| r * r * (r * r).exp()), delta: f64::INFINITY, decay: 1.0, center: 0.0, reflection_real: true }
    }

    pub fn zero() -> Self {
        Self { f: Arc::new(|_| C64::new(0.0, 0.0)), delta: f64::INFINITY, decay: 1.0, center: 0.0, reflection_real: true }
    }

    pub fn eval(&self, r: C64) -> C64 {
        (self.f)(r)
    }

    /// Spot check of the declared decay at 10, 20 and 40 decay scales from the centre.
    pub fn check_decay(&self) -> Result<()> {
        let c = self.center;
        let vals: Vec<f64> = [10.0, 20.0, 40.0]
            .iter()
            .map(|k| {
                let t = k * self.decay;
                self.eval(C64::new(0.0, c + t)).norm().max(self.eval(C64::new(0.0, c - t)).norm())
            })
            .collect();
        let reference = self.eval(C64::new(0.0, c + self.decay)).norm().max(1e-300);
        if vals.iter().any(|v| !v.is_finite()) || vals[2] > 1e-8 * reference.max(1.0) || vals[2] > vals[0] {
            return Err(Error::InvalidArgument(format!("test function does not decay: {vals:?}")));
        }
        Ok(())
    }
}

/// `spec^d(r)`.
pub fn spec_weight(d: usize, r: C64) -> C64 {
    let h = (d as f64 - 1.0) / 2.0;
    (d as f64 - 1.0) * (h - r * 3.0) * (h + r * 3.0) / (I * 16.0 * PI.powi(4))
}

// ----- integrals along Re r = 0 -------------------------------------------

/// `int g(t) dt` over the real line for vector-valued `g`, by the midpoint
/// rule with step halving.  Nodes are taken outwards from `center` until
/// `tail` consecutive terms fall below `tol` times the running maximum.
fn midpoint_line(
    g: &(dyn Fn(f64) -> Result<Vec<C64>> + Sync),
    center: f64,
    h0: f64,
    symmetric: bool,
    tol: f64,
) -> Result<Vec<C64>> {
    let mut h = h0;
    let mut coarse: Option<Vec<C64>> = None;
    for _ in 0..=MAX_HALVINGS {
        let fine = midpoint_sum(g, center, h, symmetric, tol)?;
        if let Some(c) = &coarse {
            let diff = fine.iter().zip(c).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            let size = fine.iter().map(|a| a.norm()).fold(0.0, f64::max);
            if diff <= 0.1 * tol.sqrt() * size || size == 0.0 {
                return Ok(fine);
            }
        }
        coarse = Some(fine);
        h /= 2.0;
    }
    Err(Error::NonConvergent { what: "integral along Re r = 0".into(), iterations: MAX_HALVINGS })
}

fn midpoint_sum(g: &(dyn Fn(f64) -> Result<Vec<C64>> + Sync), center: f64, h: f64, symmetric: bool, tol: f64) -> Result<Vec<C64>> {
    const TAIL: usize = 4;
    const MAX_NODES: usize = 20_000;
    let mut acc: Option<Vec<C64>> = None;
    let mut peak = 0.0f64;
    let sides: &[f64] = if symmetric { &[1.0] } else { &[1.0, -1.0] };
    for &side in sides {
        let mut quiet = 0;
        for k in 0..MAX_NODES {
            let t = center + side * (k as f64 + 0.5) * h;
            let mut v = g(t)?;
            if symmetric {
                // g(-t) = conj g(t)
                v.iter_mut().for_each(|z| *z = C64::new(2.0 * z.re, 0.0));
            }
            let size = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if !size.is_finite() {
                return Err(Error::NotFinite("integrand along Re r = 0".into()));
            }
            peak = peak.max(size);
            match &mut acc {
                None => acc = Some(v.iter().map(|z| z * h).collect()),
                Some(a) => a.iter_mut().zip(&v).for_each(|(a, z)| *a += z * h),
            }
            quiet = if size <= tol * peak { quiet + 1 } else { 0 };
            if quiet >= TAIL {
                break;
            }
            if k + 1 == MAX_NODES {
                return Err(Error::NonConvergent { what: "truncation along Re r = 0".into(), iterations: MAX_NODES });
            }
        }
    }
    Ok(acc.unwrap_or_default())
}

fn midpoint_scalar(g: &(dyn Fn(f64) -> Result<C64> + Sync), center: f64, h0: f64, symmetric: bool, tol: f64) -> Result<C64> {
    let v = midpoint_line(&|t| Ok(vec![g(t)?]), center, h0, symmetric, tol)?;
    Ok(v[0])
}

// ----- H transforms --------------------------------------------------------

/// `H_w(F; y) = 1/|y1 y2| int_{Re r = 0} F(r) K_w(y, r) spec^d(r) dr`.
pub fn h_transform(w: KernelTag, f: &TestFunction, d: usize, y: SignedTorusPoint, tol: f64) -> Result<C64> {
    SpectralPoint::new(d, C64::new(0.0, 0.0))?;
    if w == KernelTag::Wl && y.signs() == (1, 1) {
        return Ok(C64::new(0.0, 0.0));
    }
    let scale = 1.0 / (y.y1 * y.y2).abs();
    let g = |t: f64| -> Result<C64> {
        let r = C64::new(0.0, t);
        let fv = f.eval(r);
        if fv == C64::new(0.0, 0.0) {
            return Ok(fv);
        }
        let k = match w {
            KernelTag::I => C64::new(1.0, 0.0),
            _ => kernel_eval_series(w, &SpectralPoint::new(d, r)?, y, tol * 1e-2)?,
        };
        Ok(fv * k * spec_weight(d, r) * I * scale)
    };
    let h0 = 0.5 * f.decay;
    finite(midpoint_scalar(&g, f.center, h0, false, tol)?, "H transform")
}

/// `H_I(F; (1, 1))` for `F = exp(r^2)`: `(d - 1) sqrt(pi) (h^2 + 9/2) / (16 pi^4)`.
pub fn h_identity_gaussian(d: usize) -> f64 {
    let h = (d as f64 - 1.0) / 2.0;
    (d as f64 - 1.0) * PI.sqrt() * (h * h + 4.5) / (16.0 * PI.powi(4))
}

// ----- Kontorovich-Lebedev inversion --------------------------------------

/// Tensor grid of log-spaced points in `Y+` with trapezoid weights for
/// `dy = dy1 dy2 / (y1 y2)^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct KlGrid {
    pub ys: Vec<f64>,
    weights: Vec<f64>,
}

impl KlGrid {
    /// `n` points per axis on `[e^lo, e^hi]`.
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(hi > lo) || n < 2 {
            return Err(Error::InvalidArgument("log grid needs hi > lo and at least two points".into()));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let ys: Vec<f64> = (0..n).map(|k| (lo + k as f64 * step).exp()).collect();
        // dy_i / y_i^2 in log coordinates is y_i^{-1} dlog y_i, and the
        // remaining factor (y1 y2)^{-1} is split evenly
        let weights = ys
            .iter()
            .enumerate()
            .map(|(k, y)| {
                let end = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                end * step / (y * y)
            })
            .collect();
        Ok(Self { ys, weights })
    }

    /// The 84 x 84 grid on `[e^-10, e^2.5]^2`.  The pairing decays only like
    /// a power of `y` towards the origin, and the truncation error at the
    /// lower end falls from `2e-2` at `e^-5` to `1e-5` at `e^-10`.
    pub fn standard() -> Self {
        Self::new(-10.0, 2.5, 84).expect("valid grid")
    }

    fn log_span(&self) -> f64 {
        let lo = (2.0 * PI * self.ys[0]).ln().abs();
        let hi = (2.0 * PI * self.ys[self.ys.len() - 1]).ln().abs();
        lo.max(hi)
    }
}

/// Vector-valued function sampled on a [`KlGrid`], indexed `[i1][i2]`.
pub type GridValues = Vec<Vec<WhittakerVector>>;

const KL_SIGMA: [f64; 2] = [1.0, 1.0];

/// `f^#(r) = int_{Y+} f(y) conj(W(y, r))^T dy` for `f` sampled on `grid`.
pub fn kl_sharp_on_grid(values: &GridValues, grid: &KlGrid, d: usize, r: C64, tol: f64) -> Result<C64> {
    let p = SpectralPoint::new(d, r)?;
    let w = WhittakerGrid::new(&p, KL_SIGMA, tol, grid.log_span())?.eval_grid(&grid.ys, &grid.ys);
    let mut acc = C64::new(0.0, 0.0);
    for (i1, row) in values.iter().enumerate() {
        for (i2, fv) in row.iter().enumerate() {
            let pair: C64 = fv.entries.iter().zip(&w[i1][i2].entries).map(|(a, b)| a * b.conj()).sum();
            acc += pair * grid.weights[i1] * grid.weights[i2];
        }
    }
    finite(acc, "KL sharp transform")
}

/// `f^#(r)` for a function given pointwise.
pub fn kl_sharp(
    f: &(dyn Fn(TorusPoint) -> WhittakerVector + Sync),
    grid: &KlGrid,
    d: usize,
    r: C64,
    tol: f64,
) -> Result<C64> {
    let values: GridValues = grid
        .ys
        .par_iter()
        .map(|&y1| grid.ys.iter().map(|&y2| f(TorusPoint { y1, y2 })).collect())
        .collect();
    kl_sharp_on_grid(&values, grid, d, r, tol)
}

/// `sin^d(r) dr / dt` at `r = i t`, real.
fn sin_weight_dt(d: usize, t: f64) -> Result<f64> {
    let s = spectral_weights(&SpectralPoint::imaginary(d, t)?)?.sin_weight * I;
    Ok(s.re)
}

/// `F^b(y) = int_{Re r = 0} F(r) W(y, r) sin^d(r) dr` on a whole grid.
pub fn kl_flat_on_grid(f: &TestFunction, d: usize, grid: &KlGrid, tol: f64) -> Result<GridValues> {
    let n = grid.ys.len();
    let nd = 2 * d + 1;
    let g = |t: f64| -> Result<Vec<C64>> {
        let fv = f.eval(C64::new(0.0, t));
        if fv == C64::new(0.0, 0.0) {
            return Ok(vec![C64::new(0.0, 0.0); n * n * nd]);
        }
        let c = fv * sin_weight_dt(d, t)?;
        let p = SpectralPoint::imaginary(d, t)?;
        let w = WhittakerGrid::new(&p, KL_SIGMA, tol, grid.log_span())?.eval_grid(&grid.ys, &grid.ys);
        Ok(w.iter().flat_map(|row| row.iter().flat_map(|v| v.entries.iter().map(|e| e * c))).collect())
    };
    let flat = midpoint_line(&g, f.center, 0.25 * f.decay.min(1.0), f.reflection_real && f.center == 0.0, tol)?;
    Ok((0..n)
        .map(|i1| {
            (0..n)
                .map(|i2| {
                    let off = (i1 * n + i2) * nd;
                    WhittakerVector { d, entries: flat[off..off + nd].to_vec() }
                })
                .collect()
        })
        .collect())
}

/// `F^b(y)` at a single point.
pub fn kl_flat(f: &TestFunction, d: usize, y: TorusPoint, tol: f64) -> Result<WhittakerVector> {
    let span = (2.0 * PI * y.y1).ln().abs().max((2.0 * PI * y.y2).ln().abs());
    let g = |t: f64| -> Result<Vec<C64>> {
        let fv = f.eval(C64::new(0.0, t));
        if fv == C64::new(0.0, 0.0) {
            return Ok(vec![C64::new(0.0, 0.0); 2 * d + 1]);
        }
        let c = fv * sin_weight_dt(d, t)?;
        let w = WhittakerGrid::new(&SpectralPoint::imaginary(d, t)?, KL_SIGMA, tol, span)?.eval(y);
        Ok(w.entries.iter().map(|e| e * c).collect())
    };
    let entries = midpoint_line(&g, f.center, 0.25 * f.decay.min(1.0), f.reflection_real && f.center == 0.0, tol)?;
    Ok(WhittakerVector { d, entries })
}

/// Round trip `(F^b)^#(r)` at each sample, with its relative deviation from
/// `F(r)` (absolute where `F(r) = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrip {
    pub samples: Vec<(C64, C64, C64, f64)>,
    pub max_deviation: f64,
}

pub fn kl_roundtrip_report(f: &TestFunction, d: usize, samples: &[C64], grid: &KlGrid, tol: f64) -> Result<RoundTrip> {
    let flat = kl_flat_on_grid(f, d, grid, tol)?;
    let mut out = Vec::with_capacity(samples.len());
    let mut worst = 0.0f64;
    for &r in samples {
        let back = kl_sharp_on_grid(&flat, grid, d, r, tol)?;
        let want = f.eval(r);
        let dev = if want.norm() > 0.0 { (back - want).norm() / want.norm() } else { back.norm() };
        worst = worst.max(dev);
        out.push((r, want, back, dev));
    }
    Ok(RoundTrip { samples: out, max_deviation: worst })
}

/// Largest relative deviation of `(F^b)^#` from `F` over the samples, on the
/// standard grid.
pub fn kl_roundtrip(f: &TestFunction, d: usize, samples: &[C64], tol: f64) -> Result<f64> {
    Ok(kl_roundtrip_report(f, d, samples, &KlGrid::standard(), tol)?.max_deviation)
}

// ----- geometric side -----------------------------------------------------

/// Partial sums of the four geometric terms with `c1, c2 <= cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricSideReport {
    pub cutoff: i64,
    pub k_identity: C64,
    pub k4: C64,
    pub k5: C64,
    pub kl: C64,
    /// Contribution of the shell `max(c1, c2) = cutoff` to `K4`, `K5`, `Kl`.
    pub last_shell: [f64; 3],
    /// Number of `(eps, c)` terms with a nonempty Kloosterman sum.
    pub terms: [usize; 3],
}

fn rational(n: i64, d: i64) -> f64 {
    let q = Ratio::new(n, d);
    *q.numer() as f64 / *q.denom() as f64
}

struct Term {
    shell: i64,
    weight: C64,
    y: SignedTorusPoint,
}

fn shell_sum(
    w: KernelTag,
    terms: &[Term],
    f: &TestFunction,
    d: usize,
    cutoff: i64,
    tol: f64,
) -> Result<(C64, f64)> {
    let values: Vec<(i64, C64)> = terms
        .par_iter()
        .map(|t| Ok((t.shell, t.weight * h_transform(w, f, d, t.y, tol)?)))
        .collect::<Result<_>>()?;
    let total = values.iter().map(|v| v.1).sum();
    let last: C64 = values.iter().filter(|v| v.0 == cutoff).map(|v| v.1).sum();
    Ok((total, last.norm()))
}

/// Geometric side of the trace formula, truncated at `c1, c2 <= cutoff`.
pub fn geometric_side(
    f: &TestFunction,
    d: usize,
    m: CharacterIndex,
    n: CharacterIndex,
    cutoff: i64,
    tol: f64,
) -> Result<GeometricSideReport> {
    if cutoff < 1 {
        return Err(Error::InvalidArgument("cutoff must be at least 1".into()));
    }
    let k_identity = if m.m1.abs() == n.m1.abs() && m.m2.abs() == n.m2.abs() {
        h_transform(KernelTag::I, f, d, SignedTorusPoint::new(1.0, 1.0)?, tol)?
    } else {
        C64::new(0.0, 0.0)
    };
    let mut t4 = Vec::new();
    let mut t5 = Vec::new();
    let mut tl = Vec::new();
    for eps in SIGNS {
        let en = n.twist(eps);
        let (e1, e2) = (eps.0 as i64, eps.1 as i64);
        for c1 in 1..=cutoff {
            for c2 in 1..=cutoff {
                let c = Modulus::new(c1, c2)?;
                let shell = c1.max(c2);
                let weight = |w: KernelTag| -> Option<C64> {
                    let s = kloosterman_fast(w, m, en, c);
                    (s.terms > 0).then(|| s.value / (c1 * c2) as f64)
                };
                if compatible(KernelTag::W4, m, n, eps, c) {
                    if let Some(wt) = weight(KernelTag::W4) {
                        let y1 = rational(e1 * e2 * m.m1 * m.m2 * m.m2 * n.m2, c2 * c2 * c2 * n.m1);
                        t4.push(Term { shell, weight: wt, y: SignedTorusPoint::new(y1, 1.0)? });
                    }
                }
                if compatible(KernelTag::W5, m, n, eps, c) {
                    if let Some(wt) = weight(KernelTag::W5) {
                        let y2 = rational(e1 * e2 * m.m1 * m.m1 * m.m2 * n.m1, c1 * c1 * c1 * n.m2);
                        t5.push(Term { shell, weight: wt, y: SignedTorusPoint::new(1.0, y2)? });
                    }
                }
                if let Some(wt) = weight(KernelTag::Wl) {
                    let y1 = rational(e2 * m.m1 * n.m2 * c2, c1 * c1);
                    let y2 = rational(e1 * m.m2 * n.m1 * c1, c2 * c2);
                    tl.push(Term { shell, weight: wt, y: SignedTorusPoint::new(y1, y2)? });
                }
            }
        }
    }
    let (k4, s4) = shell_sum(KernelTag::W4, &t4, f, d, cutoff, tol)?;
    let (k5, s5) = shell_sum(KernelTag::W5, &t5, f, d, cutoff, tol)?;
    let (kl, sl) = shell_sum(KernelTag::Wl, &tl, f, d, cutoff, tol)?;
    Ok(GeometricSideReport {
        cutoff,
        k_identity,
        k4,
        k5,
        kl,
        last_shell: [s4, s5, sl],
        terms: [t4.len(), t5.len(), tl.len()],
    })
}

// ----- Weyl law -----------------------------------------------------------

/// Spectral window on `i R`, given by the imaginary parts of its ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpectralWindow {
    /// `T Omega` with `Omega = i [lo, hi]`.
    Box { lo: f64, hi: f64, scale: f64 },
    /// `|r - T r'| < M` with `r' = i center`.
    Ball { center: f64, radius: f64, scale: f64 },
}

impl SpectralWindow {
    /// Imaginary parts of the ends of the window, validated.
    pub fn interval(&self) -> Result<(f64, f64)> {
        match *self {
            SpectralWindow::Box { lo, hi, scale } => {
                if !(lo <= hi && scale > 0.0 && lo.is_finite() && hi.is_finite()) {
                    return Err(Error::InvalidArgument("box window needs lo <= hi and T > 0".into()));
                }
                Ok((scale * lo, scale * hi))
            }
            SpectralWindow::Ball { center, radius, scale } => {
                if !(scale > radius && radius > 1.0 && center.is_finite()) {
                    return Err(Error::InvalidArgument("ball window needs T > M > 1".into()));
                }
                Ok((scale * center - radius, scale * center + radius))
            }
        }
    }

    pub fn scale(&self) -> f64 {
        match *self {
            SpectralWindow::Box { scale, .. } | SpectralWindow::Ball { scale, .. } => scale,
        }
    }
}

/// `int spec^d(i t) i dt = (d - 1) / (16 pi^4) (h^2 t + 3 t^3)` from `a` to `b`.
fn spec_antiderivative(d: usize, a: f64, b: f64) -> f64 {
    let h = (d as f64 - 1.0) / 2.0;
    let prim = |t: f64| h * h * t + 3.0 * t * t * t;
    (d as f64 - 1.0) / (16.0 * PI.powi(4)) * (prim(b) - prim(a))
}

/// `(3 / 2 pi) int_window spec^d(r) dr`, real for windows on `i R`.
pub fn weyl_main_term(window: &SpectralWindow, d: usize) -> Result<f64> {
    let (a, b) = window.interval()?;
    Ok(3.0 / (2.0 * PI) * spec_antiderivative(d, a, b))
}

/// The same quantity by composite Simpson quadrature of `spec^d(i t) i`.
pub fn weyl_main_term_quadrature(window: &SpectralWindow, d: usize, panels: usize) -> Result<f64> {
    let (a, b) = window.interval()?;
    let n = 2 * panels.max(1);
    let h = (b - a) / n as f64;
    let g = |t: f64| (spec_weight(d, C64::new(0.0, t)) * I).re;
    let mut s = g(a) + g(b);
    for k in 1..n {
        s += g(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    Ok(3.0 / (2.0 * PI) * s * h / 3.0)
}

/// `E1 = int_{Re r = 0} |F(r)| (d + |r|)^{1 + eps} |dr|` and
/// `E2 = int_{Re r = -1/4 - eta} (|F(r)| + |F(-r)|) d (d + |r|)^{-1/2 + eps} |dr|`.
pub fn error_diagnostics(f: &TestFunction, d: usize, eta: f64, epsilon: f64) -> Result<(f64, f64)> {
    if !(eta > 0.0 && epsilon > 0.0) {
        return Err(Error::InvalidArgument("eta and epsilon must be positive".into()));
    }
    let x = -0.25 - eta;
    if x.abs() >= f.delta {
        return Err(Error::InvalidArgument(format!(
            "Re r = {x} lies outside the declared strip of holomorphy |Re r| < {}",
            f.delta
        )));
    }
    let df = d as f64;
    let tol = 1e-10;
    let h0 = 0.25 * f.decay;
    let e1 = midpoint_scalar(
        &|t: f64| Ok(C64::new(f.eval(C64::new(0.0, t)).norm() * (df + t.abs()).powf(1.0 + epsilon), 0.0)),
        f.center,
        h0,
        false,
        tol,
    )?;
    // |F(r)| is concentrated near Im r = center and |F(-r)| near Im r = -center
    let mut e2 = 0.0;
    for side in [1.0, -1.0] {
        e2 += midpoint_scalar(
            &|t: f64| {
                let r = C64::new(x, t);
                let v = f.eval(r * side).norm() * df * (df + r.norm()).powf(epsilon - 0.5);
                Ok(C64::new(v, 0.0))
            },
            side * f.center,
            h0,
            false,
            tol,
        )?
        .re;
    }
    Ok((e1.re, e2))
}

/// Smoothed indicator of a window,
/// `F(r) = -i sqrt(L / pi) int_{Re r' = 0} chi(r - r') (d + T)^{r'^2} dr'`
/// with `L = log(d + T)`, evaluated as
/// `sqrt(L / pi) int_window exp(-L (u + i r)^2) du` over the interval of
/// imaginary parts `u`.
pub fn smoothed_indicator(window: &SpectralWindow, d: usize) -> Result<TestFunction> {
    let (a, b) = window.interval()?;
    let big_l = (d as f64 + window.scale()).ln();
    let norm = (big_l / PI).sqrt();
    // beyond this distance from Re-centre the Gaussian is below e^-800
    let reach = (800.0 / big_l).sqrt();
    let eval = move |r: C64| -> C64 {
        // |exp(-L (u + i r)^2)| = exp(-L ((u - Im r)^2 - Re r^2)), centred at u = Im r
        let lo = a.max(r.im - reach);
        let hi = b.min(r.im + reach);
        if lo >= hi {
            return C64::new(0.0, 0.0);
        }
        let len = hi - lo;
        let g = |x: f64, xc: f64| {
            let u = if x < 0.5 { lo + len * x } else { hi - len * xc };
            let z = C64::new(u, 0.0) + I * r;
            (-(z * z) * big_l).exp()
        };
        // the Gaussian spans a fraction 1/(reach sqrt L) of the interval
        let h = 0.1 / (1.0 + len * big_l.sqrt() / 8.0);
        logistic_01(&g, h, 40.0).map(|v| v * len * norm).unwrap_or(C64::new(f64::NAN, f64::NAN))
    };
    let decay = (a.abs().max(b.abs()) + 10.0) / 10.0;
    Ok(TestFunction { f: Arc::new(eval), delta: 1.0, decay, center: 0.5 * (a + b), reflection_real: a == -b })
}

/// Signs used by the geometric side, re-exported for reports.
pub const EPSILONS: [Signs; 4] = SIGNS;
