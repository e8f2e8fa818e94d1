//! Verifiable gamma-integral and hypergeometric identities.
//!
//! Each identity is checked by computing both sides independently: Mellin-Barnes
//! integrals on straight contours, hypergeometric series, or real quadrature on
//! one side and a closed form (or a second, different evaluation) on the other.
//! Every tag carries a safe parameter region in which the chosen contours
//! separate the pole families and all series converge.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gamma::{beta, gamma_ratio, ln_gamma, ln_rgamma};
use crate::numerics::mb::{mb_integrate, ContourSpec, GammaArg, MbIntegrand, TailModel};
use crate::numerics::pfq::pfq_series;
use crate::numerics::quadrature::logistic_01_adaptive;
use crate::C64;

/// Identity tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdentityTag {
    /// `prod G(a_i) / prod G(b_i) pFq(a; b; -z)` as a Mellin-Barnes integral (here `2F1`).
    PFqToMB,
    /// Inverse Mellin transform of `G(s) G(a+1) / G(a+1+s)`: `(1-x)^a` on `(0,1)`, zero beyond.
    BetaInvMellin,
    /// Thomae's relation between two `3F2(1)`, both written as Mellin-Barnes integrals.
    ThomaeMB,
    /// Euler's integral for the beta function.
    EulerBeta,
    /// `int_0^1 (1-x)^a x^b (1+yx)^c dx` as a `2F1`.
    Elem2F1,
    /// Pfaff's transformation `2F1(a, b; c; 1/2) = 2^a 2F1(a, c-b; c; -1)`.
    Pfaff,
    /// Barnes' first lemma.
    BarnesFirst,
    /// Gauss' summation of `2F1(1)`.
    GaussThm,
    /// `int x^{-s/2} G(a+s) G(b-s) ds/(2 pi i) = (1 + sqrt x)^{-a-b} x^{a/2} G(a+b)`.
    SimpleMB,
    /// `int G(s-a) G(b-s) / G(b-a) ds/(2 pi i) = 2^{a-b}`.
    MB1F0Eval,
    /// `2F1(a+b, a; a+1; -1)/a + 2F1(a+b, b; b+1; -1)/b = B(a, b)`.
    TwoF1toBeta,
}

impl IdentityTag {
    pub const ALL: [IdentityTag; 11] = [
        IdentityTag::PFqToMB,
        IdentityTag::BetaInvMellin,
        IdentityTag::ThomaeMB,
        IdentityTag::EulerBeta,
        IdentityTag::Elem2F1,
        IdentityTag::Pfaff,
        IdentityTag::BarnesFirst,
        IdentityTag::GaussThm,
        IdentityTag::SimpleMB,
        IdentityTag::MB1F0Eval,
        IdentityTag::TwoF1toBeta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityTag::PFqToMB => "pFqToMB",
            IdentityTag::BetaInvMellin => "BetaInvMellin",
            IdentityTag::ThomaeMB => "ThomaeMB",
            IdentityTag::EulerBeta => "EulerBeta",
            IdentityTag::Elem2F1 => "Elem2F1",
            IdentityTag::Pfaff => "Pfaff",
            IdentityTag::BarnesFirst => "BarnesFirst",
            IdentityTag::GaussThm => "GaussThm",
            IdentityTag::SimpleMB => "SimpleMB",
            IdentityTag::MB1F0Eval => "MB1F0Eval",
            IdentityTag::TwoF1toBeta => "TwoF1toBeta",
        }
    }

    /// Parameter names, in the order used by [`IdentityCase::new`].
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            IdentityTag::PFqToMB => &["a1", "a2", "b1", "z"],
            IdentityTag::BetaInvMellin => &["a", "x"],
            IdentityTag::ThomaeMB => &["a", "b", "c", "d"],
            IdentityTag::EulerBeta => &["u", "v"],
            IdentityTag::Elem2F1 => &["a", "b", "c", "y"],
            IdentityTag::Pfaff => &["a", "b", "c"],
            IdentityTag::BarnesFirst => &["a", "b", "c", "d"],
            IdentityTag::GaussThm => &["a", "b", "c"],
            IdentityTag::SimpleMB => &["a", "b", "x"],
            IdentityTag::MB1F0Eval => &["a", "b"],
            IdentityTag::TwoF1toBeta => &["a", "b"],
        }
    }
}

impl fmt::Display for IdentityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IdentityTag::ALL
            .iter()
            .copied()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown identity tag {s}")))
    }
}

/// An identity together with a parameter assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCase {
    pub tag: IdentityTag,
    pub params: BTreeMap<String, C64>,
}

impl IdentityCase {
    /// Build a case from values listed in the order of [`IdentityTag::parameters`].
    pub fn new(tag: IdentityTag, values: &[C64]) -> Result<Self> {
        let names = tag.parameters();
        if names.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: names.len(), got: values.len() });
        }
        let params = names.iter().zip(values).map(|(n, v)| (n.to_string(), *v)).collect();
        Ok(Self { tag, params })
    }

    pub fn real(tag: IdentityTag, values: &[f64]) -> Result<Self> {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(tag, &v)
    }

    fn p(&self, name: &str) -> Result<C64> {
        self.params.get(name).copied().ok_or_else(|| Error::InvalidArgument(format!("missing parameter {name}")))
    }

    fn real_arg(&self, name: &str) -> Result<f64> {
        let v = self.p(name)?;
        if v.im != 0.0 {
            return Err(Error::InvalidArgument(format!("argument {name} must be real")));
        }
        Ok(v.re)
    }

    /// The safe-region predicate of the tag.
    pub fn check_region(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("{}: {msg}", self.tag)));
        let re = |n: &str| self.p(n).map(|v| v.re);
        match self.tag {
            IdentityTag::PFqToMB => {
                if re("a1")? <= 0.0 || re("a2")? <= 0.0 {
                    return bad("need Re a1, Re a2 > 0");
                }
                let z = self.real_arg("z")?;
                if !(0.0 < z && z < 1.0) {
                    return bad("need 0 < z < 1");
                }
            }
            IdentityTag::BetaInvMellin => {
                if re("a")? <= 1.0 {
                    return bad("need Re a > 1");
                }
                let x = self.real_arg("x")?;
                if x <= 0.0 || (x - 1.0).abs() < 0.05 {
                    return bad("need x > 0 away from 1");
                }
            }
            IdentityTag::ThomaeMB => {
                let (a, b, c, d) = (self.p("a")?, self.p("b")?, self.p("c")?, self.p("d")?);
                if a.re <= 0.0 || (a + b - d).re <= 0.5 || d.re <= 0.0 || (c - b).re <= 0.0 {
                    return bad("need Re a, Re d, Re(c-b) > 0 and Re(a+b-d) > 1/2");
                }
            }
            IdentityTag::EulerBeta => {
                if re("u")? <= 0.0 || re("v")? <= 0.0 {
                    return bad("need Re u, Re v > 0");
                }
            }
            IdentityTag::Elem2F1 => {
                if re("a")? <= -1.0 || re("b")? <= -1.0 {
                    return bad("need Re a, Re b > -1");
                }
                let y = self.real_arg("y")?;
                if y.abs() >= 1.0 {
                    return bad("need |y| < 1");
                }
            }
            IdentityTag::Pfaff => {
                let (a, b, c) = (self.p("a")?, self.p("b")?, self.p("c")?);
                if a.re <= 0.0 || (c - b).re <= 0.0 {
                    return bad("need Re a > 0 and Re(c-b) > 0");
                }
            }
            IdentityTag::BarnesFirst => {
                for (x, y) in [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")] {
                    if re(x)? + re(y)? <= 0.0 {
                        return bad("need Re(a+c), Re(a+d), Re(b+c), Re(b+d) > 0");
                    }
                }
            }
            IdentityTag::GaussThm => {
                let (a, b, c) = (self.p("a")?, self.p("b")?, self.p("c")?);
                if (c - a - b).re <= 0.0 {
                    return bad("need Re(c-a-b) > 0");
                }
            }
            IdentityTag::SimpleMB => {
                if re("a")? + re("b")? <= 0.0 {
                    return bad("need Re(a+b) > 0");
                }
                if self.real_arg("x")? <= 0.0 {
                    return bad("need x > 0");
                }
            }
            IdentityTag::MB1F0Eval => {
                if re("b")? - re("a")? <= 0.0 {
                    return bad("need Re(b-a) > 0");
                }
            }
            IdentityTag::TwoF1toBeta => {
                if re("a")? <= 0.0 || re("b")? <= 0.0 {
                    return bad("need Re a, Re b > 0");
                }
            }
        }
        Ok(())
    }
}

/// Outcome of checking one identity case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    pub tag: IdentityTag,
    pub lhs: C64,
    pub rhs: C64,
    /// Relative error, or absolute error when the right side vanishes.
    pub error: f64,
    pub pass: bool,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn lg(z: C64) -> Result<C64> {
    ln_gamma(z)
}

fn lrg(z: C64) -> C64 {
    // log of 1/Gamma; -inf real part where it vanishes
    ln_rgamma(z).unwrap_or(C64::new(f64::NEG_INFINITY, 0.0))
}

fn arg(constant: C64, coeff: f64, label: &str) -> GammaArg {
    GammaArg::new(constant, &[coeff], label)
}

/// One-dimensional Mellin-Barnes integral on `Re s = sigma`.
fn mb1(
    f: &(dyn Fn(C64) -> Result<C64> + Sync),
    poles: Vec<GammaArg>,
    tail: TailModel,
    sigma: f64,
    step: f64,
    height: f64,
    floor: f64,
    tol: f64,
) -> Result<C64> {
    let g = |s: &[C64]| f(s[0]);
    let integrand = MbIntegrand { f: &g, poles, tail, floor };
    Ok(mb_integrate(&integrand, &[ContourSpec::new(sigma, height, step)], tol)?.value)
}

/// `pi cot(pi s) = G(s) G(1-s) cos(pi s)`, evaluated without overflow off the real axis.
fn pi_cot(s: C64) -> C64 {
    if s.im < 0.0 {
        return pi_cot(s.conj()).conj();
    }
    let e = (C64::new(0.0, 2.0 * PI) * s).exp();
    C64::new(0.0, PI) * (e + 1.0) / (e - 1.0)
}

fn hyp2f1_minus_one(a: C64, b: C64, c: C64, tol: f64) -> Result<C64> {
    // Pfaff: 2F1(a, b; c; -1) = 2^{-a} 2F1(a, c - b; c; 1/2)
    Ok(C64::new(2.0, 0.0).powc(-a) * pfq_series(&[a, c - b], &[c], C64::new(0.5, 0.0), tol)?)
}

/// Evaluate both sides of an identity and compare them.
pub fn verify_identity(case: &IdentityCase, tol: f64) -> Result<IdentityReport> {
    case.check_region()?;
    let inner = (tol * 0.1).max(1e-14);
    let p = |n: &str| case.p(n);
    let (lhs, rhs) = match case.tag {
        IdentityTag::PFqToMB => {
            let (a1, a2, b1) = (p("a1")?, p("a2")?, p("b1")?);
            let z = case.real_arg("z")?;
            let series = pfq_series(&[a1, a2], &[b1], C64::new(-z, 0.0), inner)?;
            let lhs = series * (lg(a1)? + lg(a2)? + lrg(b1)).exp();
            let lz = z.ln();
            let f = move |s: C64| -> Result<C64> { Ok((lg(s)? + lg(a1 - s)? + lg(a2 - s)? + lrg(b1 - s) - s * lz).exp()) };
            let sigma = a1.re.min(a2.re) / 2.0;
            let poles = vec![arg(zero(), 1.0, "s"), arg(a1, -1.0, "a1-s"), arg(a2, -1.0, "a2-s")];
            let rhs = mb1(&f, poles, TailModel::Geometric, sigma, sigma.min(0.5), 20.0, 0.0, inner)?;
            (lhs, rhs)
        }
        IdentityTag::BetaInvMellin => {
            let a = p("a")?;
            let x = case.real_arg("x")?;
            let lx = x.ln();
            let ga1 = lg(a + 1.0)?;
            let f = move |s: C64| -> Result<C64> { Ok((lg(s)? + ga1 + lrg(a + 1.0 + s) - s * lx).exp()) };
            let poles = vec![arg(zero(), 1.0, "s")];
            let lhs = mb1(&f, poles, TailModel::Geometric, 1.0, 0.2, 25.0, 1.0, inner)?;
            let rhs = if x < 1.0 { (a * (1.0 - x).ln()).exp() } else { zero() };
            (lhs, rhs)
        }
        IdentityTag::ThomaeMB => {
            let (a, b, c, d) = (p("a")?, p("b")?, p("c")?, p("d")?);
            let f = move |s: C64| -> Result<C64> {
                Ok((lg(s)? + lg(a - s)? + lg(a + b - d - s)? + lrg(2.0 - c + s) + lrg(a + b - s) + lrg(a + c - d - s)).exp())
            };
            let s1 = a.re.min((a + b - d).re) / 2.0;
            let poles = vec![arg(zero(), 1.0, "s"), arg(a, -1.0, "a-s"), arg(a + b - d, -1.0, "a+b-d-s")];
            let lhs = mb1(&f, poles, TailModel::InversePower(one()), s1, 0.25, 16.0, 0.0, inner)?;
            // pi cot(pi s) = G(s) G(1-s) cos(pi s) has unit residues, which turns
            // the integral into a 3F2 at +1
            let g = move |s: C64| -> Result<C64> {
                Ok((lg(d - s)? + lg(c - b - s)? + lrg(c - s) + lrg(1.0 + a - s)).exp() * pi_cot(s))
            };
            let s2 = 1f64.min(d.re).min((c - b).re) / 2.0;
            let poles = vec![arg(zero(), 1.0, "s"), arg(one(), -1.0, "1-s"), arg(d, -1.0, "d-s"), arg(c - b, -1.0, "c-b-s")];
            let integral = mb1(&g, poles, TailModel::InversePower(a + b - d), s2, 0.25, 16.0, 0.0, inner)?;
            let pref = (lg(a)? + lrg(2.0 - c) + lrg(d) + lrg(c - b)).exp();
            (lhs, pref * integral)
        }
        IdentityTag::EulerBeta => {
            let (u, v) = (p("u")?, p("v")?);
            let f = move |x: f64, xc: f64| ((u - 1.0) * x.ln() + (v - 1.0) * xc.ln()).exp();
            let vmax = (40.0 / u.re.min(v.re)).min(700.0);
            (logistic_01_adaptive(&f, inner, vmax)?, beta(u, v)?)
        }
        IdentityTag::Elem2F1 => {
            let (a, b, c) = (p("a")?, p("b")?, p("c")?);
            let y = case.real_arg("y")?;
            let f = move |x: f64, xc: f64| (a * xc.ln() + b * x.ln() + c * (1.0 + y * x).ln()).exp();
            let vmax = (40.0 / (1.0 + a.re.min(b.re))).min(700.0);
            let lhs = logistic_01_adaptive(&f, inner, vmax)?;
            let rhs = gamma_ratio(&[a + 1.0, b + 1.0], &[a + b + 2.0])?
                * pfq_series(&[b + 1.0, -c], &[a + b + 2.0], C64::new(-y, 0.0), inner)?;
            (lhs, rhs)
        }
        IdentityTag::Pfaff => {
            let (a, b, c) = (p("a")?, p("b")?, p("c")?);
            let lhs = pfq_series(&[a, b], &[c], C64::new(0.5, 0.0), inner)?;
            // 2F1(a, c-b; c; -1) from its Mellin-Barnes representation at z = 1
            let e = c - b;
            let f = move |s: C64| -> Result<C64> { Ok((lg(s)? + lg(a - s)? + lg(e - s)? + lrg(c - s)).exp()) };
            let sigma = a.re.min(e.re) / 2.0;
            let poles = vec![arg(zero(), 1.0, "s"), arg(a, -1.0, "a-s"), arg(e, -1.0, "c-b-s")];
            let integral = mb1(&f, poles, TailModel::Geometric, sigma, sigma.min(0.5), 20.0, 0.0, inner)?;
            let f21 = integral * (lg(c)? - lg(a)? - lg(e)?).exp();
            (lhs, C64::new(2.0, 0.0).powc(a) * f21)
        }
        IdentityTag::BarnesFirst => {
            let (a, b, c, d) = (p("a")?, p("b")?, p("c")?, p("d")?);
            let f = move |s: C64| -> Result<C64> { Ok((lg(a + s)? + lg(b + s)? + lg(c - s)? + lg(d - s)?).exp()) };
            let lo = -a.re.min(b.re);
            let hi = c.re.min(d.re);
            let sigma = (lo + hi) / 2.0;
            let poles = vec![arg(a, 1.0, "a+s"), arg(b, 1.0, "b+s"), arg(c, -1.0, "c-s"), arg(d, -1.0, "d-s")];
            let lhs = mb1(&f, poles, TailModel::Geometric, sigma, ((hi - lo) / 2.0).min(0.5), 20.0, 0.0, inner)?;
            let rhs = gamma_ratio(&[a + c, a + d, b + c, b + d], &[a + b + c + d])?;
            (lhs, rhs)
        }
        IdentityTag::GaussThm => {
            let (a, b, c) = (p("a")?, p("b")?, p("c")?);
            let lhs = pfq_series(&[a, b], &[c], one(), inner)?;
            let rhs = gamma_ratio(&[c, c - a - b], &[c - a, c - b])?;
            (lhs, rhs)
        }
        IdentityTag::SimpleMB => {
            let (a, b) = (p("a")?, p("b")?);
            let x = case.real_arg("x")?;
            let lx = x.ln();
            let f = move |s: C64| -> Result<C64> { Ok((lg(a + s)? + lg(b - s)? - s * lx / 2.0).exp()) };
            let sigma = (b.re - a.re) / 2.0;
            let poles = vec![arg(a, 1.0, "a+s"), arg(b, -1.0, "b-s")];
            let width = (a.re + b.re) / 2.0;
            let lhs = mb1(&f, poles, TailModel::Geometric, sigma, width.min(0.5), 20.0, 0.0, inner)?;
            let rhs = (-(a + b) * (1.0 + x.sqrt()).ln() + a * lx / 2.0 + lg(a + b)?).exp();
            (lhs, rhs)
        }
        IdentityTag::MB1F0Eval => {
            let (a, b) = (p("a")?, p("b")?);
            let norm = lrg(b - a);
            let f = move |s: C64| -> Result<C64> { Ok((lg(s - a)? + lg(b - s)? + norm).exp()) };
            let sigma = (a.re + b.re) / 2.0;
            let poles = vec![arg(-a, 1.0, "s-a"), arg(b, -1.0, "b-s")];
            let width = (b.re - a.re) / 2.0;
            let lhs = mb1(&f, poles, TailModel::Geometric, sigma, width.min(0.5), 20.0, 0.0, inner)?;
            (lhs, C64::new(2.0, 0.0).powc(a - b))
        }
        IdentityTag::TwoF1toBeta => {
            let (a, b) = (p("a")?, p("b")?);
            let lhs = hyp2f1_minus_one(a + b, a, a + 1.0, inner)? / a + hyp2f1_minus_one(a + b, b, b + 1.0, inner)? / b;
            (lhs, beta(a, b)?)
        }
    };
    let diff = (lhs - rhs).norm();
    let error = if rhs.norm() == 0.0 { diff } else { diff / rhs.norm() };
    Ok(IdentityReport { tag: case.tag, lhs, rhs, error, pass: error <= tol })
}

/// Deterministic 64-bit linear congruential generator.
///
/// `state <- 6364136223846793005 * state + 1442695040888963407 (mod 2^64)`;
/// a uniform deviate on `[0, 1)` is `(state >> 11) / 2^53` after each step.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        self.state
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Complex value with real part in `re` and imaginary part in `im`.
    pub fn complex(&mut self, re: (f64, f64), im: (f64, f64)) -> C64 {
        let x = self.range(re.0, re.1);
        let y = self.range(im.0, im.1);
        C64::new(x, y)
    }
}

/// Draw a parameter assignment from the safe region of `tag`.
///
/// Regions (real parts; imaginary parts in brackets):
/// - pFqToMB: a1, a2 in (0.5, 2) [(-0.5, 0.5)], b1 in (1, 3) [(-0.5, 0.5)], z in (0.1, 0.6)
/// - BetaInvMellin: a in (2, 5) [(-1, 1)], x in (0.1, 0.6) or (1.5, 3)
/// - ThomaeMB: a in (1, 2), b in (0.5, 1.5), d in (0.3, 0.8), c = b + e with e in (0.5, 1.2), all [(-0.3, 0.3)], |c - 2| > 0.1
/// - EulerBeta: u, v in (0.3, 3) [(-2, 2)]
/// - Elem2F1: a, b in (-0.5, 2) [(-1, 1)], c in (-2, 2) [(-1, 1)], y in (-0.6, 0.6)
/// - Pfaff: a in (0.5, 2), b in (0.2, 1.5), c = b + e with e in (0.5, 2), all [(-0.5, 0.5)]
/// - BarnesFirst: a, b, c, d in (0.3, 2) [(-1, 1)]
/// - GaussThm: a, b in (-0.5, 1.5) [(-0.5, 0.5)], c = a + b + e with e in (0.5, 2) [(-0.3, 0.3)]
/// - SimpleMB: a, b in (0.3, 2) [(-1, 1)], x in (0.2, 5)
/// - MB1F0Eval: a in (-1, 1) [(-1, 1)], b = a + e with e in (0.3, 3) [(-1, 1)]
/// - TwoF1toBeta: a, b in (0.2, 2) [(-1, 1)]
pub fn draw_case(tag: IdentityTag, rng: &mut Lcg) -> IdentityCase {
    let r = |x: f64| C64::new(x, 0.0);
    let values: Vec<C64> = match tag {
        IdentityTag::PFqToMB => {
            let a1 = rng.complex((0.5, 2.0), (-0.5, 0.5));
            let a2 = rng.complex((0.5, 2.0), (-0.5, 0.5));
            let b1 = rng.complex((1.0, 3.0), (-0.5, 0.5));
            vec![a1, a2, b1, r(rng.range(0.1, 0.6))]
        }
        IdentityTag::BetaInvMellin => {
            let a = rng.complex((2.0, 5.0), (-1.0, 1.0));
            let x = if rng.uniform() < 0.5 { rng.range(0.1, 0.6) } else { rng.range(1.5, 3.0) };
            vec![a, r(x)]
        }
        IdentityTag::ThomaeMB => loop {
            let a = rng.complex((1.0, 2.0), (-0.3, 0.3));
            let b = rng.complex((0.5, 1.5), (-0.3, 0.3));
            let d = rng.complex((0.3, 0.8), (-0.3, 0.3));
            let c = b + rng.complex((0.5, 1.2), (-0.3, 0.3));
            if (c - 2.0).norm() > 0.1 {
                break vec![a, b, c, d];
            }
        },
        IdentityTag::EulerBeta => vec![rng.complex((0.3, 3.0), (-2.0, 2.0)), rng.complex((0.3, 3.0), (-2.0, 2.0))],
        IdentityTag::Elem2F1 => vec![
            rng.complex((-0.5, 2.0), (-1.0, 1.0)),
            rng.complex((-0.5, 2.0), (-1.0, 1.0)),
            rng.complex((-2.0, 2.0), (-1.0, 1.0)),
            r(rng.range(-0.6, 0.6)),
        ],
        IdentityTag::Pfaff => {
            let a = rng.complex((0.5, 2.0), (-0.5, 0.5));
            let b = rng.complex((0.2, 1.5), (-0.5, 0.5));
            let c = b + rng.complex((0.5, 2.0), (-0.5, 0.5));
            vec![a, b, c]
        }
        IdentityTag::BarnesFirst => (0..4).map(|_| rng.complex((0.3, 2.0), (-1.0, 1.0))).collect(),
        IdentityTag::GaussThm => {
            let a = rng.complex((-0.5, 1.5), (-0.5, 0.5));
            let b = rng.complex((-0.5, 1.5), (-0.5, 0.5));
            let c = a + b + rng.complex((0.5, 2.0), (-0.3, 0.3));
            vec![a, b, c]
        }
        IdentityTag::SimpleMB => {
            vec![rng.complex((0.3, 2.0), (-1.0, 1.0)), rng.complex((0.3, 2.0), (-1.0, 1.0)), r(rng.range(0.2, 5.0))]
        }
        IdentityTag::MB1F0Eval => {
            let a = rng.complex((-1.0, 1.0), (-1.0, 1.0));
            let b = a + rng.complex((0.3, 3.0), (-1.0, 1.0));
            vec![a, b]
        }
        IdentityTag::TwoF1toBeta => vec![rng.complex((0.2, 2.0), (-1.0, 1.0)), rng.complex((0.2, 2.0), (-1.0, 1.0))],
    };
    IdentityCase::new(tag, &values).expect("parameter count matches the tag")
}

/// Aggregate result of a randomized sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub tag: IdentityTag,
    pub count: usize,
    pub max_error: f64,
    /// Indices of failing draws with a short description.
    pub failures: Vec<(usize, String)>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check `count` parameter draws of `tag`, seeded deterministically.
pub fn random_sweep(tag: IdentityTag, count: usize, seed: u64, tol: f64) -> SweepReport {
    let mut rng = Lcg::new(seed);
    let mut max_error: f64 = 0.0;
    let mut failures = Vec::new();
    for k in 0..count {
        let case = draw_case(tag, &mut rng);
        match verify_identity(&case, tol) {
            Ok(rep) => {
                max_error = max_error.max(rep.error);
                if !rep.pass {
                    failures.push((k, format!("error {:.3e} at {:?}", rep.error, case.params)));
                }
            }
            Err(e) => failures.push((k, e.to_string())),
        }
    }
    SweepReport { tag, count, max_error, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(tag: IdentityTag, values: &[f64], expect: f64) {
        let rep = verify_identity(&IdentityCase::real(tag, values).unwrap(), 1e-9).unwrap();
        assert!((rep.rhs - C64::new(expect, 0.0)).norm() < 1e-12, "{tag}: rhs {}", rep.rhs);
        assert!(rep.pass, "{tag}: {:?}", rep);
    }

    #[test]
    fn frozen_examples() {
        check(IdentityTag::BarnesFirst, &[1.0, 1.0, 1.0, 1.0], 1.0 / 6.0);
        check(IdentityTag::GaussThm, &[1.0, 1.0, 3.0], 2.0);
        check(IdentityTag::MB1F0Eval, &[0.0, 1.0], 0.5);
        check(IdentityTag::BetaInvMellin, &[2.0, 0.25], 9.0 / 16.0);
        check(IdentityTag::BetaInvMellin, &[2.0, 2.0], 0.0);
        check(IdentityTag::EulerBeta, &[2.0, 3.0], 1.0 / 12.0);
        check(IdentityTag::TwoF1toBeta, &[1.0, 1.0], 1.0);
        check(IdentityTag::SimpleMB, &[1.0, 1.0, 1.0], 0.25);
    }

    #[test]
    fn region_predicates() {
        let bad = IdentityCase::real(IdentityTag::GaussThm, &[1.0, 1.0, 1.5]).unwrap();
        assert!(verify_identity(&bad, 1e-9).is_err());
        let bad = IdentityCase::real(IdentityTag::BarnesFirst, &[-1.0, 1.0, 0.5, 1.0]).unwrap();
        assert!(bad.check_region().is_err());
        assert!(IdentityCase::real(IdentityTag::Pfaff, &[1.0]).is_err());
    }

    #[test]
    fn lcg_is_reproducible() {
        let mut a = Lcg::new(42);
        let mut b = Lcg::new(42);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = Lcg::new(0);
        assert_eq!(c.next_u64(), 1_442_695_040_888_963_407);
        let u = Lcg::new(7).uniform();
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn small_sweeps() {
        for (tag, seed) in [(IdentityTag::GaussThm, 42), (IdentityTag::Pfaff, 7), (IdentityTag::SimpleMB, 1)] {
            let rep = random_sweep(tag, 10, seed, 1e-9);
            assert!(rep.passed(), "{:?}", rep);
        }
    }
}
