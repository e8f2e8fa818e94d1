//! Stade's formula for the Rankin-Selberg integral of two minimal-weight
//! Whittaker functions, two independent numerical oracles for it, and the
//! spectral weights derived from it.
//!
//! ```text
//! Psi(r, r', t) = int_{Y+} W(y, r) W(y, r')^T (y1^2 y2)^t dy1 dy2 / (y1 y2)^3
//!   = 2^{4-d-4t-r-r'} pi^{2-3t} G(t+r+r') G(h+t+r-2r') G(h+t+r'-2r)
//!     G(d-1+t+r+r') G(t/2-r-r') / G(3t/2),              h = (d-1)/2.
//! ```

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{finite, Error, Result};
use crate::numerics::gamma::{ln_gamma, near_gamma_pole};
use crate::numerics::quadrature::logistic_node;
use crate::whittaker::{SpectralPoint, WhittakerGrid};
use crate::C64;

/// Arguments of `Psi(r, r', t)` for weight `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StadeParams {
    pub d: usize,
    pub r: C64,
    pub rprime: C64,
    pub t: C64,
}

impl StadeParams {
    pub fn new(d: usize, r: C64, rprime: C64, t: C64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("weight d = {d} must be at least 2")));
        }
        let p = Self { d, r, rprime, t };
        for z in p.gamma_arguments() {
            if near_gamma_pole(z, 1e-6) {
                return Err(Error::PoleOfGamma(z));
            }
        }
        Ok(p)
    }

    /// Real `t` and imaginary `r = i a`, `r' = i b`.
    pub fn imaginary(d: usize, a: f64, b: f64, t: f64) -> Result<Self> {
        Self::new(d, C64::new(0.0, a), C64::new(0.0, b), C64::new(t, 0.0))
    }

    fn h(&self) -> f64 {
        (self.d as f64 - 1.0) / 2.0
    }

    /// Numerator arguments of the closed form, then the denominator `3t/2`.
    fn gamma_arguments(&self) -> [C64; 6] {
        let (h, r, q, t) = (self.h(), self.r, self.rprime, self.t);
        let d1 = self.d as f64 - 1.0;
        [t + r + q, t + r - q * 2.0 + h, t + q - r * 2.0 + h, t + r + q + d1, t / 2.0 - r - q, t * 1.5]
    }
}

/// Closed form of `Psi(r, r', t)`.
pub fn stade_closed(p: &StadeParams) -> Result<C64> {
    let args = p.gamma_arguments();
    let mut l = (4.0 - p.d as f64 - p.t * 4.0 - p.r - p.rprime) * 2f64.ln() + (2.0 - p.t * 3.0) * PI.ln();
    for z in &args[..5] {
        l += ln_gamma(*z)?;
    }
    l -= ln_gamma(args[5])?;
    finite(l.exp(), "closed form")
}

/// Spectral weights `sin^d(r)`, `cos^d(r)` and `spec^d(r) = sin / cos`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralWeights {
    pub sin_weight: C64,
    pub cos_weight: C64,
    pub spec_weight: C64,
}

/// `1/sin = 2^{5-d} pi^3 i G(d-1) G(h-3r) G(h+3r)`,
/// `1/cos = 2^{1-d} / pi G(d) G(h+1+3r) G(h+1-3r)` and
/// `spec = (d-1)(h-3r)(h+3r) / (16 pi^4 i)`.
pub fn spectral_weights(p: &SpectralPoint) -> Result<SpectralWeights> {
    let d = p.d as f64;
    let h = p.h();
    let r3 = p.r * 3.0;
    let i = C64::new(0.0, 1.0);
    let inv_sin = ((5.0 - d) * 2f64.ln() + 3.0 * PI.ln() + ln_gamma(C64::new(d - 1.0, 0.0))? + ln_gamma(-r3 + h)? + ln_gamma(r3 + h)?).exp() * i;
    let inv_cos = ((1.0 - d) * 2f64.ln() - PI.ln() + ln_gamma(C64::new(d, 0.0))? + ln_gamma(r3 + h + 1.0)? + ln_gamma(-r3 + h + 1.0)?).exp();
    let spec = (-r3 + h) * (r3 + h) * (d - 1.0) / (i * 16.0 * PI.powi(4));
    Ok(SpectralWeights { sin_weight: inv_sin.inv(), cos_weight: inv_cos.inv(), spec_weight: spec })
}

/// `t Psi(r, -r, t)`, which tends to `3 / (2 pi i sin^d(r))` as `t -> 0+`.
pub fn t_times_psi(p: &SpectralPoint, t: f64) -> Result<C64> {
    Ok(stade_closed(&StadeParams::new(p.d, p.r, -p.r, C64::new(t, 0.0))?)? * t)
}

/// Residue of `r' -> Psi(r', -r, t)` at `r' = r + t/2`; it tends to
/// `-1 / (2 pi i sin^d(r))` as `t -> 0+` (the sign is that of a pole of
/// `G(t/2 - r' + r)`).
pub fn r_prime_residue(p: &SpectralPoint, t: f64) -> Result<C64> {
    let (d, h, r) = (p.d as f64, p.h(), p.r);
    let t = C64::new(t, 0.0);
    let rp = r + t / 2.0;
    // G(t + r' - r) = G(3t/2) cancels the denominator
    let l = (4.0 - d - t * 4.0 - rp + r) * 2f64.ln()
        + (2.0 - t * 3.0) * PI.ln()
        + ln_gamma(t + rp + r * 2.0 + h)?
        + ln_gamma(t - r - rp * 2.0 + h)?
        + ln_gamma(t + rp - r + d - 1.0)?;
    Ok(-l.exp())
}

/// Largest `|Re|`-free exponent check shared by the oracle integrands.
fn exponent_floor(z: C64, what: &str) -> Result<f64> {
    if z.re <= -1.0 {
        return Err(Error::RangeExceeded(format!("exponent of {what} has real part {:.3} <= -1", z.re)));
    }
    Ok(z.re + 1.0)
}

/// `Psi` from its elementary two-dimensional integral over `[0, 1]^2`, after
/// splitting at `x1 = x2` and rescaling both halves to the unit square:
///
/// ```text
/// Psi = (2 pi)^{4-3t} / (2^d pi^2) G(d-1+2t-r-r') G(d-1+t+r+r')
///   * sum over (u, v) in {(r, r'), (r', r)} of int x1^{a} (1-x1)^{t/2-r-r'-1} (1+x1)^{-3t/2}
///       x2^{b} (1-x2)^{t+r+r'-1} (1 - x1 x2)^{1-3t/2} (1 + x1 x2)^{1-d-3t/2} dx,
/// a = (d-3)/2 + 2t + 2u - v,  b = (d-3)/2 + t + u - 2v.
/// ```
///
/// Only defined for `0 < Re t < 2/3`; the integral is computed with the
/// logistic substitution `x = 1/(1 + e^{-v})` in both variables and the
/// trapezoid rule, halving the step until two values agree to `tol`.
pub fn stade_oracle_elementary(p: &StadeParams, tol: f64) -> Result<C64> {
    let t = p.t;
    if !(t.re > 0.0 && t.re < 2.0 / 3.0) {
        return Err(Error::RangeExceeded(format!("elementary integral needs 0 < Re t < 2/3, got {t}")));
    }
    let (r, q, d) = (p.r, p.rprime, p.d as f64);
    let hd = (d - 3.0) / 2.0;
    let a = [t * 2.0 + r * 2.0 - q + hd, t * 2.0 + q * 2.0 - r + hd];
    let b = [t + r - q * 2.0 + hd, t + q - r * 2.0 + hd];
    let c1 = t / 2.0 - r - q - 1.0;
    let c2 = t + r + q - 1.0;
    let alpha = 1.0 - t * 1.5;
    let beta = 1.0 - d - t * 1.5;
    let big = (1.0 / tol).ln() + 6.0;
    // logistic tails decay like e^{(Re e + 1) v} and e^{-(Re e + 1) v}
    let lo1 = big / exponent_floor(a[0], "x1")?.min(exponent_floor(a[1], "x1")?);
    let hi1 = big / exponent_floor(c1, "1-x1")?;
    let lo2 = big / exponent_floor(b[0], "x2")?.min(exponent_floor(b[1], "x2")?);
    let hi2 = big / exponent_floor(c2, "1-x2")?;
    let pref = ((4.0 - t * 3.0) * (2.0 * PI).ln() - d * 2f64.ln() - 2.0 * PI.ln() + ln_gamma(t * 2.0 - r - q + d - 1.0)? + ln_gamma(t + r + q + d - 1.0)?).exp();

    let sum = |step: f64| -> Result<C64> {
        let axis = |lo: f64, hi: f64| -> Vec<(f64, f64, f64)> {
            let k0 = -(lo.min(700.0) / step).ceil() as i64;
            let k1 = (hi.min(700.0) / step).ceil() as i64;
            (k0..=k1).map(|k| logistic_node(k as f64 * step)).filter(|n| n.2 > 0.0).collect()
        };
        let n1 = axis(lo1, hi1);
        let n2 = axis(lo2, hi2);
        // one-dimensional factors of both halves, Jacobians included
        let f1: Vec<[C64; 2]> = n1
            .iter()
            .map(|&(x, xc, j)| {
                let common = c1 * xc.ln() - t * 1.5 * (1.0 + x).ln();
                [((a[0]) * x.ln() + common).exp() * j, ((a[1]) * x.ln() + common).exp() * j]
            })
            .collect();
        let f2: Vec<[C64; 2]> = n2
            .iter()
            .map(|&(x, xc, j)| {
                let common = c2 * xc.ln();
                [((b[0]) * x.ln() + common).exp() * j, ((b[1]) * x.ln() + common).exp() * j]
            })
            .collect();
        let rows: Vec<C64> = n1
            .par_iter()
            .zip(&f1)
            .map(|(&(x1, x1c, _), g1)| {
                let mut acc = [C64::new(0.0, 0.0); 2];
                for (&(x2, x2c, _), g2) in n2.iter().zip(&f2) {
                    // 1 - x1 x2 without cancellation
                    let one_minus = x1c + x1 * x2c;
                    let prod = x1 * x2;
                    let coupled = (alpha * one_minus.ln() + beta * prod.ln_1p()).exp();
                    acc[0] += g2[0] * coupled;
                    acc[1] += g2[1] * coupled;
                }
                acc[0] * g1[0] + acc[1] * g1[1]
            })
            .collect();
        finite(rows.iter().sum::<C64>() * step * step * pref, "elementary integral")
    };

    let mut step = 0.2;
    let mut prev = sum(step)?;
    for _ in 0..4 {
        step /= 2.0;
        let cur = sum(step)?;
        if (cur - prev).norm() <= tol * cur.norm() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergent { what: "elementary Stade integral".into(), iterations: 4 })
}

/// Logarithmic grid for the direct Rankin-Selberg integral: `u_i = ln y_i`
/// runs over `[u_min[i], u_max]` with spacing `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectGrid {
    pub step: f64,
    pub u_min: [f64; 2],
    pub u_max: f64,
}

impl DirectGrid {
    /// Default grid for real part `t` of the exponent: the integrand decays like
    /// `y1^{2t}` and `y2^t` at zero and double-exponentially at infinity.
    pub fn for_t(t: f64, tol: f64) -> Self {
        let l = (1.0 / tol).ln() + 4.0;
        Self { step: 0.2, u_min: [-l / (2.0 * t) - 1.0, -l / t - 1.0], u_max: 2.6 }
    }

    pub fn refined(&self) -> Self {
        Self { step: self.step / 2.0, ..*self }
    }

    fn axis(&self, i: usize) -> Vec<f64> {
        let n = ((self.u_max - self.u_min[i]) / self.step).ceil() as usize;
        (0..=n).map(|k| self.u_min[i] + k as f64 * self.step).collect()
    }
}

/// `Psi` straight from its definition: the bilinear pairing of two Whittaker
/// vectors integrated over a logarithmic grid of the torus.
pub fn stade_oracle_direct(p: &StadeParams, grid: &DirectGrid, tol: f64) -> Result<C64> {
    if p.t.re <= 0.0 {
        return Err(Error::RangeExceeded("direct integral needs Re t > 0".into()));
    }
    let u1 = grid.axis(0);
    let u2 = grid.axis(1);
    let y1: Vec<f64> = u1.iter().map(|u| u.exp()).collect();
    let y2: Vec<f64> = u2.iter().map(|u| u.exp()).collect();
    let span = grid.u_min[0].min(grid.u_min[1]).abs() + (2.0 * PI).ln();
    let sigma = [0.8, 0.8];
    let wa = WhittakerGrid::new(&SpectralPoint::new(p.d, p.r)?, sigma, tol, span)?.eval_grid(&y1, &y2);
    let wb = WhittakerGrid::new(&SpectralPoint::new(p.d, p.rprime)?, sigma, tol, span)?.eval_grid(&y1, &y2);
    let mut acc = C64::new(0.0, 0.0);
    for (i, &a) in u1.iter().enumerate() {
        for (j, &b) in u2.iter().enumerate() {
            let pair: C64 = wa[i][j].entries.iter().zip(&wb[i][j].entries).map(|(x, y)| x * y).sum();
            // (y1^2 y2)^t dy1 dy2 / (y1 y2)^3 = y1^{2t-2} y2^{t-2} du1 du2
            acc += pair * ((p.t * 2.0 - 2.0) * a + (p.t - 2.0) * b).exp();
        }
    }
    finite(acc * grid.step * grid.step, "direct Rankin-Selberg integral")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ci(t: f64) -> C64 {
        C64::new(0.0, t)
    }

    #[test]
    fn weights_at_zero() {
        let w = spectral_weights(&SpectralPoint::new(2, C64::new(0.0, 0.0)).unwrap()).unwrap();
        assert!((w.cos_weight - C64::new(8.0, 0.0)).norm() < 1e-13);
        assert!((w.sin_weight - C64::new(0.0, -1.0 / (8.0 * PI.powi(4)))).norm() < 1e-17);
        assert!((w.spec_weight - C64::new(0.0, -1.0 / (64.0 * PI.powi(4)))).norm() < 1e-18);
    }

    #[test]
    fn weights_are_consistent() {
        for d in 2..=10 {
            for t in [0.0, 0.2, 0.7, 1.5, 3.0] {
                let w = spectral_weights(&SpectralPoint::new(d, ci(t)).unwrap()).unwrap();
                let ratio = w.spec_weight * w.cos_weight / w.sin_weight;
                assert!((ratio - 1.0).norm() < 1e-12, "d={d} t={t}");
            }
        }
    }

    #[test]
    fn closed_form_at_t_one_is_inverse_cos() {
        for d in [2, 3, 6] {
            let p = SpectralPoint::new(d, ci(0.4)).unwrap();
            let v = stade_closed(&StadeParams::new(d, p.r, -p.r, C64::new(1.0, 0.0)).unwrap()).unwrap();
            let w = spectral_weights(&p).unwrap();
            assert!((v * w.cos_weight - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn residues_tend_to_sin_weight() {
        let p = SpectralPoint::new(3, ci(0.3)).unwrap();
        let target = C64::new(0.0, 2.0 * PI) * spectral_weights(&p).unwrap().sin_weight;
        let e1 = (t_times_psi(&p, 1e-3).unwrap() * target - 3.0).norm();
        let e2 = (t_times_psi(&p, 1e-4).unwrap() * target - 3.0).norm();
        assert!(e2 < e1 && e2 < 1e-2);
        let e3 = (r_prime_residue(&p, 1e-4).unwrap() * target + 1.0).norm();
        assert!(e3 < 1e-2);
    }

    #[test]
    fn elementary_oracle_matches() {
        for (d, a, b, t) in [(2, 0.3, 0.2, 0.4), (4, 0.5, -0.5, 0.5)] {
            let p = StadeParams::imaginary(d, a, b, t).unwrap();
            let c = stade_closed(&p).unwrap();
            let e = stade_oracle_elementary(&p, 1e-8).unwrap();
            assert!((e - c).norm() < 1e-6 * c.norm(), "{e} {c}");
        }
        let p = StadeParams::imaginary(2, 0.3, 0.2, 0.8).unwrap();
        assert!(matches!(stade_oracle_elementary(&p, 1e-8), Err(Error::RangeExceeded(_))));
    }

    #[test]
    fn elementary_oracle_is_symmetric() {
        let a = stade_oracle_elementary(&StadeParams::imaginary(3, 0.7, 0.2, 0.45).unwrap(), 1e-8).unwrap();
        let b = stade_oracle_elementary(&StadeParams::imaginary(3, 0.2, 0.7, 0.45).unwrap(), 1e-8).unwrap();
        assert!((a - b).norm() < 1e-8 * a.norm());
    }
}
