//! Mellin-Barnes integrals along parabolic loop contours.
//!
//! Some Mellin-Barnes representations do not converge absolutely on vertical
//! lines.  Bending the line into the parabola
//! `s(u) = sigma + i c u - a u^2` keeps the same poles on either side as long
//! as the left-hand pole families lie to the left of the curve, and makes the
//! gamma factors decay super-exponentially along it.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{finite, Error, Result};
use crate::C64;

/// Parabola `s(u) = sigma + i c u - a u^2`, `|u| <= u_max`, traversed upwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopContour {
    pub sigma: f64,
    pub c: f64,
    pub a: f64,
    pub u_max: f64,
}

impl LoopContour {
    pub fn point(&self, u: f64) -> (C64, C64) {
        (C64::new(self.sigma - self.a * u * u, self.c * u), C64::new(-2.0 * self.a * u, self.c))
    }

    /// Signed horizontal offset of `p` from the curve; negative means `p`
    /// lies on the left (enclosed) side.
    pub fn side(&self, p: C64) -> f64 {
        let u = p.im / self.c;
        p.re - (self.sigma - self.a * u * u)
    }

    /// Contour passing to the right of all left poles `poles_left` and to the
    /// left of `poles_right`, with a margin of at least `margin`.
    pub fn check(&self, poles_left: &[C64], poles_right: &[C64], margin: f64) -> Result<()> {
        for &p in poles_left {
            if self.side(p) > -margin {
                return Err(Error::ContourSeparation(format!("left pole {p} not enclosed by the loop")));
            }
        }
        for &p in poles_right {
            if self.side(p) < margin {
                return Err(Error::ContourSeparation(format!("right pole {p} enclosed by the loop")));
            }
        }
        Ok(())
    }

    fn nodes(&self, h: f64) -> Vec<(C64, C64)> {
        let n = (self.u_max / h).ceil() as i64;
        (-n..=n).map(|k| self.point(k as f64 * h)).collect()
    }
}

/// `(2 pi i)^{-1} \int f(s) ds` along a loop with step `h` in the parameter.
pub fn loop_trapezoid_1d(f: &(dyn Fn(C64) -> Result<C64> + Sync), l: &LoopContour, h: f64) -> Result<C64> {
    let nodes = l.nodes(h);
    let mut acc = C64::new(0.0, 0.0);
    for (s, ds) in nodes {
        acc += f(s)? * ds;
    }
    finite(acc * h / C64::new(0.0, 2.0 * PI), "loop integral")
}

/// Two-dimensional loop integral, one loop per variable.
///
/// `f` receives the precomputed row index data through `(s1, s2)` only; rows
/// are processed in parallel and summed in order.
pub fn loop_trapezoid_2d(
    f: &(dyn Fn(C64, C64) -> Result<C64> + Sync),
    l1: &LoopContour,
    l2: &LoopContour,
    h: f64,
) -> Result<C64> {
    let n1 = l1.nodes(h);
    let n2 = l2.nodes(h);
    let rows: Vec<Result<C64>> = n1
        .par_iter()
        .map(|&(s1, ds1)| {
            let mut acc = C64::new(0.0, 0.0);
            for &(s2, ds2) in &n2 {
                acc += f(s1, s2)? * ds2;
            }
            Ok(acc * ds1)
        })
        .collect();
    let mut total = C64::new(0.0, 0.0);
    for r in rows {
        total += r?;
    }
    let c = C64::new(0.0, 2.0 * PI);
    finite(total * h * h / (c * c), "two-dimensional loop integral")
}

/// Adaptive loop integration: halve the step until two values agree to `tol`.
pub fn loop_integrate_1d(f: &(dyn Fn(C64) -> Result<C64> + Sync), l: &LoopContour, tol: f64) -> Result<C64> {
    let mut h = 0.1;
    let mut prev = loop_trapezoid_1d(f, l, h)?;
    for _ in 0..10 {
        h /= 2.0;
        let cur = loop_trapezoid_1d(f, l, h)?;
        if (cur - prev).norm() <= tol * cur.norm().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergent { what: "loop integral".into(), iterations: 10 })
}

/// Adaptive two-dimensional loop integration starting from step `h0`.
pub fn loop_integrate_2d(
    f: &(dyn Fn(C64, C64) -> Result<C64> + Sync),
    l1: &LoopContour,
    l2: &LoopContour,
    h0: f64,
    tol: f64,
) -> Result<C64> {
    let mut h = h0;
    let mut prev = loop_trapezoid_2d(f, l1, l2, h)?;
    for _ in 0..4 {
        h /= 2.0;
        let cur = loop_trapezoid_2d(f, l1, l2, h)?;
        if (cur - prev).norm() <= tol * cur.norm().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergent { what: "two-dimensional loop integral".into(), iterations: 4 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma::ln_gamma;

    #[test]
    fn exponential_from_gamma() {
        // (2 pi i)^{-1} \int Gamma(s) x^{-s} ds = e^{-x}
        let x: f64 = 3.0;
        let f = move |s: C64| -> Result<C64> { Ok((ln_gamma(s)? - s * x.ln()).exp()) };
        let l = LoopContour { sigma: 0.5, c: 2.0, a: 0.3, u_max: 12.0 };
        let v = loop_integrate_1d(&f, &l, 1e-12).unwrap();
        assert!((v.re - (-x).exp()).abs() < 1e-12, "{v}");
        assert!(l.check(&[C64::new(0.0, 0.0), C64::new(-5.0, 0.0)], &[], 0.1).is_ok());
    }

    #[test]
    fn bessel_type_integral() {
        // (2 pi i)^{-1} \int Gamma(s) / Gamma(1 - s) x^{-2s} ds = J_0(2x), which does
        // not converge absolutely on a vertical line
        let x: f64 = 1.5;
        let f = move |s: C64| -> Result<C64> {
            Ok((ln_gamma(s)? - ln_gamma(C64::new(1.0, 0.0) - s)? - s * 2.0 * x.ln()).exp())
        };
        let l = LoopContour { sigma: 0.4, c: 2.0, a: 0.3, u_max: 14.0 };
        let v = loop_integrate_1d(&f, &l, 1e-12).unwrap();
        // J_0(3)
        assert!((v.re - (-0.260_051_954_901_933_4)).abs() < 1e-11, "{v}");
    }
}
