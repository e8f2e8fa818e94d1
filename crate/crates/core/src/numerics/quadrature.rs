//! Real quadrature on `(0, 1)` by substitution and the trapezoid rule.
//!
//! Integrands receive both `x` and `1 - x`, each computed without
//! cancellation, so algebraic endpoint singularities of the form
//! `x^{a-1} (1-x)^{b-1}` with complex exponents are handled accurately.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{finite, Error, Result};
use crate::C64;

/// Integrand on `(0, 1)` taking `(x, 1 - x)`.
pub type Fn01<'a> = dyn Fn(f64, f64) -> C64 + Sync + 'a;

/// Node `(x, 1 - x, dx/dv)` of the logistic map `x = 1 / (1 + e^{-v})`.
#[inline]
pub fn logistic_node(v: f64) -> (f64, f64, f64) {
    let x = 1.0 / (1.0 + (-v).exp());
    let xc = 1.0 / (1.0 + v.exp());
    (x, xc, x * xc)
}

/// Nodes and weights of the logistic rule with step `h` on `|v| <= v_max`.
pub fn logistic_rule(h: f64, v_max: f64) -> Vec<(f64, f64, f64)> {
    let n = (v_max / h).ceil() as i64;
    (-n..=n)
        .map(|k| {
            let (x, xc, j) = logistic_node(k as f64 * h);
            (x, xc, h * j)
        })
        .filter(|&(_, _, w)| w > 0.0)
        .collect()
}

/// Logistic-substitution trapezoid rule on `(0, 1)` with fixed parameters.
///
/// The map turns an endpoint singularity `x^{a-1}` into `e^{a v}` decay, so the
/// trapezoid rule converges like `exp(-c/h)` as long as the integrand is
/// analytic in a strip around the real `v` axis.
pub fn logistic_01(f: &Fn01, h: f64, v_max: f64) -> Result<C64> {
    let rule = logistic_rule(h, v_max);
    let parts: Vec<C64> = rule.par_chunks(64).map(|c| c.iter().map(|&(x, xc, w)| f(x, xc) * w).sum()).collect();
    finite(parts.iter().sum(), "logistic quadrature")
}

/// Two-dimensional logistic rule on `(0, 1)^2`.
pub fn logistic_2d(f: &(dyn Fn(f64, f64, f64, f64) -> C64 + Sync), h: f64, v_max: f64) -> Result<C64> {
    let rule = logistic_rule(h, v_max);
    let rows: Vec<C64> = rule
        .par_iter()
        .map(|&(x1, x1c, w1)| {
            let mut acc = C64::new(0.0, 0.0);
            for &(x2, x2c, w2) in &rule {
                acc += f(x1, x1c, x2, x2c) * w2;
            }
            acc * w1
        })
        .collect();
    finite(rows.iter().sum(), "two-dimensional logistic quadrature")
}

/// Adaptive logistic rule: the step is halved until two successive values
/// agree to `tol` (relative).
pub fn logistic_01_adaptive(f: &Fn01, tol: f64, v_max: f64) -> Result<C64> {
    let mut h = 0.5;
    let mut prev = logistic_01(f, h, v_max)?;
    for _ in 0..12 {
        h /= 2.0;
        let cur = logistic_01(f, h, v_max)?;
        if (cur - prev).norm() <= tol * cur.norm().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergent { what: "logistic quadrature".into(), iterations: 12 })
}

/// Tanh-sinh (double exponential) quadrature on `(0, 1)`.
pub fn tanh_sinh_01(f: &Fn01, tol: f64) -> Result<C64> {
    let t_max = 6.5;
    let eval = |h: f64| -> C64 {
        let n = (t_max / h).ceil() as i64;
        let mut acc = C64::new(0.0, 0.0);
        for k in -n..=n {
            let t = k as f64 * h;
            let u = 0.5 * PI * t.sinh();
            let x = 1.0 / (1.0 + (-2.0 * u).exp());
            let xc = 1.0 / (1.0 + (2.0 * u).exp());
            let w = h * PI * t.cosh() * x * xc;
            if w > 0.0 && x > 0.0 && xc > 0.0 {
                acc += f(x, xc) * w;
            }
        }
        acc
    };
    let mut h = 0.25;
    let mut prev = eval(h);
    for _ in 0..10 {
        h /= 2.0;
        let cur = eval(h);
        if (cur - prev).norm() <= tol * cur.norm().max(1e-300) {
            return finite(cur, "tanh-sinh quadrature");
        }
        prev = cur;
    }
    Err(Error::NonConvergent { what: "tanh-sinh quadrature".into(), iterations: 10 })
}

/// Integral of a smooth function over a finite interval `[a, b]`.
pub fn integrate_interval(f: &(dyn Fn(f64) -> C64 + Sync), a: f64, b: f64, tol: f64) -> Result<C64> {
    let len = b - a;
    let g = |x: f64, xc: f64| {
        let p = if x < 0.5 { a + len * x } else { b - len * xc };
        f(p) * len
    };
    tanh_sinh_01(&g, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma::beta;

    #[test]
    fn beta_integral_with_weak_singularities() {
        let a = C64::new(0.05, 0.7);
        let b = C64::new(0.3, -1.1);
        let f = |x: f64, xc: f64| (C64::new(x.ln(), 0.0) * (a - 1.0)).exp() * (C64::new(xc.ln(), 0.0) * (b - 1.0)).exp();
        let exact = beta(a, b).unwrap();
        let v = logistic_01_adaptive(&f, 1e-13, 700.0).unwrap();
        assert!((v - exact).norm() < 1e-11 * exact.norm(), "{v} {exact}");
    }

    #[test]
    fn tanh_sinh_smooth() {
        let v = tanh_sinh_01(&|x, _| C64::new(x.exp(), 0.0), 1e-14).unwrap();
        assert!((v.re - (1f64.exp() - 1.0)).abs() < 1e-13);
        let v = integrate_interval(&|x| C64::new(x.cos(), 0.0), -1.0, 2.0, 1e-14).unwrap();
        assert!((v.re - (2f64.sin() + 1f64.sin())).abs() < 1e-13);
    }

    #[test]
    fn two_dimensional_product() {
        let f = |x1: f64, _: f64, x2: f64, _: f64| C64::new((x1 * x2).sqrt().recip(), 0.0);
        let v = logistic_2d(&f, 0.1, 80.0).unwrap();
        assert!((v.re - 4.0).abs() < 1e-10);
    }
}
