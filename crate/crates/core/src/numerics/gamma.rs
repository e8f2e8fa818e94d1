//! Complex log-gamma, gamma ratios and beta functions.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::C64;

const LN_2PI_HALF: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k - 1)) for k = 1..=10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// True when `z` lies within `tol` of a non-positive integer.
pub fn near_gamma_pole(z: C64, tol: f64) -> bool {
    let k = z.re.round();
    k <= 0.0 && (z - C64::new(k, 0.0)).norm() < tol
}

/// Continuous log-gamma on the plane cut along the negative real axis.
fn ln_gamma_raw(z: C64) -> C64 {
    if z.re < 0.5 {
        // reflection: ln G(z) = ln pi - ln sin(pi z) - ln G(1 - z)
        return C64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_raw(C64::new(1.0, 0.0) - z);
    }
    let mut w = z;
    let mut prod = C64::new(1.0, 0.0);
    while w.re < 10.0 {
        prod *= w;
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = C64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    let main = (w - 0.5) * w.ln() - w + LN_2PI_HALF + series;
    if prod == C64::new(1.0, 0.0) {
        main
    } else {
        main - prod.ln()
    }
}

/// ln sin(pi z), computed without overflow for large imaginary parts.
fn ln_sin_pi(z: C64) -> C64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    if z.im == 0.0 {
        let s = (PI * z.re).sin();
        return if s >= 0.0 {
            C64::new(s.ln(), 0.0)
        } else {
            C64::new((-s).ln(), PI)
        };
    }
    // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i), |e^{2 i pi z}| <= 1
    let i = C64::new(0.0, 1.0);
    let e = (i * 2.0 * PI * z).exp();
    -i * PI * z + ((e - 1.0) / (i * 2.0)).ln()
}

fn principal(z: C64) -> C64 {
    let two_pi = 2.0 * PI;
    let mut im = z.im - two_pi * (z.im / two_pi).round();
    if im <= -PI {
        im += two_pi;
    }
    C64::new(z.re, im)
}

/// Principal-branch logarithm of the gamma function.
///
/// Fails with [`Error::PoleOfGamma`] within `1e-12` of a non-positive integer.
pub fn ln_gamma(z: C64) -> Result<C64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NotFinite("ln_gamma argument".into()));
    }
    if near_gamma_pole(z, 1e-12) {
        return Err(Error::PoleOfGamma(z));
    }
    Ok(principal(ln_gamma_raw(z)))
}

/// Gamma function.
pub fn gamma(z: C64) -> Result<C64> {
    Ok(ln_gamma(z)?.exp())
}

/// Reciprocal gamma, which is entire: exactly zero at the poles of gamma.
pub fn rgamma(z: C64) -> C64 {
    if near_gamma_pole(z, 1e-12) {
        C64::new(0.0, 0.0)
    } else {
        (-ln_gamma_raw(z)).exp()
    }
}

/// Log of the reciprocal gamma, `None` where 1/Gamma vanishes.
pub fn ln_rgamma(z: C64) -> Option<C64> {
    if near_gamma_pole(z, 1e-12) {
        None
    } else {
        Some(-ln_gamma_raw(z))
    }
}

/// Beta function evaluated in the log domain.
pub fn beta(a: C64, b: C64) -> Result<C64> {
    Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma_or_zero(a + b)?).exp())
}

fn ln_gamma_or_zero(z: C64) -> Result<C64> {
    // a pole of Gamma(a + b) in the denominator makes the beta function vanish
    if near_gamma_pole(z, 1e-12) {
        Ok(C64::new(f64::NEG_INFINITY, 0.0))
    } else {
        ln_gamma(z)
    }
}

/// Product of gammas `prod Gamma(num) / prod Gamma(den)` in the log domain.
///
/// Poles in the denominator give zero; poles in the numerator are errors.
pub fn gamma_ratio(num: &[C64], den: &[C64]) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for &z in num {
        acc += ln_gamma(z)?;
    }
    for &z in den {
        match ln_rgamma(z) {
            Some(l) => acc += l,
            None => return Ok(C64::new(0.0, 0.0)),
        }
    }
    Ok(acc.exp())
}

/// Pochhammer symbol `(a)_n` by direct product.
pub fn pochhammer(a: C64, n: usize) -> C64 {
    (0..n).fold(C64::new(1.0, 0.0), |p, k| p * (a + k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn special_values() {
        assert!(ln_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!(ln_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-14);
        let half = ln_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14);
        // Gamma(10) = 9!
        let g = gamma(c(10.0, 0.0)).unwrap();
        assert!((g.re - 362_880.0).abs() / 362_880.0 < 1e-14);
        // Gamma(-1/2) = -2 sqrt(pi)
        let g = gamma(c(-0.5, 0.0)).unwrap();
        assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-14);
        assert!(g.im.abs() < 1e-14);
    }

    #[test]
    fn frozen_complex_values() {
        // ln Gamma(1 + i) from an independent high-precision evaluation
        let z = ln_gamma(c(1.0, 1.0)).unwrap();
        assert!((z - c(-0.650_923_199_301_856_8, -0.301_640_320_467_533_2)).norm() < 1e-14);
        // |Gamma(i t)|^2 = pi / (t sinh(pi t))
        let t = 3.7;
        let g = gamma(c(0.0, t)).unwrap().norm_sqr();
        let exact = PI / (t * (PI * t).sinh());
        assert!((g - exact).abs() / exact < 1e-13);
        // Gamma(1/2 + 100 i) modulus
        let t = 100.0;
        let g = gamma(c(0.5, t)).unwrap().norm_sqr();
        let exact = PI / (PI * t).cosh();
        assert!((g - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn poles() {
        assert!(matches!(ln_gamma(c(0.0, 0.0)), Err(Error::PoleOfGamma(_))));
        assert!(matches!(ln_gamma(c(-3.0, 1e-13)), Err(Error::PoleOfGamma(_))));
        assert_eq!(rgamma(c(-2.0, 0.0)), c(0.0, 0.0));
        assert!(ln_gamma(c(-3.0, 1e-6)).is_ok());
    }

    #[test]
    fn beta_and_ratio() {
        let b = beta(c(2.0, 0.0), c(3.0, 0.0)).unwrap();
        assert!((b.re - 1.0 / 12.0).abs() < 1e-15);
        let r = gamma_ratio(&[c(5.0, 0.0)], &[c(3.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(r, c(0.0, 0.0));
        assert!((pochhammer(c(3.0, 0.0), 4).re - 360.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn conjugation_symmetry(re in -30.0f64..30.0, im in 0.1f64..200.0) {
            let z = c(re, im);
            let a = ln_gamma(z.conj()).unwrap();
            let b = ln_gamma(z).unwrap().conj();
            prop_assert!((a.re - b.re).abs() < 1e-12 * (1.0 + b.re.abs()));
            let dim = (a.im - b.im).abs();
            prop_assert!(dim < 1e-10 || (dim - 2.0 * PI).abs() < 1e-10);
        }

        #[test]
        fn recurrence(re in -20.0f64..40.0, im in -50.0f64..50.0) {
            prop_assume!(im.abs() > 1e-3 || (re - re.round()).abs() > 1e-3);
            let z = c(re, im);
            let lhs = gamma(z + 1.0).unwrap();
            let rhs = gamma(z).unwrap() * z;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm());
        }

        #[test]
        fn reflection(re in -10.0f64..10.0, im in -8.0f64..8.0) {
            prop_assume!(im.abs() > 1e-3 || (re - re.round()).abs() > 1e-3);
            let z = c(re, im);
            let lhs = (ln_gamma(z).unwrap() + ln_gamma(C64::new(1.0, 0.0) - z).unwrap()).exp();
            let rhs = C64::new(PI, 0.0) / (z * PI).sin();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
        }

        #[test]
        fn duplication(re in 0.1f64..30.0, im in -30.0f64..30.0) {
            let z = c(re, im);
            let lhs = ln_gamma(z * 2.0).unwrap();
            let rhs = ln_gamma(z).unwrap() + ln_gamma(z + 0.5).unwrap()
                + (z * 2.0 - 1.0) * 2f64.ln() - 0.5 * PI.ln();
            let d = (lhs - rhs).exp();
            prop_assert!((d - 1.0).norm() < 1e-12);
        }
    }
}
