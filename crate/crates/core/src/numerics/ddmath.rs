//! Complex double-double arithmetic for the few places where hypergeometric
//! series lose ten or more digits to cancellation.
//!
//! Sums and products come from `twofloat`.  Its sine and cosine are accurate
//! to about `1e-22`, but its quotient and logarithm lose about half the
//! digits, so division, `exp`, `ln` and `atan2` are provided here: division
//! and `ln` and `atan2` by Newton corrections of the `f64` values, `exp` by
//! argument reduction and a short Taylor series.

use num_complex::Complex;
use twofloat::{consts, TwoFloat};

use crate::C64;

/// Complex double-double number.
pub type Dd = Complex<TwoFloat>;

pub fn dd(z: C64) -> Dd {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

pub fn dd_real(x: f64) -> Dd {
    Complex::new(TwoFloat::from(x), TwoFloat::from(0.0))
}

pub fn to_c64(z: Dd) -> C64 {
    C64::new(f64::from(z.re), f64::from(z.im))
}

pub fn norm(z: Dd) -> f64 {
    to_c64(z).norm()
}

/// Quotient with one Newton correction.
pub fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q = TwoFloat::from(a.hi() / b.hi());
    let q = q + TwoFloat::from((a - q * b).hi() / b.hi());
    q + TwoFloat::from((a - q * b).hi() / b.hi())
}

/// Complex quotient.
pub fn cdiv(a: Dd, b: Dd) -> Dd {
    let n = b.re * b.re + b.im * b.im;
    let p = a * b.conj();
    Complex::new(div(p.re, n), div(p.im, n))
}

/// Real exponential.
pub fn exp(x: TwoFloat) -> TwoFloat {
    let k = (x.hi() / std::f64::consts::LN_2).round();
    // division by a power of two is exact
    let r = (x - consts::LN_2 * k) * (1.0 / 1024.0);
    let mut term = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(1.0);
    for n in 1..12 {
        term = div(term * r, TwoFloat::from(n as f64));
        sum += term;
    }
    for _ in 0..10 {
        sum = sum * sum;
    }
    sum * 2f64.powi(k as i32)
}

/// Natural logarithm of a positive number.
pub fn ln(x: TwoFloat) -> TwoFloat {
    let mut l = TwoFloat::from(x.hi().ln());
    for _ in 0..2 {
        l += x * exp(-l) - 1.0;
    }
    l
}

/// Angle of the point `(x, y)`.
pub fn atan2(y: TwoFloat, x: TwoFloat) -> TwoFloat {
    let mut t = TwoFloat::from(y.hi().atan2(x.hi()));
    for _ in 0..2 {
        let (s, c) = (t.sin(), t.cos());
        t += div(y * c - x * s, x * c + y * s);
    }
    t
}

pub fn cexp(z: Dd) -> Dd {
    let m = exp(z.re);
    Complex::new(m * z.im.cos(), m * z.im.sin())
}

/// Principal logarithm.
pub fn cln(z: Dd) -> Dd {
    Complex::new(ln(z.re * z.re + z.im * z.im) * 0.5, atan2(z.im, z.re))
}

/// `|x|^z` for real `x != 0`.
pub fn abs_pow(x: f64, z: Dd) -> Dd {
    cexp(z * ln(TwoFloat::from(x.abs())))
}

/// `sin(pi z)`.
pub fn sin_pi(z: Dd) -> Dd {
    let a = z.re * consts::PI;
    let b = z.im * consts::PI;
    let (eb, emb) = (exp(b), exp(-b));
    Complex::new(a.sin() * (eb + emb) * 0.5, a.cos() * (eb - emb) * 0.5)
}

// B_{2k} / (2k (2k - 1)) as numerator and denominator
const STIRLING: [(f64, f64); 12] = [
    (1.0, 12.0),
    (-1.0, 360.0),
    (1.0, 1260.0),
    (-1.0, 1680.0),
    (1.0, 1188.0),
    (-691.0, 360_360.0),
    (1.0, 156.0),
    (-3617.0, 122_400.0),
    (43867.0, 244_188.0),
    (-174_611.0, 125_400.0),
    (77683.0, 5796.0),
    (-236_364_091.0, 1_506_960.0),
];

/// Gamma function away from its poles.
pub fn gamma(z: Dd) -> Dd {
    let one = dd_real(1.0);
    if z.re < TwoFloat::from(0.5) {
        // reflection: G(z) G(1 - z) = pi / sin(pi z)
        return cdiv(dd_real(1.0) * consts::PI, sin_pi(z) * gamma(one - z));
    }
    let shift = (30.0 - z.re.hi()).ceil().max(0.0) as usize;
    let mut prod = one;
    for k in 0..shift {
        prod *= z + dd_real(k as f64);
    }
    let w = z + dd_real(shift as f64);
    let lw = cln(w);
    let mut series = (w - dd_real(0.5)) * lw - w + dd_real(1.0) * (ln(consts::TAU) * 0.5);
    let winv = cdiv(one, w);
    let winv2 = winv * winv;
    let mut pw = winv;
    for (num, den) in STIRLING {
        series += pw * div(TwoFloat::from(num), TwoFloat::from(den));
        pw *= winv2;
    }
    cdiv(cexp(series), prod)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        let d = a - b;
        let dn = (f64::from(d.re).powi(2) + f64::from(d.im).powi(2)).sqrt();
        dn <= tol * norm(b)
    }

    #[test]
    fn elementary_functions() {
        let x = div(TwoFloat::from(7.3), TwoFloat::from(3.0));
        assert!(f64::from((x * 3.0 - 7.3).abs()) < 1e-30);
        let back = exp(ln(x));
        assert!(f64::from((back - x).abs()) < 1e-29, "{:e}", f64::from(back - x));
        // e^1 from the stored constant
        let e = exp(TwoFloat::from(1.0)) - consts::E;
        assert!(f64::from(e.abs()) < 1e-28, "{:e}", f64::from(e));
        let t = atan2(TwoFloat::from(1.0), TwoFloat::from(1.0));
        assert!(f64::from((t - consts::FRAC_PI_4).abs()) < 1e-30);
    }

    #[test]
    fn gamma_values() {
        let half = gamma(dd_real(0.5));
        // sqrt(pi) to 34 digits
        let sqrt_pi = TwoFloat::new_add(1.772_453_850_905_516, -7.666_586_499_825_8e-17);
        assert!(f64::from((half.re - sqrt_pi).abs()) < 1e-27, "{half:?}");
        let g5 = gamma(dd_real(5.0));
        assert!(close(g5, dd_real(24.0), 1e-27), "{:e}", f64::from(g5.re - 24.0));
        // reflection against the f64 implementation off the real axis
        let z = C64::new(-1.3, 2.1);
        let g = to_c64(gamma(dd(z)));
        let f = crate::numerics::gamma::gamma(z).unwrap();
        assert!((g - f).norm() < 1e-13 * f.norm());
        // recurrence to double-double accuracy
        let z = dd(C64::new(0.7, -1.9));
        assert!(close(gamma(z + dd_real(1.0)), z * gamma(z), 1e-27));
    }
}
