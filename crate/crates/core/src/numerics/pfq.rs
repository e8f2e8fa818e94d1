//! Generalized hypergeometric series.

use crate::error::{finite, Error, Result};
use crate::C64;

const MAX_TERMS: usize = 200_000;

fn nonpositive_integer(z: C64) -> Option<usize> {
    let k = z.re.round();
    if k <= 0.0 && (z - C64::new(k, 0.0)).norm() < 1e-12 {
        Some((-k) as usize)
    } else {
        None
    }
}

/// Partial sums of `pFq(a; b; z)` up to the given term counts (increasing).
fn partial_sums(a: &[C64], b: &[C64], z: C64, counts: &[usize]) -> Vec<C64> {
    let mut out = Vec::with_capacity(counts.len());
    let mut term = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    let mut n = 0usize;
    for &target in counts {
        while n < target {
            sum += term;
            let mut ratio = z / (n as f64 + 1.0);
            for &x in a {
                ratio *= x + n as f64;
            }
            for &x in b {
                ratio /= x + n as f64;
            }
            term *= ratio;
            n += 1;
        }
        out.push(sum);
    }
    out
}

/// `pFq(a; b; z)` by its defining series.
///
/// The series is summed directly when it terminates, when `p <= q`, or when
/// `p = q + 1` and `|z| < 1`.  At `z = 1` with `p = q + 1` the partial sums
/// are accelerated by Richardson extrapolation using the known algebraic
/// rate `N^{sum a - sum b}`; this requires `Re(sum b - sum a) > 0`.
pub fn pfq_series(a: &[C64], b: &[C64], z: C64, tol: f64) -> Result<C64> {
    let terminating = a.iter().filter_map(|&x| nonpositive_integer(x)).min();
    for &x in b {
        if let Some(k) = nonpositive_integer(x) {
            if terminating.map_or(true, |t| t > k) {
                return Err(Error::DegenerateParameter(format!("lower parameter {x} is a non-positive integer")));
            }
        }
    }
    if let Some(t) = terminating {
        let s = partial_sums(a, b, z, &[t + 1]);
        return finite(s[0], "terminating hypergeometric sum");
    }
    let p = a.len();
    let q = b.len();
    if p > q + 1 {
        return Err(Error::RangeExceeded(format!("{p}F{q} diverges for z != 0")));
    }
    if p == q + 1 {
        let r = z.norm();
        if (z - 1.0).norm() < 1e-14 {
            return unit_argument(a, b, tol);
        }
        if r >= 1.0 {
            return Err(Error::RangeExceeded(format!("|z| = {r} on or outside the unit circle")));
        }
    }
    let mut term = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    let mut small = 0;
    let guard = 2.0 * z.norm();
    for n in 0..MAX_TERMS {
        sum += term;
        if term.norm() <= tol * sum.norm() {
            small += 1;
            if small >= 3 && n as f64 > guard {
                return finite(sum, "hypergeometric series");
            }
        } else {
            small = 0;
        }
        let mut ratio = z / (n as f64 + 1.0);
        for &x in a {
            ratio *= x + n as f64;
        }
        for &x in b {
            ratio /= x + n as f64;
        }
        term *= ratio;
        if term == C64::new(0.0, 0.0) {
            return finite(sum, "hypergeometric series");
        }
    }
    Err(Error::NonConvergent { what: "hypergeometric series".into(), iterations: MAX_TERMS })
}

fn unit_argument(a: &[C64], b: &[C64], tol: f64) -> Result<C64> {
    let excess: C64 = b.iter().sum::<C64>() - a.iter().sum::<C64>();
    if excess.re <= 0.0 {
        return Err(Error::RangeExceeded(format!("series at z = 1 diverges (parameter excess {excess})")));
    }
    // S_N - S ~ N^{-excess} (c_0 + c_1/N + ...)
    let base = 64usize;
    let levels = 12;
    let counts: Vec<usize> = (0..levels).map(|k| base << k).collect();
    let sums = partial_sums(a, b, C64::new(1.0, 0.0), &counts);
    let mut table: Vec<Vec<C64>> = Vec::new();
    let mut best = sums[0];
    for (level, &s) in sums.iter().enumerate() {
        let mut row = vec![s];
        for k in 1..=level {
            // eliminate N^{-(excess + k - 1)}
            let f = C64::new(2.0, 0.0).powc(excess + (k as f64 - 1.0));
            let prev = table[level - 1][k - 1];
            row.push((row[k - 1] * f - prev) / (f - 1.0));
        }
        if level >= 3 {
            let cand = row[level];
            let prev = table[level - 1][level - 1];
            if (cand - prev).norm() <= tol * cand.norm() {
                return finite(cand, "hypergeometric series at z = 1");
            }
            best = cand;
        }
        table.push(row);
    }
    let _ = best;
    Err(Error::NonConvergent { what: "hypergeometric series at z = 1".into(), iterations: levels })
}
