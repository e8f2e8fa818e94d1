//! GL(3) Kloosterman sums attached to the Bruhat cells of `SL(3, Z)`.
//!
//! An integral matrix in the cell of `w` with modulus `c` factors uniquely as
//! `b1 * t * w * b2` with `t = diag(1/c1, c1/c2, c2)`, `b1` upper unipotent
//! and `b2` in the subgroup `Ubar_w = U ∩ w^-1 U^T w` of upper unipotents that
//! `w` sends to lower ones.  The sum runs over `U(Z) \ Gamma_w(c) / Ubar_w(Z)`
//! of `psi_m(b1) psi_n(b2)` with `psi_m(x) = e(m1 x12 + m2 x23)`.  The sum is
//! unchanged by the full `U_w(Z)` action exactly when the cell's
//! compatibility condition holds; see [`compatible`].
//!
//! A double coset is determined by `b2` modulo `Ubar_w(Z)`, and `b2` is
//! admissible when the bottom row `A` and the bottom 2x2 minors `B` of
//! `t w b2` (the Plücker coordinates of the coset `U(Z) gamma`) are integral
//! and primitive.  [`kloosterman_bruteforce`] scans a grid of `b2` with exact
//! rationals and recovers `b1` by search.  [`kloosterman_fast`] enumerates the
//! admissible `b2` directly from the cell's divisibility conditions and finds
//! `b1` from an integral completion of the Plücker data.

use std::f64::consts::TAU;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::kernels::KernelTag;
use crate::weyl_group::{Signs, Weyl};
use crate::{Error, Result, C64};

type Q = Ratio<i64>;
type QMat = [[Q; 3]; 3];
type QVec = [Q; 3];

/// Largest modulus entry accepted by the brute-force oracle.
pub const BRUTEFORCE_MAX_MODULUS: i64 = 64;

/// Index `m = (m1, m2)` of the character `psi_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharacterIndex {
    pub m1: i64,
    pub m2: i64,
}

impl CharacterIndex {
    pub fn new(m1: i64, m2: i64) -> Result<Self> {
        if m1 == 0 || m2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "character index ({m1}, {m2}) has a zero entry"
            )));
        }
        Ok(Self { m1, m2 })
    }

    /// `(s1 m1, s2 m2)`.
    pub fn twist(self, s: Signs) -> Self {
        Self { m1: s.0 as i64 * self.m1, m2: s.1 as i64 * self.m2 }
    }

    pub fn neg(self) -> Self {
        self.twist((-1, -1))
    }
}

/// Modulus `c = (c1, c2)` of a Bruhat cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modulus {
    pub c1: i64,
    pub c2: i64,
}

impl Modulus {
    pub fn new(c1: i64, c2: i64) -> Result<Self> {
        if c1 < 1 || c2 < 1 {
            return Err(Error::InvalidArgument(format!("modulus ({c1}, {c2}) must be positive")));
        }
        Ok(Self { c1, c2 })
    }
}

/// A Kloosterman sum and the number of unit-modulus terms in it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KloostermanValue {
    pub value: C64,
    pub terms: u64,
}

/// Whether `S_w(psi_m, psi_{eps n}, c)` enters the geometric side, i.e. the
/// character sum is well defined on the whole cell.
pub fn compatible(w: KernelTag, m: CharacterIndex, n: CharacterIndex, eps: Signs, c: Modulus) -> bool {
    match w {
        KernelTag::I => c.c1 == 1 && c.c2 == 1,
        KernelTag::W4 => eps.0 as i64 * m.m2 * c.c1 == n.m1 * c.c2 * c.c2,
        KernelTag::W5 => eps.1 as i64 * m.m1 * c.c2 == n.m2 * c.c1 * c.c1,
        KernelTag::Wl => true,
    }
}

/// Coordinates `(x12, x13, x23)` of an upper unipotent matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Unipotent {
    x12: Q,
    x13: Q,
    x23: Q,
}

impl Unipotent {
    fn matrix(&self) -> QMat {
        let (o, z) = (Q::one(), Q::zero());
        [[o, self.x12, self.x13], [z, o, self.x23], [z, z, o]]
    }
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn frac(x: Q) -> Q {
    x - x.floor()
}

fn mat_mul(a: &QMat, b: &QMat) -> QMat {
    let mut out = [[Q::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn cross(a: &QVec, b: &QVec) -> QVec {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: &QVec, b: &QVec) -> Q {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn add_scaled(a: &QVec, s: Q, b: &QVec) -> QVec {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

fn is_integral(v: &QVec) -> bool {
    v.iter().all(|x| x.is_integer())
}

fn to_ints(v: &QVec) -> [i64; 3] {
    [v[0].to_integer(), v[1].to_integer(), v[2].to_integer()]
}

fn is_primitive(v: &QVec) -> bool {
    is_integral(v) && {
        let i = to_ints(v);
        i[0].gcd(&i[1]).gcd(&i[2]) == 1
    }
}

/// `t * w * b2`.
fn cell_matrix(w: Weyl, c: Modulus, b2: &Unipotent) -> QMat {
    let t = [q(1, c.c1), q(c.c1, c.c2), q(c.c2, 1)];
    let wm = w.matrix();
    let mut tw = [[Q::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            tw[i][j] = t[i] * Q::from_integer(wm[i][j]);
        }
    }
    mat_mul(&tw, &b2.matrix())
}

/// Bottom row and bottom 2x2 minors, the latter as the cross product of the
/// last two rows.
fn plucker(m: &QMat) -> (QVec, QVec) {
    (m[2], cross(&m[1], &m[2]))
}

fn phase(m: CharacterIndex, n: CharacterIndex, b1: (Q, Q), b2: &Unipotent) -> Q {
    let mi = |k: i64| Q::from_integer(k);
    frac(mi(m.m1) * b1.0 + mi(m.m2) * b1.1 + mi(n.m1) * b2.x12 + mi(n.m2) * b2.x23)
}

fn unit(theta: Q) -> C64 {
    let x = *theta.numer() as f64 / *theta.denom() as f64;
    C64::from_polar(1.0, TAU * x)
}

/// Sums the characters over a list of cosets, each given by
/// `((b1_12, b1_23), b2)`.
fn accumulate(
    cosets: &[((Q, Q), Unipotent)],
    m: CharacterIndex,
    n: CharacterIndex,
) -> KloostermanValue {
    let value = cosets.iter().map(|(b1, b2)| unit(phase(m, n, *b1, b2))).sum();
    KloostermanValue { value, terms: cosets.len() as u64 }
}

// ----- brute force -------------------------------------------------------

/// The coordinates of `Ubar_w` and the denominators their entries can have.
///
/// A bottom row `A = c2 * (row of b2)` forces the entries of that row into
/// `Z / c2`; the minors `B = c1 * (minors of b2)` force the remaining entry
/// into `Z / c1`.
fn free_coordinates(w: Weyl, c: Modulus) -> Vec<(usize, i64)> {
    // coordinate indices: 0 = x12, 1 = x13, 2 = x23
    match w {
        Weyl::I => vec![],
        Weyl::W4 => vec![(1, c.c1), (2, c.c2)],
        Weyl::W5 => vec![(0, c.c2), (1, c.c2)],
        Weyl::Wl => vec![(0, c.c2), (1, c.c2), (2, c.c1)],
        _ => unreachable!("only the four cells of the trace formula are supported"),
    }
}

/// All `b2` in `Ubar_w(Q) / Ubar_w(Z)` on the grid with per-coordinate
/// denominators `dens`.  Coordinates in `[0, 1)` are a transversal because
/// right translation moves `x12`, `x23` by integers and then `x13` freely.
fn grid(coords: &[(usize, i64)]) -> Vec<Unipotent> {
    let mut out = vec![Unipotent { x12: Q::zero(), x13: Q::zero(), x23: Q::zero() }];
    for &(idx, den) in coords {
        let mut next = Vec::with_capacity(out.len() * den as usize);
        for u in &out {
            for k in 0..den {
                let mut v = *u;
                match idx {
                    0 => v.x12 = q(k, den),
                    1 => v.x13 = q(k, den),
                    _ => v.x23 = q(k, den),
                }
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Candidates `x` in `[0, 1)` with `x * a + b` integral, `a` a nonzero integer.
fn solutions(a: Q, b: Q) -> impl Iterator<Item = Q> {
    let n = a.to_integer().abs();
    (0..n).map(move |k| frac((Q::from_integer(k) - b) / a))
}

/// `(b1_12, b1_23)` modulo 1 with `b1 * m` integral, by exhaustive search.
fn left_coset_search(m: &QMat) -> Option<(Q, Q)> {
    let a = m[2];
    let j = (0..3).find(|&j| !a[j].is_zero())?;
    let y23 = solutions(a[j], m[1][j]).find(|&y| is_integral(&add_scaled(&m[1], y, &a)))?;
    let r = add_scaled(&m[1], y23, &a);
    let v = cross(&r, &a);
    let xa = cross(&m[0], &a);
    let jv = (0..3).find(|&j| !v[j].is_zero())?;
    for y12 in solutions(v[jv], xa[jv]) {
        let x = add_scaled(&m[0], y12, &r);
        if solutions(a[j], x[j]).any(|y13| is_integral(&add_scaled(&x, y13, &a))) {
            return Some((y12, y23));
        }
    }
    None
}

fn bruteforce_cosets(w: Weyl, c: Modulus) -> Vec<((Q, Q), Unipotent)> {
    grid(&free_coordinates(w, c))
        .into_iter()
        .filter_map(|b2| {
            let mat = cell_matrix(w, c, &b2);
            let (a, b) = plucker(&mat);
            if !(is_primitive(&a) && is_primitive(&b)) {
                return None;
            }
            let b1 = left_coset_search(&mat).expect("primitive Plücker data has an integral lift");
            Some((b1, b2))
        })
        .collect()
}

fn check_cell(w: KernelTag) -> Result<Weyl> {
    match w {
        KernelTag::W4 | KernelTag::W5 | KernelTag::Wl => Ok(w.weyl()),
        KernelTag::I => Err(Error::InvalidArgument(
            "Kloosterman sums are defined for the cells w4, w5 and wl".into(),
        )),
    }
}

/// Exact enumeration of the double cosets of modulus `c` in the cell of `w`.
pub fn kloosterman_bruteforce(
    w: KernelTag,
    m: CharacterIndex,
    n: CharacterIndex,
    c: Modulus,
) -> Result<KloostermanValue> {
    let weyl = check_cell(w)?;
    if c.c1 > BRUTEFORCE_MAX_MODULUS || c.c2 > BRUTEFORCE_MAX_MODULUS {
        return Err(Error::RangeExceeded(format!(
            "brute-force modulus ({}, {}) exceeds {BRUTEFORCE_MAX_MODULUS}",
            c.c1, c.c2
        )));
    }
    Ok(accumulate(&bruteforce_cosets(weyl, c), m, n))
}

// ----- fast path ---------------------------------------------------------

/// Integers `u` with `u . v = gcd(v)`.
fn bezout3(v: [i64; 3]) -> [i64; 3] {
    let e01 = v[0].extended_gcd(&v[1]);
    let e = e01.gcd.extended_gcd(&v[2]);
    [e.x * e01.x, e.x * e01.y, e.y]
}

fn from_ints(v: [i64; 3]) -> QVec {
    v.map(Q::from_integer)
}

/// `(b1_12, b1_23)` modulo 1 from an integral completion.  With `u . A = 1`
/// the middle row `row2 + y23 A` is integral iff `y23 = -u . row2`; with
/// `P . (R x A) = 1` the rows `(P, R, A)` form a unimodular basis and the top
/// row is integral iff `y12` cancels its `R` coordinate `P . (row1 x A)`.
fn left_coset_direct(m: &QMat) -> (Q, Q) {
    let a = m[2];
    let u = from_ints(bezout3(to_ints(&a)));
    let y23 = frac(-dot(&u, &m[1]));
    let r = add_scaled(&m[1], y23, &a);
    let p = from_ints(bezout3(to_ints(&cross(&r, &a))));
    let y12 = frac(-dot(&p, &cross(&m[0], &a)));
    (y12, y23)
}

/// Admissible `b2` from the divisibility conditions on `A` and `B`.
fn admissible(w: Weyl, c: Modulus) -> Vec<Unipotent> {
    let (c1, c2) = (c.c1, c.c2);
    let g = c1.gcd(&c2);
    let zero = Q::zero();
    let mut out = Vec::new();
    match w {
        // A = (0, -c2, -k), B = (c1, c1 k / c2, -j)
        Weyl::W4 => {
            if c1 % c2 != 0 {
                return out;
            }
            for k in (0..c2).filter(|k| k.gcd(&c2) == 1) {
                let bk = c1 / c2 * k;
                for j in (0..c1).filter(|j| c1.gcd(&bk).gcd(j) == 1) {
                    out.push(Unipotent { x12: zero, x13: q(j, c1), x23: q(k, c2) });
                }
            }
        }
        // A = (c2, a, b), B = (0, c1, c1 a / c2)
        Weyl::W5 => {
            if c2 % c1 != 0 {
                return out;
            }
            for a in (0..c2).step_by((c2 / g) as usize) {
                if c1.gcd(&(c1 * a / c2)) != 1 {
                    continue;
                }
                for b in (0..c2).filter(|b| c2.gcd(&a).gcd(b) == 1) {
                    out.push(Unipotent { x12: q(a, c2), x13: q(b, c2), x23: zero });
                }
            }
        }
        // A = -(c2, a, b), B = -(c1, e, (a e - c1 b) / c2)
        Weyl::Wl => {
            let (c1g, c2g) = (c1 / g, c2 / g);
            // inverse of c1 / g modulo c2 / g
            let inv = c1g.extended_gcd(&c2g).x.rem_euclid(c2g.max(1));
            for a in 0..c2 {
                for e in 0..c1 {
                    if (a * e) % g != 0 {
                        continue;
                    }
                    let b0 = if c2g == 1 { 0 } else { (a * e / g % c2g) * inv % c2g };
                    for b in (0..g).map(|s| b0 + s * c2g) {
                        if c2.gcd(&a).gcd(&b) != 1 {
                            continue;
                        }
                        let minor = (c1 * b - a * e) / c2;
                        if c1.gcd(&e).gcd(&minor) != 1 {
                            continue;
                        }
                        out.push(Unipotent { x12: q(a, c2), x13: q(b, c2), x23: q(e, c1) });
                    }
                }
            }
        }
        Weyl::I => {
            if c1 == 1 && c2 == 1 {
                out.push(Unipotent { x12: zero, x13: zero, x23: zero });
            }
        }
        _ => unreachable!("only the four cells of the trace formula are supported"),
    }
    out
}

/// Kloosterman sum from the explicit parametrization of the cell, in
/// `O(c1 c2 gcd(c1, c2))` operations.  The identity cell gives `1` at
/// `c = (1, 1)` and `0` otherwise.
pub fn kloosterman_fast(w: KernelTag, m: CharacterIndex, n: CharacterIndex, c: Modulus) -> KloostermanValue {
    let weyl = w.weyl();
    let cosets: Vec<_> = admissible(weyl, c)
        .into_iter()
        .map(|b2| (left_coset_direct(&cell_matrix(weyl, c, &b2)), b2))
        .collect();
    accumulate(&cosets, m, n)
}
