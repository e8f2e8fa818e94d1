//! Wigner D-matrices of SO(3).
//!
//! `D^d(R_z(a) R_y(b) R_z(c))_{m'm} = e^{-i m' a} d^d_{m'm}(b) e^{-i m c}`, with
//! the little-d matrix `d^d(b) = exp(-i b J_y)` in the standard basis, so that
//! `d^d_{d,m}(b) = (-1)^{d-m} sqrt(C(2d, d+m)) cos^{d+m}(b/2) sin^{d-m}(b/2)`.
//! Rows and columns are indexed by `m = -d..=d`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::weyl_group::{sign_matrix, Mat3, Signs, Weyl};
use crate::C64;

/// Square complex matrix indexed by `-d..=d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DMatrix {
    pub d: usize,
    pub data: Vec<C64>,
}

impl DMatrix {
    pub fn zeros(d: usize) -> Self {
        let n = 2 * d + 1;
        Self { d, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for k in 0..2 * d + 1 {
            m.data[k * (2 * d + 1) + k] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        2 * self.d + 1
    }

    fn idx(&self, mp: i64, m: i64) -> usize {
        let d = self.d as i64;
        assert!(mp.abs() <= d && m.abs() <= d, "index out of range");
        ((mp + d) as usize) * self.dim() + (m + d) as usize
    }

    pub fn get(&self, mp: i64, m: i64) -> C64 {
        self.data[self.idx(mp, m)]
    }

    pub fn set(&mut self, mp: i64, m: i64, v: C64) {
        let i = self.idx(mp, m);
        self.data[i] = v;
    }

    pub fn mul(&self, other: &DMatrix) -> DMatrix {
        let n = self.dim();
        let mut out = DMatrix::zeros(self.d);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> DMatrix {
        let n = self.dim();
        let mut out = DMatrix::zeros(self.d);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &DMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Row `m'` as a vector over `m = -d..=d`.
    pub fn row(&self, mp: i64) -> Vec<C64> {
        let d = self.d as i64;
        (-d..=d).map(|m| self.get(mp, m)).collect()
    }
}

/// Real little-d matrix `exp(-i b J_y)` by scaling and squaring.
fn small_d_uncached(d: usize, b: f64) -> Vec<f64> {
    let n = 2 * d + 1;
    let j = d as f64;
    // A = -b (J+ - J-) / 2 is real antisymmetric and tridiagonal
    let mut a = vec![0.0; n * n];
    for k in 0..n - 1 {
        let m = k as f64 - j;
        let c = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        a[(k + 1) * n + k] = -b * c / 2.0;
        a[k * n + k + 1] = b * c / 2.0;
    }
    let norm = b.abs() * (j + 1.0);
    let mut s = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale /= 2.0;
        s += 1;
    }
    for x in a.iter_mut() {
        *x *= scale;
    }
    let matmul = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let v = x[i * n + k];
                if v != 0.0 {
                    for jj in 0..n {
                        z[i * n + jj] += v * y[k * n + jj];
                    }
                }
            }
        }
        z
    };
    let mut result = vec![0.0; n * n];
    let mut term = vec![0.0; n * n];
    for k in 0..n {
        result[k * n + k] = 1.0;
        term[k * n + k] = 1.0;
    }
    for k in 1..=24 {
        term = matmul(&term, &a);
        let inv = 1.0 / k as f64;
        for x in term.iter_mut() {
            *x *= inv;
        }
        for (r, t) in result.iter_mut().zip(&term) {
            *r += t;
        }
    }
    for _ in 0..s {
        result = matmul(&result, &result);
    }
    result
}

type Cache = RwLock<HashMap<(usize, u64), Vec<f64>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Little-d matrix `d^d(b)` as a real matrix, memoised on `(d, b)`.
pub fn small_d(d: usize, b: f64) -> DMatrix {
    let key = (d, b.to_bits());
    let hit = cache().read().ok().and_then(|c| c.get(&key).cloned());
    let data = match hit {
        Some(v) => v,
        None => {
            let v = small_d_uncached(d, b);
            if let Ok(mut c) = cache().write() {
                c.insert(key, v.clone());
            }
            v
        }
    };
    DMatrix { d, data: data.into_iter().map(|x| C64::new(x, 0.0)).collect() }
}

/// ZYZ Euler angles `(a, b, c)` with `R = R_z(a) R_y(b) R_z(c)`.
pub fn euler_zyz(r: &[[f64; 3]; 3]) -> (f64, f64, f64) {
    let b = r[2][2].clamp(-1.0, 1.0).acos();
    let sb = b.sin();
    if sb.abs() < 1e-12 {
        if r[2][2] > 0.0 {
            (r[1][0].atan2(r[0][0]), 0.0, 0.0)
        } else {
            ((-r[1][0]).atan2(-r[0][0]), std::f64::consts::PI, 0.0)
        }
    } else {
        (r[1][2].atan2(r[0][2]), b, r[2][1].atan2(-r[2][0]))
    }
}

/// `D^d(R)` for a rotation matrix `R`.
pub fn wigner_d(d: usize, r: &[[f64; 3]; 3]) -> DMatrix {
    let (a, b, c) = euler_zyz(r);
    let small = small_d(d, b);
    let mut out = DMatrix::zeros(d);
    let di = d as i64;
    for mp in -di..=di {
        for m in -di..=di {
            let phase = C64::from_polar(1.0, -(mp as f64) * a - (m as f64) * c);
            out.set(mp, m, phase * small.get(mp, m));
        }
    }
    out
}

/// `D^d` of an integer rotation matrix.
pub fn wigner_d_int(d: usize, m: &Mat3) -> DMatrix {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = m[i][j] as f64;
        }
    }
    wigner_d(d, &r)
}

/// `D^d(w)` for a Weyl element.
pub fn wigner_d_weyl(d: usize, w: Weyl) -> DMatrix {
    wigner_d_int(d, &w.matrix())
}

/// `D^d(v)` for a sign element `v = diag(e1, e1 e2, e2)`.
pub fn wigner_d_sign(d: usize, s: Signs) -> DMatrix {
    wigner_d_int(d, &sign_matrix(s))
}

/// Rotation about the z axis by `a`.
pub fn rot_z(a: f64) -> [[f64; 3]; 3] {
    let (s, c) = a.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Rotation about the y axis by `b`.
pub fn rot_y(b: f64) -> [[f64; 3]; 3] {
    let (s, c) = b.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn rmul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl_group::{mat_mul, SIGNS};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn binom(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn top_row_formula() {
        for d in 0..6usize {
            let b = 0.83;
            let m = small_d(d, b);
            let di = d as i64;
            for k in -di..=di {
                let exact = (-1f64).powi((di - k) as i32)
                    * binom(2 * d as u64, (di + k) as u64).sqrt()
                    * (b / 2.0).cos().powi((di + k) as i32)
                    * (b / 2.0).sin().powi((di - k) as i32);
                assert!((m.get(di, k).re - exact).abs() < 1e-13, "d={d} m={k}");
            }
        }
    }

    #[test]
    fn long_element_row_signs() {
        // row m' of D(v-- wl) equals (-1)^{m'} times row m' of d(pi/2); its top
        // row is (-1)^d 2^{-d} sqrt(C(2d, d+m))
        for d in 1..6usize {
            let g = mat_mul(&sign_matrix((-1, -1)), &Weyl::Wl.matrix());
            let dm = wigner_d_int(d, &g);
            let di = d as i64;
            for m in -di..=di {
                let exact = (-1f64).powi(di as i32) * 2f64.powi(-(di as i32)) * binom(2 * d as u64, (di + m) as u64).sqrt();
                assert!((dm.get(di, m) - C64::new(exact, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn sign_elements_are_diagonal_or_antidiagonal() {
        for d in 1..5usize {
            let di = d as i64;
            for s in SIGNS {
                let dm = wigner_d_sign(d, s);
                for mp in -di..=di {
                    for m in -di..=di {
                        let v = dm.get(mp, m);
                        if s.1 == 1 && m != mp || s.1 == -1 && m != -mp {
                            assert!(v.norm() < 1e-13);
                        } else {
                            assert!((v.norm() - 1.0).abs() < 1e-13);
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn homomorphism_and_unitarity(a1 in -3.0f64..3.0, b1 in 0.0f64..3.1, c1 in -3.0f64..3.0,
                                      a2 in -3.0f64..3.0, b2 in 0.0f64..3.1, c2 in -3.0f64..3.0,
                                      d in 0usize..5) {
            let r1 = rmul(&rmul(&rot_z(a1), &rot_y(b1)), &rot_z(c1));
            let r2 = rmul(&rmul(&rot_z(a2), &rot_y(b2)), &rot_z(c2));
            let lhs = wigner_d(d, &rmul(&r1, &r2));
            let rhs = wigner_d(d, &r1).mul(&wigner_d(d, &r2));
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-11);
            let u = wigner_d(d, &r1);
            prop_assert!(u.mul(&u.adjoint()).max_abs_diff(&DMatrix::identity(d)) < 1e-12);
        }
    }

    #[test]
    fn weyl_matrices_compose() {
        for d in 0..5usize {
            for a in Weyl::ALL {
                for b in Weyl::ALL {
                    let lhs = wigner_d_int(d, &mat_mul(&a.matrix(), &b.matrix()));
                    let rhs = wigner_d_weyl(d, a).mul(&wigner_d_weyl(d, b));
                    assert!(lhs.max_abs_diff(&rhs) < 1e-12);
                }
            }
            // rotation by pi about z
            let z = wigner_d(d, &rot_z(PI));
            assert!(z.max_abs_diff(&wigner_d_sign(d, (-1, 1))) < 1e-12);
        }
    }
}
