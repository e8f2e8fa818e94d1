//! The Weyl group of GL(3) and the sign group `V`.
//!
//! Elements are represented by signed permutation matrices of determinant one.
//! They double as elements of SO(3), where they act on the minimal K-type,
//! and of SL(3, Z), where they label Bruhat cells.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Integer 3x3 matrix.
pub type Mat3 = [[i64; 3]; 3];

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut t = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// Weyl element, named after its action on the Langlands parameters:
/// `w2: (m2, m1, m3)`, `w3: (m1, m3, m2)`, `w4: (m3, m1, m2)`,
/// `w5: (m2, m3, m1)` and the long element `wl: (m3, m2, m1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Weyl {
    I,
    W2,
    W3,
    W4,
    W5,
    Wl,
}

impl Weyl {
    pub const ALL: [Weyl; 6] = [Weyl::I, Weyl::W2, Weyl::W3, Weyl::W4, Weyl::W5, Weyl::Wl];

    /// Signed permutation matrix with `w4 = w2 w3`, `w5 = w3 w2`, `wl = w2 w3 w2`.
    pub fn matrix(self) -> Mat3 {
        match self {
            Weyl::I => [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            Weyl::W2 => [[0, 1, 0], [1, 0, 0], [0, 0, -1]],
            Weyl::W3 => [[-1, 0, 0], [0, 0, 1], [0, 1, 0]],
            Weyl::W4 => [[0, 0, 1], [-1, 0, 0], [0, -1, 0]],
            Weyl::W5 => [[0, -1, 0], [0, 0, -1], [1, 0, 0]],
            Weyl::Wl => [[0, 0, -1], [0, -1, 0], [-1, 0, 0]],
        }
    }

    /// Underlying permutation `sigma` with `w e_j = +- e_{sigma(j)}` (0-based).
    pub fn permutation(self) -> [usize; 3] {
        let m = self.matrix();
        let mut p = [0; 3];
        for (j, pj) in p.iter_mut().enumerate() {
            *pj = (0..3).find(|&i| m[i][j] != 0).unwrap();
        }
        p
    }

    /// Action on a parameter triple: `(mu^w)_i = mu_{sigma^{-1}(i)}`.
    pub fn act<T: Copy>(self, mu: [T; 3]) -> [T; 3] {
        let m = self.matrix();
        let mut out = mu;
        for (i, o) in out.iter_mut().enumerate() {
            let j = (0..3).find(|&j| m[i][j] != 0).unwrap();
            *o = mu[j];
        }
        out
    }

    /// Product in the group, matching matrix multiplication up to signs.
    pub fn compose(self, other: Weyl) -> Weyl {
        let p = mat_mul(&self.matrix(), &other.matrix());
        Weyl::from_pattern(&p)
    }

    /// Element with the same permutation pattern as `m`.
    pub fn from_pattern(m: &Mat3) -> Weyl {
        for w in Weyl::ALL {
            let wm = w.matrix();
            if (0..3).all(|i| (0..3).all(|j| (wm[i][j] != 0) == (m[i][j] != 0))) {
                return w;
            }
        }
        unreachable!("not a permutation pattern")
    }

    pub fn inverse(self) -> Weyl {
        Weyl::from_pattern(&transpose(&self.matrix()))
    }

    pub fn name(self) -> &'static str {
        match self {
            Weyl::I => "I",
            Weyl::W2 => "w2",
            Weyl::W3 => "w3",
            Weyl::W4 => "w4",
            Weyl::W5 => "w5",
            Weyl::Wl => "wl",
        }
    }
}

impl fmt::Display for Weyl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Weyl {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "id" | "1" => Ok(Weyl::I),
            "w2" => Ok(Weyl::W2),
            "w3" => Ok(Weyl::W3),
            "w4" => Ok(Weyl::W4),
            "w5" => Ok(Weyl::W5),
            "wl" | "w6" | "long" => Ok(Weyl::Wl),
            _ => Err(Error::InvalidArgument(format!("unknown Weyl element {s}"))),
        }
    }
}

/// Sign pattern `(e1, e2)` with entries `+1` or `-1`.
pub type Signs = (i8, i8);

/// All four sign patterns in the order `++, +-, -+, --`.
pub const SIGNS: [Signs; 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Element `v_{e1,e2} = diag(e1, e1 e2, e2)` of the sign group.
pub fn sign_matrix(s: Signs) -> Mat3 {
    let (a, b) = (s.0 as i64, s.1 as i64);
    [[a, 0, 0], [0, a * b, 0], [0, 0, b]]
}

/// Parse a sign pattern such as `+-`.
pub fn parse_signs(s: &str) -> Result<Signs, Error> {
    let b: Vec<char> = s.chars().collect();
    let one = |c: char| match c {
        '+' => Ok(1),
        '-' => Ok(-1),
        _ => Err(Error::InvalidArgument(format!("bad sign pattern {s}"))),
    };
    if b.len() != 2 {
        return Err(Error::InvalidArgument(format!("bad sign pattern {s}")));
    }
    Ok((one(b[0])?, one(b[1])?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_actions() {
        assert_eq!(mat_mul(&Weyl::W2.matrix(), &Weyl::W3.matrix()), Weyl::W4.matrix());
        assert_eq!(mat_mul(&Weyl::W3.matrix(), &Weyl::W2.matrix()), Weyl::W5.matrix());
        let wl = mat_mul(&mat_mul(&Weyl::W2.matrix(), &Weyl::W3.matrix()), &Weyl::W2.matrix());
        assert_eq!(wl, Weyl::Wl.matrix());
        let mu = [1, 2, 3];
        assert_eq!(Weyl::W2.act(mu), [2, 1, 3]);
        assert_eq!(Weyl::W3.act(mu), [1, 3, 2]);
        assert_eq!(Weyl::W4.act(mu), [3, 1, 2]);
        assert_eq!(Weyl::W5.act(mu), [2, 3, 1]);
        assert_eq!(Weyl::Wl.act(mu), [3, 2, 1]);
    }

    #[test]
    fn group_laws() {
        for a in Weyl::ALL {
            assert_eq!(a.compose(a.inverse()), Weyl::I);
            for b in Weyl::ALL {
                // the action is a left action
                assert_eq!(a.compose(b).act([1, 2, 3]), a.act(b.act([1, 2, 3])));
                for c in Weyl::ALL {
                    assert_eq!(a.compose(b).compose(c), a.compose(b.compose(c)));
                }
            }
            let m = a.matrix();
            let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            assert_eq!(det, 1);
        }
    }

    #[test]
    fn parsing() {
        assert_eq!("wl".parse::<Weyl>().unwrap(), Weyl::Wl);
        assert!("w7".parse::<Weyl>().is_err());
        assert_eq!(parse_signs("+-").unwrap(), (1, -1));
        assert!(parse_signs("+").is_err());
    }
}
