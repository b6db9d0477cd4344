//! Graph cobordisms between finite sets.
//!
//! The crate covers half-edge graphs attached to finite sets ([`graph`]),
//! their composition and monoidal product ([`category`]), the determinant-line
//! coefficient system with exact signs ([`det`]), tree collapses and the spine
//! of outer space ([`collapse`], [`spine`]) and evaluation in graded
//! commutative Frobenius algebras ([`frobenius`]).

use std::fmt;
use std::ops::{Mul, MulAssign, Neg};

use serde::{Deserialize, Serialize};

pub mod canon;
pub mod category;
pub mod collapse;
pub mod det;
pub mod error;
pub mod frobenius;
pub mod graph;
pub mod linalg;
pub mod pool;
pub mod spine;
pub mod suites;

pub use error::Error;
pub use graph::{Gaf, MarkedGaf};

/// An element of the group {+1, -1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    /// `self` raised to the integer power `d`.
    pub fn pow(self, d: i64) -> Sign {
        if d.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            self
        }
    }

    /// Sign of a permutation given as `perm[i] = image of i`.
    pub fn of_permutation(perm: &[usize]) -> Sign {
        let mut seen = vec![false; perm.len()];
        let mut odd = false;
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                odd = !odd;
            }
        }
        Sign::from_parity(odd)
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self != rhs)
    }
}

impl MulAssign for Sign {
    fn mul_assign(&mut self, rhs: Sign) {
        *self = *self * rhs;
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl std::iter::Product for Sign {
    fn product<I: Iterator<Item = Sign>>(iter: I) -> Sign {
        iter.fold(Sign::Plus, Mul::mul)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_group() {
        assert_eq!(Sign::Minus * Sign::Minus, Sign::Plus);
        assert_eq!(-Sign::Plus, Sign::Minus);
        assert_eq!(Sign::Minus.pow(3), Sign::Minus);
        assert_eq!(Sign::Minus.pow(-2), Sign::Plus);
        assert_eq!([Sign::Minus; 3].into_iter().product::<Sign>(), Sign::Minus);
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(Sign::of_permutation(&[0, 1, 2]), Sign::Plus);
        assert_eq!(Sign::of_permutation(&[1, 0, 2]), Sign::Minus);
        assert_eq!(Sign::of_permutation(&[1, 2, 0]), Sign::Plus);
        assert_eq!(Sign::of_permutation(&[3, 2, 1, 0]), Sign::Plus);
    }
}
