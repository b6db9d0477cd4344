//! Small dense rational linear algebra for oracles, independent of the
//! library's integer routines.
#![allow(dead_code)]

pub mod frobenius;
pub mod spine;

use num_rational::Rational64;
use num_traits::{One, Zero};

pub type Q = Rational64;

pub fn q(x: i64) -> Q {
    Q::from_integer(x)
}

/// Row-reduces `m` in place, returning pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..cols {
                    let v = m[r][j];
                    m[i][j] -= f * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    rref(&mut m.to_vec()).len()
}

/// Columns spanning the kernel of `m` (rows x cols).
pub fn kernel(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Q::zero(); cols];
            v[free] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -a[i][free];
            }
            v
        })
        .collect()
}

pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                let v = a[c][j];
                a[i][j] -= f * v;
            }
        }
    }
    d
}

/// Coordinates of the vectors `targets` in the basis `basis` (both given
/// as lists of column vectors); panics if some target is outside the span.
pub fn coordinates(basis: &[Vec<Q>], targets: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = basis.first().map_or(0, Vec::len);
    let k = basis.len();
    targets
        .iter()
        .map(|t| {
            let mut aug: Vec<Vec<Q>> = (0..n)
                .map(|i| {
                    let mut row: Vec<Q> = basis.iter().map(|b| b[i]).collect();
                    row.push(t[i]);
                    row
                })
                .collect();
            let pivots = rref(&mut aug);
            assert!(!pivots.contains(&k), "target outside the span");
            let mut x = vec![Q::zero(); k];
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = aug[i][k];
            }
            x
        })
        .collect()
}

/// Determinant of the change of basis expressing `targets` in `basis`.
pub fn base_change_det(basis: &[Vec<Q>], targets: &[Vec<Q>]) -> Q {
    let coords = coordinates(basis, targets);
    let k = basis.len();
    let m: Vec<Vec<Q>> = (0..k).map(|i| (0..k).map(|j| coords[j][i]).collect()).collect();
    det(&m)
}

pub fn matmul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + row[k] * b[k][j]))
                .collect()
        })
        .collect()
}

/// Sign of the permutation taking `from` to `to` (same multiset of
/// distinct items).
pub fn reorder_sign<T: PartialEq>(from: &[T], to: &[T]) -> i64 {
    let perm: Vec<usize> = to.iter().map(|x| from.iter().position(|y| y == x).unwrap()).collect();
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All permutations of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}
