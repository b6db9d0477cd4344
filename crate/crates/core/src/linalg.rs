//! Exact integer and rational linear algebra.
//!
//! Everything here works over unbounded integers ([`BigInt`]) or exact
//! rationals ([`BigRational`]); there is no floating point anywhere.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Sign;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("cokernel has torsion (invariant factor {0}); not a graph boundary matrix")]
    TorsionPresent(BigInt),
    #[error("bases do not span the same lattice")]
    NotSameLattice,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense row-major matrix of unbounded integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().cloned().map(Into::into).collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .fold(BigInt::zero(), |acc, x| acc + x)
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    /// Determinant of a square matrix by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }

    /// Rank over the rationals by fraction-free Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut prev = BigInt::one();
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(p, rank);
            for i in rank + 1..m.rows {
                for j in col + 1..m.cols {
                    let v = (m.get(i, j) * m.get(rank, col) - m.get(i, col) * m.get(rank, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, col, BigInt::zero());
            }
            prev = m.get(rank, col).clone();
            rank += 1;
        }
        rank
    }

    pub fn to_nested(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let nested: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect();
        nested.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let nested: Vec<Vec<serde_json::Value>> = Vec::deserialize(d)?;
        let mut rows = Vec::with_capacity(nested.len());
        for r in nested {
            let mut row = Vec::with_capacity(r.len());
            for v in r {
                let text = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(serde::de::Error::custom(format!("bad entry {other}"))),
                };
                row.push(text.parse::<BigInt>().map_err(serde::de::Error::custom)?);
            }
            rows.push(row);
        }
        if rows.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(IntMatrix::from_rows(&rows))
    }
}

/// Smith normal form `U·A·V = D`, with `U`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `u`, tracked alongside it.
    pub u_inv: IntMatrix,
}

impl SnfResult {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Locates the nonzero entry of smallest magnitude in the trailing block,
/// breaking ties by (row, col).
fn smallest_pivot(m: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in t..m.rows {
        for j in t..m.cols {
            let x = m.get(i, j);
            if x.is_zero() {
                continue;
            }
            let mag = x.abs();
            if best.as_ref().map_or(true, |(b, _, _)| mag < *b) {
                best = Some((mag, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

pub fn snf(a: &IntMatrix) -> SnfResult {
    let (r, c) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(r);
    let mut u_inv = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    for t in 0..r.min(c) {
        loop {
            let Some((pi, pj)) = smallest_pivot(&d, t) else {
                return SnfResult { u, d, v, u_inv };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -d.get(i, t).div_floor(d.get(t, t));
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                // inverse of (row_i += q row_t) is (col_t -= q col_i) on the right
                u_inv.add_col(t, i, &-&q);
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -d.get(t, j).div_floor(d.get(t, t));
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let p = d.get(t, t).clone();
            let offender = (t + 1..r).find(|&i| (t + 1..c).any(|j| !d.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                    u_inv.add_col(i, t, &-one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    SnfResult { u, d, v, u_inv }
}

/// Columns form a Z-basis of the integer kernel of `a`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let s = snf(a);
    let rank = s.rank();
    let cols: Vec<Vec<BigInt>> = (rank..a.cols).map(|j| s.v.column(j)).collect();
    IntMatrix::from_columns(a.cols, &cols)
}

/// Lifts (as columns in `Z^rows`) of a basis of the free module `coker a`.
pub fn cokernel_basis(a: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    let s = snf(a);
    let factors = s.invariant_factors();
    if let Some(t) = factors.iter().find(|x| !x.is_one()) {
        return Err(LinalgError::TorsionPresent(t.clone()));
    }
    let cols: Vec<Vec<BigInt>> = (factors.len()..a.rows).map(|i| s.u_inv.column(i)).collect();
    Ok(IntMatrix::from_columns(a.rows, &cols))
}

/// Solves `basis · x = target` over the rationals, returning `None` when
/// `target` is not in the rational span. `basis` must have independent columns.
pub fn solve_in_span(basis: &IntMatrix, target: &[BigInt]) -> Option<Vec<BigRational>> {
    let (n, k) = (basis.rows, basis.cols);
    assert_eq!(target.len(), n);
    let mut aug: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = basis.row(i).iter().map(|x| BigRational::from(x.clone())).collect();
            row.push(BigRational::from(target[i].clone()));
            row
        })
        .collect();
    let mut pivots = Vec::with_capacity(k);
    let mut rank = 0;
    for col in 0..k {
        let Some(p) = (rank..n).find(|&i| !aug[i][col].is_zero()) else {
            continue;
        };
        aug.swap(p, rank);
        let inv = aug[rank][col].recip();
        for x in aug[rank].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != rank && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in col..=k {
                    let sub = &aug[rank][j] * &f;
                    aug[i][j] -= sub;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if pivots.len() != k {
        return None;
    }
    if aug[rank..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| aug[i][k].clone()).collect())
}

/// Sign of the determinant of the change of basis `T` with `b1 · T = b2`.
pub fn det_sign_of_base_change(b1: &IntMatrix, b2: &IntMatrix) -> Result<Sign, LinalgError> {
    if b1.rows != b2.rows || b1.cols != b2.cols {
        return Err(LinalgError::Dimension(format!(
            "{}x{} vs {}x{}",
            b1.rows, b1.cols, b2.rows, b2.cols
        )));
    }
    let k = b1.cols;
    let mut t = IntMatrix::zeros(k, k);
    for j in 0..k {
        let x = solve_in_span(b1, &b2.column(j)).ok_or(LinalgError::NotSameLattice)?;
        for (i, v) in x.into_iter().enumerate() {
            if !v.is_integer() {
                return Err(LinalgError::NotSameLattice);
            }
            t.set(i, j, v.to_integer());
        }
    }
    let det = t.determinant();
    if det.is_one() {
        Ok(Sign::Plus)
    } else if (-det).is_one() {
        Ok(Sign::Minus)
    } else {
        Err(LinalgError::NotSameLattice)
    }
}

/// Sparse matrix over the rationals, stored by rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, value)` with each position at most once.
    pub entries: Vec<(usize, usize, BigRational)>,
}

impl Serialize for SparseMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let entries: Vec<(usize, usize, String)> = self.entries.iter().map(|(i, j, v)| (*i, *j, v.to_string())).collect();
        let mut st = serializer.serialize_struct("SparseMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    /// Adds `v` into position `(i, j)`, merging duplicates.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, BigRational)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for (i, j, v) in triplets {
            assert!(i < rows && j < cols, "entry out of range");
            *acc.entry((i, j)).or_insert_with(BigRational::zero) += v;
        }
        SparseMatrix {
            rows,
            cols,
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((i, j), v)| (i, j, v)).collect(),
        }
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut by_row: Vec<Vec<(usize, &BigRational)>> = vec![Vec::new(); other.rows];
        for (i, j, v) in &other.entries {
            by_row[*i].push((*j, v));
        }
        let triplets = self.entries.iter().flat_map(|(i, k, a)| by_row[*k].iter().map(move |(j, b)| (*i, *j, a * *b)));
        SparseMatrix::from_triplets(self.rows, other.cols, triplets.collect::<Vec<_>>())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact rank by sparse Gaussian elimination with sparsest-row pivoting.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<BTreeMap<usize, BigRational>> = vec![BTreeMap::new(); self.rows];
        for (i, j, v) in &self.entries {
            rows[*i].insert(*j, v.clone());
        }
        rows.retain(|r| !r.is_empty());
        let mut rank = 0;
        while !rows.is_empty() {
            // sparsest row first, ties by leading column
            let (p, _) = rows
                .iter()
                .enumerate()
                .min_by_key(|(_, r)| (r.len(), *r.keys().next().unwrap()))
                .unwrap();
            let pivot_row = rows.swap_remove(p);
            let (&col, pv) = pivot_row.iter().next().unwrap();
            let pv = pv.clone();
            rank += 1;
            for r in rows.iter_mut() {
                let Some(x) = r.get(&col).cloned() else {
                    continue;
                };
                let f = x / &pv;
                for (c, v) in &pivot_row {
                    let e = r.entry(*c).or_insert_with(BigRational::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        r.remove(c);
                    }
                }
            }
            rows.retain(|r| !r.is_empty());
        }
        rank
    }

    pub fn to_dense_rational(&self) -> Vec<Vec<BigRational>> {
        let mut m = vec![vec![BigRational::zero(); self.cols]; self.rows];
        for (i, j, v) in &self.entries {
            m[*i][*j] = v.clone();
        }
        m
    }
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn rational_inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut aug: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n);
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !aug[i][col].is_zero())?;
        aug.swap(p, col);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != col && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in 0..2 * n {
                    let sub = &aug[col][j] * &f;
                    aug[i][j] -= sub;
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}
