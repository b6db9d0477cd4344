//! Graded commutative Frobenius algebras with exact structure constants.
//!
//! Degrees are homological: the unit sits in degree `d` and the product has
//! degree `-d`. Koszul signs use the parity `deg - d`, so the unit is always
//! even; for even `d` this is the ordinary degree parity.

mod eval;

pub use eval::{evaluate, evaluate_with_edge_order, GradedTensorMap};

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::linalg::rational_inverse;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrobeniusError {
    #[error("invalid algebra: {}", .0.join("; "))]
    InvalidAlgebra(Vec<String>),
    #[error("pairing is singular")]
    SingularPairing,
    #[error("unknown basis element {0:?}")]
    UnknownBasis(String),
    #[error("bad rational {0:?}")]
    BadRational(String),
    #[error("malformed algebra json: {0}")]
    Json(String),
    #[error("input has arity {found}, expected {expected}")]
    SourceMismatch { expected: usize, found: usize },
    #[error("unknown bundled algebra {0:?}")]
    UnknownAlgebra(String),
}

pub type Q = BigRational;

pub fn parse_rational(v: &Value) -> Result<Q, FrobeniusError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|x| Q::from_integer(BigInt::from(x)))
            .ok_or_else(|| FrobeniusError::BadRational(n.to_string())),
        Value::String(s) => {
            let s = s.trim();
            let parsed = match s.split_once('/') {
                Some((p, q)) => BigInt::from_str(p.trim())
                    .ok()
                    .zip(BigInt::from_str(q.trim()).ok())
                    .filter(|(_, q)| !q.is_zero())
                    .map(|(p, q)| Q::new(p, q)),
                None => BigInt::from_str(s).ok().map(Q::from_integer),
            };
            parsed.ok_or_else(|| FrobeniusError::BadRational(s.to_string()))
        }
        other => Err(FrobeniusError::BadRational(other.to_string())),
    }
}

pub fn format_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub name: String,
    pub deg: i64,
}

/// JSON form of a Frobenius algebra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrobeniusDoc {
    pub d: i64,
    pub basis: Vec<BasisDoc>,
    pub unit: String,
    #[serde(default)]
    pub product: BTreeMap<String, Vec<(String, Value)>>,
    #[serde(default)]
    pub counit: BTreeMap<String, Value>,
}

/// A finite-dimensional graded commutative Frobenius algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusAlgebra {
    d: i64,
    names: Vec<String>,
    degrees: Vec<i64>,
    unit: usize,
    /// `product[i][j]` = coefficients of `e_i · e_j`.
    product: Vec<Vec<Vec<Q>>>,
    counit: Vec<Q>,
}

pub const BUNDLED: [&str; 5] = ["s2", "t2", "cp2", "s1", "ground"];

impl FrobeniusAlgebra {
    pub fn bundled(name: &str) -> Result<FrobeniusAlgebra, FrobeniusError> {
        let text = match name {
            "s2" => include_str!("algebras/s2.json"),
            "t2" => include_str!("algebras/t2.json"),
            "cp2" => include_str!("algebras/cp2.json"),
            "s1" => include_str!("algebras/s1.json"),
            "ground" => include_str!("algebras/ground.json"),
            other => return Err(FrobeniusError::UnknownAlgebra(other.to_string())),
        };
        FrobeniusAlgebra::from_json(text)
    }

    pub fn from_json(text: &str) -> Result<FrobeniusAlgebra, FrobeniusError> {
        let doc: FrobeniusDoc = serde_json::from_str(text).map_err(|e| FrobeniusError::Json(e.to_string()))?;
        FrobeniusAlgebra::from_doc(&doc)
    }

    /// Builds the structure constants; a product missing from the document
    /// is filled in by graded commutativity, or zero.
    pub fn from_doc(doc: &FrobeniusDoc) -> Result<FrobeniusAlgebra, FrobeniusError> {
        let names: Vec<String> = doc.basis.iter().map(|b| b.name.clone()).collect();
        let degrees: Vec<i64> = doc.basis.iter().map(|b| b.deg).collect();
        let n = names.len();
        let index = |s: &str| names.iter().position(|x| x == s).ok_or_else(|| FrobeniusError::UnknownBasis(s.to_string()));
        let unit = index(&doc.unit)?;
        let mut given: BTreeMap<(usize, usize), Vec<Q>> = BTreeMap::new();
        for (key, terms) in &doc.product {
            let (x, y) = key
                .split_once(',')
                .ok_or_else(|| FrobeniusError::Json(format!("product key {key:?} is not \"a,b\"")))?;
            let (i, j) = (index(x.trim())?, index(y.trim())?);
            let mut coeffs = vec![Q::zero(); n];
            for (name, c) in terms {
                coeffs[index(name)?] += parse_rational(c)?;
            }
            given.insert((i, j), coeffs);
        }
        let parity = |i: usize| (degrees[i] - doc.d).rem_euclid(2) == 1;
        let mut product = vec![vec![vec![Q::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                product[i][j] = if let Some(c) = given.get(&(i, j)) {
                    c.clone()
                } else if let Some(c) = given.get(&(j, i)) {
                    let s = if parity(i) && parity(j) { -Q::one() } else { Q::one() };
                    c.iter().map(|x| x * &s).collect()
                } else {
                    vec![Q::zero(); n]
                };
            }
        }
        let mut counit = vec![Q::zero(); n];
        for (name, c) in &doc.counit {
            counit[index(name)?] = parse_rational(c)?;
        }
        Ok(FrobeniusAlgebra {
            d: doc.d,
            names,
            degrees,
            unit,
            product,
            counit,
        })
    }

    pub fn to_doc(&self) -> FrobeniusDoc {
        let n = self.dim();
        let mut product = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let terms: Vec<(String, Value)> = (0..n)
                    .filter(|&k| !self.product[i][j][k].is_zero())
                    .map(|k| (self.names[k].clone(), Value::String(format_rational(&self.product[i][j][k]))))
                    .collect();
                product.insert(format!("{},{}", self.names[i], self.names[j]), terms);
            }
        }
        FrobeniusDoc {
            d: self.d,
            basis: (0..n)
                .map(|i| BasisDoc {
                    name: self.names[i].clone(),
                    deg: self.degrees[i],
                })
                .collect(),
            unit: self.names[self.unit].clone(),
            product,
            counit: (0..n)
                .filter(|&i| !self.counit[i].is_zero())
                .map(|i| (self.names[i].clone(), Value::String(format_rational(&self.counit[i]))))
                .collect(),
        }
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|x| x == name)
    }

    /// Koszul parity of a basis element.
    pub fn odd(&self, i: usize) -> bool {
        (self.degrees[i] - self.d).rem_euclid(2) == 1
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, i: usize, j: usize) -> &[Q] {
        &self.product[i][j]
    }

    pub fn counit(&self, i: usize) -> &Q {
        &self.counit[i]
    }

    /// Multiplies two vectors in the basis.
    pub fn mul_vec(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for k in 0..n {
                    if !self.product[i][j][k].is_zero() {
                        out[k] += &c * &self.product[i][j][k];
                    }
                }
            }
        }
        out
    }

    /// `G[i][j] = ε(e_i · e_j)`.
    pub fn gram(&self) -> Vec<Vec<Q>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &self.product[i][j][k] * &self.counit[k]).sum())
                    .collect()
            })
            .collect()
    }

    /// Copairing `u = Σ u[j][k] e_j ⊗ e_k` with `u = G⁻¹`.
    pub fn copairing(&self) -> Result<Vec<Vec<Q>>, FrobeniusError> {
        rational_inverse(&self.gram()).ok_or(FrobeniusError::SingularPairing)
    }

    /// `Δ(e_i) = Σ u[j][k] (e_i e_j) ⊗ e_k`, as sparse `(l, k) -> coefficient`.
    pub fn comul(&self, i: usize) -> Result<BTreeMap<(usize, usize), Q>, FrobeniusError> {
        let u = self.copairing()?;
        Ok(self.comul_with(&u, i))
    }

    pub(crate) fn comul_with(&self, u: &[Vec<Q>], i: usize) -> BTreeMap<(usize, usize), Q> {
        let n = self.dim();
        let mut out: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for j in 0..n {
            for k in 0..n {
                if u[j][k].is_zero() {
                    continue;
                }
                for l in 0..n {
                    let c = &self.product[i][j][l];
                    if !c.is_zero() {
                        *out.entry((l, k)).or_insert_with(Q::zero) += c * &u[j][k];
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Every axiom violation; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let n = self.dim();
        let mut out = Vec::new();
        if n == 0 {
            return vec!["empty basis".to_string()];
        }
        for i in 0..n {
            if self.names[..i].contains(&self.names[i]) {
                out.push(format!("duplicate basis name {:?}", self.names[i]));
            }
        }
        if self.degrees[self.unit] != self.d {
            out.push(format!("unit {:?} is not in degree {}", self.names[self.unit], self.d));
        }
        for i in 0..n {
            if !self.counit[i].is_zero() && self.degrees[i] != 0 {
                out.push(format!("counit nonzero on {:?} outside degree 0", self.names[i]));
            }
        }
        let e = |i: usize| {
            let mut v = vec![Q::zero(); n];
            v[i] = Q::one();
            v
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !self.product[i][j][k].is_zero() && self.degrees[k] != self.degrees[i] + self.degrees[j] - self.d {
                        out.push(format!(
                            "product {}·{} has a term {:?} of the wrong degree",
                            self.names[i], self.names[j], self.names[k]
                        ));
                    }
                }
            }
        }
        for i in 0..n {
            if self.product[self.unit][i] != e(i) || self.product[i][self.unit] != e(i) {
                out.push(format!("unit law fails on {:?}", self.names[i]));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let s = if self.odd(i) && self.odd(j) { -Q::one() } else { Q::one() };
                let swapped: Vec<Q> = self.product[j][i].iter().map(|x| x * &s).collect();
                if self.product[i][j] != swapped {
                    out.push(format!("graded commutativity fails on ({}, {})", self.names[i], self.names[j]));
                }
                for k in 0..n {
                    let left = self.mul_vec(&self.product[i][j], &e(k));
                    let right = self.mul_vec(&e(i), &self.product[j][k]);
                    if left != right {
                        out.push(format!(
                            "associativity fails on ({}, {}, {})",
                            self.names[i], self.names[j], self.names[k]
                        ));
                    }
                }
            }
        }
        match self.copairing() {
            Err(_) => out.push("nondegeneracy fails: Gram matrix is singular".to_string()),
            Ok(u) => {
                let g = self.gram();
                for i in 0..n {
                    for k in 0..n {
                        let s: Q = (0..n).map(|j| &g[i][j] * &u[j][k]).sum();
                        let want = if i == k { Q::one() } else { Q::zero() };
                        if s != want {
                            out.push(format!("snake identity fails at ({}, {})", self.names[i], self.names[k]));
                        }
                        let sign = if self.odd(i) && self.odd(k) { -Q::one() } else { Q::one() };
                        if u[i][k] != &u[k][i] * &sign {
                            out.push(format!("copairing not graded symmetric at ({}, {})", self.names[i], self.names[k]));
                        }
                    }
                }
            }
        }
        out
    }

    /// `Σ_jk u[j][k] ε(e_j e_k)`: the trace of the handle operator.
    pub fn handle_trace(&self) -> Result<Q, FrobeniusError> {
        let u = self.copairing()?;
        let g = self.gram();
        let n = self.dim();
        Ok((0..n).flat_map(|j| (0..n).map(move |k| (j, k))).map(|(j, k)| &u[j][k] * &g[j][k]).sum())
    }

    /// `Σ (-1)^deg dim Φ_deg`.
    pub fn graded_dimension(&self) -> i64 {
        self.degrees.iter().map(|d| if d.rem_euclid(2) == 0 { 1 } else { -1 }).sum()
    }
}

/// Loads a bundled algebra by name, or a JSON file otherwise.
pub fn load_algebra(name_or_path: &str) -> Result<FrobeniusAlgebra, crate::Error> {
    if BUNDLED.contains(&name_or_path) {
        return Ok(FrobeniusAlgebra::bundled(name_or_path)?);
    }
    let text = std::fs::read_to_string(name_or_path)?;
    Ok(FrobeniusAlgebra::from_json(&text)?)
}
