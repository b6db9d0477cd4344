//! Frobenius algebras read straight from their JSON documents, with the
//! structure maps built as dense matrices.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::Value;

use super::*;

pub const ALGEBRA_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/src/frobenius/algebras");

pub struct Algebra {
    pub d: i64,
    pub names: Vec<String>,
    pub degrees: Vec<i64>,
    pub unit: usize,
    /// `product[i][j][k]`: coefficient of `e_k` in `e_i e_j`.
    pub product: Vec<Vec<Vec<Q>>>,
    pub counit: Vec<Q>,
}

fn number(v: &Value) -> Q {
    match v {
        Value::Number(n) => q(n.as_i64().unwrap()),
        Value::String(s) => match s.split_once('/') {
            Some((a, b)) => Q::new(a.trim().parse().unwrap(), b.trim().parse().unwrap()),
            None => q(s.trim().parse().unwrap()),
        },
        other => panic!("not a number: {other}"),
    }
}

impl Algebra {
    pub fn load(name: &str) -> Algebra {
        let text = std::fs::read_to_string(format!("{ALGEBRA_DIR}/{name}.json")).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let basis = v["basis"].as_array().unwrap();
        let names: Vec<String> = basis.iter().map(|b| b["name"].as_str().unwrap().to_string()).collect();
        let degrees: Vec<i64> = basis.iter().map(|b| b["deg"].as_i64().unwrap()).collect();
        let idx = |s: &str| names.iter().position(|n| n == s).unwrap();
        let n = names.len();
        let unit = idx(v["unit"].as_str().unwrap());
        let mut product = vec![vec![vec![q(0); n]; n]; n];
        for i in 0..n {
            product[unit][i][i] = q(1);
            product[i][unit][i] = q(1);
        }
        let d = v["d"].as_i64().unwrap();
        let odd = |deg: i64| (deg - d).rem_euclid(2) == 1;
        for (key, terms) in v["product"].as_object().unwrap() {
            let (a, b) = key.split_once(',').unwrap();
            let (i, j) = (idx(a.trim()), idx(b.trim()));
            let sign = if odd(degrees[i]) && odd(degrees[j]) { q(-1) } else { q(1) };
            let mut row = vec![q(0); n];
            for t in terms.as_array().unwrap() {
                row[idx(t[0].as_str().unwrap())] += number(&t[1]);
            }
            product[j][i] = row.iter().map(|x| *x * sign).collect();
            product[i][j] = row;
        }
        let mut counit = vec![q(0); n];
        for (k, c) in v["counit"].as_object().unwrap() {
            counit[idx(k)] = number(c);
        }
        Algebra {
            d,
            names,
            degrees,
            unit,
            product,
            counit,
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn odd(&self, i: usize) -> bool {
        (self.degrees[i] - self.d).rem_euclid(2) == 1
    }

    pub fn gram(&self) -> Vec<Vec<Q>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| self.product[i][j][k] * self.counit[k]).sum()).collect())
            .collect()
    }

    pub fn copairing(&self) -> Vec<Vec<Q>> {
        inverse(&self.gram())
    }

    /// `tr(G⁻¹ Gᵀ)`: the value of a closed circle.
    pub fn circle(&self) -> Q {
        let g = self.gram();
        let gt: Vec<Vec<Q>> = (0..g.len()).map(|i| (0..g.len()).map(|j| g[j][i]).collect()).collect();
        let m = matmul(&self.copairing(), &gt);
        (0..m.len()).map(|i| m[i][i]).sum()
    }

    /// `Δ(e_i) = Σ u[j][k] (e_i e_j) ⊗ e_k`.
    pub fn comultiplication(&self) -> Tensor {
        let n = self.dim();
        let u = self.copairing();
        let mut t = Tensor::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        t.add(vec![l, k], vec![i], u[j][k] * self.product[i][j][l]);
                    }
                }
            }
        }
        t
    }

    pub fn counit_map(&self) -> Tensor {
        let mut t = Tensor::new();
        for i in 0..self.dim() {
            t.add(vec![], vec![i], self.counit[i]);
        }
        t
    }

    /// `x ↦ x ⊗ 1`.
    pub fn with_unit(&self) -> Tensor {
        let mut t = Tensor::new();
        for i in 0..self.dim() {
            t.add(vec![i, self.unit], vec![i], q(1));
        }
        t
    }

    /// `μ ∘ Δ`.
    pub fn handle(&self) -> Tensor {
        let mut t = Tensor::new();
        for ((out, inp), c) in self.comultiplication().0 {
            for k in 0..self.dim() {
                t.add(vec![k], inp.clone(), c * self.product[out[0]][out[1]][k]);
            }
        }
        t
    }
}

/// Sparse `(output tuple, input tuple) -> coefficient`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tensor(pub BTreeMap<(Vec<usize>, Vec<usize>), Q>);

impl Tensor {
    pub fn new() -> Tensor {
        Tensor::default()
    }

    pub fn add(&mut self, out: Vec<usize>, inp: Vec<usize>, c: Q) {
        if c.is_zero() {
            return;
        }
        let key = (out, inp);
        let v = self.0.remove(&key).unwrap_or_else(|| q(0)) + c;
        if !v.is_zero() {
            self.0.insert(key, v);
        }
    }

    pub fn from_library(entries: &BTreeMap<(Vec<usize>, Vec<usize>), BigRational>) -> Tensor {
        let mut t = Tensor::new();
        for ((o, i), c) in entries {
            t.add(o.clone(), i.clone(), small(c));
        }
        t
    }
}

pub fn small(c: &BigRational) -> Q {
    let conv = |x: &BigInt| x.to_i64().expect("coefficient fits in i64");
    Q::new(conv(c.numer()), conv(c.denom()))
}

pub fn inverse(m: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = m.len();
    let mut aug: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| q((i == j) as i64)));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    assert_eq!(pivots, (0..n).collect::<Vec<_>>(), "singular pairing");
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}
