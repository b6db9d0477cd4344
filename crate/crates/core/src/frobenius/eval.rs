use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{format_rational, FrobeniusAlgebra, FrobeniusError, Q};
use crate::graph::MarkedGaf;

/// An exact linear map `Φ^⊗s -> Φ^⊗t` between tensor powers of an algebra,
/// stored as sparse `(output tuple, input tuple) -> coefficient`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedTensorMap {
    pub source_arity: usize,
    pub target_arity: usize,
    pub degree: i64,
    pub dim: usize,
    pub entries: BTreeMap<(Vec<usize>, Vec<usize>), Q>,
}

#[derive(Serialize)]
struct EntryDoc {
    input: Vec<String>,
    output: Vec<String>,
    coeff: String,
}

#[derive(Serialize)]
struct MapDoc {
    source_arity: usize,
    target_arity: usize,
    degree: i64,
    entries: Vec<EntryDoc>,
}

impl GradedTensorMap {
    pub fn identity(arity: usize, dim: usize) -> GradedTensorMap {
        let entries = (0..arity)
            .map(|_| 0..dim)
            .multi_cartesian_product()
            .map(|t| ((t.clone(), t), Q::one()))
            .collect();
        GradedTensorMap {
            source_arity: arity,
            target_arity: arity,
            degree: 0,
            dim,
            entries: if arity == 0 {
                BTreeMap::from([((vec![], vec![]), Q::one())])
            } else {
                entries
            },
        }
    }

    pub fn get(&self, output: &[usize], input: &[usize]) -> Q {
        self.entries
            .get(&(output.to_vec(), input.to_vec()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &GradedTensorMap) -> GradedTensorMap {
        assert_eq!(first.target_arity, self.source_arity, "arity mismatch in composition");
        let mut by_input: BTreeMap<&Vec<usize>, Vec<(&Vec<usize>, &Q)>> = BTreeMap::new();
        for ((out, inp), c) in &self.entries {
            by_input.entry(inp).or_default().push((out, c));
        }
        let mut entries: BTreeMap<(Vec<usize>, Vec<usize>), Q> = BTreeMap::new();
        for ((mid, inp), c) in &first.entries {
            if let Some(rows) = by_input.get(mid) {
                for (out, c2) in rows {
                    *entries.entry(((*out).clone(), inp.clone())).or_insert_with(Q::zero) += c * *c2;
                }
            }
        }
        entries.retain(|_, c| !c.is_zero());
        GradedTensorMap {
            source_arity: first.source_arity,
            target_arity: self.target_arity,
            degree: self.degree + first.degree,
            dim: self.dim,
            entries,
        }
    }

    /// Whether every nonzero entry shifts total degree by `degree`.
    pub fn respects_degree(&self, alg: &FrobeniusAlgebra) -> bool {
        let deg = |t: &[usize]| t.iter().map(|&i| alg.degree(i)).sum::<i64>();
        self.entries.keys().all(|(out, inp)| deg(out) - deg(inp) == self.degree)
    }

    pub fn to_json(&self, alg: &FrobeniusAlgebra) -> serde_json::Value {
        let names = |t: &[usize]| t.iter().map(|&i| alg.names()[i].clone()).collect();
        let doc = MapDoc {
            source_arity: self.source_arity,
            target_arity: self.target_arity,
            degree: self.degree,
            entries: self
                .entries
                .iter()
                .map(|((out, inp), c)| EntryDoc {
                    input: names(inp),
                    output: names(out),
                    coeff: format_rational(c),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("maps serialize")
    }
}

/// Tensor state: one factor per slot, terms keyed by basis tuples.
struct State<'a> {
    alg: &'a FrobeniusAlgebra,
    slots: Vec<usize>,
    terms: BTreeMap<Vec<usize>, Q>,
}

impl State<'_> {
    fn parity(&self, t: &[usize]) -> bool {
        t.iter().filter(|&&i| self.alg.odd(i)).count() % 2 == 1
    }

    fn move_to_end(&mut self, slot: usize) {
        let pos = self.slots.iter().position(|&s| s == slot).expect("slot present");
        let s = self.slots.remove(pos);
        self.slots.push(s);
        let old = std::mem::take(&mut self.terms);
        for (mut t, c) in old {
            let x = t.remove(pos);
            let sign = self.alg.odd(x) && self.parity(&t[pos..]);
            t.push(x);
            self.terms.insert(t, if sign { -c } else { c });
        }
    }

    /// Applies `f` to the last `k` factors; an odd operator passes every
    /// earlier factor.
    fn apply_tail(&mut self, k: usize, new_slots: &[usize], odd_op: bool, f: impl Fn(&[usize]) -> Vec<(Vec<usize>, Q)>) {
        let keep = self.slots.len() - k;
        self.slots.truncate(keep);
        self.slots.extend_from_slice(new_slots);
        let old = std::mem::take(&mut self.terms);
        for (t, c) in old {
            let (prefix, tail) = t.split_at(keep);
            let sign = odd_op && self.parity(prefix);
            for (out, c2) in f(tail) {
                let mut key = prefix.to_vec();
                key.extend(out);
                let v = &c * &c2;
                *self.terms.entry(key).or_insert_with(Q::zero) += if sign { -v } else { v };
            }
        }
        self.terms.retain(|_, c| !c.is_zero());
    }
}

/// Evaluates a marked gaf `B -> A` as a map `Φ^⊗A -> Φ^⊗B`, processing
/// edges in their canonical order.
pub fn evaluate(m: &MarkedGaf, alg: &FrobeniusAlgebra) -> Result<GradedTensorMap, FrobeniusError> {
    let order: Vec<usize> = (0..m.gaf().n_edges()).collect();
    evaluate_with_edge_order(m, alg, &order)
}

pub fn evaluate_with_edge_order(
    m: &MarkedGaf,
    alg: &FrobeniusAlgebra,
    edge_order: &[usize],
) -> Result<GradedTensorMap, FrobeniusError> {
    let violations = alg.validate();
    if !violations.is_empty() {
        return Err(FrobeniusError::InvalidAlgebra(violations));
    }
    let g = m.gaf();
    let n = alg.dim();
    let u = alg.copairing()?;
    let comul: Vec<Vec<(Vec<usize>, Q)>> = (0..n)
        .map(|i| alg.comul_with(&u, i).into_iter().map(|((a, b), c)| (vec![a, b], c)).collect())
        .collect();
    let mul = |t: &[usize]| -> Vec<(Vec<usize>, Q)> {
        alg.mul(t[0], t[1])
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (vec![k], c.clone()))
            .collect()
    };
    let delta = |t: &[usize]| comul[t[0]].clone();
    let counit = |t: &[usize]| {
        let c = alg.counit(t[0]);
        if c.is_zero() {
            vec![]
        } else {
            vec![(vec![], c.clone())]
        }
    };
    let odd_d = alg.d().rem_euclid(2) == 1;
    let nv = g.n_vertices();
    let attach_order: Vec<usize> = (0..g.n_attach()).sorted_by_key(|&a| g.vertex_label(a)).collect();
    let n_marks = m.marking().len();

    let mut entries = BTreeMap::new();
    for input in (0..attach_order.len()).map(|_| 0..n).multi_cartesian_product() {
        let mut st = State {
            alg,
            slots: attach_order.clone(),
            terms: BTreeMap::from([(input.clone(), Q::one())]),
        };
        for v in g.n_attach()..nv {
            st.apply_tail(0, &[v], false, |_| vec![(vec![alg.unit()], Q::one())]);
        }
        for &i in edge_order {
            let (x, y) = g.edge_endpoints(&g.edges()[i]);
            if x != y {
                st.move_to_end(x);
                st.move_to_end(y);
                st.apply_tail(2, &[x], false, mul);
                st.apply_tail(1, &[x, y], odd_d, delta);
            } else {
                st.move_to_end(x);
                st.apply_tail(1, &[x, x], odd_d, delta);
                st.apply_tail(2, &[x], false, mul);
            }
        }
        for w in 0..nv {
            let marks: Vec<usize> = m
                .marking()
                .iter()
                .enumerate()
                .filter(|(_, (_, v))| *v == w)
                .map(|(j, _)| nv + j)
                .collect();
            st.move_to_end(w);
            if marks.is_empty() {
                st.apply_tail(1, &[], odd_d, counit);
                continue;
            }
            for j in 1..marks.len() {
                st.apply_tail(1, &[marks[j - 1], w], odd_d, delta);
            }
            let last = st.slots.len() - 1;
            st.slots[last] = *marks.last().unwrap();
        }
        for j in 0..n_marks {
            st.move_to_end(nv + j);
        }
        for (out, c) in st.terms {
            entries.insert((out, input.clone()), c);
        }
    }
    Ok(GradedTensorMap {
        source_arity: g.n_attach(),
        target_arity: n_marks,
        degree: alg.d() * g.euler_char_rel(),
        dim: n,
        entries,
    })
}
