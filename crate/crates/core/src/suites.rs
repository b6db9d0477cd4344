//! Property suites shared by the `check` subcommand and the acceptance tests.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::canon::{automorphisms, is_isomorphic};
use crate::category::{compose, homotopy_invariants, op1, op2, op3};
use crate::collapse::collapse_forest_marked;
use crate::det::{xi_compose_sign, xi_iso_action, xi_object};
use crate::frobenius::{evaluate, FrobeniusAlgebra, GradedTensorMap, Q};
use crate::graph::build::{rose, theta};
use crate::graph::MarkedGaf;
use crate::linalg::{snf, IntMatrix};
use crate::pool::{collapse_pairs, composable_pairs, composable_triples, pool_generate, rng, PoolBounds};
use crate::spine::{enumerate_spine_objects, spine_chain_complex};

pub const SUITES: [&str; 10] = [
    "frobenius",
    "functoriality",
    "collapse",
    "degree",
    "trace",
    "xi",
    "spine",
    "complex",
    "snf",
    "operations",
];

/// The four algebras exercised by the suites.
pub const SUITE_ALGEBRAS: [&str; 4] = ["s2", "t2", "cp2", "s1"];

/// Algebras of even formal dimension, where the state sum does not depend on
/// the orientation of `ξ_d`.
pub const EVEN_ALGEBRAS: [&str; 3] = ["s2", "t2", "cp2"];

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}; expected one of {SUITES:?}")]
    Unknown(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<String>,
    pub millis: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 50 {
            self.failures.push(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.check(false, || what);
    }
}

fn default_size(suite: &str) -> usize {
    match suite {
        "functoriality" => 200,
        "snf" => 500,
        _ => 100,
    }
}

/// Runs one suite; `n` overrides the number of random cases.
pub fn run_suite(suite: &str, seed: u64, n: Option<usize>) -> Result<SuiteReport, SuiteError> {
    let n = n.unwrap_or_else(|| default_size(suite));
    let start = Instant::now();
    let mut t = Tally::default();
    match suite {
        "frobenius" => frobenius(&mut t),
        "functoriality" => functoriality(&mut t, seed, n),
        "collapse" => collapse(&mut t, seed, n),
        "degree" => degree(&mut t, seed, n),
        "trace" => trace(&mut t),
        "xi" => xi(&mut t, seed, n),
        "spine" => spine(&mut t),
        "complex" => complex(&mut t),
        "snf" => smith(&mut t, seed, n),
        "operations" => operations(&mut t),
        other => return Err(SuiteError::Unknown(other.to_string())),
    }
    Ok(SuiteReport {
        suite: suite.to_string(),
        seed,
        cases: t.cases,
        failures: t.failures,
        millis: start.elapsed().as_millis(),
    })
}

fn algebra(name: &str) -> FrobeniusAlgebra {
    FrobeniusAlgebra::bundled(name).expect("bundled algebras parse")
}

fn frobenius(t: &mut Tally) {
    for name in SUITE_ALGEBRAS {
        let v = algebra(name).validate();
        t.check(v.is_empty(), || format!("{name}: {}", v.join("; ")));
    }
}

fn functoriality(t: &mut Tally, seed: u64, n: usize) {
    let algs = [algebra("s2"), algebra("t2")];
    for (i, (g, h)) in composable_pairs(seed, n, PoolBounds::default()).iter().enumerate() {
        let gh = match compose(g, h) {
            Ok(x) => x,
            Err(e) => {
                t.fail(format!("pair {i}: {e}"));
                continue;
            }
        };
        for alg in &algs {
            let lhs = evaluate(&gh, alg).expect("bundled algebra");
            let rhs = evaluate(h, alg).unwrap().after(&evaluate(g, alg).unwrap());
            t.check(lhs == rhs, || format!("pair {i} over d={}: evaluate(g∘h) != evaluate(h)∘evaluate(g)", alg.d()));
        }
    }
}

fn collapse(t: &mut Tally, seed: u64, n: usize) {
    let algs: Vec<FrobeniusAlgebra> = EVEN_ALGEBRAS.iter().map(|a| algebra(a)).collect();
    for (i, (m, forest)) in collapse_pairs(seed, n, PoolBounds::default()).iter().enumerate() {
        let (c, _) = match collapse_forest_marked(m, forest) {
            Ok(x) => x,
            Err(e) => {
                t.fail(format!("case {i}: {e}"));
                continue;
            }
        };
        t.check(homotopy_invariants(m) == homotopy_invariants(&c), || format!("case {i}: invariants changed"));
        for d in 0..=3 {
            t.check(xi_object(m.gaf(), d).degree == xi_object(c.gaf(), d).degree, || {
                format!("case {i}: ξ degree changed at d={d}")
            });
        }
        for alg in &algs {
            t.check(evaluate(m, alg).unwrap() == evaluate(&c, alg).unwrap(), || {
                format!("case {i}: evaluation changed over d={}", alg.d())
            });
        }
    }
}

fn degree(t: &mut Tally, seed: u64, n: usize) {
    let algs: Vec<FrobeniusAlgebra> = SUITE_ALGEBRAS.iter().map(|a| algebra(a)).collect();
    let mut cases: Vec<MarkedGaf> = pool_generate(seed, n, PoolBounds::default()).elements;
    cases.extend((1..=5).map(|k| MarkedGaf::unmarked(rose(k))));
    for (i, m) in cases.iter().enumerate() {
        let chi = m.euler_char_rel();
        for alg in &algs {
            let f = evaluate(m, alg).unwrap();
            t.check(f.degree == alg.d() * chi && f.respects_degree(alg), || {
                format!("case {i}: evaluation degree over d={}", alg.d())
            });
        }
        for d in 0..=3 {
            t.check(xi_object(m.gaf(), d).degree == d * chi, || format!("case {i}: ξ degree at d={d}"));
        }
    }
    for k in 1..=5i64 {
        for d in 0..=3 {
            let deg = xi_object(&rose(k as usize), d).degree;
            t.check(deg == d * (1 - k), || format!("rose {k}: ξ degree {deg} at d={d}"));
        }
    }
}

fn trace(t: &mut Tally) {
    let circle = MarkedGaf::unmarked(rose(1));
    for (name, expected) in [("s2", 2), ("t2", 0), ("cp2", 3)] {
        let alg = algebra(name);
        let value = evaluate(&circle, &alg).unwrap().get(&[], &[]);
        t.check(value == Q::from_integer(BigInt::from(expected)), || format!("{name}: circle evaluates to {value}"));
        t.check(alg.graded_dimension() == expected, || format!("{name}: graded dimension"));
        t.check(alg.handle_trace().map_or(false, |x| x == value), || format!("{name}: handle trace"));
    }
}

fn xi(t: &mut Tally, seed: u64, n: usize) {
    for (i, (f, g, h)) in composable_triples(seed, n, PoolBounds::default()).iter().enumerate() {
        let (fg, gh) = (compose(f, g).unwrap(), compose(g, h).unwrap());
        for d in 1..=3 {
            let lhs = xi_compose_sign(f, g, d).unwrap() * xi_compose_sign(&fg, h, d).unwrap();
            let rhs = xi_compose_sign(g, h, d).unwrap() * xi_compose_sign(f, &gh, d).unwrap();
            t.check(lhs == rhs, || format!("triple {i}: associativity fails at d={d}"));
        }
    }
    let r2 = rose(2);
    let swap = automorphisms(&MarkedGaf::unmarked(r2.clone())).into_iter().find(|phi| {
        let e = |h: &str| r2.half_edge_index(h).unwrap();
        phi.half_edge_map[e("h0")] == e("h2") && phi.half_edge_map[e("h1")] == e("h3")
    });
    match swap {
        Some(phi) => {
            let s = xi_iso_action(&r2, &phi, 1).unwrap();
            t.check(s.is_minus(), || format!("loop swap of R2 acts by {s}"));
        }
        None => t.fail("no loop swap automorphism of R2".to_string()),
    }
    let th = theta();
    let auts = automorphisms(&MarkedGaf::unmarked(th.clone()));
    t.check(auts.len() == 12, || format!("theta has {} automorphisms", auts.len()));
    for d in 1..=3 {
        let signs: Vec<_> = auts.iter().map(|p| xi_iso_action(&th, p, d).unwrap()).collect();
        for (i, p) in auts.iter().enumerate() {
            for (j, q) in auts.iter().enumerate() {
                let pq = xi_iso_action(&th, &p.after(q), d).unwrap();
                t.check(pq == signs[i] * signs[j], || format!("theta automorphisms {i}, {j} at d={d}"));
            }
        }
    }
}

fn spine(t: &mut Tally) {
    let two = enumerate_spine_objects(2).unwrap();
    t.check(two.len() == 3, || format!("rank 2 has {} classes", two.len()));
    for k in 2..=3 {
        let objs = enumerate_spine_objects(k).unwrap();
        for (i, g) in objs.iter().enumerate() {
            let ok = g.n_attach() == 0
                && g.components().len() == 1
                && (g.n_edges() + 1) == g.n_vertices() + k
                && (0..g.n_vertices()).all(|v| g.valence(v) >= 3);
            t.check(ok, || format!("rank {k} object {i} is not a valence-3 connected rank-{k} graph"));
            for j in 0..i {
                let a = MarkedGaf::unmarked(g.clone());
                let b = MarkedGaf::unmarked(objs[j].clone());
                t.check(!is_isomorphic(&a, &b), || format!("rank {k} objects {j} and {i} are isomorphic"));
            }
        }
    }
}

fn complex(t: &mut Tally) {
    for n in 2..=3 {
        for d in 0..=1 {
            let c = spine_chain_complex(n, d, false).unwrap();
            t.check(c.squares_to_zero(), || format!("d² != 0 at n={n}, twist {d}"));
            if n == 2 && d == 0 {
                let b = c.betti();
                t.check(b.first() == Some(&1) && b[1..].iter().all(|&x| x == 0), || format!("untwisted rank 2 Betti numbers {b:?}"));
            }
        }
    }
}

fn smith(t: &mut Tally, seed: u64, n: usize) {
    let mut r = rng(seed);
    for i in 0..n {
        let rows = r.gen_range(1..=12u32) as usize;
        let cols = r.gen_range(1..=12u32) as usize;
        let a = IntMatrix::from_rows(&(0..rows).map(|_| (0..cols).map(|_| r.gen_range(-9..=9i32)).collect()).collect::<Vec<Vec<i32>>>());
        let s = snf(&a);
        t.check(s.u.mul(&a).mul(&s.v) == s.d, || format!("matrix {i}: U·A·V != D"));
        t.check(s.u.determinant().abs().is_one() && s.v.determinant().abs().is_one(), || {
            format!("matrix {i}: transforms not unimodular")
        });
        t.check(s.u_inv.mul(&s.u) == IntMatrix::identity(rows), || format!("matrix {i}: tracked inverse"));
        let diag_ok = (0..rows).all(|p| (0..cols).all(|q| p == q || s.d.get(p, q).is_zero()));
        let f = s.invariant_factors();
        let divides = f.windows(2).all(|w| (&w[1] % &w[0]).is_zero()) && f.iter().all(|x| x.is_positive());
        let tail_zero = (f.len()..rows.min(cols)).all(|p| s.d.get(p, p).is_zero());
        t.check(diag_ok && divides && tail_zero, || format!("matrix {i}: D is not in Smith form"));
    }
}

fn map_from(source_arity: usize, target_arity: usize, degree: i64, dim: usize, entries: Vec<(Vec<usize>, Vec<usize>, Q)>) -> GradedTensorMap {
    GradedTensorMap {
        source_arity,
        target_arity,
        degree,
        dim,
        entries: entries.into_iter().filter(|(_, _, c)| !c.is_zero()).map(|(o, i, c)| ((o, i), c)).collect(),
    }
}

fn operations(t: &mut Tally) {
    let a = vec!["a".to_string()];
    let fold = op1(&a, &BTreeMap::from([("b1".to_string(), "a".to_string()), ("b2".to_string(), "a".to_string())])).unwrap();
    let projection = op1(&a, &BTreeMap::new()).unwrap();
    let unit = op2(&a, "n").unwrap();
    let handle = op3(&a, "a", "a").unwrap();
    for name in SUITE_ALGEBRAS {
        let alg = algebra(name);
        let (n, d) = (alg.dim(), alg.d());
        let u = alg.copairing().unwrap();
        let delta = map_from(
            1,
            2,
            0,
            n,
            (0..n)
                .flat_map(|i| alg.comul_with(&u, i).into_iter().map(move |((x, y), c)| (vec![x, y], vec![i], c)))
                .collect(),
        );
        let counit = map_from(1, 0, 0, n, (0..n).map(|i| (vec![], vec![i], alg.counit(i).clone())).collect());
        let with_unit = map_from(1, 2, d, n, (0..n).map(|i| (vec![i, alg.unit()], vec![i], Q::one())).collect());
        let mut handle_entries = Vec::new();
        for i in 0..n {
            for ((x, y), c) in alg.comul_with(&u, i) {
                for (k, c2) in alg.mul(x, y).iter().enumerate() {
                    handle_entries.push((vec![k], vec![i], &c * c2));
                }
            }
        }
        let mut merged: BTreeMap<(Vec<usize>, Vec<usize>), Q> = BTreeMap::new();
        for (o, i, c) in handle_entries {
            *merged.entry((o, i)).or_insert_with(Q::zero) += c;
        }
        let handle_map = map_from(1, 1, -d, n, merged.into_iter().map(|((o, i), c)| (o, i, c)).collect());
        for (label, m, expected) in [
            ("op1(fold)", &fold, delta),
            ("op1(projection)", &projection, counit),
            ("op2", &unit, with_unit),
            ("op3(a,a)", &handle, handle_map),
        ] {
            let got = evaluate(m, &alg).unwrap();
            t.check(got == expected, || format!("{name}: {label} differs from the direct matrix"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_suites_pass() {
        for s in ["frobenius", "trace", "operations", "spine"] {
            let r = run_suite(s, 1, None).unwrap();
            assert!(r.passed(), "{s}: {:?}", r.failures);
        }
    }

    #[test]
    fn small_random_suites_pass() {
        for s in ["functoriality", "collapse", "degree", "xi", "snf"] {
            let r = run_suite(s, 2, Some(10)).unwrap();
            assert!(r.passed(), "{s}: {:?}", r.failures);
            assert!(r.cases > 0);
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 0, None).is_err());
    }
}
