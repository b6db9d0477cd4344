//! The determinant-line coefficient system `ξ_d`.
//!
//! `ξ_d(G, A) = det(H₀(G,A)[1])^d ⊗ det(H₁(G,A)[1])^-d` is an invertible
//! module in degree `d·χ(G,A)`. Each gaf gets canonical homology bases and
//! hence a canonical generator; the structure isomorphisms are then tracked
//! as signs relative to these generators.
//!
//! Conventions: both homology groups sit in degree 1 after the shift,
//! `(L ⊗ M)^-1 = M^-1 ⊗ L^-1`, and the isomorphism for a composite is the
//! torsion isomorphism of the short exact sequence of relative chain
//! complexes `0 → C(g) → C(g∘h) → C(h) → 0`.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::canon::{is_isomorphism, GafIso};
use crate::category::{compose_glued, tensor_glued, CategoryError, Embedding, GrMorphism};
use crate::graph::{Gaf, MarkedGaf, UnionFind};
use crate::linalg::{det_sign_of_base_change, IntMatrix, LinalgError};
use crate::Sign;

use num_bigint::BigInt;
use num_traits::{One, Signed};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetError {
    #[error("map is not an automorphism fixing the attach points")]
    NotAnAutomorphism,
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Canonical spanning forest of `G/A`: edges split into forest and
/// non-forest edges, both in edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningForest {
    pub forest: Vec<usize>,
    pub cotree: Vec<usize>,
}

/// Quotient vertex of `G/A`: all attach points become vertex 0.
fn quotient_vertex(g: &Gaf, v: usize) -> usize {
    if g.is_attach(v) {
        0
    } else {
        v - g.n_attach() + 1
    }
}

pub fn spanning_forest(g: &Gaf) -> SpanningForest {
    let mut uf = UnionFind::new(g.n_inner() + 1);
    let mut forest = Vec::new();
    let mut cotree = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        let (u, v) = g.edge_endpoints(e);
        if uf.union(quotient_vertex(g, u), quotient_vertex(g, v)) {
            forest.push(i);
        } else {
            cotree.push(i);
        }
    }
    SpanningForest { forest, cotree }
}

/// Fundamental cycles of the non-forest edges: a basis of `H₁(G,A)`.
pub fn h1_basis(g: &Gaf) -> IntMatrix {
    let sf = spanning_forest(g);
    let nq = g.n_inner() + 1;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nq];
    for &i in &sf.forest {
        let (u, v) = g.edge_endpoints(&g.edges()[i]);
        let (qu, qv) = (quotient_vertex(g, u), quotient_vertex(g, v));
        adj[qu].push((qv, i));
        adj[qv].push((qu, i));
    }
    let columns: Vec<Vec<BigInt>> = sf
        .cotree
        .iter()
        .map(|&i| {
            let e = g.edges()[i];
            let (t, h) = g.edge_endpoints(&e);
            let (qt, qh) = (quotient_vertex(g, t), quotient_vertex(g, h));
            let mut z = vec![BigInt::from(0); g.n_edges()];
            z[i] = BigInt::one();
            // walk the forest from head back to tail
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; nq];
            let mut seen = vec![false; nq];
            let mut queue = VecDeque::from([qh]);
            seen[qh] = true;
            while let Some(x) = queue.pop_front() {
                for &(y, f) in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        prev[y] = Some((x, f));
                        queue.push_back(y);
                    }
                }
            }
            let mut y = qt;
            while y != qh {
                let (x, f) = prev[y].expect("tail and head lie in one tree");
                let ef = g.edges()[f];
                let along = quotient_vertex(g, g.at(ef.tail)) == x && quotient_vertex(g, g.at(ef.head)) == y;
                z[f] += if along { 1 } else { -1 };
                y = x;
            }
            z
        })
        .collect();
    IntMatrix::from_columns(g.n_edges(), &columns)
}

/// Indicators of the least-labelled vertex of each component disjoint
/// from `A`: lifts of a basis of `H₀(G,A)`.
pub fn h0_basis(g: &Gaf) -> IntMatrix {
    let columns: Vec<Vec<BigInt>> = h0_representatives(g)
        .into_iter()
        .map(|v| {
            let mut w = vec![BigInt::from(0); g.n_inner()];
            w[v - g.n_attach()] = BigInt::one();
            w
        })
        .collect();
    IntMatrix::from_columns(g.n_inner(), &columns)
}

/// Representative vertex per component disjoint from `A`, ordered by label.
pub fn h0_representatives(g: &Gaf) -> Vec<usize> {
    let mut reps: Vec<usize> = g
        .components()
        .into_iter()
        .filter(|c| c.vertices.iter().all(|&v| !g.is_attach(v)))
        .map(|c| {
            *c.vertices
                .iter()
                .min_by(|&&a, &&b| g.vertex_label(a).cmp(g.vertex_label(b)))
                .unwrap()
        })
        .collect();
    reps.sort_by(|&a, &b| g.vertex_label(a).cmp(g.vertex_label(b)));
    reps
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetLineObject {
    pub d: i64,
    pub degree: i64,
    pub h0_basis: IntMatrix,
    pub h1_basis: IntMatrix,
}

pub fn xi_object(g: &Gaf, d: i64) -> DetLineObject {
    let h0 = h0_basis(g);
    let h1 = h1_basis(g);
    DetLineObject {
        d,
        degree: d * (h0.cols() as i64 - h1.cols() as i64),
        h0_basis: h0,
        h1_basis: h1,
    }
}

fn det_sign(m: &IntMatrix) -> Sign {
    let det = m.determinant();
    debug_assert!(det.abs().is_one(), "expected a unimodular matrix, det = {det}");
    Sign::from_parity(det.is_negative())
}

fn hstack(rows: usize, parts: &[&IntMatrix]) -> IntMatrix {
    let cols: Vec<Vec<BigInt>> = parts.iter().flat_map(|m| m.columns()).collect();
    IntMatrix::from_columns(rows, &cols)
}

/// Sign relating the canonical chain generator of `C(G,A)` to the canonical
/// homology generator: `det[∂s | w] · det[z | s]` with `s` the forest edges.
pub fn torsion_sign(g: &Gaf) -> Sign {
    let boundary = g.rel_chain_complex().boundary;
    let sf = spanning_forest(g);
    let s = IntMatrix::from_columns(
        g.n_edges(),
        &sf.forest
            .iter()
            .map(|&i| (0..g.n_edges()).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect::<Vec<_>>(),
    );
    let ds = boundary.mul(&s);
    let m0 = hstack(g.n_inner(), &[&ds, &h0_basis(g)]);
    let m1 = hstack(g.n_edges(), &[&h1_basis(g), &s]);
    det_sign(&m0) * det_sign(&m1)
}

/// Determinant sign of the chain basis of `k` obtained by listing the
/// factor cells in order, each edge oriented as in its factor.
fn concat_chain_sign(k: &Gaf, parts: &[(&Gaf, &Embedding)]) -> Sign {
    let mut edge_perm = Vec::new();
    let mut sign = Sign::Plus;
    let mut vertex_perm = Vec::new();
    for (g, emb) in parts {
        for e in g.edges() {
            let t = emb.half_edge_map[e.tail];
            let idx = k.edge_of(t);
            if k.edges()[idx].tail != t {
                sign = -sign;
            }
            edge_perm.push(idx);
        }
        for v in g.n_attach()..g.n_vertices() {
            vertex_perm.push(emb.vertex_map[v] - k.n_attach());
        }
    }
    sign * Sign::of_permutation(&edge_perm) * Sign::of_permutation(&vertex_perm)
}

/// Sign of `ξ_d(g∘h) ≅ ξ_d(h) ⊗ ξ_d(g)` against canonical generators.
pub fn xi_compose_sign(g: &GrMorphism, h: &GrMorphism, d: i64) -> Result<Sign, DetError> {
    let glued = compose_glued(g, h)?;
    let k = glued.result.gaf();
    let (gg, hg) = (g.gaf(), h.gaf());
    let tau_k = torsion_sign(k) * concat_chain_sign(k, &[(gg, &glued.left), (hg, &glued.right)]);
    let koszul = Sign::from_parity((gg.n_inner() as i64 * hg.euler_char_rel()).rem_euclid(2) == 1);
    let sign = tau_k * torsion_sign(gg) * torsion_sign(hg) * koszul;
    Ok(sign.pow(d))
}

/// Transports the columns of an `H₁` basis of a factor into `k`.
fn push_cycles(k: &Gaf, g: &Gaf, emb: &Embedding, z: &IntMatrix) -> Vec<Vec<BigInt>> {
    z.columns()
        .into_iter()
        .map(|col| {
            let mut out = vec![BigInt::from(0); k.n_edges()];
            for (i, e) in g.edges().iter().enumerate() {
                let t = emb.half_edge_map[e.tail];
                let idx = k.edge_of(t);
                if k.edges()[idx].tail == t {
                    out[idx] += &col[i];
                } else {
                    out[idx] -= &col[i];
                }
            }
            out
        })
        .collect()
}

fn push_vertices(k: &Gaf, g: &Gaf, emb: &Embedding, w: &IntMatrix) -> Vec<Vec<BigInt>> {
    w.columns()
        .into_iter()
        .map(|col| {
            let mut out = vec![BigInt::from(0); k.n_inner()];
            for (i, x) in col.iter().enumerate() {
                out[emb.vertex_map[i + g.n_attach()] - k.n_attach()] += x;
            }
            out
        })
        .collect()
}

/// Sign of `ξ_d(g ⊔ h) ≅ ξ_d(g) ⊗ ξ_d(h)` against canonical generators.
pub fn xi_tensor_sign(g: &GrMorphism, h: &GrMorphism, d: i64) -> Result<Sign, DetError> {
    let glued = tensor_glued(g, h)?;
    let k = glued.result.gaf();
    let (gg, hg) = (g.gaf(), h.gaf());
    let mut z = push_cycles(k, gg, &glued.left, &h1_basis(gg));
    z.extend(push_cycles(k, hg, &glued.right, &h1_basis(hg)));
    let mut w = push_vertices(k, gg, &glued.left, &h0_basis(gg));
    w.extend(push_vertices(k, hg, &glued.right, &h0_basis(hg)));
    let s1 = det_sign_of_base_change(&IntMatrix::from_columns(k.n_edges(), &z), &h1_basis(k))?;
    let s0 = det_sign_of_base_change(&IntMatrix::from_columns(k.n_inner(), &w), &h0_basis(k))?;
    let b_g = h1_basis(gg).cols() as i64;
    let koszul = Sign::from_parity((b_g * hg.euler_char_rel()).rem_euclid(2) == 1);
    Ok((s0 * s1 * koszul).pow(d))
}

/// Matrix of an automorphism on `C₁` in the oriented edge basis.
pub fn edge_action(g: &Gaf, phi: &GafIso) -> IntMatrix {
    let mut m = IntMatrix::zeros(g.n_edges(), g.n_edges());
    for (i, e) in g.edges().iter().enumerate() {
        let t = phi.half_edge_map[e.tail];
        let j = g.edge_of(t);
        let s = if g.edges()[j].tail == t { 1 } else { -1 };
        m.set(j, i, BigInt::from(s));
    }
    m
}

/// Determinants of an automorphism on `H₀` and `H₁` in canonical bases.
pub fn homology_dets(g: &Gaf, phi: &GafIso) -> Result<(Sign, Sign), DetError> {
    let z = h1_basis(g);
    let image = edge_action(g, phi).mul(&z);
    let s1 = det_sign_of_base_change(&z, &image)?;
    let reps = h0_representatives(g);
    let comp_of: Vec<usize> = {
        let mut out = vec![usize::MAX; g.n_vertices()];
        for (ci, c) in g.components().iter().enumerate() {
            for &v in &c.vertices {
                out[v] = ci;
            }
        }
        out
    };
    let perm: Vec<usize> = reps
        .iter()
        .map(|&r| {
            let c = comp_of[phi.vertex_map[r]];
            reps.iter().position(|&x| comp_of[x] == c).expect("automorphisms permute free components")
        })
        .collect();
    Ok((Sign::of_permutation(&perm), s1))
}

/// Action of an automorphism fixing `A` on `ξ_d(g)`.
pub fn xi_iso_action(g: &Gaf, phi: &GafIso, d: i64) -> Result<Sign, DetError> {
    let m = MarkedGaf::unmarked(g.clone());
    if !is_isomorphism(&m, &m, phi) {
        return Err(DetError::NotAnAutomorphism);
    }
    let (s0, s1) = homology_dets(g, phi)?;
    Ok((s0 * s1).pow(d))
}
