//! The spine of outer space modulo `Out(Fₙ)` at small rank.
//!
//! Objects are connected closed gafs of rank `n` with every vertex of
//! valence at least 3. A `k`-simplex of the quotient is an orbit of
//! `(G₀, F₁ ⊊ … ⊊ F_k)` under `Aut(G₀)`, with `F_i` nonempty forests of `G₀`;
//! its vertices are the collapses `G₀/F_i`. Chains carry the twist `ξ_d` of
//! the top graph, and orbits whose stabilizer acts by `-1` are dropped.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::canon::{automorphisms, canonical_form, GafIso};
use crate::collapse::collapse_forest;
use crate::det::{edge_action, h1_basis, homology_dets};
use crate::graph::{Gaf, MarkedGaf, UnionFind};
use crate::linalg::{det_sign_of_base_change, IntMatrix, SparseMatrix};
use crate::Sign;

pub const MAX_RANK: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpineError {
    #[error("rank {0} is too large (supported up to {MAX_RANK}; rank 4 complexes need the experimental flag)")]
    RankTooLarge(usize),
    #[error("rank {0} is too small; the spine starts at rank 2")]
    RankTooSmall(usize),
}

fn check_rank(n: usize, limit: usize) -> Result<(), SpineError> {
    if n < 2 {
        Err(SpineError::RankTooSmall(n))
    } else if n > limit {
        Err(SpineError::RankTooLarge(n))
    } else {
        Ok(())
    }
}

fn canonical_gaf(g: &Gaf) -> Gaf {
    canonical_form(&MarkedGaf::unmarked(g.clone())).form.into_gaf()
}

/// Splits vertex `v` by moving the half-edges in `moved` to a new vertex
/// joined to `v` by a new edge.
fn blow_up(g: &Gaf, v: usize, moved: &[usize]) -> Gaf {
    let mut inner = g.inner().to_vec();
    inner.push("w".to_string());
    let new_vertex = g.n_vertices();
    let mut labels = g.half_edge_labels().to_vec();
    labels.push("x0".to_string());
    labels.push("x1".to_string());
    let mut at = g.incidence().to_vec();
    for &h in moved {
        at[h] = new_vertex;
    }
    at.push(v);
    at.push(new_vertex);
    let mut partner = g.partners().to_vec();
    let k = partner.len();
    partner.push(k + 1);
    partner.push(k);
    Gaf::from_indices(g.attach().to_vec(), inner, labels, at, partner).expect("blow-up keeps a valid gaf")
}

fn sort_key(g: &Gaf) -> (usize, usize, String) {
    let doc = serde_json::to_string(&g.to_doc()).expect("gaf serializes");
    (g.n_inner(), g.n_edges(), doc)
}

/// All connected closed valence-≥3 gafs of rank `n`, canonically labelled.
pub fn enumerate_spine_objects(n: usize) -> Result<Vec<Gaf>, SpineError> {
    check_rank(n, MAX_RANK)?;
    let rose = canonical_gaf(&crate::graph::build::rose(n));
    let mut seen: HashSet<Gaf> = HashSet::from([rose.clone()]);
    let mut frontier = vec![rose];
    while !frontier.is_empty() {
        let next: Vec<Gaf> = frontier
            .par_iter()
            .flat_map_iter(|g| {
                let mut out = Vec::new();
                for v in 0..g.n_vertices() {
                    let hs = g.half_edges_at(v);
                    let k = hs.len();
                    if k < 4 {
                        continue;
                    }
                    // subsets of hs[1..] of size 2..=k-2, so hs[0] stays at v
                    for mask in 0u32..(1 << (k - 1)) {
                        let size = mask.count_ones() as usize;
                        if size < 2 || size > k - 2 {
                            continue;
                        }
                        let moved: Vec<usize> = (0..k - 1).filter(|i| mask >> i & 1 == 1).map(|i| hs[i + 1]).collect();
                        out.push(canonical_gaf(&blow_up(g, v, &moved)));
                    }
                }
                out
            })
            .collect();
        frontier = Vec::new();
        for g in next {
            if seen.insert(g.clone()) {
                frontier.push(g);
            }
        }
        frontier.sort_by_key(sort_key);
    }
    let mut objects: Vec<Gaf> = seen.into_iter().collect();
    objects.sort_by_key(sort_key);
    Ok(objects)
}

/// Nonempty forests of `g` as edge bitmasks.
pub fn forests(g: &Gaf) -> Vec<u32> {
    let m = g.n_edges();
    (1u32..(1 << m))
        .filter(|&mask| {
            let mut uf = UnionFind::new(g.n_vertices());
            (0..m).filter(|i| mask >> i & 1 == 1).all(|i| {
                let (a, b) = g.edge_endpoints(&g.edges()[i]);
                uf.union(a, b)
            })
        })
        .collect()
}

fn mask_edges(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// An orbit representative: object index and nested forests.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Simplex {
    pub object: usize,
    pub forests: Vec<u32>,
}

struct ObjectData {
    gaf: Gaf,
    /// Per automorphism: edge permutation and its twist on `ξ_d`.
    auts: Vec<(GafIso, Vec<usize>, Sign)>,
    cycles: IntMatrix,
}

fn edge_perm(g: &Gaf, phi: &GafIso) -> Vec<usize> {
    g.edges().iter().map(|e| g.edge_of(phi.half_edge_map[e.tail])).collect()
}

fn permute_mask(mask: u32, perm: &[usize]) -> u32 {
    mask_edges(mask).into_iter().fold(0, |acc, e| acc | 1 << perm[e])
}

impl ObjectData {
    fn new(gaf: Gaf, d: i64) -> ObjectData {
        let auts = automorphisms(&MarkedGaf::unmarked(gaf.clone()))
            .into_iter()
            .map(|phi| {
                let perm = edge_perm(&gaf, &phi);
                let (s0, s1) = homology_dets(&gaf, &phi).expect("automorphisms act on homology");
                (phi, perm, (s0 * s1).pow(d))
            })
            .collect();
        let cycles = h1_basis(&gaf);
        ObjectData { gaf, auts, cycles }
    }

    /// Least image of `forests` under the automorphism group, with the
    /// index of the first automorphism attaining it.
    fn orbit_min(&self, forests: &[u32]) -> (Vec<u32>, usize) {
        let mut best: Option<(Vec<u32>, usize)> = None;
        for (i, (_, perm, _)) in self.auts.iter().enumerate() {
            let image: Vec<u32> = forests.iter().map(|&f| permute_mask(f, perm)).collect();
            if best.as_ref().map_or(true, |(b, _)| image < *b) {
                best = Some((image, i));
            }
        }
        best.expect("the identity is an automorphism")
    }

    fn killed(&self, forests: &[u32]) -> bool {
        self.auts.iter().any(|(_, perm, twist)| {
            twist.is_minus() && forests.iter().all(|&f| permute_mask(f, perm) == f)
        })
    }
}

/// Orbit chain complex of the spine with twist `d`.
#[derive(Debug, Clone, Serialize)]
pub struct SpineComplex {
    pub n: usize,
    pub d: i64,
    #[serde(skip)]
    pub objects: Vec<Gaf>,
    /// Surviving orbit representatives per degree.
    pub chains: Vec<Vec<Simplex>>,
    /// Orbits dropped because a stabilizer element acts by `-1`.
    pub killed: Vec<usize>,
    /// `differentials[k]` maps degree `k` to degree `k-1`; index 0 is empty.
    pub differentials: Vec<SparseMatrix>,
}

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn spine_chain_complex(n: usize, d: i64, experimental: bool) -> Result<SpineComplex, SpineError> {
    check_rank(n, if experimental { MAX_RANK } else { 3 })?;
    let objects = enumerate_spine_objects(n)?;
    let data: Vec<ObjectData> = objects.par_iter().map(|g| ObjectData::new(g.clone(), d)).collect();
    let index: HashMap<Gaf, usize> = objects.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();

    // orbit representatives of nested forest chains, per object
    let per_object: Vec<(Vec<BTreeSet<Vec<u32>>>, Vec<usize>)> = data
        .par_iter()
        .map(|od| {
            let fs = forests(&od.gaf);
            let mut levels: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::from([vec![]])];
            let mut current: Vec<Vec<u32>> = vec![vec![]];
            loop {
                let mut next_all: BTreeSet<Vec<u32>> = BTreeSet::new();
                for chain in &current {
                    let last = chain.last().copied().unwrap_or(0);
                    for &f in &fs {
                        if f != last && f & last == last {
                            let mut c = chain.clone();
                            c.push(f);
                            next_all.insert(c);
                        }
                    }
                }
                if next_all.is_empty() {
                    break;
                }
                let reps: BTreeSet<Vec<u32>> = next_all.iter().map(|c| od.orbit_min(c).0).collect();
                levels.push(reps);
                current = next_all.into_iter().collect();
            }
            let mut killed = vec![0; levels.len()];
            let levels = levels
                .into_iter()
                .enumerate()
                .map(|(k, reps)| {
                    reps.into_iter()
                        .filter(|c| {
                            let dead = od.killed(c);
                            killed[k] += dead as usize;
                            !dead
                        })
                        .collect()
                })
                .collect();
            (levels, killed)
        })
        .collect();

    let top = per_object.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let mut chains: Vec<Vec<Simplex>> = vec![Vec::new(); top];
    let mut killed = vec![0; top];
    for (object, (levels, dead)) in per_object.iter().enumerate() {
        for (k, reps) in levels.iter().enumerate() {
            chains[k].extend(reps.iter().map(|f| Simplex {
                object,
                forests: f.clone(),
            }));
            killed[k] += dead[k];
        }
    }
    for c in &mut chains {
        c.sort();
    }
    let position: Vec<HashMap<Simplex, usize>> = chains
        .iter()
        .map(|c| c.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
        .collect();

    let mut differentials = vec![SparseMatrix::new(0, chains.first().map_or(0, Vec::len))];
    for k in 1..top {
        let columns: Vec<Vec<(usize, usize, BigRational)>> = chains[k]
            .par_iter()
            .enumerate()
            .map(|(col, s)| {
                let mut out = Vec::new();
                for i in 0..=k {
                    if let Some((face, sign)) = face(&data, &index, s, i, d) {
                        if let Some(&row) = position[k - 1].get(&face) {
                            let alt = if i % 2 == 0 { 1 } else { -1 };
                            out.push((row, col, q(alt * sign.as_i64())));
                        }
                    }
                }
                out
            })
            .collect();
        differentials.push(SparseMatrix::from_triplets(
            chains[k - 1].len(),
            chains[k].len(),
            columns.into_iter().flatten(),
        ));
    }
    Ok(SpineComplex {
        n,
        d,
        objects,
        chains,
        killed,
        differentials,
    })
}

/// The `i`-th face of `s` as an orbit representative, with the sign of the
/// transport of `ξ_d`.
fn face(data: &[ObjectData], index: &HashMap<Gaf, usize>, s: &Simplex, i: usize, d: i64) -> Option<(Simplex, Sign)> {
    let od = &data[s.object];
    if i >= 1 {
        let mut fs = s.forests.clone();
        fs.remove(i - 1);
        let (rep, a) = od.orbit_min(&fs);
        let simplex = Simplex {
            object: s.object,
            forests: rep,
        };
        return Some((simplex, od.auts[a].2));
    }
    let g = &od.gaf;
    let f1 = s.forests[0];
    let (dst, f) = collapse_forest(g, &mask_edges(f1)).expect("forests collapse");
    let c = canonical_form(&MarkedGaf::unmarked(dst.clone()));
    let target = index[c.form.gaf()];
    let td = &data[target];
    // signed map from edges of g to edges of the target object
    let mut map: Vec<Option<(usize, i64)>> = vec![None; g.n_edges()];
    for (k, &h) in f.preimage.iter().enumerate() {
        let src_edge = g.edge_of(h);
        if g.edges()[src_edge].tail != h {
            continue;
        }
        let dst_edge = dst.edge_of(k);
        let s1 = if dst.edges()[dst_edge].tail == k { 1 } else { -1 };
        let ck = c.half_edge_map[k];
        let obj_edge = td.gaf.edge_of(ck);
        let s2 = if td.gaf.edges()[obj_edge].tail == ck { 1 } else { -1 };
        map[src_edge] = Some((obj_edge, s1 * s2));
    }
    let moved: Vec<u32> = s.forests[1..]
        .iter()
        .map(|&fm| {
            mask_edges(fm & !f1)
                .into_iter()
                .fold(0u32, |acc, e| acc | 1 << map[e].expect("surviving edge").0)
        })
        .collect();
    let (rep, a) = td.orbit_min(&moved);
    let mut transport = IntMatrix::zeros(td.gaf.n_edges(), g.n_edges());
    for (e, m) in map.iter().enumerate() {
        if let Some((t, sgn)) = m {
            transport.set(*t, e, BigInt::from(*sgn));
        }
    }
    let full = edge_action(&td.gaf, &td.auts[a].0).mul(&transport);
    let image = full.mul(&od.cycles);
    let sign = det_sign_of_base_change(&td.cycles, &image).expect("collapse is an isomorphism on H1");
    Some((
        Simplex {
            object: target,
            forests: rep,
        },
        sign.pow(d),
    ))
}

impl SpineComplex {
    /// Whether every composite of consecutive differentials vanishes.
    pub fn squares_to_zero(&self) -> bool {
        (2..self.differentials.len()).all(|k| self.differentials[k - 1].mul(&self.differentials[k]).is_zero())
    }

    /// Rational Betti numbers of the complex.
    pub fn betti(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.differentials.iter().map(SparseMatrix::rank).collect();
        (0..self.chains.len())
            .map(|k| self.chains[k].len() - ranks[k] - ranks.get(k + 1).copied().unwrap_or(0))
            .collect()
    }

    pub fn chain_ranks(&self) -> Vec<usize> {
        self.chains.iter().map(Vec::len).collect()
    }

    /// Human-readable forest labels of a simplex.
    pub fn describe(&self, s: &Simplex) -> Vec<Vec<String>> {
        let g = &self.objects[s.object];
        s.forests
            .iter()
            .map(|&f| {
                mask_edges(f)
                    .into_iter()
                    .map(|e| g.half_edge_labels()[g.edges()[e].tail].clone())
                    .collect()
            })
            .collect()
    }
}

pub fn twisted_homology(n: usize, d: i64, experimental: bool) -> Result<Vec<usize>, SpineError> {
    Ok(spine_chain_complex(n, d, experimental)?.betti())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;
    use crate::graph::build::*;

    #[test]
    fn rank_two_objects() {
        let objs = enumerate_spine_objects(2).unwrap();
        assert_eq!(objs.len(), 3);
        for g in [rose(2), theta(), dumbbell()] {
            let m = MarkedGaf::unmarked(g);
            assert!(objs.iter().any(|o| is_isomorphic(&MarkedGaf::unmarked(o.clone()), &m)));
        }
        for o in &objs {
            assert!((0..o.n_vertices()).all(|v| o.valence(v) >= 3));
        }
    }

    #[test]
    fn rank_limits() {
        assert_eq!(enumerate_spine_objects(5), Err(SpineError::RankTooLarge(5)));
        assert_eq!(enumerate_spine_objects(1), Err(SpineError::RankTooSmall(1)));
        assert!(matches!(spine_chain_complex(4, 0, false), Err(SpineError::RankTooLarge(4))));
    }

    #[test]
    fn forests_of_theta() {
        // three single edges; no two edges of theta form a forest
        assert_eq!(forests(&theta()).len(), 3);
    }

    #[test]
    fn rank_two_untwisted_homology() {
        let c = spine_chain_complex(2, 0, false).unwrap();
        assert!(c.squares_to_zero());
        assert_eq!(c.betti()[0], 1);
        assert!(c.betti()[1..].iter().all(|&b| b == 0));
    }

    #[test]
    fn rank_two_twisted_complex() {
        let c = spine_chain_complex(2, 1, false).unwrap();
        assert!(c.squares_to_zero());
    }
}
