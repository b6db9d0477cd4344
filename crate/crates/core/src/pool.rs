//! Seeded random marked gafs for property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Gaf, GafDoc, MarkedGaf, UnionFind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolBounds {
    /// Attach plus inner vertices.
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_attach: usize,
    pub max_marks: usize,
}

impl Default for PoolBounds {
    fn default() -> Self {
        PoolBounds {
            max_vertices: 5,
            max_edges: 6,
            max_attach: 2,
            max_marks: 3,
        }
    }
}

impl PoolBounds {
    pub fn new(max_vertices: usize, max_edges: usize) -> PoolBounds {
        PoolBounds {
            max_vertices,
            max_edges,
            ..PoolBounds::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pool {
    pub seed: u64,
    pub bounds: PoolBounds,
    pub elements: Vec<MarkedGaf>,
}

#[derive(Serialize)]
struct PoolDoc<'a> {
    seed: u64,
    size: usize,
    bounds: &'a PoolBounds,
    elements: Vec<GafDoc>,
}

impl Pool {
    /// Pretty JSON; identical seeds give identical bytes.
    pub fn dump(&self) -> String {
        let doc = PoolDoc {
            seed: self.seed,
            size: self.elements.len(),
            bounds: &self.bounds,
            elements: self.elements.iter().map(MarkedGaf::to_doc).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("pool serializes")
    }
}

/// Uniform index below `n`, drawn through `u32` so results do not depend on
/// the platform word size.
fn pick(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.gen_range(0..n as u32) as usize
}

fn upto(rng: &mut ChaCha8Rng, max: usize) -> usize {
    pick(rng, max + 1)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A random marked gaf with the given target `A` and source `B` labels;
/// inner vertices and half-edges are prefixed by `tag`.
pub fn random_morphism_between(
    rng: &mut ChaCha8Rng,
    bounds: &PoolBounds,
    tag: &str,
    attach: &[String],
    source: &[String],
) -> MarkedGaf {
    let room = bounds.max_vertices.saturating_sub(attach.len());
    let mut n_inner = upto(rng, room);
    if n_inner == 0 && attach.is_empty() && !source.is_empty() {
        n_inner = 1;
    }
    let inner = labels(&format!("{tag}v"), n_inner);
    let nv = attach.len() + n_inner;
    let n_edges = if nv == 0 { 0 } else { upto(rng, bounds.max_edges) };
    let mut half_edges = Vec::with_capacity(2 * n_edges);
    let mut pairs = Vec::with_capacity(n_edges);
    let vertex = |i: usize| if i < attach.len() { attach[i].clone() } else { inner[i - attach.len()].clone() };
    for k in 0..n_edges {
        let (x, y) = (pick(rng, nv), pick(rng, nv));
        let (h1, h2) = (format!("{tag}h{}", 2 * k), format!("{tag}h{}", 2 * k + 1));
        half_edges.push((h1.clone(), vertex(x)));
        half_edges.push((h2.clone(), vertex(y)));
        pairs.push((h1, h2));
    }
    let gaf = Gaf::new(attach.to_vec(), inner, half_edges, pairs).expect("generated gaf is valid");
    let marking = source.iter().map(|b| (b.clone(), pick(rng, nv))).collect();
    MarkedGaf::new(gaf, marking).expect("generated marking is valid")
}

/// A random marked gaf within `bounds`.
pub fn random_morphism(rng: &mut ChaCha8Rng, bounds: &PoolBounds, tag: &str) -> MarkedGaf {
    let n_attach = upto(rng, bounds.max_attach.min(bounds.max_vertices));
    let n_marks = if bounds.max_vertices == 0 { 0 } else { upto(rng, bounds.max_marks) };
    random_morphism_between(rng, bounds, tag, &labels("a", n_attach), &labels("b", n_marks))
}

pub fn pool_generate(seed: u64, size: usize, bounds: PoolBounds) -> Pool {
    let mut r = rng(seed);
    let elements = (0..size).map(|i| random_morphism(&mut r, &bounds, &format!("p{i}"))).collect();
    Pool { seed, bounds, elements }
}

fn random_chain(r: &mut ChaCha8Rng, bounds: &PoolBounds, tag: &str, len: usize) -> Vec<MarkedGaf> {
    let names = ["a", "b", "c", "e", "f"];
    let mut ends = vec![labels("a", upto(r, bounds.max_attach.min(bounds.max_vertices)))];
    for k in 1..=len {
        let max = if bounds.max_vertices == 0 { 0 } else { bounds.max_marks };
        ends.push(labels(names[k], upto(r, max)));
    }
    (0..len)
        .map(|k| random_morphism_between(r, bounds, &format!("{tag}{}", names[k]), &ends[k], &ends[k + 1]))
        .collect()
}

/// Pairs `(g, h)` with `g ∘ h` defined.
pub fn composable_pairs(seed: u64, n: usize, bounds: PoolBounds) -> Vec<(MarkedGaf, MarkedGaf)> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let mut c = random_chain(&mut r, &bounds, &format!("q{i}"), 2);
            let h = c.pop().unwrap();
            (c.pop().unwrap(), h)
        })
        .collect()
}

/// Triples `(f, g, h)` with `f ∘ g ∘ h` defined.
pub fn composable_triples(seed: u64, n: usize, bounds: PoolBounds) -> Vec<(MarkedGaf, MarkedGaf, MarkedGaf)> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let mut c = random_chain(&mut r, &bounds, &format!("t{i}"), 3);
            let h = c.pop().unwrap();
            let g = c.pop().unwrap();
            (c.pop().unwrap(), g, h)
        })
        .collect()
}

/// A random legal forest: edge indices whose trees each meet `A` at most
/// once.
pub fn random_legal_forest(r: &mut ChaCha8Rng, g: &Gaf) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n_edges()).collect();
    order.shuffle(r);
    let target = upto(r, g.n_edges());
    let mut uf = UnionFind::new(g.n_vertices());
    let mut based: Vec<bool> = (0..g.n_vertices()).map(|v| g.is_attach(v)).collect();
    let mut forest = Vec::new();
    for e in order {
        if forest.len() == target {
            break;
        }
        let (x, y) = g.edge_endpoints(&g.edges()[e]);
        let (rx, ry) = (uf.find(x), uf.find(y));
        if rx == ry || (based[rx] && based[ry]) {
            continue;
        }
        uf.union(rx, ry);
        let root = uf.find(rx);
        based[root] = based[rx] || based[ry];
        forest.push(e);
    }
    forest.sort_unstable();
    forest
}

/// Pool elements paired with a random legal forest.
pub fn collapse_pairs(seed: u64, n: usize, bounds: PoolBounds) -> Vec<(MarkedGaf, Vec<usize>)> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let m = random_morphism(&mut r, &bounds, &format!("c{i}"));
            let f = random_legal_forest(&mut r, m.gaf());
            (m, f)
        })
        .collect()
}
