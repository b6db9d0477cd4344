//! Brute-force spine oracles: multigraph classes by exhaustive adjacency
//! enumeration, and twisted Betti numbers from the complex of labelled
//! forest chains with automorphism coinvariants.

use std::collections::{BTreeSet, HashMap};

use super::*;

/// Loop counts and upper-triangular multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multigraph {
    pub n: usize,
    pub loops: Vec<usize>,
    pub mult: Vec<Vec<usize>>,
}

impl Multigraph {
    pub fn degree(&self, v: usize) -> usize {
        2 * self.loops[v] + (0..self.n).filter(|&w| w != v).map(|w| self.m(v, w)).sum::<usize>()
    }

    fn m(&self, a: usize, b: usize) -> usize {
        self.mult[a.min(b)][a.max(b)]
    }

    fn connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..self.n {
                if w != v && !seen[w] && self.m(v, w) > 0 {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    fn permuted(&self, p: &[usize]) -> Multigraph {
        let mut loops = vec![0; self.n];
        let mut mult = vec![vec![0; self.n]; self.n];
        for v in 0..self.n {
            loops[p[v]] = self.loops[v];
            for w in v + 1..self.n {
                let (a, b) = (p[v].min(p[w]), p[v].max(p[w]));
                mult[a][b] = self.mult[v][w];
            }
        }
        Multigraph { n: self.n, loops, mult }
    }

    fn canonical(&self) -> Multigraph {
        permutations(self.n).iter().map(|p| self.permuted(p)).min().unwrap()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for v in 0..self.n {
            out.extend(std::iter::repeat((v, v)).take(self.loops[v]));
            for w in v + 1..self.n {
                out.extend(std::iter::repeat((v, w)).take(self.mult[v][w]));
            }
        }
        out
    }
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Connected multigraphs with loops, minimum degree 3 and rank `rank`, up
/// to isomorphism.
pub fn multigraph_classes(rank: usize) -> Vec<Multigraph> {
    let mut classes = BTreeSet::new();
    for n in 1..=2 * rank - 2 {
        let e = n + rank - 1;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (v + 1..n).map(move |w| (v, w))).collect();
        for c in compositions(e, n + pairs.len()) {
            let mut mult = vec![vec![0; n]; n];
            for (k, &(v, w)) in pairs.iter().enumerate() {
                mult[v][w] = c[n + k];
            }
            let g = Multigraph {
                n,
                loops: c[..n].to_vec(),
                mult,
            };
            if g.connected() && (0..n).all(|v| g.degree(v) >= 3) {
                classes.insert(g.canonical());
            }
        }
    }
    classes.into_iter().collect()
}

/// Oriented edge list on `n` vertices.
#[derive(Clone, Debug)]
struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// Vertex permutation, edge permutation and orientation flips.
#[derive(Clone, Debug)]
struct Iso {
    edge: Vec<usize>,
    flip: Vec<bool>,
}

fn isos(a: &Graph, b: &Graph) -> Vec<Iso> {
    if a.n != b.n || a.edges.len() != b.edges.len() {
        return vec![];
    }
    let m = a.edges.len();
    let mut out = Vec::new();
    for p in permutations(a.n) {
        for s in permutations(m) {
            let mut flips = vec![vec![]];
            for e in 0..m {
                let (x, y) = a.edges[e];
                let (u, v) = b.edges[s[e]];
                let mut options = Vec::new();
                if (p[x], p[y]) == (u, v) {
                    options.push(false);
                }
                if (p[y], p[x]) == (u, v) {
                    options.push(true);
                }
                flips = flips
                    .into_iter()
                    .flat_map(|f: Vec<bool>| {
                        options.iter().map(move |&o| {
                            let mut g = f.clone();
                            g.push(o);
                            g
                        })
                    })
                    .collect();
            }
            for f in flips {
                out.push(Iso { edge: s.clone(), flip: f });
            }
        }
    }
    out
}

fn boundary(g: &Graph) -> Vec<Vec<Q>> {
    let mut b = vec![vec![q(0); g.edges.len()]; g.n];
    for (e, &(x, y)) in g.edges.iter().enumerate() {
        b[y][e] += q(1);
        b[x][e] -= q(1);
    }
    b
}

fn cycles(g: &Graph) -> Vec<Vec<Q>> {
    kernel(&boundary(g), g.edges.len())
}

/// Signed edge map `targets[e] = (edge, ±1)` applied to cycle vectors.
fn push(cyc: &[Vec<Q>], targets: &[Option<(usize, i64)>], m: usize) -> Vec<Vec<Q>> {
    cyc.iter()
        .map(|z| {
            let mut out = vec![q(0); m];
            for (e, t) in targets.iter().enumerate() {
                if let Some((f, s)) = t {
                    out[*f] += z[e] * q(*s);
                }
            }
            out
        })
        .collect()
}

fn h1_det(src: &Graph, dst: &Graph, targets: &[Option<(usize, i64)>]) -> i64 {
    let image = push(&cycles(src), targets, dst.edges.len());
    let d = base_change_det(&cycles(dst), &image);
    assert!(d == q(1) || d == q(-1), "transport is not unimodular");
    if d == q(1) {
        1
    } else {
        -1
    }
}

fn iso_targets(i: &Iso) -> Vec<Option<(usize, i64)>> {
    i.edge.iter().zip(&i.flip).map(|(&f, &fl)| Some((f, if fl { -1 } else { 1 }))).collect()
}

fn is_forest(g: &Graph, mask: u32) -> bool {
    let mut parent: Vec<usize> = (0..g.n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for (e, &(x, y)) in g.edges.iter().enumerate() {
        if mask >> e & 1 == 1 {
            let (a, b) = (find(&mut parent, x), find(&mut parent, y));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
    }
    true
}

/// Collapses the forest `mask`; returns the quotient and the map of the
/// surviving edges.
fn collapse(g: &Graph, mask: u32) -> (Graph, Vec<Option<usize>>) {
    let mut label: Vec<usize> = (0..g.n).collect();
    loop {
        let mut changed = false;
        for (e, &(x, y)) in g.edges.iter().enumerate() {
            if mask >> e & 1 == 1 && label[x] != label[y] {
                let (lo, hi) = (label[x].min(label[y]), label[x].max(label[y]));
                for l in label.iter_mut() {
                    if *l == hi {
                        *l = lo;
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let reps: Vec<usize> = label.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let idx = |v: usize| reps.iter().position(|&r| r == label[v]).unwrap();
    let mut edges = Vec::new();
    let mut map = Vec::new();
    for (e, &(x, y)) in g.edges.iter().enumerate() {
        if mask >> e & 1 == 1 {
            map.push(None);
        } else {
            map.push(Some(edges.len()));
            edges.push((idx(x), idx(y)));
        }
    }
    (Graph { n: reps.len(), edges }, map)
}

type Chain = (usize, Vec<u32>);

fn chains_of(g: &Graph) -> Vec<Vec<Vec<u32>>> {
    let forests: Vec<u32> = (1u32..1 << g.edges.len()).filter(|&m| is_forest(g, m)).collect();
    let mut levels = vec![vec![vec![]]];
    loop {
        let next: Vec<Vec<u32>> = levels
            .last()
            .unwrap()
            .iter()
            .flat_map(|c: &Vec<u32>| {
                let last = c.last().copied().unwrap_or(0);
                forests
                    .iter()
                    .filter(move |&&f| f != last && f & last == last)
                    .map(move |&f| {
                        let mut d = c.clone();
                        d.push(f);
                        d
                    })
            })
            .collect();
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

fn map_mask(mask: u32, edge: &[usize]) -> u32 {
    (0..edge.len()).filter(|e| mask >> e & 1 == 1).fold(0, |acc, e| acc | 1 << edge[e])
}

/// Betti numbers of the coinvariant complex of labelled chains.
pub fn oracle_betti(n: usize, d: i64) -> Vec<usize> {
    let objects: Vec<Graph> = multigraph_classes(n)
        .iter()
        .map(|m| Graph { n: m.n, edges: m.edges() })
        .collect();
    let auts: Vec<Vec<(Iso, i64)>> = objects
        .iter()
        .map(|g| {
            isos(g, g)
                .into_iter()
                .map(|i| {
                    let s = h1_det(g, g, &iso_targets(&i));
                    let s = if d % 2 == 0 { 1 } else { s };
                    (i, s)
                })
                .collect()
        })
        .collect();
    let per_object: Vec<Vec<Vec<Vec<u32>>>> = objects.iter().map(chains_of).collect();
    let top = per_object.iter().map(Vec::len).max().unwrap();
    let basis: Vec<Vec<Chain>> = (0..top)
        .map(|k| {
            per_object
                .iter()
                .enumerate()
                .flat_map(|(o, levels)| levels.get(k).into_iter().flatten().map(move |c| (o, c.clone())))
                .collect()
        })
        .collect();
    let index: Vec<HashMap<Chain, usize>> = basis
        .iter()
        .map(|b| b.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect())
        .collect();

    let projector = |k: usize| -> Vec<Vec<Q>> {
        let n = basis[k].len();
        let mut p = vec![vec![q(0); n]; n];
        for (j, (o, fs)) in basis[k].iter().enumerate() {
            let order = auts[*o].len() as i64;
            for (a, s) in &auts[*o] {
                let image: Vec<u32> = fs.iter().map(|&f| map_mask(f, &a.edge)).collect();
                let i = index[k][&(*o, image)];
                p[i][j] += Q::new(*s, order);
            }
        }
        p
    };
    let differential = |k: usize| -> Vec<Vec<Q>> {
        let mut m = vec![vec![q(0); basis[k].len()]; basis[k - 1].len()];
        for (j, (o, fs)) in basis[k].iter().enumerate() {
            for i in 1..=k {
                let mut face = fs.clone();
                face.remove(i - 1);
                let row = index[k - 1][&(*o, face)];
                m[row][j] += q(if i % 2 == 0 { 1 } else { -1 });
            }
            let g = &objects[*o];
            let (c, map) = collapse(g, fs[0]);
            let (t, iso) = objects
                .iter()
                .enumerate()
                .find_map(|(t, h)| isos(&c, h).into_iter().next().map(|i| (t, i)))
                .expect("collapse is a spine object");
            let targets: Vec<Option<(usize, i64)>> = map
                .iter()
                .map(|m| m.map(|ce| (iso.edge[ce], if iso.flip[ce] { -1 } else { 1 })))
                .collect();
            let s = h1_det(g, &objects[t], &targets);
            let s = if d % 2 == 0 { 1 } else { s };
            let moved: Vec<u32> = fs[1..]
                .iter()
                .map(|&f| {
                    (0..g.edges.len())
                        .filter(|&e| f >> e & 1 == 1 && fs[0] >> e & 1 == 0)
                        .fold(0, |acc, e| acc | 1 << targets[e].unwrap().0)
                })
                .collect();
            let row = index[k - 1][&(t, moved)];
            m[row][j] += q(s);
        }
        m
    };

    let ps: Vec<Vec<Vec<Q>>> = (0..top).map(projector).collect();
    let ds: Vec<Vec<Vec<Q>>> = (1..top).map(|k| matmul(&matmul(&ps[k - 1], &differential(k)), &ps[k])).collect();
    for k in 1..ds.len() {
        let sq = matmul(&ds[k - 1], &ds[k]);
        assert!(sq.iter().flatten().all(|x| *x == q(0)), "oracle d² != 0");
    }
    (0..top)
        .map(|k| {
            let r_in = if k >= 1 { rank(&ds[k - 1]) } else { 0 };
            let r_out = if k + 1 < top { rank(&ds[k]) } else { 0 };
            rank(&ps[k]) - r_in - r_out
        })
        .collect()
}

