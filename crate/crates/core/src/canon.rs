//! Canonical labelling, isomorphisms and automorphisms of marked gafs.
//!
//! Attach vertices and marking labels are fixed; inner vertices and
//! half-edges are permuted. Canonical forms come from colour refinement
//! followed by an individualization search for the lexicographically least
//! certificate.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::graph::{build::digits, Gaf, HalfEdgeId, MarkedGaf, VertexId};

/// A canonically labelled copy of a marked gaf with the relabelling used.
#[derive(Debug, Clone)]
pub struct Canonical {
    pub form: MarkedGaf,
    /// `vertex_map[old] = new`.
    pub vertex_map: Vec<VertexId>,
    /// `half_edge_map[old] = new`.
    pub half_edge_map: Vec<HalfEdgeId>,
}

impl Canonical {
    pub fn iso(&self) -> GafIso {
        GafIso {
            vertex_map: self.vertex_map.clone(),
            half_edge_map: self.half_edge_map.clone(),
        }
    }
}

type Cert = (Vec<Vec<String>>, Vec<(usize, usize)>);

fn adjacency(g: &Gaf) -> Vec<Vec<usize>> {
    let n = g.n_vertices();
    let mut adj = vec![vec![0; n]; n];
    for e in g.edges() {
        let (u, v) = g.edge_endpoints(e);
        adj[u][v] += 1;
        if u != v {
            adj[v][u] += 1;
        }
    }
    adj
}

fn dense_rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let sorted: Vec<K> = keys.iter().cloned().sorted().dedup().collect();
    keys.iter().map(|k| sorted.binary_search(k).unwrap()).collect()
}

fn n_classes(colours: &[usize]) -> usize {
    colours.iter().unique().count()
}

fn refine(adj: &[Vec<usize>], mut colours: Vec<usize>) -> Vec<usize> {
    loop {
        let keys: Vec<(usize, Vec<(usize, usize)>)> = (0..colours.len())
            .map(|v| {
                let nb = (0..colours.len())
                    .filter(|&w| adj[v][w] > 0)
                    .map(|w| (colours[w], adj[v][w]))
                    .sorted()
                    .collect();
                (colours[v], nb)
            })
            .collect();
        let next = dense_rank(&keys);
        if n_classes(&next) == n_classes(&colours) {
            return next;
        }
        colours = next;
    }
}

fn initial_colours(m: &MarkedGaf, adj: &[Vec<usize>]) -> Vec<usize> {
    let g = m.gaf();
    let attach_rank = dense_rank(g.attach());
    let keys: Vec<(u8, usize, Vec<&str>, usize, usize)> = (0..g.n_vertices())
        .map(|v| {
            if g.is_attach(v) {
                (0, attach_rank[v], vec![], 0, 0)
            } else {
                (1, 0, m.marks_at(v), g.valence(v), adj[v][v])
            }
        })
        .collect();
    dense_rank(&keys)
}

struct Search<'a> {
    m: &'a MarkedGaf,
    adj: Vec<Vec<usize>>,
    attach_pos: Vec<usize>,
    best: Option<(Cert, Vec<usize>)>,
}

impl Search<'_> {
    fn positions(&self, colours: &[usize]) -> Vec<usize> {
        let g = self.m.gaf();
        let na = g.n_attach();
        let mut pos = vec![0; g.n_vertices()];
        pos[..na].copy_from_slice(&self.attach_pos);
        let inner = (na..g.n_vertices()).sorted_by_key(|&v| colours[v]);
        for (i, v) in inner.enumerate() {
            pos[v] = na + i;
        }
        pos
    }

    fn certificate(&self, pos: &[usize]) -> Cert {
        let g = self.m.gaf();
        let mut marks = vec![Vec::new(); g.n_vertices()];
        for (b, v) in self.m.marking() {
            marks[pos[*v]].push(b.clone());
        }
        let edges = g
            .edges()
            .iter()
            .map(|e| {
                let (u, v) = g.edge_endpoints(e);
                (pos[u].min(pos[v]), pos[u].max(pos[v]))
            })
            .sorted()
            .collect();
        (marks, edges)
    }

    fn run(&mut self, colours: Vec<usize>) {
        let colours = refine(&self.adj, colours);
        let na = self.m.gaf().n_attach();
        let n = colours.len();
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in na..n {
            cells.entry(colours[v]).or_default().push(v);
        }
        match cells.values().find(|c| c.len() > 1) {
            None => {
                let pos = self.positions(&colours);
                let cert = self.certificate(&pos);
                if self.best.as_ref().map_or(true, |(b, _)| cert < *b) {
                    self.best = Some((cert, pos));
                }
            }
            Some(cell) => {
                for &v in &cell.clone() {
                    let keys: Vec<(usize, bool)> = (0..n).map(|w| (colours[w], w != v)).collect();
                    self.run(dense_rank(&keys));
                }
            }
        }
    }
}

fn fresh_prefix(base: &str, taken: &[String]) -> String {
    let mut prefix = base.to_string();
    while taken.iter().any(|l| l.starts_with(&prefix)) {
        prefix.insert(0, '_');
    }
    prefix
}

/// Canonical form of `m`; equal for two inputs iff they are isomorphic
/// over fixed attach and marking labels.
pub fn canonical_form(m: &MarkedGaf) -> Canonical {
    let g = m.gaf();
    let adj = adjacency(g);
    let mut search = Search {
        m,
        adj,
        attach_pos: dense_rank(g.attach()),
        best: None,
    };
    let colours = initial_colours(m, &search.adj);
    search.run(colours);
    let (_, pos) = search.best.expect("search visits at least one leaf");

    let na = g.n_attach();
    let attach: Vec<String> = g.attach().iter().cloned().sorted().collect();
    let vprefix = fresh_prefix("v", &attach);
    let vw = digits(g.n_inner());
    let inner: Vec<String> = (0..g.n_inner()).map(|i| format!("{vprefix}{i:0vw$}")).collect();

    let mut slots: Vec<(usize, usize, usize, HalfEdgeId, HalfEdgeId)> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (pt, ph) = (pos[g.at(e.tail)], pos[g.at(e.head)]);
            if ph < pt {
                (ph, pt, i, e.head, e.tail)
            } else {
                (pt, ph, i, e.tail, e.head)
            }
        })
        .collect();
    slots.sort();
    let hw = digits(2 * g.n_edges());
    let mut half_edge_map = vec![0; g.n_half_edges()];
    let mut labels = Vec::with_capacity(g.n_half_edges());
    let mut at = Vec::with_capacity(g.n_half_edges());
    let mut partner = Vec::with_capacity(g.n_half_edges());
    for (k, &(p, q, _, lo, hi)) in slots.iter().enumerate() {
        half_edge_map[lo] = 2 * k;
        half_edge_map[hi] = 2 * k + 1;
        labels.push(format!("h{:0hw$}", 2 * k));
        labels.push(format!("h{:0hw$}", 2 * k + 1));
        at.push(p);
        at.push(q);
        partner.push(2 * k + 1);
        partner.push(2 * k);
    }
    let gaf = Gaf::from_indices(attach, inner, labels, at, partner).expect("canonical relabelling is valid");
    let marking = m.marking().iter().map(|(b, v)| (b.clone(), pos[*v])).collect();
    let form = MarkedGaf::new(gaf, marking).expect("canonical marking is valid");
    debug_assert!(na == 0 || pos[..na].iter().all(|&p| p < na));
    Canonical {
        form,
        vertex_map: pos,
        half_edge_map,
    }
}

pub fn is_isomorphic(a: &MarkedGaf, b: &MarkedGaf) -> bool {
    a.gaf().n_vertices() == b.gaf().n_vertices()
        && a.gaf().n_edges() == b.gaf().n_edges()
        && canonical_form(a).form == canonical_form(b).form
}

/// An isomorphism between two gafs given on vertices and half-edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GafIso {
    pub vertex_map: Vec<VertexId>,
    pub half_edge_map: Vec<HalfEdgeId>,
}

impl GafIso {
    pub fn identity(g: &Gaf) -> GafIso {
        GafIso {
            vertex_map: (0..g.n_vertices()).collect(),
            half_edge_map: (0..g.n_half_edges()).collect(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn after(&self, other: &GafIso) -> GafIso {
        GafIso {
            vertex_map: other.vertex_map.iter().map(|&v| self.vertex_map[v]).collect(),
            half_edge_map: other.half_edge_map.iter().map(|&h| self.half_edge_map[h]).collect(),
        }
    }

    pub fn inverse(&self) -> GafIso {
        let mut vertex_map = vec![0; self.vertex_map.len()];
        for (i, &v) in self.vertex_map.iter().enumerate() {
            vertex_map[v] = i;
        }
        let mut half_edge_map = vec![0; self.half_edge_map.len()];
        for (i, &h) in self.half_edge_map.iter().enumerate() {
            half_edge_map[h] = i;
        }
        GafIso {
            vertex_map,
            half_edge_map,
        }
    }
}

fn is_bijection(map: &[usize], n: usize) -> bool {
    map.len() == n && map.iter().all(|&x| x < n) && map.iter().unique().count() == n
}

/// Whether `iso` is an isomorphism `a -> b` fixing attach and marking labels.
pub fn is_isomorphism(a: &MarkedGaf, b: &MarkedGaf, iso: &GafIso) -> bool {
    let (ga, gb) = (a.gaf(), b.gaf());
    if ga.n_attach() != gb.n_attach()
        || !is_bijection(&iso.vertex_map, ga.n_vertices())
        || gb.n_vertices() != ga.n_vertices()
        || !is_bijection(&iso.half_edge_map, ga.n_half_edges())
        || gb.n_half_edges() != ga.n_half_edges()
    {
        return false;
    }
    for v in 0..ga.n_attach() {
        let w = iso.vertex_map[v];
        if !gb.is_attach(w) || gb.vertex_label(w) != ga.vertex_label(v) {
            return false;
        }
    }
    for h in 0..ga.n_half_edges() {
        let k = iso.half_edge_map[h];
        if gb.at(k) != iso.vertex_map[ga.at(h)] || gb.partner(k) != iso.half_edge_map[ga.partner(h)] {
            return false;
        }
    }
    a.marking().len() == b.marking().len()
        && a
            .marking()
            .iter()
            .zip(b.marking())
            .all(|((x, v), (y, w))| x == y && iso.vertex_map[*v] == *w)
}

/// All isomorphisms `a -> b` fixing attach and marking labels.
pub fn isomorphisms(a: &MarkedGaf, b: &MarkedGaf) -> Vec<GafIso> {
    let (ga, gb) = (a.gaf(), b.gaf());
    if ga.n_vertices() != gb.n_vertices()
        || ga.n_attach() != gb.n_attach()
        || ga.n_edges() != gb.n_edges()
        || a.source() != b.source()
    {
        return Vec::new();
    }
    let mut fixed = vec![usize::MAX; ga.n_vertices()];
    for v in 0..ga.n_attach() {
        match gb.attach().iter().position(|l| l == ga.vertex_label(v)) {
            Some(w) => fixed[v] = w,
            None => return Vec::new(),
        }
    }
    let (adj_a, adj_b) = (adjacency(ga), adjacency(gb));
    let key = |m: &MarkedGaf, adj: &[Vec<usize>], v: usize| {
        (m.marks_at(v).into_iter().map(str::to_string).collect::<Vec<_>>(), m.gaf().valence(v), adj[v][v])
    };
    let keys_a: Vec<_> = (0..ga.n_vertices()).map(|v| key(a, &adj_a, v)).collect();
    let keys_b: Vec<_> = (0..gb.n_vertices()).map(|v| key(b, &adj_b, v)).collect();
    if fixed[..ga.n_attach()].iter().enumerate().any(|(v, &w)| keys_a[v].0 != keys_b[w].0) {
        return Vec::new();
    }

    let mut vertex_maps = Vec::new();
    let mut used = vec![false; gb.n_vertices()];
    for &w in &fixed[..ga.n_attach()] {
        used[w] = true;
    }
    let na = ga.n_attach();
    extend_vertex_map(na, &mut fixed, &mut used, &adj_a, &adj_b, &keys_a, &keys_b, &mut vertex_maps, na);

    let mut out = Vec::new();
    for vm in vertex_maps {
        out.extend(half_edge_lifts(ga, gb, &vm));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn extend_vertex_map<K: PartialEq>(
    v: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    adj_a: &[Vec<usize>],
    adj_b: &[Vec<usize>],
    keys_a: &[K],
    keys_b: &[K],
    out: &mut Vec<Vec<usize>>,
    na: usize,
) {
    if v == map.len() {
        out.push(map.clone());
        return;
    }
    for w in na..used.len() {
        if used[w] || keys_a[v] != keys_b[w] || (0..v).any(|u| adj_a[v][u] != adj_b[w][map[u]]) {
            continue;
        }
        map[v] = w;
        used[w] = true;
        extend_vertex_map(v + 1, map, used, adj_a, adj_b, keys_a, keys_b, out, na);
        used[w] = false;
        map[v] = usize::MAX;
    }
}

fn half_edge_lifts(ga: &Gaf, gb: &Gaf, vm: &[usize]) -> Vec<GafIso> {
    // edges of a grouped by unordered endpoint pair
    let mut groups_a: BTreeMap<(usize, usize), Vec<(HalfEdgeId, HalfEdgeId)>> = BTreeMap::new();
    for e in ga.edges() {
        let (u, v) = ga.edge_endpoints(e);
        let (x, y) = if u <= v { (e.tail, e.head) } else { (e.head, e.tail) };
        groups_a.entry((u.min(v), u.max(v))).or_default().push((x, y));
    }
    let mut groups_b: BTreeMap<(usize, usize), Vec<(HalfEdgeId, HalfEdgeId)>> = BTreeMap::new();
    for e in gb.edges() {
        let (u, v) = gb.edge_endpoints(e);
        groups_b.entry((u.min(v), u.max(v))).or_default().push((e.tail, e.head));
    }
    let mut partial: Vec<Vec<usize>> = vec![vec![usize::MAX; ga.n_half_edges()]];
    for (&(u, v), edges) in &groups_a {
        let target_key = (vm[u].min(vm[v]), vm[u].max(vm[v]));
        let targets = &groups_b[&target_key];
        let mut next = Vec::new();
        for perm in (0..edges.len()).permutations(edges.len()) {
            let flips: Vec<Vec<bool>> = if u == v {
                (0..edges.len()).map(|_| [false, true]).multi_cartesian_product().collect()
            } else {
                vec![vec![false; edges.len()]]
            };
            for flip in &flips {
                for base in &partial {
                    let mut hm = base.clone();
                    for (i, &(x, y)) in edges.iter().enumerate() {
                        let (t, h) = targets[perm[i]];
                        // x sits at u, which must land on the endpoint vm[u]
                        let (tx, ty) = if u == v {
                            if flip.get(i).copied().unwrap_or(false) {
                                (h, t)
                            } else {
                                (t, h)
                            }
                        } else if gb.at(t) == vm[u] {
                            (t, h)
                        } else {
                            (h, t)
                        };
                        hm[x] = tx;
                        hm[y] = ty;
                    }
                    next.push(hm);
                }
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|half_edge_map| GafIso {
            vertex_map: vm.to_vec(),
            half_edge_map,
        })
        .collect()
}

/// All automorphisms of `m` fixing attach points and marks.
pub fn automorphisms(m: &MarkedGaf) -> Vec<GafIso> {
    isomorphisms(m, m)
}
