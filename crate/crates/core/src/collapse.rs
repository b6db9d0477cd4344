//! Tree collapses between gafs, reduction, leaf minimization and
//! forgetting valence-2 vertices.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::canon::canonical_form;
use crate::graph::{Gaf, GraphError, HalfEdgeId, MarkedGaf, UnionFind, VertexId, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollapseError {
    #[error("edge set is not a forest")]
    NotAForest,
    #[error("a collapsed tree meets two attach points")]
    TwoAttachPointsInOneTree,
    #[error("component is a circle of valence-2 inner vertices")]
    DegenerateCircle,
    #[error("inner vertex {0:?} has valence 1")]
    LeafPresent(String),
    #[error("edge index {0} out of range")]
    UnknownEdge(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A map of gafs given on vertices, with each surviving target half-edge
/// assigned its unique source half-edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GafMorphism {
    pub src: Gaf,
    pub dst: Gaf,
    pub vertex_map: Vec<VertexId>,
    /// `preimage[h'] = h` for every half-edge `h'` of `dst`.
    pub preimage: Vec<HalfEdgeId>,
}

impl GafMorphism {
    pub fn identity(g: &Gaf) -> GafMorphism {
        GafMorphism {
            src: g.clone(),
            dst: g.clone(),
            vertex_map: (0..g.n_vertices()).collect(),
            preimage: (0..g.n_half_edges()).collect(),
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GafMorphism) -> GafMorphism {
        GafMorphism {
            src: self.src.clone(),
            dst: next.dst.clone(),
            vertex_map: self.vertex_map.iter().map(|&v| next.vertex_map[v]).collect(),
            preimage: next.preimage.iter().map(|&h| self.preimage[h]).collect(),
        }
    }

    /// Source half-edges that do not survive.
    pub fn collapsed_half_edges(&self) -> Vec<HalfEdgeId> {
        let kept: HashSet<HalfEdgeId> = self.preimage.iter().copied().collect();
        (0..self.src.n_half_edges()).filter(|h| !kept.contains(h)).collect()
    }
}

fn v(message: &str, locus: impl Into<String>) -> Violation {
    Violation {
        message: message.to_string(),
        locus: locus.into(),
    }
}

/// Checks every morphism condition independently.
pub fn validate_morphism(f: &GafMorphism) -> Vec<Violation> {
    let (src, dst) = (&f.src, &f.dst);
    let mut out = Vec::new();
    if f.vertex_map.len() != src.n_vertices() || f.vertex_map.iter().any(|&w| w >= dst.n_vertices()) {
        out.push(v("vertex map is not total", "vertex_map"));
        return out;
    }
    if f.preimage.len() != dst.n_half_edges() || f.preimage.iter().any(|&h| h >= src.n_half_edges()) {
        out.push(v("half-edge assignment is not total", "preimage"));
        return out;
    }
    if f.preimage.iter().collect::<HashSet<_>>().len() != f.preimage.len() {
        out.push(v("half-edge preimage not a singleton", "preimage"));
    }
    for a in 0..src.n_attach() {
        if !dst.is_attach(f.vertex_map[a]) {
            out.push(v("attach point maps to inner vertex", src.vertex_label(a)));
        }
    }
    for (k, &h) in f.preimage.iter().enumerate() {
        if f.vertex_map[src.at(h)] != dst.at(k) {
            out.push(v("not equivariant with incidence", dst.half_edge_labels()[k].clone()));
        }
        if f.preimage[dst.partner(k)] != src.partner(h) {
            out.push(v("not equivariant with edge involution", dst.half_edge_labels()[k].clone()));
        }
    }
    let collapsed = f.collapsed_half_edges();
    let collapsed_set: HashSet<HalfEdgeId> = collapsed.iter().copied().collect();
    for &h in &collapsed {
        if !collapsed_set.contains(&src.partner(h)) {
            out.push(v("half of an edge collapsed", src.half_edge_labels()[h].clone()));
        } else if f.vertex_map[src.at(h)] != f.vertex_map[src.at(src.partner(h))] {
            out.push(v("collapsed edge joins different vertices", src.half_edge_labels()[h].clone()));
        }
    }
    let mut fibres: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for (x, &w) in f.vertex_map.iter().enumerate() {
        fibres.entry(w).or_default().push(x);
    }
    for w in 0..dst.n_vertices() {
        let fibre = fibres.remove(&w).unwrap_or_default();
        let locus = dst.vertex_label(w).to_string();
        if fibre.is_empty() {
            out.push(v("empty vertex preimage", locus));
            continue;
        }
        let index: BTreeMap<VertexId, usize> = fibre.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let edges: Vec<(usize, usize)> = src
            .edges()
            .iter()
            .filter(|e| collapsed_set.contains(&e.tail))
            .map(|e| src.edge_endpoints(e))
            .filter(|(a, b)| index.contains_key(a) && index.contains_key(b))
            .map(|(a, b)| (index[&a], index[&b]))
            .collect();
        let mut uf = UnionFind::new(fibre.len());
        let mut acyclic = true;
        for &(a, b) in &edges {
            acyclic &= uf.union(a, b);
        }
        if !acyclic {
            out.push(v("preimage not a tree", locus));
            continue;
        }
        let attach_in_fibre: Vec<VertexId> = fibre.iter().copied().filter(|&x| src.is_attach(x)).collect();
        if dst.is_attach(w) {
            let roots: BTreeSet<usize> = attach_in_fibre.iter().map(|x| uf.find(index[x])).collect();
            let trees: BTreeSet<usize> = (0..fibre.len()).map(|i| uf.find(i)).collect();
            if roots.len() != attach_in_fibre.len() || roots != trees {
                out.push(v("attach preimage is not one based tree per attach point", locus));
            }
        } else {
            if !attach_in_fibre.is_empty() {
                out.push(v("inner vertex preimage is based", locus.clone()));
            }
            if edges.len() + 1 != fibre.len() {
                out.push(v("preimage not a tree", locus));
            }
        }
    }
    out
}

/// Collapses each tree of the forest `forest` (edge indices) to a vertex.
pub fn collapse_forest(g: &Gaf, forest: &[usize]) -> Result<(Gaf, GafMorphism), CollapseError> {
    let mut uf = UnionFind::new(g.n_vertices());
    let in_forest: BTreeSet<usize> = forest.iter().copied().collect();
    for &i in &in_forest {
        let e = g.edges().get(i).ok_or(CollapseError::UnknownEdge(i))?;
        let (a, b) = g.edge_endpoints(e);
        if !uf.union(a, b) {
            return Err(CollapseError::NotAForest);
        }
    }
    let mut rep: BTreeMap<usize, VertexId> = BTreeMap::new();
    for x in 0..g.n_vertices() {
        let r = uf.find(x);
        match rep.get(&r) {
            None => {
                rep.insert(r, x);
            }
            Some(&y) => {
                if g.is_attach(x) && g.is_attach(y) {
                    return Err(CollapseError::TwoAttachPointsInOneTree);
                }
                let better = if g.is_attach(x) != g.is_attach(y) {
                    g.is_attach(x)
                } else {
                    g.vertex_label(x) < g.vertex_label(y)
                };
                if better {
                    rep.insert(r, x);
                }
            }
        }
    }
    let survivors: Vec<VertexId> = (0..g.n_vertices()).filter(|&x| rep[&uf.find(x)] == x).collect();
    let new_index: BTreeMap<VertexId, usize> = survivors.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let vertex_map: Vec<VertexId> = (0..g.n_vertices()).map(|x| new_index[&rep[&uf.find(x)]]).collect();
    let collapsed: HashSet<HalfEdgeId> = in_forest
        .iter()
        .flat_map(|&i| [g.edges()[i].tail, g.edges()[i].head])
        .collect();
    let preimage: Vec<HalfEdgeId> = (0..g.n_half_edges()).filter(|h| !collapsed.contains(h)).collect();
    let back: BTreeMap<HalfEdgeId, usize> = preimage.iter().enumerate().map(|(i, &h)| (h, i)).collect();
    let dst = Gaf::from_indices(
        g.attach().to_vec(),
        survivors[g.n_attach()..].iter().map(|&x| g.vertex_label(x).to_string()).collect(),
        preimage.iter().map(|&h| g.half_edge_labels()[h].clone()).collect(),
        preimage.iter().map(|&h| vertex_map[g.at(h)]).collect(),
        preimage.iter().map(|&h| back[&g.partner(h)]).collect(),
    )?;
    let morphism = GafMorphism {
        src: g.clone(),
        dst: dst.clone(),
        vertex_map,
        preimage,
    };
    Ok((dst, morphism))
}

/// Pushes a marking forward along a morphism.
pub fn transport_marking(m: &MarkedGaf, f: &GafMorphism) -> Result<MarkedGaf, GraphError> {
    MarkedGaf::new(
        f.dst.clone(),
        m.marking().iter().map(|(b, x)| (b.clone(), f.vertex_map[*x])).collect(),
    )
}

pub fn collapse_forest_marked(m: &MarkedGaf, forest: &[usize]) -> Result<(MarkedGaf, GafMorphism), CollapseError> {
    let (_, f) = collapse_forest(m.gaf(), forest)?;
    Ok((transport_marking(m, &f)?, f))
}

/// Edges whose single collapse is legal: not loops, not between two
/// attach points.
pub fn collapsible_edges(g: &Gaf) -> Vec<usize> {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            let (a, b) = g.edge_endpoints(e);
            a != b && !(g.is_attach(a) && g.is_attach(b))
        })
        .map(|(i, _)| i)
        .collect()
}

/// Repeatedly collapses leaves with their edges.
pub fn minimize(g: &Gaf) -> (Gaf, GafMorphism) {
    let mut f = GafMorphism::identity(g);
    loop {
        let cur = &f.dst;
        let leaf = (cur.n_attach()..cur.n_vertices()).find(|&x| cur.valence(x) == 1);
        match leaf {
            None => return (f.dst.clone(), f),
            Some(x) => {
                let e = cur.edge_of(cur.half_edges_at(x)[0]);
                let (_, step) = collapse_forest(cur, &[e]).expect("a leaf edge is a legal collapse");
                f = f.then(&step);
            }
        }
    }
}

pub fn minimize_marked(m: &MarkedGaf) -> (MarkedGaf, GafMorphism) {
    let (_, f) = minimize(m.gaf());
    (transport_marking(m, &f).expect("marking survives collapse"), f)
}

/// Removes inner vertices of valence 2, concatenating their edges.
pub fn forget_valence2(g: &Gaf) -> Result<Gaf, CollapseError> {
    for x in g.n_attach()..g.n_vertices() {
        if g.valence(x) == 1 {
            return Err(CollapseError::LeafPresent(g.vertex_label(x).to_string()));
        }
    }
    for c in g.components() {
        let bare = c.vertices.iter().all(|&x| !g.is_attach(x) && g.valence(x) == 2);
        if bare && c.vertices.len() >= 2 {
            return Err(CollapseError::DegenerateCircle);
        }
    }
    let mut attach = g.attach().to_vec();
    let mut inner: Vec<String> = g.inner().to_vec();
    let mut labels: Vec<String> = g.half_edge_labels().to_vec();
    let mut at: Vec<VertexId> = g.incidence().to_vec();
    let mut partner: Vec<HalfEdgeId> = g.partners().to_vec();
    loop {
        let na = attach.len();
        let nv = na + inner.len();
        let target = (na..nv).find(|&x| {
            let hs: Vec<usize> = (0..at.len()).filter(|&h| at[h] == x).collect();
            hs.len() == 2 && partner[hs[0]] != hs[1]
        });
        let Some(x) = target else { break };
        let hs: Vec<usize> = (0..at.len()).filter(|&h| at[h] == x).collect();
        let (p, q) = (partner[hs[0]], partner[hs[1]]);
        partner[p] = q;
        partner[q] = p;
        // drop x and its two half-edges
        let keep: Vec<usize> = (0..at.len()).filter(|h| !hs.contains(h)).collect();
        let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &h)| (h, i)).collect();
        labels = keep.iter().map(|&h| labels[h].clone()).collect();
        partner = keep.iter().map(|&h| remap[&partner[h]]).collect();
        at = keep.iter().map(|&h| if at[h] > x { at[h] - 1 } else { at[h] }).collect();
        inner.remove(x - na);
        attach.truncate(na);
    }
    Ok(Gaf::from_indices(attach, inner, labels, at, partner)?)
}

/// Whether every based tree carries exactly one mark.
pub fn is_reduced(m: &MarkedGaf) -> bool {
    m.gaf()
        .based_tree_components()
        .iter()
        .all(|c| c.vertices.iter().map(|&x| m.marks_at(x).len()).sum::<usize>() == 1)
}

/// Output of [`reduce_with_counit`]: the reduced gaf and, for each new
/// attach point, the old attach point it came from.
#[derive(Debug, Clone, Serialize)]
pub struct Reduction {
    #[serde(skip)]
    pub reduced: MarkedGaf,
    pub attach_map: BTreeMap<String, String>,
}

/// Removes unmarked based trees and splits multiply marked based trees
/// into one bare attach point per mark.
pub fn reduce_with_counit(m: &MarkedGaf) -> Reduction {
    let g = m.gaf();
    if is_reduced(m) {
        return Reduction {
            reduced: m.clone(),
            attach_map: g.attach().iter().map(|a| (a.clone(), a.clone())).collect(),
        };
    }
    let mut drop_vertices: HashSet<VertexId> = HashSet::new();
    let mut split: Vec<(VertexId, Vec<String>)> = Vec::new();
    for c in g.based_tree_components() {
        let marks: Vec<String> = c.vertices.iter().flat_map(|&x| m.marks_at(x)).map(str::to_string).collect();
        if marks.len() == 1 {
            continue;
        }
        drop_vertices.extend(c.vertices.iter().copied());
        if marks.len() >= 2 {
            let a = *c.vertices.iter().find(|&&x| g.is_attach(x)).unwrap();
            split.push((a, marks));
        }
    }
    let kept_attach: Vec<VertexId> = (0..g.n_attach()).filter(|x| !drop_vertices.contains(x)).collect();
    let mut attach: Vec<String> = kept_attach.iter().map(|&x| g.vertex_label(x).to_string()).collect();
    let mut attach_map: BTreeMap<String, String> = attach.iter().map(|a| (a.clone(), a.clone())).collect();
    let kept_inner: Vec<VertexId> = (g.n_attach()..g.n_vertices()).filter(|x| !drop_vertices.contains(x)).collect();
    let mut taken: HashSet<String> = attach
        .iter()
        .cloned()
        .chain(kept_inner.iter().map(|&x| g.vertex_label(x).to_string()))
        .collect();
    let mut new_marks: Vec<(String, usize)> = Vec::new();
    for (a, marks) in &split {
        let a_label = g.vertex_label(*a).to_string();
        for b in marks {
            let mut name = b.clone();
            if taken.contains(&name) {
                name = format!("{a_label}/{b}");
                while taken.contains(&name) {
                    name.push('\'');
                }
            }
            taken.insert(name.clone());
            new_marks.push((b.clone(), attach.len()));
            attach_map.insert(name.clone(), a_label.clone());
            attach.push(name);
        }
    }
    let mut index: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, &x) in kept_attach.iter().enumerate() {
        index.insert(x, i);
    }
    for (i, &x) in kept_inner.iter().enumerate() {
        index.insert(x, attach.len() + i);
    }
    let kept_h: Vec<HalfEdgeId> = (0..g.n_half_edges()).filter(|&h| index.contains_key(&g.at(h))).collect();
    let hindex: BTreeMap<HalfEdgeId, usize> = kept_h.iter().enumerate().map(|(i, &h)| (h, i)).collect();
    let gaf = Gaf::from_indices(
        attach,
        kept_inner.iter().map(|&x| g.vertex_label(x).to_string()).collect(),
        kept_h.iter().map(|&h| g.half_edge_labels()[h].clone()).collect(),
        kept_h.iter().map(|&h| index[&g.at(h)]).collect(),
        kept_h.iter().map(|&h| hindex[&g.partner(h)]).collect(),
    )
    .expect("reduction keeps a valid gaf");
    let mut marking: Vec<(String, usize)> = m
        .marking()
        .iter()
        .filter(|(_, x)| index.contains_key(x))
        .map(|(b, x)| (b.clone(), index[x]))
        .collect();
    marking.extend(new_marks);
    Reduction {
        reduced: MarkedGaf::new(gaf, marking).expect("reduction keeps a valid marking"),
        attach_map,
    }
}

pub fn reduce(m: &MarkedGaf) -> MarkedGaf {
    reduce_with_counit(m).reduced
}

/// Whether `a` and `b` have a common iterated single-edge collapse within
/// `depth` steps from each side.
pub fn zigzag_equivalent(a: &MarkedGaf, b: &MarkedGaf, depth: usize) -> bool {
    let reach = |m: &MarkedGaf| {
        let mut seen: HashSet<MarkedGaf> = HashSet::new();
        let mut queue = VecDeque::from([(canonical_form(m).form, 0usize)]);
        while let Some((x, k)) = queue.pop_front() {
            if !seen.insert(x.clone()) || k == depth {
                continue;
            }
            for e in collapsible_edges(x.gaf()) {
                if let Ok((y, _)) = collapse_forest_marked(&x, &[e]) {
                    queue.push_back((canonical_form(&y).form, k + 1));
                }
            }
        }
        seen
    };
    let ra = reach(a);
    reach(b).iter().any(|x| ra.contains(x))
}
