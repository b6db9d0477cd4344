//! Half-edge graphs attached to finite sets.
//!
//! A [`Gaf`] has attaching vertices `A`, inner vertices `V` and half-edges
//! `H`; each half-edge sits at a vertex and the edge involution pairs every
//! half-edge with a distinct partner. Vertices are addressed by dense indices:
//! `0..|A|` are attach points and `|A|..|A|+|V|` inner vertices.
//!
//! Edges are oriented from the half-edge with the lexicographically smaller
//! label (the tail) to its partner (the head), and listed in tail-label order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::IntMatrix;

pub type VertexId = usize;
pub type HalfEdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub message: String,
    pub locus: String,
}

impl Violation {
    fn new(message: &str, locus: impl Into<String>) -> Self {
        Violation {
            message: message.to_string(),
            locus: locus.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.message, self.locus)
    }
}

pub const FIXPOINT: &str = "fixpoint in edge involution";
pub const DANGLING_MARKING: &str = "dangling marking";
pub const DANGLING_INCIDENCE: &str = "dangling incidence";
pub const DUPLICATE_LABEL: &str = "duplicate label";
pub const ATTACH_INNER_OVERLAP: &str = "label is both attach and inner vertex";
pub const UNKNOWN_HALF_EDGE: &str = "unknown half-edge in edge";
pub const PAIRED_TWICE: &str = "half-edge paired twice";
pub const UNPAIRED: &str = "unpaired half-edge";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid gaf: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
}

/// An oriented edge, given by its tail and head half-edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub tail: HalfEdgeId,
    pub head: HalfEdgeId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gaf {
    attach: Vec<String>,
    inner: Vec<String>,
    half_edges: Vec<String>,
    at: Vec<VertexId>,
    partner: Vec<HalfEdgeId>,
    edges: Vec<Edge>,
}

impl Gaf {
    /// Builds a gaf from labels; `half_edges` are `(id, vertex)` pairs.
    pub fn new(
        attach: Vec<String>,
        inner: Vec<String>,
        half_edges: Vec<(String, String)>,
        edges: Vec<(String, String)>,
    ) -> Result<Gaf, GraphError> {
        let doc = GafDoc {
            attach,
            vertices: inner,
            half_edges: half_edges.into_iter().map(|(id, at)| HalfEdgeDoc { id, at }).collect(),
            edges: edges.into_iter().map(|(a, b)| [a, b]).collect(),
            marking: None,
        };
        doc.to_marked().map(|m| m.gaf)
    }

    /// Builds a gaf from already-indexed incidence data.
    pub fn from_indices(
        attach: Vec<String>,
        inner: Vec<String>,
        half_edges: Vec<String>,
        at: Vec<VertexId>,
        partner: Vec<HalfEdgeId>,
    ) -> Result<Gaf, GraphError> {
        let mut violations = Vec::new();
        check_unique(&attach, "attach", &mut violations);
        check_unique(&inner, "vertices", &mut violations);
        check_unique(&half_edges, "half_edges", &mut violations);
        let attach_set: HashSet<&String> = attach.iter().collect();
        for v in &inner {
            if attach_set.contains(v) {
                violations.push(Violation::new(ATTACH_INNER_OVERLAP, v.clone()));
            }
        }
        let nv = attach.len() + inner.len();
        if at.len() != half_edges.len() || partner.len() != half_edges.len() {
            violations.push(Violation::new(DANGLING_INCIDENCE, "incidence arrays have the wrong length"));
        } else {
            for (h, &v) in at.iter().enumerate() {
                if v >= nv {
                    violations.push(Violation::new(DANGLING_INCIDENCE, half_edges[h].clone()));
                }
            }
            for (h, &p) in partner.iter().enumerate() {
                if p == h {
                    violations.push(Violation::new(FIXPOINT, half_edges[h].clone()));
                } else if p >= partner.len() || partner[p] != h {
                    violations.push(Violation::new(UNPAIRED, half_edges[h].clone()));
                }
            }
        }
        if !violations.is_empty() {
            return Err(GraphError::Invalid(violations));
        }
        let mut g = Gaf {
            attach,
            inner,
            half_edges,
            at,
            partner,
            edges: Vec::new(),
        };
        g.edges = g.compute_edges();
        Ok(g)
    }

    fn compute_edges(&self) -> Vec<Edge> {
        let mut edges: Vec<Edge> = (0..self.half_edges.len())
            .filter(|&h| self.half_edges[h] < self.half_edges[self.partner[h]])
            .map(|h| Edge {
                tail: h,
                head: self.partner[h],
            })
            .collect();
        edges.sort_by(|a, b| self.half_edges[a.tail].cmp(&self.half_edges[b.tail]));
        edges
    }

    pub fn empty() -> Gaf {
        Gaf::from_indices(vec![], vec![], vec![], vec![], vec![]).unwrap()
    }

    pub fn attach(&self) -> &[String] {
        &self.attach
    }

    pub fn inner(&self) -> &[String] {
        &self.inner
    }

    pub fn half_edge_labels(&self) -> &[String] {
        &self.half_edges
    }

    pub fn n_attach(&self) -> usize {
        self.attach.len()
    }

    pub fn n_inner(&self) -> usize {
        self.inner.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.attach.len() + self.inner.len()
    }

    pub fn n_half_edges(&self) -> usize {
        self.half_edges.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_attach(&self, v: VertexId) -> bool {
        v < self.attach.len()
    }

    pub fn vertex_label(&self, v: VertexId) -> &str {
        if v < self.attach.len() {
            &self.attach[v]
        } else {
            &self.inner[v - self.attach.len()]
        }
    }

    pub fn vertex_index(&self, label: &str) -> Option<VertexId> {
        self.attach
            .iter()
            .chain(self.inner.iter())
            .position(|l| l == label)
    }

    pub fn half_edge_index(&self, label: &str) -> Option<HalfEdgeId> {
        self.half_edges.iter().position(|l| l == label)
    }

    /// Vertex carrying half-edge `h`.
    pub fn at(&self, h: HalfEdgeId) -> VertexId {
        self.at[h]
    }

    pub fn partner(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.partner[h]
    }

    pub fn incidence(&self) -> &[VertexId] {
        &self.at
    }

    pub fn partners(&self) -> &[HalfEdgeId] {
        &self.partner
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Index of the edge containing half-edge `h`.
    pub fn edge_of(&self, h: HalfEdgeId) -> usize {
        let t = if self.half_edges[h] < self.half_edges[self.partner[h]] {
            h
        } else {
            self.partner[h]
        };
        self.edges.iter().position(|e| e.tail == t).expect("every half-edge lies on an edge")
    }

    pub fn edge_endpoints(&self, e: &Edge) -> (VertexId, VertexId) {
        (self.at[e.tail], self.at[e.head])
    }

    /// Number of half-edges at `v`; a loop counts twice.
    pub fn valence(&self, v: VertexId) -> usize {
        self.at.iter().filter(|&&x| x == v).count()
    }

    pub fn half_edges_at(&self, v: VertexId) -> Vec<HalfEdgeId> {
        (0..self.half_edges.len()).filter(|&h| self.at[h] == v).collect()
    }

    /// Relative Euler characteristic `|V| - |E|`.
    pub fn euler_char_rel(&self) -> i64 {
        self.inner.len() as i64 - self.edges.len() as i64
    }

    /// Connected components; each lists its vertices and edge indices in
    /// increasing order, components ordered by smallest vertex.
    pub fn components(&self) -> Vec<Component> {
        let n = self.n_vertices();
        let mut uf = UnionFind::new(n);
        for e in &self.edges {
            uf.union(self.at[e.tail], self.at[e.head]);
        }
        let mut by_root: BTreeMap<usize, Component> = BTreeMap::new();
        let mut order: Vec<usize> = Vec::new();
        for v in 0..n {
            let r = uf.find(v);
            by_root
                .entry(r)
                .or_insert_with(|| {
                    order.push(r);
                    Component::default()
                })
                .vertices
                .push(v);
        }
        for (i, e) in self.edges.iter().enumerate() {
            let r = uf.find(self.at[e.tail]);
            by_root.get_mut(&r).unwrap().edges.push(i);
        }
        order.into_iter().map(|r| by_root.remove(&r).unwrap()).collect()
    }

    /// Components that are trees containing exactly one attach point.
    pub fn based_tree_components(&self) -> Vec<Component> {
        self.components()
            .into_iter()
            .filter(|c| c.is_tree() && c.vertices.iter().filter(|&&v| self.is_attach(v)).count() == 1)
            .collect()
    }

    /// Boundary matrix of the relative chain complex: rows are inner
    /// vertices, columns edges, `∂e = head - tail` with attach rows dropped.
    pub fn rel_chain_complex(&self) -> RelChainComplex {
        let na = self.attach.len();
        let mut m = IntMatrix::zeros(self.inner.len(), self.edges.len());
        for (j, e) in self.edges.iter().enumerate() {
            let (t, h) = (self.at[e.tail], self.at[e.head]);
            if h >= na {
                let x = m.get(h - na, j) + 1;
                m.set(h - na, j, x);
            }
            if t >= na {
                let x = m.get(t - na, j) - 1;
                m.set(t - na, j, x);
            }
        }
        RelChainComplex { boundary: m }
    }

    pub fn to_doc(&self) -> GafDoc {
        GafDoc {
            attach: self.attach.clone(),
            vertices: self.inner.clone(),
            half_edges: (0..self.half_edges.len())
                .map(|h| HalfEdgeDoc {
                    id: self.half_edges[h].clone(),
                    at: self.vertex_label(self.at[h]).to_string(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| [self.half_edges[e.tail].clone(), self.half_edges[e.head].clone()])
                .collect(),
            marking: None,
        }
    }

    /// Renames every label through the given functions.
    pub fn relabel(
        &self,
        vertex: impl Fn(&str) -> String,
        half_edge: impl Fn(&str) -> String,
    ) -> Result<Gaf, GraphError> {
        Gaf::from_indices(
            self.attach.iter().map(|l| vertex(l)).collect(),
            self.inner.iter().map(|l| vertex(l)).collect(),
            self.half_edges.iter().map(|l| half_edge(l)).collect(),
            self.at.clone(),
            self.partner.clone(),
        )
    }

    /// Renames inner vertices and half-edges only.
    pub fn relabel_inner(
        &self,
        vertex: impl Fn(&str) -> String,
        half_edge: impl Fn(&str) -> String,
    ) -> Result<Gaf, GraphError> {
        Gaf::from_indices(
            self.attach.clone(),
            self.inner.iter().map(|l| vertex(l)).collect(),
            self.half_edges.iter().map(|l| half_edge(l)).collect(),
            self.at.clone(),
            self.partner.clone(),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<usize>,
}

impl Component {
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }

    /// First Betti number of the component.
    pub fn h1_rank(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelChainComplex {
    /// Rows indexed by inner vertices, columns by edges.
    pub boundary: IntMatrix,
}

/// A gaf together with a marking `B -> A ⊔ V`, stored sorted by `B` label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedGaf {
    gaf: Gaf,
    marking: Vec<(String, VertexId)>,
}

impl MarkedGaf {
    pub fn new(gaf: Gaf, marking: Vec<(String, VertexId)>) -> Result<MarkedGaf, GraphError> {
        let mut violations = Vec::new();
        let mut marking = marking;
        marking.sort_by(|a, b| a.0.cmp(&b.0));
        for w in marking.windows(2) {
            if w[0].0 == w[1].0 {
                violations.push(Violation::new(DUPLICATE_LABEL, format!("marking {}", w[0].0)));
            }
        }
        for (b, v) in &marking {
            if *v >= gaf.n_vertices() {
                violations.push(Violation::new(DANGLING_MARKING, b.clone()));
            }
        }
        if violations.is_empty() {
            Ok(MarkedGaf { gaf, marking })
        } else {
            Err(GraphError::Invalid(violations))
        }
    }

    pub fn unmarked(gaf: Gaf) -> MarkedGaf {
        MarkedGaf { gaf, marking: Vec::new() }
    }

    pub fn from_json(text: &str) -> Result<MarkedGaf, crate::Error> {
        let doc: GafDoc = serde_json::from_str(text)?;
        Ok(doc.to_marked()?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("gaf documents serialize")
    }

    pub fn gaf(&self) -> &Gaf {
        &self.gaf
    }

    pub fn into_gaf(self) -> Gaf {
        self.gaf
    }

    /// `(b, vertex)` pairs sorted by `b`.
    pub fn marking(&self) -> &[(String, VertexId)] {
        &self.marking
    }

    /// The source labels `B`, sorted.
    pub fn source(&self) -> Vec<String> {
        self.marking.iter().map(|(b, _)| b.clone()).collect()
    }

    /// The target labels `A`.
    pub fn target(&self) -> &[String] {
        self.gaf.attach()
    }

    pub fn marks_at(&self, v: VertexId) -> Vec<&str> {
        self.marking.iter().filter(|(_, w)| *w == v).map(|(b, _)| b.as_str()).collect()
    }

    pub fn euler_char_rel(&self) -> i64 {
        self.gaf.euler_char_rel()
    }

    pub fn to_doc(&self) -> GafDoc {
        let mut doc = self.gaf.to_doc();
        if !self.marking.is_empty() {
            doc.marking = Some(
                self.marking
                    .iter()
                    .map(|(b, v)| (b.clone(), self.gaf.vertex_label(*v).to_string()))
                    .collect(),
            );
        }
        doc
    }

    /// Renames the source labels; `f` must be injective on `B`.
    pub fn rename_sources(&self, f: impl Fn(&str) -> String) -> Result<MarkedGaf, GraphError> {
        MarkedGaf::new(self.gaf.clone(), self.marking.iter().map(|(b, v)| (f(b), *v)).collect())
    }

    pub fn with_gaf(&self, gaf: Gaf) -> Result<MarkedGaf, GraphError> {
        MarkedGaf::new(gaf, self.marking.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfEdgeDoc {
    pub id: String,
    pub at: String,
}

/// JSON form of a (marked) gaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GafDoc {
    #[serde(default)]
    pub attach: Vec<String>,
    #[serde(default)]
    pub vertices: Vec<String>,
    #[serde(default)]
    pub half_edges: Vec<HalfEdgeDoc>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marking: Option<BTreeMap<String, String>>,
}

fn check_unique(labels: &[String], what: &str, out: &mut Vec<Violation>) {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            out.push(Violation::new(DUPLICATE_LABEL, format!("{what} {l}")));
        }
    }
}

impl GafDoc {
    /// Every invariant violation of the document; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_unique(&self.attach, "attach", &mut out);
        check_unique(&self.vertices, "vertices", &mut out);
        let ids: Vec<String> = self.half_edges.iter().map(|h| h.id.clone()).collect();
        check_unique(&ids, "half_edges", &mut out);
        let attach: HashSet<&String> = self.attach.iter().collect();
        let vertices: HashSet<&String> = self.attach.iter().chain(self.vertices.iter()).collect();
        for v in &self.vertices {
            if attach.contains(v) {
                out.push(Violation::new(ATTACH_INNER_OVERLAP, v.clone()));
            }
        }
        for h in &self.half_edges {
            if !vertices.contains(&h.at) {
                out.push(Violation::new(DANGLING_INCIDENCE, format!("{} at {}", h.id, h.at)));
            }
        }
        let known: HashSet<&String> = ids.iter().collect();
        let mut paired: HashMap<&String, usize> = HashMap::new();
        for [a, b] in &self.edges {
            if a == b {
                out.push(Violation::new(FIXPOINT, a.clone()));
                continue;
            }
            for x in [a, b] {
                if !known.contains(x) {
                    out.push(Violation::new(UNKNOWN_HALF_EDGE, x.clone()));
                } else {
                    *paired.entry(x).or_insert(0) += 1;
                }
            }
        }
        for id in &ids {
            match paired.get(id).copied().unwrap_or(0) {
                0 if !self.edges.iter().any(|[a, b]| a == id && b == id) => {
                    out.push(Violation::new(UNPAIRED, id.clone()))
                }
                n if n > 1 => out.push(Violation::new(PAIRED_TWICE, id.clone())),
                _ => {}
            }
        }
        if let Some(marking) = &self.marking {
            for (b, v) in marking {
                if !vertices.contains(v) {
                    out.push(Violation::new(DANGLING_MARKING, format!("{b} -> {v}")));
                }
            }
        }
        out
    }

    pub fn to_marked(&self) -> Result<MarkedGaf, GraphError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(GraphError::Invalid(violations));
        }
        let index: HashMap<&String, usize> = self
            .attach
            .iter()
            .chain(self.vertices.iter())
            .enumerate()
            .map(|(i, l)| (l, i))
            .collect();
        let he: HashMap<&String, usize> = self.half_edges.iter().enumerate().map(|(i, h)| (&h.id, i)).collect();
        let mut partner = vec![usize::MAX; self.half_edges.len()];
        for [a, b] in &self.edges {
            partner[he[a]] = he[b];
            partner[he[b]] = he[a];
        }
        let gaf = Gaf::from_indices(
            self.attach.clone(),
            self.vertices.clone(),
            self.half_edges.iter().map(|h| h.id.clone()).collect(),
            self.half_edges.iter().map(|h| index[&h.at]).collect(),
            partner,
        )?;
        let marking = self
            .marking
            .iter()
            .flatten()
            .map(|(b, v)| (b.clone(), index[v]))
            .collect();
        MarkedGaf::new(gaf, marking)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Small constructors used across tests, examples and the CLI.
pub mod build {
    use super::*;

    fn s(x: &str) -> String {
        x.to_string()
    }

    /// Gaf from `(tail vertex, head vertex)` edge pairs; half-edges are
    /// named `h00, h01, ...` so that tails precede heads lexicographically.
    pub fn from_edges(attach: &[&str], inner: &[&str], edges: &[(&str, &str)]) -> Gaf {
        let width = digits(2 * edges.len());
        let mut hes = Vec::new();
        let mut pairs = Vec::new();
        for (k, (a, b)) in edges.iter().enumerate() {
            let t = format!("h{:0width$}", 2 * k);
            let h = format!("h{:0width$}", 2 * k + 1);
            hes.push((t.clone(), s(a)));
            hes.push((h.clone(), s(b)));
            pairs.push((t, h));
        }
        Gaf::new(
            attach.iter().map(|x| s(x)).collect(),
            inner.iter().map(|x| s(x)).collect(),
            hes,
            pairs,
        )
        .expect("well-formed edge list")
    }

    pub(crate) fn digits(n: usize) -> usize {
        n.max(1).saturating_sub(1).to_string().len()
    }

    /// Closed rose with `n` petals at a single inner vertex.
    pub fn rose(n: usize) -> Gaf {
        let edges: Vec<(&str, &str)> = (0..n).map(|_| ("v", "v")).collect();
        from_edges(&[], &["v"], &edges)
    }

    /// Two inner vertices joined by three parallel edges.
    pub fn theta() -> Gaf {
        from_edges(&[], &["u", "v"], &[("u", "v"), ("u", "v"), ("u", "v")])
    }

    /// Two loops joined by a bar.
    pub fn dumbbell() -> Gaf {
        from_edges(&[], &["u", "v"], &[("u", "u"), ("u", "v"), ("v", "v")])
    }

    pub fn marked(gaf: Gaf, marks: &[(&str, &str)]) -> MarkedGaf {
        let marking = marks
            .iter()
            .map(|(b, v)| (s(b), gaf.vertex_index(v).expect("marked vertex exists")))
            .collect();
        MarkedGaf::new(gaf, marking).expect("valid marking")
    }
}
