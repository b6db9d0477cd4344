//! The category of graph cobordisms between finite sets.
//!
//! A morphism `B -> A` is represented by a [`MarkedGaf`] attached to `A`
//! and marked by `B`. Composition glues along the middle set; the monoidal
//! product is disjoint union.

use std::collections::{BTreeMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Gaf, GraphError, HalfEdgeId, MarkedGaf, VertexId};

pub type GrMorphism = MarkedGaf;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("source/target mismatch: expected {expected:?}, found {found:?}")]
    SourceTargetMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Where the vertices and half-edges of a factor land in a glued gaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub vertex_map: Vec<VertexId>,
    pub half_edge_map: Vec<HalfEdgeId>,
}

impl Embedding {
    fn identity(g: &Gaf) -> Embedding {
        Embedding {
            vertex_map: (0..g.n_vertices()).collect(),
            half_edge_map: (0..g.n_half_edges()).collect(),
        }
    }
}

/// Result of gluing two morphisms, with both factor embeddings.
#[derive(Debug, Clone)]
pub struct Glued {
    pub result: MarkedGaf,
    pub left: Embedding,
    pub right: Embedding,
}

pub fn identity(a: &[String]) -> GrMorphism {
    let gaf = Gaf::from_indices(a.to_vec(), vec![], vec![], vec![], vec![]).expect("distinct attach labels");
    let marking = (0..a.len()).map(|i| (a[i].clone(), i)).collect();
    MarkedGaf::new(gaf, marking).expect("identity marking")
}

fn fresh(label: &str, prefix: &str, taken: &mut HashSet<String>) -> String {
    let mut out = label.to_string();
    while taken.contains(&out) {
        out = format!("{prefix}{out}");
    }
    taken.insert(out.clone());
    out
}

fn same_set(x: &[String], y: &[String]) -> bool {
    x.iter().sorted().eq(y.iter().sorted())
}

/// `g ∘ h` for `g: B -> A` and `h: C -> B`.
pub fn compose_glued(g: &GrMorphism, h: &GrMorphism) -> Result<Glued, CategoryError> {
    let (gg, hg) = (g.gaf(), h.gaf());
    if !same_set(&g.source(), hg.attach()) {
        return Err(CategoryError::SourceTargetMismatch {
            expected: g.source(),
            found: hg.attach().to_vec(),
        });
    }
    let mut vlabels: HashSet<String> = gg.attach().iter().chain(gg.inner()).cloned().collect();
    vlabels.extend(hg.inner().iter().cloned());
    let mut inner = gg.inner().to_vec();
    let own: HashSet<&String> = gg.attach().iter().chain(gg.inner()).collect();
    for l in hg.inner() {
        if own.contains(l) {
            inner.push(fresh(l, "h.", &mut vlabels));
        } else {
            inner.push(l.clone());
        }
    }
    let mut hlabels: HashSet<String> = gg.half_edge_labels().iter().chain(hg.half_edge_labels()).cloned().collect();
    let own_h: HashSet<&String> = gg.half_edge_labels().iter().collect();
    let mut half_edges = gg.half_edge_labels().to_vec();
    for l in hg.half_edge_labels() {
        if own_h.contains(l) {
            half_edges.push(fresh(l, "h.", &mut hlabels));
        } else {
            half_edges.push(l.clone());
        }
    }

    let g_marks: BTreeMap<&str, VertexId> = g.marking().iter().map(|(b, v)| (b.as_str(), *v)).collect();
    let vertex_map: Vec<VertexId> = (0..hg.n_vertices())
        .map(|v| {
            if hg.is_attach(v) {
                g_marks[hg.vertex_label(v)]
            } else {
                gg.n_vertices() + v - hg.n_attach()
            }
        })
        .collect();
    let off = gg.n_half_edges();
    let half_edge_map: Vec<HalfEdgeId> = (0..hg.n_half_edges()).map(|x| off + x).collect();
    let mut at = gg.incidence().to_vec();
    at.extend(hg.incidence().iter().map(|&v| vertex_map[v]));
    let mut partner = gg.partners().to_vec();
    partner.extend(hg.partners().iter().map(|&x| off + x));

    let gaf = Gaf::from_indices(gg.attach().to_vec(), inner, half_edges, at, partner)?;
    let marking = h.marking().iter().map(|(c, v)| (c.clone(), vertex_map[*v])).collect();
    Ok(Glued {
        result: MarkedGaf::new(gaf, marking)?,
        left: Embedding::identity(gg),
        right: Embedding {
            vertex_map,
            half_edge_map,
        },
    })
}

pub fn compose(g: &GrMorphism, h: &GrMorphism) -> Result<GrMorphism, CategoryError> {
    compose_glued(g, h).map(|x| x.result)
}

fn side_labels(x: &[String], y: &[String]) -> (Vec<String>, Vec<String>) {
    let xs: HashSet<&String> = x.iter().collect();
    if y.iter().any(|l| xs.contains(l)) {
        (
            x.iter().map(|l| format!("L.{l}")).collect(),
            y.iter().map(|l| format!("R.{l}")).collect(),
        )
    } else {
        (x.to_vec(), y.to_vec())
    }
}

/// Disjoint union `g ⊔ h`.
pub fn tensor_glued(g: &GrMorphism, h: &GrMorphism) -> Result<Glued, CategoryError> {
    let (gg, hg) = (g.gaf(), h.gaf());
    let (ga, ha) = side_labels(gg.attach(), hg.attach());
    let (gb, hb) = side_labels(&g.source(), &h.source());

    let mut vtaken: HashSet<String> = ga.iter().chain(&ha).chain(gg.inner()).chain(hg.inner()).cloned().collect();
    let own: HashSet<&String> = ga.iter().chain(&ha).chain(gg.inner()).collect();
    let mut inner = gg.inner().to_vec();
    for l in hg.inner() {
        inner.push(if own.contains(l) { fresh(l, "R.", &mut vtaken) } else { l.clone() });
    }
    let mut htaken: HashSet<String> = gg.half_edge_labels().iter().chain(hg.half_edge_labels()).cloned().collect();
    let own_h: HashSet<&String> = gg.half_edge_labels().iter().collect();
    let mut half_edges = gg.half_edge_labels().to_vec();
    for l in hg.half_edge_labels() {
        half_edges.push(if own_h.contains(l) { fresh(l, "R.", &mut htaken) } else { l.clone() });
    }

    let (na_g, na_h) = (gg.n_attach(), hg.n_attach());
    let gmap: Vec<VertexId> = (0..gg.n_vertices()).map(|v| if v < na_g { v } else { v + na_h }).collect();
    let hmap: Vec<VertexId> = (0..hg.n_vertices())
        .map(|v| if v < na_h { na_g + v } else { gg.n_vertices() + v })
        .collect();
    let off = gg.n_half_edges();
    let mut at: Vec<VertexId> = gg.incidence().iter().map(|&v| gmap[v]).collect();
    at.extend(hg.incidence().iter().map(|&v| hmap[v]));
    let mut partner = gg.partners().to_vec();
    partner.extend(hg.partners().iter().map(|&x| off + x));

    let attach = ga.into_iter().chain(ha).collect();
    let gaf = Gaf::from_indices(attach, inner, half_edges, at, partner)?;
    let mut marking: Vec<(String, VertexId)> = g.marking().iter().zip(gb).map(|((_, v), b)| (b, gmap[*v])).collect();
    marking.extend(h.marking().iter().zip(hb).map(|((_, v), b)| (b, hmap[*v])));
    Ok(Glued {
        result: MarkedGaf::new(gaf, marking)?,
        left: Embedding {
            vertex_map: gmap,
            half_edge_map: (0..gg.n_half_edges()).collect(),
        },
        right: Embedding {
            vertex_map: hmap,
            half_edge_map: (0..hg.n_half_edges()).map(|x| off + x).collect(),
        },
    })
}

pub fn tensor(g: &GrMorphism, h: &GrMorphism) -> Result<GrMorphism, CategoryError> {
    tensor_glued(g, h).map(|x| x.result)
}

/// Operation (1): the morphism induced by a map of finite sets `f: B -> A`.
pub fn op1(a: &[String], f: &BTreeMap<String, String>) -> Result<GrMorphism, CategoryError> {
    let gaf = Gaf::from_indices(a.to_vec(), vec![], vec![], vec![], vec![])?;
    let marking = f
        .iter()
        .map(|(b, x)| {
            a.iter()
                .position(|y| y == x)
                .map(|i| (b.clone(), i))
                .ok_or_else(|| CategoryError::UnknownLabel(x.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MarkedGaf::new(gaf, marking)?)
}

/// Operation (2): `A ⊔ {new} -> A` adding one inner vertex marked by `new`.
pub fn op2(a: &[String], new: &str) -> Result<GrMorphism, CategoryError> {
    let gaf = Gaf::from_indices(a.to_vec(), vec![new.to_string()], vec![], vec![], vec![])?;
    let mut marking: Vec<(String, VertexId)> = (0..a.len()).map(|i| (a[i].clone(), i)).collect();
    marking.push((new.to_string(), a.len()));
    Ok(MarkedGaf::new(gaf, marking)?)
}

/// Operation (3): `A -> A` gluing one edge between `a1` and `a2`.
pub fn op3(a: &[String], a1: &str, a2: &str) -> Result<GrMorphism, CategoryError> {
    let find = |x: &str| a.iter().position(|y| y == x).ok_or_else(|| CategoryError::UnknownLabel(x.to_string()));
    let (i, j) = (find(a1)?, find(a2)?);
    let gaf = Gaf::from_indices(a.to_vec(), vec![], vec!["i0".into(), "i1".into()], vec![i, j], vec![1, 0])?;
    let marking = (0..a.len()).map(|k| (a[k].clone(), k)).collect();
    Ok(MarkedGaf::new(gaf, marking)?)
}

/// Homotopy data of one connected component.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentInvariant {
    pub h1_rank: usize,
    pub attach: Vec<String>,
    pub marks: Vec<String>,
}

/// Sound (not complete) invariants: per-component `H₁` rank, attach points
/// and marks, sorted.
pub fn homotopy_invariants(m: &GrMorphism) -> Vec<ComponentInvariant> {
    let g = m.gaf();
    let mut out: Vec<ComponentInvariant> = g
        .components()
        .into_iter()
        .map(|c| ComponentInvariant {
            h1_rank: c.h1_rank(),
            attach: c
                .vertices
                .iter()
                .filter(|&&v| g.is_attach(v))
                .map(|&v| g.vertex_label(v).to_string())
                .sorted()
                .collect(),
            marks: c
                .vertices
                .iter()
                .flat_map(|&v| m.marks_at(v))
                .map(str::to_string)
                .sorted()
                .collect(),
        })
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;
    use crate::graph::build::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identities() {
        let id = identity(&labels(&["a"]));
        assert_eq!(id.marking(), &[("a".to_string(), 0)]);
        let empty = identity(&[]);
        assert_eq!(empty.gaf().n_vertices(), 0);
        let twice = compose(&id, &id).unwrap();
        assert!(is_isomorphic(&twice, &id));
    }

    #[test]
    fn unit_law() {
        let g = marked(from_edges(&["a"], &["v"], &[("a", "v"), ("v", "v")]), &[("b", "v")]);
        let left = compose(&identity(&labels(&["a"])), &g).unwrap();
        let right = compose(&g, &identity(&labels(&["b"]))).unwrap();
        assert!(is_isomorphic(&left, &g));
        assert!(is_isomorphic(&right, &g));
    }

    #[test]
    fn mismatch_is_rejected() {
        let g = identity(&labels(&["a"]));
        let h = identity(&labels(&["z"]));
        assert!(matches!(compose(&g, &h), Err(CategoryError::SourceTargetMismatch { .. })));
    }

    #[test]
    fn edge_then_fold_gives_loop() {
        let a = labels(&["a"]);
        let fold = op1(&a, &[("a1".to_string(), "a".to_string()), ("a2".to_string(), "a".to_string())].into()).unwrap();
        let edge = op3(&labels(&["a1", "a2"]), "a1", "a2").unwrap();
        let k = compose(&fold, &edge).unwrap();
        let expected = marked(from_edges(&["a"], &[], &[("a", "a")]), &[("a1", "a"), ("a2", "a")]);
        assert!(is_isomorphic(&k, &expected));
        assert_eq!(k.euler_char_rel(), -1);
    }

    #[test]
    fn op2_then_op3_is_a_based_tree() {
        let a = labels(&["a"]);
        let g = op2(&a, "n").unwrap();
        let h = op3(&labels(&["a", "n"]), "a", "n").unwrap();
        let k = compose(&g, &h).unwrap();
        assert_eq!(k.gaf().based_tree_components().len(), 1);
        assert_eq!(k.euler_char_rel(), 0);
    }

    #[test]
    fn elementary_euler_characteristics() {
        let a = labels(&["a", "b"]);
        assert_eq!(op2(&a, "n").unwrap().euler_char_rel(), 1);
        assert_eq!(op3(&a, "a", "b").unwrap().euler_char_rel(), -1);
        assert_eq!(op3(&a, "a", "a").unwrap().gaf().edges().len(), 1);
        assert!(matches!(op3(&a, "a", "q"), Err(CategoryError::UnknownLabel(_))));
        let empty = op2(&[], "n").unwrap();
        assert_eq!(empty.source(), labels(&["n"]));
        assert!(empty.target().is_empty());
    }

    #[test]
    fn tensor_laws() {
        let g = marked(from_edges(&["a"], &["v"], &[("a", "v")]), &[("b", "v")]);
        assert!(is_isomorphic(&tensor(&g, &identity(&[])).unwrap(), &g));
        let t = tensor(&g, &g).unwrap();
        assert_eq!(t.euler_char_rel(), 2 * g.euler_char_rel());
        assert_eq!(t.target(), &labels(&["L.a", "R.a"])[..]);
        let ids = tensor(&identity(&labels(&["a"])), &identity(&labels(&["b"]))).unwrap();
        assert!(is_isomorphic(&ids, &identity(&labels(&["a", "b"]))));
    }

    #[test]
    fn op3_commutes_on_disjoint_pairs() {
        let a = labels(&["a", "b", "c", "d"]);
        let x = op3(&a, "a", "b").unwrap();
        let y = op3(&a, "c", "d").unwrap();
        assert!(is_isomorphic(&compose(&x, &y).unwrap(), &compose(&y, &x).unwrap()));
    }

    #[test]
    fn invariants_are_sound_not_complete() {
        let a = labels(&["a"]);
        let id = identity(&a);
        let handle = op3(&a, "a", "a").unwrap();
        assert_ne!(homotopy_invariants(&id), homotopy_invariants(&handle));
        let r2 = MarkedGaf::unmarked(rose(2));
        let th = MarkedGaf::unmarked(theta());
        assert_eq!(homotopy_invariants(&r2), homotopy_invariants(&th));
    }
}
