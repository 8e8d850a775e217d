//! Mixed graphs, cut systems and the reachability primitives everything else
//! is built on.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Directed,
    Undirected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex<T> {
    pub value: T,
    pub ignition: T,
}

impl<T> Vertex<T> {
    pub fn new(value: T, ignition: T) -> Self {
        Vertex { value, ignition }
    }
}

/// Input description of an edge; pairing is resolved by [`MixedGraph::build`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec<T> {
    pub tail: VertexId,
    pub head: VertexId,
    pub orientation: Orientation,
    pub spread: T,
    pub cost: T,
}

impl<T> EdgeSpec<T> {
    pub fn undirected(a: usize, b: usize, spread: T, cost: T) -> Self {
        EdgeSpec { tail: VertexId(a), head: VertexId(b), orientation: Orientation::Undirected, spread, cost }
    }

    pub fn directed(tail: usize, head: usize, spread: T, cost: T) -> Self {
        EdgeSpec { tail: VertexId(tail), head: VertexId(head), orientation: Orientation::Directed, spread, cost }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub tail: VertexId,
    pub head: VertexId,
    pub orientation: Orientation,
    pub spread: T,
    pub cost: T,
    /// The opposite directed edge, when both `xy` and `yx` exist.
    pub pair: Option<EdgeId>,
}

impl<T> Edge<T> {
    pub fn is_directed(&self) -> bool {
        self.orientation == Orientation::Directed
    }

    /// The endpoint reached when leaving `from` along this edge, if the
    /// orientation allows it.
    pub fn traverse_from(&self, from: VertexId) -> Option<VertexId> {
        if self.tail == from {
            Some(self.head)
        } else if self.head == from && !self.is_directed() {
            Some(self.tail)
        } else {
            None
        }
    }
}

/// A unit the decision maker can cut: an undirected edge, a lone directed
/// edge, or an opposite directed couple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {edge} references vertex {vertex}, but the graph has {count} vertices")]
    VertexOutOfRange { edge: usize, vertex: usize, count: usize },
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("{what} {index} has probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { what: &'static str, index: usize, value: String },
    #[error("{what} {index} is negative ({value})")]
    Negative { what: &'static str, index: usize, value: String },
    #[error("edges {first} and {second} are parallel between the same vertices")]
    ParallelEdge { first: usize, second: usize },
    #[error("opposite edges {first} and {second} have different costs ({first_cost} vs {second_cost})")]
    UnequalPairCost { first: usize, second: usize, first_cost: String, second_cost: String },
    #[error("edge id {0} does not exist")]
    InvalidEdge(usize),
    #[error("vertex id {0} does not exist")]
    InvalidVertex(usize),
    #[error("cut system is not closed: edge {member} is cut but its opposite edge {missing} is not")]
    NotClosed { member: usize, missing: usize },
    #[error("graph is not windy: edge {edge} has spread probability {value} < 1")]
    NotWindy { edge: usize, value: String },
}

/// An edge subset closed under the opposite-edge rule.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CutSystem {
    members: BTreeSet<EdgeId>,
}

impl CutSystem {
    pub fn empty() -> Self {
        CutSystem::default()
    }

    /// Wraps the given edges as-is; closure is not enforced here.
    pub fn from_edges<I: IntoIterator<Item = EdgeId>>(edges: I) -> Self {
        CutSystem { members: edges.into_iter().collect() }
    }

    pub fn members(&self) -> &BTreeSet<EdgeId> {
        &self.members
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.members.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.members.iter().copied()
    }

    pub fn union(&self, other: &CutSystem) -> CutSystem {
        CutSystem { members: self.members.union(&other.members).copied().collect() }
    }

    pub fn is_subset(&self, other: &CutSystem) -> bool {
        self.members.is_subset(&other.members)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedGraph<T> {
    vertices: Vec<Vertex<T>>,
    edges: Vec<Edge<T>>,
    out_adj: Vec<Vec<(EdgeId, VertexId)>>,
    in_adj: Vec<Vec<(EdgeId, VertexId)>>,
}

impl<T: Scalar> MixedGraph<T> {
    /// Validates the specs and links opposite directed edges to each other.
    pub fn build(vertices: Vec<Vertex<T>>, specs: Vec<EdgeSpec<T>>) -> Result<Self, GraphError> {
        let n = vertices.len();
        for (i, v) in vertices.iter().enumerate() {
            if !v.ignition.is_probability() {
                return Err(GraphError::ProbabilityOutOfRange {
                    what: "vertex",
                    index: i,
                    value: v.ignition.to_string(),
                });
            }
            if v.value < T::zero() {
                return Err(GraphError::Negative { what: "value of vertex", index: i, value: v.value.to_string() });
            }
        }

        let mut by_endpoints: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, e) in specs.iter().enumerate() {
            for v in [e.tail, e.head] {
                if v.0 >= n {
                    return Err(GraphError::VertexOutOfRange { edge: i, vertex: v.0, count: n });
                }
            }
            if e.tail == e.head {
                return Err(GraphError::SelfLoop(i));
            }
            if !e.spread.is_probability() {
                return Err(GraphError::ProbabilityOutOfRange { what: "edge", index: i, value: e.spread.to_string() });
            }
            if e.cost < T::zero() {
                return Err(GraphError::Negative { what: "cost of edge", index: i, value: e.cost.to_string() });
            }
            let key = (e.tail.0.min(e.head.0), e.tail.0.max(e.head.0));
            by_endpoints.entry(key).or_default().push(i);
        }

        let mut pair = vec![None; specs.len()];
        let mut groups: Vec<&Vec<usize>> = by_endpoints.values().collect();
        groups.sort();
        for group in groups {
            match group.as_slice() {
                [_] => {}
                [a, b] => {
                    let (ea, eb) = (&specs[*a], &specs[*b]);
                    let opposite = ea.orientation == Orientation::Directed
                        && eb.orientation == Orientation::Directed
                        && ea.tail == eb.head;
                    if !opposite {
                        return Err(GraphError::ParallelEdge { first: *a, second: *b });
                    }
                    if ea.cost != eb.cost {
                        return Err(GraphError::UnequalPairCost {
                            first: *a,
                            second: *b,
                            first_cost: ea.cost.to_string(),
                            second_cost: eb.cost.to_string(),
                        });
                    }
                    pair[*a] = Some(EdgeId(*b));
                    pair[*b] = Some(EdgeId(*a));
                }
                [a, b, ..] => return Err(GraphError::ParallelEdge { first: *a, second: *b }),
                [] => unreachable!(),
            }
        }

        let edges: Vec<Edge<T>> = specs
            .into_iter()
            .zip(pair)
            .map(|(s, pair)| Edge {
                tail: s.tail,
                head: s.head,
                orientation: s.orientation,
                spread: s.spread,
                cost: s.cost,
                pair,
            })
            .collect();
        Ok(Self::assemble(vertices, edges))
    }

    fn assemble(vertices: Vec<Vertex<T>>, edges: Vec<Edge<T>>) -> Self {
        let n = vertices.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            let id = EdgeId(i);
            out_adj[e.tail.0].push((id, e.head));
            in_adj[e.head.0].push((id, e.tail));
            if !e.is_directed() {
                out_adj[e.head.0].push((id, e.tail));
                in_adj[e.tail.0].push((id, e.head));
            }
        }
        MixedGraph { vertices, edges, out_adj, in_adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex<T>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex<T> {
        &self.vertices[v.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge<T> {
        &self.edges[e.0]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    /// Outgoing traversals from `v`; undirected edges appear at both ends.
    pub fn out_edges(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.out_adj[v.0]
    }

    pub fn in_edges(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.in_adj[v.0]
    }

    pub fn has_directed_edges(&self) -> bool {
        self.edges.iter().any(Edge::is_directed)
    }

    pub fn is_windy(&self) -> bool {
        self.edges.iter().all(|e| e.spread.is_one())
    }

    pub fn ensure_windy(&self) -> Result<(), GraphError> {
        match self.edges.iter().position(|e| !e.spread.is_one()) {
            None => Ok(()),
            Some(i) => Err(GraphError::NotWindy { edge: i, value: self.edges[i].spread.to_string() }),
        }
    }

    /// Sum of values over `vs`.
    pub fn total_value<I: IntoIterator<Item = VertexId>>(&self, vs: I) -> T {
        T::sum(vs.into_iter().map(|v| self.vertices[v.0].value.clone()))
    }

    pub fn total_value_all(&self) -> T {
        self.total_value(self.vertex_ids())
    }

    /// Closure of `ids` under the opposite-edge rule.
    pub fn close_cut<I: IntoIterator<Item = EdgeId>>(&self, ids: I) -> Result<CutSystem, GraphError> {
        let mut members = BTreeSet::new();
        for e in ids {
            let edge = self.edges.get(e.0).ok_or(GraphError::InvalidEdge(e.0))?;
            members.insert(e);
            if let Some(p) = edge.pair {
                members.insert(p);
            }
        }
        Ok(CutSystem { members })
    }

    pub fn check_closed(&self, h: &CutSystem) -> Result<(), GraphError> {
        for &e in &h.members {
            let edge = self.edges.get(e.0).ok_or(GraphError::InvalidEdge(e.0))?;
            if let Some(p) = edge.pair {
                if !h.members.contains(&p) {
                    return Err(GraphError::NotClosed { member: e.0, missing: p.0 });
                }
            }
        }
        Ok(())
    }

    pub fn is_closed(&self, h: &CutSystem) -> bool {
        self.check_closed(h).is_ok()
    }

    /// The partial graph `G \ H`. Surviving edges keep their relative order.
    pub fn remove_cut(&self, h: &CutSystem) -> Result<MixedGraph<T>, GraphError> {
        self.check_closed(h)?;
        let mut new_index = vec![None; self.edges.len()];
        let mut kept = Vec::with_capacity(self.edges.len() - h.len());
        for (i, e) in self.edges.iter().enumerate() {
            if !h.contains(EdgeId(i)) {
                new_index[i] = Some(EdgeId(kept.len()));
                kept.push(e.clone());
            }
        }
        for e in &mut kept {
            e.pair = e.pair.and_then(|p| new_index[p.0]);
        }
        Ok(Self::assemble(self.vertices.clone(), kept))
    }

    /// Cost of cutting `h`; an opposite couple is charged its cost once.
    pub fn cut_cost(&self, h: &CutSystem) -> T {
        T::sum(h.members.iter().filter_map(|&e| {
            let edge = &self.edges[e.0];
            match edge.pair {
                Some(p) if p < e && h.members.contains(&p) => None,
                _ => Some(edge.cost.clone()),
            }
        }))
    }

    /// Cuttable units, ordered by their smallest edge id.
    pub fn links(&self) -> Vec<Link> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match e.pair {
                Some(p) if p.0 < i => None,
                Some(p) => Some(Link { edges: vec![EdgeId(i), p] }),
                None => Some(Link { edges: vec![EdgeId(i)] }),
            })
            .collect()
    }

    pub fn link_cost(&self, link: &Link) -> T {
        self.edges[link.edges[0].0].cost.clone()
    }

    /// Vertices reachable from `sources`, sources included.
    pub fn reachable_set<I: IntoIterator<Item = VertexId>>(&self, sources: I) -> BTreeSet<VertexId> {
        let seeds: Vec<VertexId> = sources.into_iter().collect();
        mask_to_set(&self.reach_mask(&seeds, None, false))
    }

    /// All `t` with a path `t ~> x`, `x` included.
    pub fn ancestors(&self, x: VertexId) -> BTreeSet<VertexId> {
        mask_to_set(&self.reach_mask(&[x], None, true))
    }

    /// BFS over edges whose `alive` flag is set (all edges when `None`);
    /// `reverse` walks edges against their orientation.
    pub(crate) fn reach_mask(&self, sources: &[VertexId], alive: Option<&[bool]>, reverse: bool) -> Vec<bool> {
        let adj = if reverse { &self.in_adj } else { &self.out_adj };
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if !seen[s.0] {
                seen[s.0] = true;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adj[v.0] {
                if alive.is_some_and(|a| !a[e.0]) || seen[w.0] {
                    continue;
                }
                seen[w.0] = true;
                queue.push_back(w);
            }
        }
        seen
    }

    /// Replaces every opposite directed couple by one undirected edge with the
    /// shared cost. Only valid when all spread probabilities are one.
    pub fn normalize_windy(&self) -> Result<MixedGraph<T>, GraphError> {
        self.ensure_windy()?;
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            match e.pair {
                Some(p) if p.0 < i => continue,
                Some(_) => edges.push(Edge { orientation: Orientation::Undirected, pair: None, ..e.clone() }),
                None => edges.push(e.clone()),
            }
        }
        Ok(Self::assemble(self.vertices.clone(), edges))
    }

    /// Same topology with every scalar mapped through `f`.
    pub fn map_scalars<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MixedGraph<U> {
        let vertices = self.vertices.iter().map(|v| Vertex::new(f(&v.value), f(&v.ignition))).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                tail: e.tail,
                head: e.head,
                orientation: e.orientation,
                spread: f(&e.spread),
                cost: f(&e.cost),
                pair: e.pair,
            })
            .collect();
        MixedGraph::assemble(vertices, edges)
    }

    pub fn edge_specs(&self) -> Vec<EdgeSpec<T>> {
        self.edges
            .iter()
            .map(|e| EdgeSpec {
                tail: e.tail,
                head: e.head,
                orientation: e.orientation,
                spread: e.spread.clone(),
                cost: e.cost.clone(),
            })
            .collect()
    }

    /// Neighbours in the underlying simple undirected graph.
    pub fn undirected_neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.out_adj[v.0].iter().chain(self.in_adj[v.0].iter()).map(|&(_, w)| w).collect()
    }
}

pub(crate) fn mask_to_set(mask: &[bool]) -> BTreeSet<VertexId> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| VertexId(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rational;

    fn unit_vertices(n: usize) -> Vec<Vertex<f64>> {
        (0..n).map(|_| Vertex::new(1.0, 0.0)).collect()
    }

    fn path_directed(n: usize) -> MixedGraph<f64> {
        let edges = (0..n - 1).map(|i| EdgeSpec::directed(i, i + 1, 1.0, 1.0)).collect();
        MixedGraph::build(unit_vertices(n), edges).unwrap()
    }

    fn set(ids: &[usize]) -> BTreeSet<VertexId> {
        ids.iter().map(|&i| VertexId(i)).collect()
    }

    #[test]
    fn build_mixed_graph_without_pairs() {
        let g = MixedGraph::build(
            unit_vertices(3),
            vec![EdgeSpec::undirected(0, 1, 1.0, 1.0), EdgeSpec::directed(1, 2, 1.0, 1.0)],
        )
        .unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.edges().iter().all(|e| e.pair.is_none()));
    }

    #[test]
    fn opposite_edges_are_paired() {
        let g = MixedGraph::build(
            unit_vertices(2),
            vec![EdgeSpec::directed(0, 1, 1.0, 3.0), EdgeSpec::directed(1, 0, 0.5, 3.0)],
        )
        .unwrap();
        assert_eq!(g.edge(EdgeId(0)).pair, Some(EdgeId(1)));
        assert_eq!(g.edge(EdgeId(1)).pair, Some(EdgeId(0)));
        assert_eq!(g.links().len(), 1);
    }

    #[test]
    fn build_errors() {
        let unequal = MixedGraph::build(
            unit_vertices(2),
            vec![EdgeSpec::directed(0, 1, 1.0, 3.0), EdgeSpec::directed(1, 0, 1.0, 5.0)],
        );
        assert!(matches!(unequal, Err(GraphError::UnequalPairCost { .. })));

        let dup = MixedGraph::build(
            unit_vertices(2),
            vec![EdgeSpec::undirected(0, 1, 1.0, 1.0), EdgeSpec::undirected(1, 0, 1.0, 1.0)],
        );
        assert!(matches!(dup, Err(GraphError::ParallelEdge { .. })));

        let same_dir = MixedGraph::build(
            unit_vertices(2),
            vec![EdgeSpec::directed(0, 1, 1.0, 1.0), EdgeSpec::directed(0, 1, 1.0, 1.0)],
        );
        assert!(matches!(same_dir, Err(GraphError::ParallelEdge { .. })));

        let self_loop = MixedGraph::build(unit_vertices(2), vec![EdgeSpec::undirected(1, 1, 1.0, 1.0)]);
        assert_eq!(self_loop, Err(GraphError::SelfLoop(0)));

        let bad_p = MixedGraph::build(unit_vertices(2), vec![EdgeSpec::undirected(0, 1, 1.5, 1.0)]);
        assert!(matches!(bad_p, Err(GraphError::ProbabilityOutOfRange { .. })));

        let bad_ignition = MixedGraph::<f64>::build(vec![Vertex::new(1.0, -0.1)], vec![]);
        assert!(matches!(bad_ignition, Err(GraphError::ProbabilityOutOfRange { .. })));

        let out_of_range = MixedGraph::build(unit_vertices(2), vec![EdgeSpec::undirected(0, 2, 1.0, 1.0)]);
        assert!(matches!(out_of_range, Err(GraphError::VertexOutOfRange { .. })));
    }

    #[test]
    fn close_cut_adds_opposite_edge() {
        let g = MixedGraph::build(
            unit_vertices(3),
            vec![
                EdgeSpec::directed(0, 1, 1.0, 4.0),
                EdgeSpec::directed(1, 0, 1.0, 4.0),
                EdgeSpec::undirected(1, 2, 1.0, 2.0),
            ],
        )
        .unwrap();
        let h = g.close_cut([EdgeId(0)]).unwrap();
        assert_eq!(h, CutSystem::from_edges([EdgeId(0), EdgeId(1)]));
        assert_eq!(g.close_cut([EdgeId(2)]).unwrap(), CutSystem::from_edges([EdgeId(2)]));
        assert!(g.close_cut([]).unwrap().is_empty());
        assert_eq!(g.close_cut([EdgeId(9)]), Err(GraphError::InvalidEdge(9)));
        // the couple is charged once
        assert_eq!(g.cut_cost(&h), 4.0);
        assert_eq!(g.cut_cost(&CutSystem::empty()), 0.0);
        assert!(matches!(g.remove_cut(&CutSystem::from_edges([EdgeId(0)])), Err(GraphError::NotClosed { .. })));
    }

    #[test]
    fn remove_cut_cases() {
        let g = MixedGraph::build(
            unit_vertices(3),
            vec![EdgeSpec::undirected(0, 1, 1.0, 1.0), EdgeSpec::undirected(1, 2, 1.0, 1.0)],
        )
        .unwrap();
        let g1 = g.remove_cut(&CutSystem::from_edges([EdgeId(1)])).unwrap();
        assert_eq!(g1.edge_count(), 1);
        assert_eq!((g1.edge(EdgeId(0)).tail, g1.edge(EdgeId(0)).head), (VertexId(0), VertexId(1)));
        assert_eq!(g.remove_cut(&CutSystem::empty()).unwrap(), g);
        let all = g.close_cut(g.edge_ids()).unwrap();
        let bare = g.remove_cut(&all).unwrap();
        assert_eq!(bare.edge_count(), 0);
        assert_eq!(bare.vertex_count(), 3);
    }

    #[test]
    fn star_cut_cost_is_additive() {
        let g = MixedGraph::build(
            unit_vertices(3),
            vec![EdgeSpec::undirected(0, 1, 1.0, 3.0), EdgeSpec::undirected(0, 2, 1.0, 5.0)],
        )
        .unwrap();
        assert_eq!(g.cut_cost(&g.close_cut(g.edge_ids()).unwrap()), 8.0);
    }

    #[test]
    fn values() {
        let g = MixedGraph::<Rational>::build(
            vec![
                Vertex::new(Rational::from_u64(0), Rational::from_u64(0)),
                Vertex::new(Rational::from_u64(176), Rational::from_u64(0)),
                Vertex::new(Rational::from_u64(176), Rational::from_u64(0)),
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(g.total_value([VertexId(1), VertexId(2)]), Rational::from_u64(352));
        assert_eq!(g.total_value([]), Rational::from_u64(0));
        let ones = MixedGraph::build(unit_vertices(3), vec![]).unwrap();
        assert_eq!(ones.total_value_all(), 3.0);
    }

    #[test]
    fn reachability_respects_orientation() {
        let g = path_directed(3);
        assert_eq!(g.reachable_set([VertexId(0)]), set(&[0, 1, 2]));
        assert_eq!(g.reachable_set([VertexId(2)]), set(&[2]));
        assert_eq!(g.ancestors(VertexId(2)), set(&[0, 1, 2]));
        assert_eq!(g.ancestors(VertexId(0)), set(&[0]));

        let two = MixedGraph::build(
            unit_vertices(4),
            vec![EdgeSpec::undirected(0, 1, 1.0, 1.0), EdgeSpec::undirected(2, 3, 1.0, 1.0)],
        )
        .unwrap();
        assert_eq!(two.reachable_set([VertexId(1)]), set(&[0, 1]));

        let triangle = MixedGraph::build(
            unit_vertices(3),
            vec![
                EdgeSpec::undirected(0, 1, 1.0, 1.0),
                EdgeSpec::undirected(1, 2, 1.0, 1.0),
                EdgeSpec::undirected(2, 0, 1.0, 1.0),
            ],
        )
        .unwrap();
        for x in 0..3 {
            assert_eq!(triangle.ancestors(VertexId(x)), set(&[0, 1, 2]));
        }
    }

    #[test]
    fn normalize_windy_merges_couples() {
        let g = MixedGraph::build(
            unit_vertices(3),
            vec![
                EdgeSpec::directed(0, 1, 1.0, 4.0),
                EdgeSpec::directed(1, 0, 1.0, 4.0),
                EdgeSpec::directed(1, 2, 1.0, 1.0),
            ],
        )
        .unwrap();
        let n = g.normalize_windy().unwrap();
        assert_eq!(n.edge_count(), 2);
        assert_eq!(n.edge(EdgeId(0)).orientation, Orientation::Undirected);
        assert_eq!(n.edge(EdgeId(0)).cost, 4.0);
        assert_eq!(n.edge(EdgeId(1)).orientation, Orientation::Directed);
        assert_eq!(n.normalize_windy().unwrap(), n);

        let lone = path_directed(2);
        assert_eq!(lone.normalize_windy().unwrap(), lone);

        let breezy = MixedGraph::build(unit_vertices(2), vec![EdgeSpec::undirected(0, 1, 0.5, 1.0)]).unwrap();
        assert!(matches!(breezy.normalize_windy(), Err(GraphError::NotWindy { .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph() -> impl Strategy<Value = MixedGraph<f64>> {
            (1usize..=7).prop_flat_map(|n| {
                let edge = (0..n, 0..n, 0u8..3, 1u32..=4);
                proptest::collection::vec(edge, 0..=10).prop_map(move |raw| {
                    let mut seen = BTreeSet::new();
                    let mut es = Vec::new();
                    for (a, b, kind, c) in raw {
                        if a == b || !seen.insert((a.min(b), a.max(b))) {
                            continue;
                        }
                        let c = f64::from(c);
                        match kind {
                            0 => es.push(EdgeSpec::undirected(a, b, 1.0, c)),
                            1 => es.push(EdgeSpec::directed(a, b, 1.0, c)),
                            _ => {
                                es.push(EdgeSpec::directed(a, b, 1.0, c));
                                es.push(EdgeSpec::directed(b, a, 1.0, c));
                            }
                        }
                    }
                    MixedGraph::build(unit_vertices(n), es).unwrap()
                })
            })
        }

        fn arb_graph_and_cut() -> impl Strategy<Value = (MixedGraph<f64>, Vec<usize>, Vec<usize>)> {
            arb_graph().prop_flat_map(|g| {
                let m = g.edge_count().max(1);
                (Just(g), proptest::collection::vec(0..m, 0..4), proptest::collection::vec(0..m, 0..4))
            })
        }

        fn ids(g: &MixedGraph<f64>, raw: &[usize]) -> Vec<EdgeId> {
            raw.iter().filter(|&&i| i < g.edge_count()).map(|&i| EdgeId(i)).collect()
        }

        proptest! {
            #[test]
            fn close_cut_is_idempotent((g, a, _) in arb_graph_and_cut()) {
                let h = g.close_cut(ids(&g, &a)).unwrap();
                prop_assert!(g.is_closed(&h));
                prop_assert_eq!(g.close_cut(h.iter()).unwrap(), h);
            }

            #[test]
            fn cuts_shrink_reachability((g, a, b) in arb_graph_and_cut()) {
                let h1 = g.close_cut(ids(&g, &a)).unwrap();
                let h2 = h1.union(&g.close_cut(ids(&g, &b)).unwrap());
                let g1 = g.remove_cut(&h1).unwrap();
                let g2 = g.remove_cut(&h2).unwrap();
                for v in g.vertex_ids() {
                    let full = g.reachable_set([v]);
                    let r1 = g1.reachable_set([v]);
                    let r2 = g2.reachable_set([v]);
                    prop_assert!(r2.is_subset(&r1) && r1.is_subset(&full));
                }
            }

            #[test]
            fn ancestors_are_dual_to_reachability(g in arb_graph()) {
                for x in g.vertex_ids() {
                    let anc = g.ancestors(x);
                    for t in g.vertex_ids() {
                        prop_assert_eq!(anc.contains(&t), g.reachable_set([t]).contains(&x));
                    }
                }
            }

            #[test]
            fn cut_cost_is_additive_over_disjoint_links((g, a, b) in arb_graph_and_cut()) {
                let h1 = g.close_cut(ids(&g, &a)).unwrap();
                let h2 = g.close_cut(ids(&g, &b)).unwrap();
                let both = h1.union(&h2);
                let shared = CutSystem::from_edges(h1.iter().filter(|e| h2.contains(*e)));
                prop_assert_eq!(g.cut_cost(&both) + g.cut_cost(&shared), g.cut_cost(&h1) + g.cut_cost(&h2));
                let links: f64 = g.links().iter().filter(|l| both.contains(l.edges[0])).map(|l| g.link_cost(l)).sum();
                prop_assert_eq!(g.cut_cost(&both), links);
            }
        }
    }
}
