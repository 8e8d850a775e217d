//! Structural properties of generated instances.

use std::collections::VecDeque;

use serde::Serialize;

use crate::graph::{MixedGraph, VertexId};
use crate::numeric::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    /// Maximum degree in the underlying simple undirected graph.
    pub max_degree: usize,
    pub bipartite: bool,
    pub windy: bool,
    pub unit_values: bool,
    pub unit_costs: bool,
    pub uniform_values: bool,
    pub uniform_costs: bool,
    pub planarity: &'static str,
}

pub fn check_structure<T: Scalar>(g: &MixedGraph<T>) -> StructureReport {
    let n = g.vertex_count();
    let neighbors: Vec<Vec<VertexId>> =
        g.vertex_ids().map(|v| g.undirected_neighbors(v).into_iter().collect()).collect();
    let max_degree = neighbors.iter().map(Vec::len).max().unwrap_or(0);

    let mut color = vec![None; n];
    let mut bipartite = true;
    for start in 0..n {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let c = color[v].unwrap_or(false);
            for w in &neighbors[v] {
                match color[w.0] {
                    None => {
                        color[w.0] = Some(!c);
                        queue.push_back(w.0);
                    }
                    Some(d) if d == c => bipartite = false,
                    _ => {}
                }
            }
        }
    }

    let values: Vec<&T> = g.vertices().iter().map(|v| &v.value).collect();
    let costs: Vec<&T> = g.edges().iter().map(|e| &e.cost).collect();
    StructureReport {
        max_degree,
        bipartite,
        windy: g.is_windy(),
        unit_values: values.iter().all(|v| v.is_one()),
        unit_costs: costs.iter().all(|c| c.is_one()),
        uniform_values: values.windows(2).all(|w| w[0] == w[1]),
        uniform_costs: costs.windows(2).all(|w| w[0] == w[1]),
        planarity: "not checked",
    }
}
