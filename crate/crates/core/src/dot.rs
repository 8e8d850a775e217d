//! Graphviz export. Presentation only; DOT is never read back.

use std::fmt::Write;

use crate::graph::{CutSystem, EdgeId, MixedGraph};
use crate::numeric::Scalar;

/// Burning vertices (ignition 1) are filled red, other igniting vertices
/// orange; members of `cut` are drawn dashed.
pub fn to_dot<T: Scalar>(g: &MixedGraph<T>, cut: Option<&CutSystem>) -> String {
    let mut s = String::from("digraph firebreak {\n  node [shape=circle];\n");
    for (i, v) in g.vertices().iter().enumerate() {
        let style = if v.ignition.is_one() {
            ", style=filled, fillcolor=red"
        } else if v.ignition > T::zero() {
            ", style=filled, fillcolor=orange"
        } else {
            ""
        };
        let _ = writeln!(s, "  v{i} [label=\"{i}\\nφ={} π={}\"{style}];", v.value, v.ignition);
    }
    for (i, e) in g.edges().iter().enumerate() {
        if e.pair.is_some_and(|p| p.0 < i) {
            continue;
        }
        let dir = if e.pair.is_some() {
            "both"
        } else if e.is_directed() {
            "forward"
        } else {
            "none"
        };
        let cut_style = if cut.is_some_and(|h| h.contains(EdgeId(i))) { ", style=dashed, color=blue" } else { "" };
        let _ = writeln!(
            s,
            "  v{} -> v{} [dir={dir}, label=\"κ={} p={}\"{cut_style}];",
            e.tail.0, e.head.0, e.cost, e.spread
        );
    }
    s.push_str("}\n");
    s
}
