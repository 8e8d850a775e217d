//! Firebreak location on mixed graphs.
//!
//! A fire starts at random vertices and spreads along edges; cutting edges
//! (within a budget) limits the expected value lost. This crate evaluates
//! that risk, solves the cut problem optimally on trees and exhaustively on
//! small graphs, and builds the instance transformations used to relate the
//! problem to SAT variants and Partition.

pub mod bench;
pub mod dimacs;
pub mod dot;
pub mod exact;
pub mod gen;
pub mod graph;
pub mod instance;
pub mod numeric;
pub mod reductions;
pub mod risk;
pub mod tree;

pub use graph::{CutSystem, Edge, EdgeId, EdgeSpec, GraphError, Link, MixedGraph, Orientation, Vertex, VertexId};
pub use instance::{AnyInstance, FormatError, Instance, Solution};
pub use numeric::{NumericMode, Rational, Scalar};
