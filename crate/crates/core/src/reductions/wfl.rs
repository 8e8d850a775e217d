//! Max 2SAT to windy firebreak location on a bipartite graph of maximum
//! degree five.

use serde_json::Value;

use crate::graph::{EdgeSpec, MixedGraph, Vertex};
use crate::instance::Instance;
use crate::numeric::{format_rational, Rational, Scalar};

use super::sat::{Literal, Max2SatInstance};
use super::{ReductionCertificate, ReductionError};

pub const MAX_LITERAL_FREQUENCY: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct WflParameters {
    /// Cost of a variable path edge.
    pub s: Rational,
    /// Ignition of a clause path's middle vertex.
    pub q: Rational,
    /// Value of clause path vertices.
    pub omega: Rational,
    /// Value of variable path vertices.
    pub nu: Rational,
    pub budget: Rational,
    pub threshold: Rational,
}

impl WflParameters {
    pub fn new(n: usize, m: usize, k: usize) -> Result<Self, ReductionError> {
        if k < 1 {
            return Err(ReductionError::Invalid("the threshold K must be at least 1".into()));
        }
        let r = |x: usize| Rational::from_u64(x as u64);
        let (n, m, k) = (r(n), r(m), r(k));
        let one = Rational::from_u64(1);
        let two_k_minus_one = r(2) * &k - &one;
        let s = &m + &one;
        let q = &one - &one / &two_k_minus_one;
        let omega = r(8) * &m * &two_k_minus_one;
        let nu = r(8) * &m * (Rational::from_ratio(5, 2) * &omega + r(2));
        let budget = &n * &s + &m;
        let threshold = r(2) * &n * &nu
            + &m * &omega * (Rational::from_ratio(3, 2) + &q)
            + &m * (Rational::from_ratio(7, 4) + &q / r(8))
            - &k / r(8);
        Ok(WflParameters { s, q, omega, nu, budget, threshold })
    }

    fn record(&self, cert: ReductionCertificate) -> ReductionCertificate {
        let f = |x: &Rational| Value::String(format_rational(x));
        cert.with("s", f(&self.s))
            .with("q", f(&self.q))
            .with("omega", f(&self.omega))
            .with("nu", f(&self.nu))
            .with("B", f(&self.budget))
            .with("R", f(&self.threshold))
    }
}

/// Vertex of the variable path standing for `l`.
pub fn literal_vertex(l: Literal) -> usize {
    3 * l.var + if l.positive { 0 } else { 2 }
}

/// Vertices `3i, 3i+1, 3i+2` form the path `x_i – x_i' – x̄_i`; clause `c`
/// owns `3n+3c..3n+3c+3` (its two literal ends around `c'`) and the binding
/// vertices `3n+3m+2c` and `3n+3m+2c+1`.
pub fn max2sat_to_wfl(phi: &Max2SatInstance) -> Result<(Instance<Rational>, ReductionCertificate), ReductionError> {
    let n = phi.num_vars;
    let m = phi.clauses.len();
    let freq = phi.max_literal_frequency();
    if freq > MAX_LITERAL_FREQUENCY {
        return Err(ReductionError::Invalid(format!(
            "a literal appears in {freq} clauses; at most {MAX_LITERAL_FREQUENCY} are allowed"
        )));
    }
    let p = WflParameters::new(n, m, phi.k)?;
    let half = Rational::from_ratio(1, 2);
    let zero = Rational::from_u64(0);
    let one = Rational::from_u64(1);
    let big = &p.budget + &one;

    let mut vertices = Vec::with_capacity(3 * n + 5 * m);
    let mut vertex_origin = Vec::with_capacity(3 * n + 5 * m);
    for i in 0..n {
        for tag in ["x", "x'", "x̄"] {
            vertices.push(Vertex::new(p.nu.clone(), half.clone()));
            vertex_origin.push(format!("variable[{}]:{tag}", i + 1));
        }
    }
    for c in 0..m {
        vertices.push(Vertex::new(p.omega.clone(), half.clone()));
        vertices.push(Vertex::new(p.omega.clone(), p.q.clone()));
        vertices.push(Vertex::new(p.omega.clone(), half.clone()));
        vertex_origin.extend(["first", "middle", "second"].map(|t| format!("clause[{c}]:{t}")));
    }
    for (c, clause) in phi.clauses.iter().enumerate() {
        for l in clause {
            vertices.push(Vertex::new(one.clone(), zero.clone()));
            vertex_origin.push(format!("clause[{c}]:binding[{l}]"));
        }
    }

    let mut specs = Vec::with_capacity(2 * n + 6 * m);
    let mut edge_origin = Vec::with_capacity(2 * n + 6 * m);
    for i in 0..n {
        specs.push(EdgeSpec::undirected(3 * i, 3 * i + 1, one.clone(), p.s.clone()));
        specs.push(EdgeSpec::undirected(3 * i + 1, 3 * i + 2, one.clone(), p.s.clone()));
        edge_origin.push(format!("variable[{}]:positive", i + 1));
        edge_origin.push(format!("variable[{}]:negative", i + 1));
    }
    let clause_base = 3 * n;
    for c in 0..m {
        let b = clause_base + 3 * c;
        specs.push(EdgeSpec::undirected(b, b + 1, one.clone(), one.clone()));
        specs.push(EdgeSpec::undirected(b + 1, b + 2, one.clone(), one.clone()));
        edge_origin.push(format!("clause[{c}]:first"));
        edge_origin.push(format!("clause[{c}]:second"));
    }
    let binding_base = 3 * n + 3 * m;
    for (c, clause) in phi.clauses.iter().enumerate() {
        for (j, &l) in clause.iter().enumerate() {
            let b = binding_base + 2 * c + j;
            let side = clause_base + 3 * c + 2 * j;
            specs.push(EdgeSpec::directed(literal_vertex(l), b, one.clone(), big.clone()));
            specs.push(EdgeSpec::directed(side, b, one.clone(), big.clone()));
            edge_origin.push(format!("clause[{c}]:binding[{l}]:literal"));
            edge_origin.push(format!("clause[{c}]:binding[{l}]:clause"));
        }
    }

    let graph = MixedGraph::build(vertices, specs)?;
    let inst = Instance::new(graph, p.budget.clone(), Some(p.threshold.clone()))?;
    let mut cert = p.record(ReductionCertificate::new("2sat-wfl")).with("n", n).with("m", m).with("K", phi.k);
    cert.vertex_origin = vertex_origin;
    cert.edge_origin = edge_origin;
    Ok((inst, cert))
}
