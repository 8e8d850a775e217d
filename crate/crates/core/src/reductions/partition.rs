//! Partition as a star whose burning centre must be separated from half the
//! total leaf weight.

use crate::graph::{EdgeSpec, MixedGraph, Vertex};
use crate::instance::Instance;
use crate::numeric::{Rational, Scalar};

use super::{ReductionCertificate, ReductionError};

/// Centre 0 burns with certainty and has value 0; leaf `i + 1` has value and
/// edge cost `s[i]`. `B = R = Σs / 2`.
pub fn partition_to_star(s: &[u64]) -> Result<(Instance<Rational>, ReductionCertificate), ReductionError> {
    if s.is_empty() {
        return Err(ReductionError::Invalid("the multiset is empty".into()));
    }
    if let Some(i) = s.iter().position(|&x| x == 0) {
        return Err(ReductionError::Invalid(format!("element {i} is not positive")));
    }
    let total: u128 = s.iter().map(|&x| u128::from(x)).sum();
    if total % 2 == 1 {
        return Err(ReductionError::Invalid(format!("the sum {total} is odd")));
    }
    let ri = Rational::from_u64;
    let mut vertices = vec![Vertex::new(ri(0), ri(1))];
    vertices.extend(s.iter().map(|&x| Vertex::new(ri(x), ri(0))));
    let specs = s.iter().enumerate().map(|(i, &x)| EdgeSpec::undirected(0, i + 1, ri(1), ri(x))).collect();
    let half = Rational::new((total / 2).into(), 1.into());
    let inst = Instance::new(MixedGraph::build(vertices, specs)?, half.clone(), Some(half))?;
    let mut cert = ReductionCertificate::new("partition").with("total", total.to_string());
    cert.vertex_origin.push("centre".into());
    cert.vertex_origin.extend((0..s.len()).map(|i| format!("element[{i}]")));
    cert.edge_origin.extend((0..s.len()).map(|i| format!("element[{i}]")));
    Ok((inst, cert))
}

/// Exhaustive Partition check for small multisets.
pub fn partition_brute(s: &[u64]) -> bool {
    let total: u128 = s.iter().map(|&x| u128::from(x)).sum();
    if total % 2 == 1 {
        return false;
    }
    let mut reachable = std::collections::BTreeSet::from([0u128]);
    for &x in s {
        let next: Vec<u128> = reachable.iter().map(|&r| r + u128::from(x)).collect();
        reachable.extend(next);
    }
    reachable.contains(&(total / 2))
}
