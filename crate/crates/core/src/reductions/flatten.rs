//! Value flattening (subdivide edges so every vertex is worth 1) and cost
//! flattening (grids and unit-cost edge bundles so every edge costs 1).

use num_integer::Integer;
use num_traits::One;
use serde_json::Value;

use crate::graph::{EdgeSpec, MixedGraph, Orientation, Vertex};
use crate::instance::Instance;
use crate::numeric::{format_rational, Rational, Scalar};

use super::{ReductionCertificate, ReductionError};

/// Largest number of vertices `flatten_costs` will produce.
pub const GRID_VERTEX_BOUND: usize = 4_000_000;

/// For each input edge, its index in `g.normalize_windy()`.
fn normalized_index<T: Scalar>(g: &MixedGraph<T>) -> Vec<usize> {
    let mut map = vec![0; g.edge_count()];
    let mut next = 0;
    for (i, e) in g.edges().iter().enumerate() {
        match e.pair {
            Some(p) if p.0 < i => map[i] = map[p.0],
            _ => {
                map[i] = next;
                next += 1;
            }
        }
    }
    map
}

/// Vertex `v` of value `φ(v)` receives `φ(v) − 1` chained vertices on its
/// first incident edge. Original vertices keep their ids and inserted ones are
/// appended; output edge `i` is the image of normalized edge `i`, followed by
/// the chain edges.
pub fn flatten_values<T: Scalar>(inst: &Instance<T>) -> Result<(Instance<T>, ReductionCertificate), ReductionError> {
    let g = inst.graph.normalize_windy()?;
    let n = g.vertex_count();
    let mut mu = Vec::with_capacity(n);
    for (i, v) in g.vertices().iter().enumerate() {
        match v.value.to_u64_exact() {
            Some(0) => return Err(ReductionError::Invalid(format!("vertex {i} has value 0"))),
            Some(k) => mu.push(k as usize - 1),
            None => {
                return Err(ReductionError::Invalid(format!(
                    "vertex {i} has value {} which is not a positive integer",
                    v.value
                )))
            }
        }
    }
    let mut first_edge = vec![None; n];
    for (i, e) in g.edges().iter().enumerate() {
        for end in [e.tail, e.head] {
            first_edge[end.0].get_or_insert(i);
        }
    }
    if let Some(v) = (0..n).find(|&v| mu[v] > 0 && first_edge[v].is_none()) {
        return Err(ReductionError::Invalid(format!("vertex {v} has value above 1 but no incident edge to subdivide")));
    }

    let chain_cost = inst.budget.clone() + T::one();
    let mut vertices: Vec<Vertex<T>> = g.vertices().iter().map(|v| Vertex::new(T::one(), v.ignition.clone())).collect();
    let mut vertex_origin: Vec<String> = (0..n).map(|v| format!("vertex[{v}]")).collect();
    let mut chain_end: Vec<usize> = (0..n).collect();
    let mut chain_specs = Vec::new();
    for v in 0..n {
        let mut prev = v;
        for j in 0..mu[v] {
            let z = vertices.len();
            vertices.push(Vertex::new(T::one(), T::zero()));
            vertex_origin.push(format!("vertex[{v}]:inserted[{j}]"));
            chain_specs.push(EdgeSpec::undirected(prev, z, T::one(), chain_cost.clone()));
            prev = z;
        }
        chain_end[v] = prev;
    }

    let mut specs: Vec<EdgeSpec<T>> = g.edge_specs();
    for (i, spec) in specs.iter_mut().enumerate() {
        for end in [&mut spec.tail, &mut spec.head] {
            if first_edge[end.0] == Some(i) {
                end.0 = chain_end[end.0];
            }
        }
    }
    let boundary = specs.len();
    let mut edge_origin: Vec<String> = (0..boundary).map(|i| format!("edge[{i}]")).collect();
    edge_origin.extend((0..chain_specs.len()).map(|j| format!("chain[{j}]")));
    specs.extend(chain_specs);

    let out = Instance::new(MixedGraph::build(vertices, specs)?, inst.budget.clone(), inst.risk_threshold.clone())?;
    let mut cert = ReductionCertificate::new("flatten-values")
        .with("inserted_vertices", mu.iter().sum::<usize>())
        .with("chain_cost", Value::String(chain_cost.to_string()));
    cert.vertex_origin = vertex_origin;
    cert.edge_origin = edge_origin;
    cert.edge_map = normalized_index(&inst.graph).into_iter().map(|i| vec![i]).collect();
    Ok((out, cert))
}

/// Grid coordinates of the perimeter of an `m × m` grid, clockwise from the
/// top-left corner.
pub fn perimeter(m: usize) -> Vec<(usize, usize)> {
    if m == 1 {
        return vec![(0, 0)];
    }
    let mut p = Vec::with_capacity(4 * (m - 1));
    p.extend((0..m - 1).map(|c| (0, c)));
    p.extend((0..m - 1).map(|r| (r, m - 1)));
    p.extend((1..m).rev().map(|c| (m - 1, c)));
    p.extend((1..m).rev().map(|r| (r, 0)));
    p
}

/// Ignition of one grid cell so that `M²` independent cells ignite with
/// probability `π` overall.
pub fn grid_ignition(pi: f64, cells: usize) -> f64 {
    if pi >= 1.0 {
        1.0
    } else if pi <= 0.0 {
        0.0
    } else {
        -(f64::ln_1p(-pi) / cells as f64).exp_m1()
    }
}

/// Grid side `M = max(1 + C·⌈√(2Rf + 1)⌉, |E|·f)` with `C = ⌈B/2⌉`.
pub fn grid_side(budget: &Rational, threshold: &Rational, edges: usize, f: u64) -> num_bigint::BigInt {
    let two = Rational::from_u64(2);
    let c = (budget / &two).ceil().to_integer();
    let inner = (&two * threshold * Rational::from_u64(f) + Rational::one()).ceil().to_integer();
    let mut root = inner.sqrt();
    if &root * &root < inner {
        root += num_bigint::BigInt::one();
    }
    let a: num_bigint::BigInt = c * root + 1;
    let b = num_bigint::BigInt::from(edges) * num_bigint::BigInt::from(f);
    a.max(b)
}

/// Smallest valid `f` that is a multiple of the lcm `L` of the ignition
/// denominators: `L·⌈max κ / L⌉` (at least `L`). `None` on non-integer costs
/// or overflow.
pub fn default_cost_factor(inst: &Instance<Rational>) -> Option<u64> {
    let g = &inst.graph;
    let mut l = num_bigint::BigInt::one();
    for v in g.vertices() {
        l = l.lcm(v.ignition.denom());
    }
    let l = u64::try_from(&l).ok()?;
    let mut max_cost = 0;
    for e in g.edges() {
        max_cost = max_cost.max(e.cost.to_u64_exact()?);
    }
    l.checked_mul(max_cost.div_ceil(l).max(1))
}

/// Every vertex becomes an `M × M` undirected unit grid and every edge `e`
/// becomes `κ(e)` unit-cost joining edges between the two perimeters.
/// Output edges list the grids first (vertex by vertex), then the joining
/// edges grouped by source edge.
pub fn flatten_costs(
    inst: &Instance<Rational>,
    f: u64,
) -> Result<(Instance<f64>, ReductionCertificate), ReductionError> {
    if f == 0 {
        return Err(ReductionError::Invalid("the cost bound f must be positive".into()));
    }
    let threshold = inst
        .risk_threshold
        .as_ref()
        .ok_or_else(|| ReductionError::Invalid("cost flattening needs a risk threshold".into()))?;
    let g = inst.graph.normalize_windy()?;
    let fr = Rational::from_u64(f);
    for (i, v) in g.vertices().iter().enumerate() {
        if !v.value.is_one() {
            return Err(ReductionError::Invalid(format!("vertex {i} has value {}, expected 1", v.value)));
        }
        if !(&v.ignition * &fr).is_integer() {
            return Err(ReductionError::Invalid(format!(
                "vertex {i}: f·π = {} is not an integer",
                format_rational(&(&v.ignition * &fr))
            )));
        }
    }
    let mut kappa = Vec::with_capacity(g.edge_count());
    for (i, e) in g.edges().iter().enumerate() {
        match e.cost.to_u64_exact() {
            Some(k) if k >= 1 && k <= f => kappa.push(k as usize),
            _ => {
                return Err(ReductionError::Invalid(format!(
                    "edge {i} has cost {}; costs must be integers in 1..={f}",
                    format_rational(&e.cost)
                )))
            }
        }
    }

    let m_big = grid_side(&inst.budget, threshold, g.edge_count(), f);
    let n = g.vertex_count();
    let m = usize::try_from(&m_big)
        .ok()
        .filter(|&m| m.checked_mul(m).and_then(|c| c.checked_mul(n)).is_some_and(|t| t <= GRID_VERTEX_BOUND))
        .ok_or_else(|| ReductionError::TooLarge(format!("grid side {m_big} for {n} vertices")))?;
    let cells = m * m;
    let per = perimeter(m);

    let mut vertices = Vec::with_capacity(n * cells);
    let mut specs = Vec::new();
    for (x, v) in g.vertices().iter().enumerate() {
        let p = grid_ignition(v.ignition.to_f64(), cells);
        let base = x * cells;
        vertices.extend((0..cells).map(|_| Vertex::new(1.0, p)));
        for r in 0..m {
            for c in 0..m {
                let id = base + r * m + c;
                if c + 1 < m {
                    specs.push(EdgeSpec::undirected(id, id + 1, 1.0, 1.0));
                }
                if r + 1 < m {
                    specs.push(EdgeSpec::undirected(id, id + m, 1.0, 1.0));
                }
            }
        }
    }
    let mut edge_origin: Vec<String> = vec!["grid".into(); specs.len()];

    let mut load = vec![0usize; n];
    for (e, &k) in g.edges().iter().zip(&kappa) {
        load[e.tail.0] += k;
        load[e.head.0] += k;
    }
    let mut slot = vec![0usize; n];
    let mut attach = |x: usize| {
        let i = slot[x];
        slot[x] += 1;
        let (r, c) = per[i * per.len() / load[x]];
        x * cells + r * m + c
    };
    let mut normalized_map = Vec::with_capacity(g.edge_count());
    for (i, (e, &k)) in g.edges().iter().zip(&kappa).enumerate() {
        let mut ids = Vec::with_capacity(k);
        for _ in 0..k {
            let (a, b) = (attach(e.tail.0), attach(e.head.0));
            ids.push(specs.len());
            edge_origin.push(format!("edge[{i}]"));
            specs.push(EdgeSpec { orientation: e.orientation, ..EdgeSpec::undirected(a, b, 1.0, 1.0) });
        }
        normalized_map.push(ids);
    }
    debug_assert!(specs.iter().all(|s| s.orientation != Orientation::Directed || s.tail != s.head));

    let cells_r = Rational::from_u64(cells as u64);
    let threshold_out = threshold * &cells_r;
    let out = Instance::new(MixedGraph::build(vertices, specs)?, inst.budget.to_f64(), Some(threshold_out.to_f64()))?;
    let base: Vec<Value> = g.vertices().iter().map(|v| Value::String(format_rational(&v.ignition))).collect();
    let mut cert = ReductionCertificate::new("flatten-costs")
        .with("f", f)
        .with("C", Value::String((inst.budget.clone() / Rational::from_u64(2)).ceil().to_integer().to_string()))
        .with("M", m)
        .with("cells_per_grid", cells)
        .with("B", Value::String(format_rational(&inst.budget)))
        .with("R", Value::String(format_rational(&threshold_out)))
        .with("base_ignition", Value::Array(base));
    cert.edge_origin = edge_origin;
    cert.edge_map = normalized_index(&inst.graph).into_iter().map(|i| normalized_map[i].clone()).collect();
    cert.vertex_origin = (0..n).flat_map(|x| (0..cells).map(move |c| format!("vertex[{x}]:cell[{c}]"))).collect();
    if cert.vertex_origin.len() > 100_000 {
        cert.vertex_origin.clear();
    }
    Ok((out, cert))
}

impl ReductionCertificate {
    /// Output edges standing for the input edges in `ids`, sorted.
    pub fn map_edges<I: IntoIterator<Item = usize>>(&self, ids: I) -> Vec<usize> {
        let mut out: Vec<usize> = ids.into_iter().flat_map(|i| self.edge_map[i].iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}
