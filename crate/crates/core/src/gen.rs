//! Seeded random instance generators.

use std::collections::BTreeSet;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{EdgeSpec, MixedGraph, Vertex};
use crate::instance::Instance;
use crate::numeric::{Rational, Scalar};
use crate::reductions::partition_to_star;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Invalid(String),
    #[error("unknown generator `{0}`; expected tree, star, grid or random")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Tree,
    Star,
    Grid,
    Random,
}

impl FromStr for GenKind {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tree" => Ok(GenKind::Tree),
            "star" => Ok(GenKind::Star),
            "grid" => Ok(GenKind::Grid),
            "random" => Ok(GenKind::Random),
            other => Err(GenError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeOptions {
    /// Chance that a vertex is burning (ignition 1); others have ignition 0.
    pub burn_rate: f64,
    pub max_value: u64,
    pub max_cost: u64,
    pub budget: u64,
}

impl TreeOptions {
    pub fn for_size(n: usize) -> Self {
        TreeOptions { burn_rate: 0.25, max_value: 3, max_cost: 3, budget: (n as u64 / 4).max(1) }
    }
}

fn check_n(n: usize) -> Result<(), GenError> {
    if n == 0 {
        return Err(GenError::Invalid("n must be at least 1".into()));
    }
    Ok(())
}

/// Vertex `i ≥ 1` hangs from a parent drawn uniformly from `0..i`.
pub fn random_tree<T: Scalar>(n: usize, seed: u64, opts: &TreeOptions) -> Result<Instance<T>, GenError> {
    check_n(n)?;
    if opts.max_value == 0 || opts.max_cost == 0 || !(0.0..=1.0).contains(&opts.burn_rate) {
        return Err(GenError::Invalid(
            "values and costs need a positive maximum and the rate must lie in [0, 1]".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = (0..n)
        .map(|_| {
            let burning = rng.gen_bool(opts.burn_rate);
            let value = rng.gen_range(1..=opts.max_value);
            Vertex::new(T::from_u64(value), if burning { T::one() } else { T::zero() })
        })
        .collect();
    let specs = (1..n)
        .map(|i| {
            let parent = rng.gen_range(0..i);
            EdgeSpec::undirected(parent, i, T::one(), T::from_u64(rng.gen_range(1..=opts.max_cost)))
        })
        .collect();
    let graph = MixedGraph::build(vertices, specs).expect("a tree has no loops or parallel edges");
    Ok(Instance::new(graph, T::from_u64(opts.budget), None).expect("budget is non-negative"))
}

/// `side × side` undirected grid with unit values and costs and ignition in
/// {0, 1/4, 1/2}.
pub fn grid<T: Scalar>(side: usize, seed: u64) -> Result<Instance<T>, GenError> {
    check_n(side)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = (0..side * side).map(|_| Vertex::new(T::one(), T::from_ratio(rng.gen_range(0..=2), 4))).collect();
    let mut specs = Vec::with_capacity(2 * side * side);
    for r in 0..side {
        for c in 0..side {
            let id = r * side + c;
            if c + 1 < side {
                specs.push(EdgeSpec::undirected(id, id + 1, T::one(), T::one()));
            }
            if r + 1 < side {
                specs.push(EdgeSpec::undirected(id, id + side, T::one(), T::one()));
            }
        }
    }
    let graph = MixedGraph::build(vertices, specs).expect("grid edges are simple");
    Ok(Instance::new(graph, T::from_u64(side as u64), None).expect("budget is non-negative"))
}

/// Connected mixed graph: a random tree plus about `n/2` extra links, each
/// undirected, directed or an opposite couple, with spread in {1/2, 3/4, 1}.
pub fn random_mixed<T: Scalar>(n: usize, seed: u64) -> Result<Instance<T>, GenError> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = (0..n)
        .map(|_| Vertex::new(T::from_u64(rng.gen_range(1..=3)), T::from_ratio(rng.gen_range(0..=2), 4)))
        .collect();
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    let mut seen: BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
    for _ in 0..n / 2 {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && seen.insert((a.min(b), a.max(b))) {
            pairs.push((a, b));
        }
    }
    let mut specs = Vec::with_capacity(2 * pairs.len());
    for (a, b) in pairs {
        let spread = T::from_ratio(rng.gen_range(2..=4), 4);
        let cost = T::from_u64(rng.gen_range(1..=3));
        match rng.gen_range(0..3) {
            0 => specs.push(EdgeSpec::undirected(a, b, spread, cost)),
            1 => specs.push(EdgeSpec::directed(a, b, spread, cost)),
            _ => {
                let back = T::from_ratio(rng.gen_range(2..=4), 4);
                specs.push(EdgeSpec::directed(a, b, spread, cost.clone()));
                specs.push(EdgeSpec::directed(b, a, back, cost));
            }
        }
    }
    let graph = MixedGraph::build(vertices, specs).expect("generated links are simple");
    Ok(Instance::new(graph, T::from_u64((n as u64 / 2).max(1)), None).expect("budget is non-negative"))
}

/// Partition star on `n` weights in `1..=9`; the last weight is bumped by one
/// when needed to make the sum even.
pub fn star(n: usize, seed: u64) -> Result<Instance<Rational>, GenError> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
    if weights.iter().sum::<u64>() % 2 == 1 {
        weights[n - 1] += 1;
    }
    let (inst, _) = partition_to_star(&weights).map_err(|e| GenError::Invalid(e.to_string()))?;
    Ok(inst)
}

/// The generator behind `gen KIND --n N --seed S`, in rational mode.
pub fn generate(kind: GenKind, n: usize, seed: u64) -> Result<Instance<Rational>, GenError> {
    match kind {
        GenKind::Tree => random_tree(n, seed, &TreeOptions::for_size(n)),
        GenKind::Star => star(n, seed),
        GenKind::Grid => grid(n, seed),
        GenKind::Random => random_mixed(n, seed),
    }
}
