//! Risk evaluation: the windy closed form, exact enumeration over spread
//! realizations, the literal double sum, and Monte Carlo estimation.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, GraphError, MixedGraph, VertexId};
use crate::numeric::Scalar;

pub const DEFAULT_ENUMERATION_BOUND: usize = 20;
pub const NAIVE_BOUND: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskMethod {
    WindyExact,
    Enumeration,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskResult<T> {
    pub value: T,
    pub method: RiskMethod,
    pub stderr: Option<T>,
    pub samples: Option<u64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RiskError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{count} uncertain edges exceed the enumeration bound of {bound}")]
    EnumerationBound { count: usize, bound: usize },
    #[error("|V| + |E| = {size} exceeds the naive enumeration bound of {bound}")]
    NaiveBound { size: usize, bound: usize },
    #[error("at least one Monte Carlo sample is required")]
    NoSamples,
}

/// Probability that exactly the vertices of `ignited` catch fire.
pub fn ignition_probability<T: Scalar>(g: &MixedGraph<T>, ignited: &BTreeSet<VertexId>) -> T {
    T::product(g.vertex_ids().map(|v| {
        let p = g.vertex(v).ignition.clone();
        if ignited.contains(&v) {
            p
        } else {
            T::one() - p
        }
    }))
}

/// Probability that exactly the edges of `kept` transmit fire.
pub fn spread_probability<T: Scalar>(g: &MixedGraph<T>, kept: &BTreeSet<EdgeId>) -> T {
    T::product(g.edge_ids().map(|e| {
        let p = g.edge(e).spread.clone();
        if kept.contains(&e) {
            p
        } else {
            T::one() - p
        }
    }))
}

/// Value burnt when `ignited` catches fire and every edge of `g_s` spreads.
pub fn loss<T: Scalar>(g_s: &MixedGraph<T>, ignited: &BTreeSet<VertexId>) -> T {
    g_s.total_value(g_s.reachable_set(ignited.iter().copied()))
}

/// Burn probability of `x` in a windy graph.
pub fn burn_probability<T: Scalar>(g: &MixedGraph<T>, x: VertexId) -> Result<T, RiskError> {
    g.ensure_windy()?;
    if x.0 >= g.vertex_count() {
        return Err(GraphError::InvalidVertex(x.0).into());
    }
    let q = T::product(g.ancestors(x).into_iter().map(|t| T::one() - g.vertex(t).ignition.clone()));
    Ok(T::one() - q)
}

/// Burn probability of every vertex of a windy graph.
pub fn burn_probabilities<T: Scalar>(g: &MixedGraph<T>) -> Result<Vec<T>, RiskError> {
    g.ensure_windy()?;
    let alive = vec![true; g.edge_count()];
    Ok(WindyEvaluator::new(g).probabilities(&alive))
}

pub fn windy_risk<T: Scalar>(g: &MixedGraph<T>) -> Result<RiskResult<T>, RiskError> {
    g.ensure_windy()?;
    let alive = vec![true; g.edge_count()];
    Ok(RiskResult {
        value: WindyEvaluator::new(g).risk(&alive),
        method: RiskMethod::WindyExact,
        stderr: None,
        samples: None,
    })
}

pub fn exact_risk<T: Scalar>(g: &MixedGraph<T>) -> Result<RiskResult<T>, RiskError> {
    exact_risk_bounded(g, DEFAULT_ENUMERATION_BOUND)
}

/// Sums the windy risk of every spread realization weighted by its
/// probability. Only edges with `0 < π_s < 1` are enumerated; the others are
/// deterministic.
pub fn exact_risk_bounded<T: Scalar>(g: &MixedGraph<T>, bound: usize) -> Result<RiskResult<T>, RiskError> {
    let alive = vec![true; g.edge_count()];
    let value = RiskOracle::new(g, bound).risk(&alive)?;
    Ok(RiskResult { value, method: RiskMethod::Enumeration, stderr: None, samples: None })
}

/// Exact risk of partial graphs of one base graph. Windy graphs use the
/// closed form directly; otherwise the uncertain live edges are enumerated.
pub(crate) struct RiskOracle<'g, T> {
    g: &'g MixedGraph<T>,
    eval: WindyEvaluator<'g, T>,
    bound: usize,
    scratch: Vec<bool>,
}

impl<'g, T: Scalar> RiskOracle<'g, T> {
    pub(crate) fn new(g: &'g MixedGraph<T>, bound: usize) -> Self {
        RiskOracle { g, eval: WindyEvaluator::new(g), bound, scratch: Vec::with_capacity(g.edge_count()) }
    }

    /// Number of edges whose spread probability is strictly between 0 and 1.
    pub(crate) fn uncertain_count(g: &MixedGraph<T>) -> usize {
        g.edges().iter().filter(|e| !e.spread.is_zero() && !e.spread.is_one()).count()
    }

    pub(crate) fn risk(&mut self, alive: &[bool]) -> Result<T, RiskError> {
        let edges = self.g.edges();
        let uncertain: Vec<usize> =
            (0..edges.len()).filter(|&i| alive[i] && !edges[i].spread.is_zero() && !edges[i].spread.is_one()).collect();
        if uncertain.len() > self.bound {
            return Err(RiskError::EnumerationBound { count: uncertain.len(), bound: self.bound });
        }
        self.scratch.clear();
        self.scratch.extend(edges.iter().zip(alive).map(|(e, &a)| a && e.spread.is_one()));
        if uncertain.is_empty() {
            return Ok(self.eval.risk(&self.scratch));
        }
        let mut total = T::zero();
        for mask in 0u64..(1u64 << uncertain.len()) {
            let mut weight = T::one();
            for (bit, &e) in uncertain.iter().enumerate() {
                let p = &edges[e].spread;
                let kept = mask >> bit & 1 == 1;
                self.scratch[e] = kept;
                weight = weight * if kept { p.clone() } else { T::one() - p.clone() };
            }
            total = total + weight * self.eval.risk(&self.scratch);
        }
        Ok(total)
    }
}

/// The double sum over ignition sets and spread subgraphs, term by term.
pub fn naive_risk<T: Scalar>(g: &MixedGraph<T>) -> Result<RiskResult<T>, RiskError> {
    let (n, m) = (g.vertex_count(), g.edge_count());
    if n + m > NAIVE_BOUND {
        return Err(RiskError::NaiveBound { size: n + m, bound: NAIVE_BOUND });
    }
    let mut total = T::zero();
    for imask in 0u64..(1u64 << n) {
        let ignited: BTreeSet<VertexId> = (0..n).filter(|i| imask >> i & 1 == 1).map(VertexId).collect();
        let pi = ignition_probability(g, &ignited);
        if pi.is_zero() {
            continue;
        }
        let sources: Vec<VertexId> = ignited.iter().copied().collect();
        for smask in 0u64..(1u64 << m) {
            let kept: BTreeSet<EdgeId> = (0..m).filter(|i| smask >> i & 1 == 1).map(EdgeId).collect();
            let ps = spread_probability(g, &kept);
            if ps.is_zero() {
                continue;
            }
            let alive: Vec<bool> = (0..m).map(|i| smask >> i & 1 == 1).collect();
            let burnt = g.reach_mask(&sources, Some(&alive), false);
            let lambda =
                T::sum(burnt.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| g.vertices()[v].value.clone()));
            total = total + pi.clone() * ps * lambda;
        }
    }
    Ok(RiskResult { value: total, method: RiskMethod::Enumeration, stderr: None, samples: None })
}

/// Monte Carlo estimate of the risk. Replication `r` draws from a ChaCha8
/// stream keyed by `(seed, r)`, so the output does not depend on the number
/// of worker threads.
pub fn mc_risk<T: Scalar>(g: &MixedGraph<T>, samples: u64, seed: u64) -> Result<RiskResult<f64>, RiskError> {
    if samples == 0 {
        return Err(RiskError::NoSamples);
    }
    let ignition: Vec<f64> = g.vertices().iter().map(|v| v.ignition.to_f64()).collect();
    let spread: Vec<f64> = g.edges().iter().map(|e| e.spread.to_f64()).collect();
    let values: Vec<f64> = g.vertices().iter().map(|v| v.value.to_f64()).collect();

    let losses: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r);
            let sources: Vec<VertexId> =
                ignition.iter().enumerate().filter(|(_, &p)| rng.gen::<f64>() < p).map(|(i, _)| VertexId(i)).collect();
            let alive: Vec<bool> = spread.iter().map(|&p| rng.gen::<f64>() < p).collect();
            if sources.is_empty() {
                return 0.0;
            }
            g.reach_mask(&sources, Some(&alive), false).iter().zip(&values).filter(|(b, _)| **b).map(|(_, v)| v).sum()
        })
        .collect();

    let n = samples as f64;
    let mean = losses.iter().sum::<f64>() / n;
    let stderr = if samples > 1 {
        let var = losses.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(RiskResult { value: mean, method: RiskMethod::MonteCarlo, stderr: Some(stderr), samples: Some(samples) })
}

/// Windy risk of partial graphs of one base graph, selected by edge masks.
/// Reuses its buffers across calls; spread probabilities are ignored.
pub(crate) struct WindyEvaluator<'g, T> {
    g: &'g MixedGraph<T>,
    complement: Vec<T>,
    any_directed: bool,
    // union-find
    parent: Vec<usize>,
    // Tarjan
    index: Vec<usize>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    comp: Vec<usize>,
}

const UNVISITED: usize = usize::MAX;

impl<'g, T: Scalar> WindyEvaluator<'g, T> {
    pub(crate) fn new(g: &'g MixedGraph<T>) -> Self {
        let n = g.vertex_count();
        WindyEvaluator {
            g,
            complement: g.vertices().iter().map(|v| T::one() - v.ignition.clone()).collect(),
            any_directed: g.has_directed_edges(),
            parent: vec![0; n],
            index: vec![UNVISITED; n],
            low: vec![0; n],
            on_stack: vec![false; n],
            stack: Vec::with_capacity(n),
            comp: vec![0; n],
        }
    }

    pub(crate) fn risk(&mut self, alive: &[bool]) -> T {
        let p = self.probabilities(alive);
        T::sum(
            p.into_iter()
                .zip(self.g.vertices())
                .filter(|(p, v)| !p.is_zero() && !v.value.is_zero())
                .map(|(p, v)| p * v.value.clone()),
        )
    }

    pub(crate) fn probabilities(&mut self, alive: &[bool]) -> Vec<T> {
        if self.any_directed && self.g.edges().iter().zip(alive).any(|(e, &a)| a && e.is_directed()) {
            self.directed_probabilities(alive)
        } else {
            self.undirected_probabilities(alive)
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn undirected_probabilities(&mut self, alive: &[bool]) -> Vec<T> {
        let n = self.g.vertex_count();
        for i in 0..n {
            self.parent[i] = i;
        }
        for (e, &a) in self.g.edges().iter().zip(alive) {
            if a {
                let (x, y) = (self.find(e.tail.0), self.find(e.head.0));
                if x != y {
                    self.parent[x] = y;
                }
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            let r = self.find(v);
            members[r].push(v);
        }
        let mut out = vec![T::zero(); n];
        for group in members.iter().filter(|m| !m.is_empty()) {
            let q = T::product(group.iter().map(|&v| self.complement[v].clone()));
            let p = T::one() - q;
            for &v in group {
                out[v] = p.clone();
            }
        }
        out
    }

    /// Tarjan over live edges; component ids come out in reverse topological
    /// order (sinks first).
    fn tarjan(&mut self, alive: &[bool]) -> usize {
        let g = self.g;
        let n = g.vertex_count();
        self.index.iter_mut().for_each(|i| *i = UNVISITED);
        self.on_stack.iter_mut().for_each(|b| *b = false);
        self.stack.clear();
        let mut counter = 0;
        let mut comps = 0;
        let mut call: Vec<(usize, usize)> = Vec::new();
        for root in 0..n {
            if self.index[root] != UNVISITED {
                continue;
            }
            call.push((root, 0));
            self.index[root] = counter;
            self.low[root] = counter;
            counter += 1;
            self.stack.push(root);
            self.on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let adj = g.out_edges(VertexId(v));
                if *pos < adj.len() {
                    let (e, w) = adj[*pos];
                    *pos += 1;
                    if !alive[e.0] {
                        continue;
                    }
                    let w = w.0;
                    if self.index[w] == UNVISITED {
                        self.index[w] = counter;
                        self.low[w] = counter;
                        counter += 1;
                        self.stack.push(w);
                        self.on_stack[w] = true;
                        call.push((w, 0));
                    } else if self.on_stack[w] {
                        self.low[v] = self.low[v].min(self.index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(u, _)) = call.last() {
                        self.low[u] = self.low[u].min(self.low[v]);
                    }
                    if self.low[v] == self.index[v] {
                        loop {
                            let w = self.stack.pop().expect("tarjan stack");
                            self.on_stack[w] = false;
                            self.comp[w] = comps;
                            if w == v {
                                break;
                            }
                        }
                        comps += 1;
                    }
                }
            }
        }
        comps
    }

    /// Propagates the set of igniting ancestor components along the
    /// condensation. Sets rather than running products are needed: a
    /// component reachable along two paths from the same source must count
    /// that source once.
    fn directed_probabilities(&mut self, alive: &[bool]) -> Vec<T> {
        let g = self.g;
        let n = g.vertex_count();
        let comps = self.tarjan(alive);

        let mut comp_q: Vec<T> = vec![T::one(); comps];
        for v in 0..n {
            let c = self.comp[v];
            if !self.complement[v].is_one() {
                comp_q[c] = comp_q[c].clone() * self.complement[v].clone();
            }
        }
        let sources: Vec<usize> = (0..comps).filter(|&c| !comp_q[c].is_one()).collect();
        let mut bit_of = vec![UNVISITED; comps];
        for (i, &c) in sources.iter().enumerate() {
            bit_of[c] = i;
        }
        let words = sources.len().div_ceil(64).max(1);
        let mut anc = vec![0u64; comps * words];
        for &c in &sources {
            let b = bit_of[c];
            anc[c * words + b / 64] |= 1 << (b % 64);
        }

        let mut comp_members: Vec<Vec<usize>> = vec![Vec::new(); comps];
        for v in 0..n {
            comp_members[self.comp[v]].push(v);
        }
        // Higher ids come first topologically.
        for c in (0..comps).rev() {
            for &v in &comp_members[c] {
                for &(e, w) in g.out_edges(VertexId(v)) {
                    let d = self.comp[w.0];
                    if !alive[e.0] || d == c {
                        continue;
                    }
                    let (lo, hi) = anc.split_at_mut(c * words);
                    let src = &hi[..words];
                    let dst = &mut lo[d * words..d * words + words];
                    for (x, y) in dst.iter_mut().zip(src) {
                        *x |= *y;
                    }
                }
            }
        }

        let mut comp_p = Vec::with_capacity(comps);
        for c in 0..comps {
            let row = &anc[c * words..(c + 1) * words];
            let factors = sources
                .iter()
                .enumerate()
                .filter(|(i, _)| row[i / 64] >> (i % 64) & 1 == 1)
                .map(|(_, &s)| comp_q[s].clone());
            comp_p.push(T::one() - T::product(factors));
        }
        (0..n).map(|v| comp_p[self.comp[v]].clone()).collect()
    }
}
