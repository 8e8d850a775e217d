//! Timing harness for the solvers; results are CSV rows.

use std::fmt::Write;
use std::path::Path;
use std::time::Instant;

use serde::Deserialize;
use thiserror::Error;

use crate::exact::solve_exhaustive;
use crate::gen::{generate, random_tree, GenKind, TreeOptions};
use crate::instance::{parse_instance_as, Instance};
use crate::numeric::Scalar;
use crate::tree::solve_tree;

pub const CSV_HEADER: &str = "id,|V|,|E|,B,algo,ms,value";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub id: String,
    pub vertices: usize,
    pub edges: usize,
    pub budget: String,
    pub algo: String,
    pub ms: f64,
    pub value: String,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.3},{}",
            self.id, self.vertices, self.edges, self.budget, self.algo, self.ms, self.value
        )
    }
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("suite: {0}")]
    Suite(String),
    #[error("{id}: {message}")]
    Run { id: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Tree,
    Exhaustive,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Tree => "tree",
            Algo::Exhaustive => "exhaustive",
        }
    }
}

/// One suite entry: either an instance file or a generated instance.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub id: String,
    pub algo: Algo,
    #[serde(default)]
    pub file: Option<String>,
    #[serde(default)]
    pub generate: Option<String>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the generated or stored budget.
    #[serde(default)]
    pub budget: Option<u64>,
    /// Reported time is the minimum over this many runs.
    #[serde(default = "one")]
    pub repeat: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub instances: Vec<SuiteEntry>,
}

/// Times `algo` on `inst`, keeping the fastest of `repeat` runs.
pub fn time_solver<T: Scalar>(
    id: &str,
    inst: &Instance<T>,
    algo: Algo,
    repeat: usize,
) -> Result<BenchRecord, BenchError> {
    let mut best = f64::INFINITY;
    let mut value = None;
    for _ in 0..repeat.max(1) {
        let start = Instant::now();
        let saved = match algo {
            Algo::Tree => solve_tree(inst).map(|s| s.saved).map_err(|e| e.to_string()),
            Algo::Exhaustive => solve_exhaustive(inst).map(|s| s.saved).map_err(|e| e.to_string()),
        }
        .map_err(|message| BenchError::Run { id: id.to_string(), message })?;
        best = best.min(start.elapsed().as_secs_f64() * 1e3);
        value = Some(saved);
    }
    Ok(BenchRecord {
        id: id.to_string(),
        vertices: inst.graph.vertex_count(),
        edges: inst.graph.edge_count(),
        budget: inst.budget.to_string(),
        algo: algo.name().to_string(),
        ms: best,
        value: value.map(|v| v.to_string()).unwrap_or_default(),
    })
}

/// Runs a suite file. Relative instance paths resolve against the suite's
/// directory. Generated trees use float mode; everything else is rational.
pub fn run_suite(path: &Path) -> Result<Vec<BenchRecord>, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::Suite(format!("{}: {e}", path.display())))?;
    let suite: Suite = serde_json::from_str(&text).map_err(|e| BenchError::Suite(e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::with_capacity(suite.instances.len());
    for entry in &suite.instances {
        let fail = |message: String| BenchError::Run { id: entry.id.clone(), message };
        let record = match (&entry.file, &entry.generate) {
            (Some(file), None) => {
                let text = std::fs::read_to_string(base.join(file)).map_err(|e| fail(e.to_string()))?;
                match crate::instance::parse_instance_str(&text).map_err(|e| fail(e.to_string()))? {
                    crate::AnyInstance::Rational(_) => {
                        let mut inst = parse_instance_as::<crate::Rational>(&text).map_err(|e| fail(e.to_string()))?;
                        if let Some(b) = entry.budget {
                            inst.budget = crate::Rational::from_u64(b);
                        }
                        time_solver(&entry.id, &inst, entry.algo, entry.repeat)?
                    }
                    crate::AnyInstance::Float(mut inst) => {
                        if let Some(b) = entry.budget {
                            inst.budget = b as f64;
                        }
                        time_solver(&entry.id, &inst, entry.algo, entry.repeat)?
                    }
                }
            }
            (None, Some(kind)) => {
                let kind: GenKind = kind.parse().map_err(|e: crate::gen::GenError| fail(e.to_string()))?;
                let n = entry.n.ok_or_else(|| fail("generated entries need `n`".into()))?;
                if kind == GenKind::Tree {
                    let mut opts = TreeOptions::for_size(n);
                    if let Some(b) = entry.budget {
                        opts.budget = b;
                    }
                    let inst = random_tree::<f64>(n, entry.seed, &opts).map_err(|e| fail(e.to_string()))?;
                    time_solver(&entry.id, &inst, entry.algo, entry.repeat)?
                } else {
                    let mut inst = generate(kind, n, entry.seed).map_err(|e| fail(e.to_string()))?;
                    if let Some(b) = entry.budget {
                        inst.budget = crate::Rational::from_u64(b);
                    }
                    time_solver(&entry.id, &inst, entry.algo, entry.repeat)?
                }
            }
            _ => return Err(fail("give exactly one of `file` and `generate`".into())),
        };
        out.push(record);
    }
    Ok(out)
}

/// Wall time of the tree solver on random trees for every `(|V|, B)` pair,
/// as `(|V|, B, ms)`.
pub fn tree_scaling(
    sizes: &[usize],
    budgets: &[u64],
    seed: u64,
    repeat: usize,
) -> Result<Vec<(usize, u64, f64)>, BenchError> {
    let mut out = Vec::new();
    for &n in sizes {
        for &b in budgets {
            let mut opts = TreeOptions::for_size(n);
            opts.budget = b;
            let inst = random_tree::<f64>(n, seed, &opts).map_err(|e| BenchError::Suite(e.to_string()))?;
            let r = time_solver(&format!("tree-{n}-{b}"), &inst, Algo::Tree, repeat)?;
            out.push((n, b, r.ms));
        }
    }
    Ok(out)
}
