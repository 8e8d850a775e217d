use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use firebreak::bench::{run_suite, to_csv};
use firebreak::dimacs::{parse_cnf, parse_max2sat, write_max2sat};
use firebreak::dot::to_dot;
use firebreak::exact::solve_exhaustive;
use firebreak::gen::{generate, GenKind};
use firebreak::instance::{parse_instance_as, parse_instance_str, serialize_instance};
use firebreak::reductions::chains::{verify_3sat_chain, verify_partition_chain, verify_wfl_chain};
use firebreak::reductions::{
    default_cost_factor, flatten_costs, flatten_values, max2sat_to_wfl, partition_to_star, r3sat_to_max2sat,
    verify_gadget_claims, ReductionCertificate,
};
use firebreak::risk::{exact_risk, mc_risk, naive_risk, windy_risk};
use firebreak::tree::solve_tree;
use firebreak::{AnyInstance, CutSystem, Instance, MixedGraph, Rational, Scalar, Solution};

#[derive(Parser)]
#[command(name = "firebreak", version, about = "Firebreak location on mixed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected burnt value of an instance (no cuts applied).
    Risk {
        #[arg(long, value_enum)]
        engine: Engine,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Monte Carlo seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        file: PathBuf,
    },
    /// Optimal cut system within the budget.
    Solve {
        #[arg(long, value_enum)]
        algo: SolveAlgo,
        file: PathBuf,
    },
    /// Apply a reduction; writes OUT and OUT.cert.json.
    Reduce {
        #[arg(value_enum)]
        kind: Reduction,
        /// Max 2SAT threshold for 2sat-wfl (overrides the file's `c threshold` line).
        #[arg(long)]
        k: Option<usize>,
        /// Cost bound for flatten-costs.
        #[arg(long)]
        f: Option<u64>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Generate a random instance.
    Gen {
        #[arg(value_enum)]
        kind: GenArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        output: PathBuf,
    },
    /// Run the gadget checks or the reduction equivalence suites.
    Verify {
        #[arg(value_enum)]
        suite: VerifySuite,
    },
    /// Time solvers over a suite file and write CSV.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a Graphviz rendering of an instance with its optimal cut.
    Export {
        #[arg(long = "dot")]
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Windy,
    Exact,
    Naive,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveAlgo {
    Tree,
    Exhaustive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Reduction {
    Partition,
    #[value(name = "3sat-2sat")]
    ThreeSatTwoSat,
    #[value(name = "2sat-wfl")]
    TwoSatWfl,
    FlattenValues,
    FlattenCosts,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenArg {
    Tree,
    Star,
    Grid,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifySuite {
    Gadgets,
    Chains,
}

/// An error with a machine-readable kind and its exit status.
#[derive(Debug)]
struct Failure {
    kind: &'static str,
    code: u8,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, code: u8, message: impl Into<String>) -> Self {
        Failure { kind, code, message: message.into() }
    }

    fn invalid(message: impl fmt::Display) -> Self {
        Failure::new("invalid_input", 1, message.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(&Failure::new("usage", 2, e.to_string().trim_end())),
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<Failure>() {
            Some(f) => report(f),
            None => report(&Failure::new("io", 1, format!("{e:#}"))),
        },
    }
}

fn report(f: &Failure) -> ExitCode {
    eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
    ExitCode::from(f.code)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Risk { engine, samples, seed, file } => match read_instance(&file)? {
            AnyInstance::Rational(i) => risk(&i, engine, samples, seed),
            AnyInstance::Float(i) => risk(&i, engine, samples, seed),
        },
        Command::Solve { algo, file } => match read_instance(&file)? {
            AnyInstance::Rational(i) => solve(&i, algo),
            AnyInstance::Float(i) => solve(&i, algo),
        },
        Command::Reduce { kind, k, f, input, output } => reduce(kind, k, f, &input, &output),
        Command::Gen { kind, n, seed, output } => {
            let kind = match kind {
                GenArg::Tree => GenKind::Tree,
                GenArg::Star => GenKind::Star,
                GenArg::Grid => GenKind::Grid,
                GenArg::Random => GenKind::Random,
            };
            let inst = generate(kind, n, seed).map_err(Failure::invalid)?;
            write(&output, &serialize_instance(&inst))
        }
        Command::Verify { suite } => verify(suite),
        Command::Bench { suite, out } => {
            let records = run_suite(&suite).map_err(Failure::invalid)?;
            write(&out, &to_csv(&records))?;
            println!("{} records written to {}", records.len(), out.display());
            Ok(())
        }
        Command::Export { file } => {
            let dot = match read_instance(&file)? {
                AnyInstance::Rational(i) => export(&i),
                AnyInstance::Float(i) => export(&i),
            };
            print!("{dot}");
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_instance(path: &Path) -> Result<AnyInstance> {
    let text = read_text(path)?;
    let inst = parse_instance_str(&text).map_err(|e| Failure::new("format", 1, format!("{}: {e}", path.display())))?;
    Ok(inst)
}

fn risk<T: Scalar>(inst: &Instance<T>, engine: Engine, samples: u64, seed: u64) -> Result<()> {
    let g = &inst.graph;
    let line = match engine {
        Engine::Windy => windy_risk(g).map(|r| format!("risk={}\nmethod=windy_exact", r.value)),
        Engine::Exact => exact_risk(g).map(|r| format!("risk={}\nmethod=enumeration", r.value)),
        Engine::Naive => naive_risk(g).map(|r| format!("risk={}\nmethod=enumeration", r.value)),
        Engine::Mc => mc_risk(g, samples, seed).map(|r| {
            format!(
                "risk={}\nmethod=monte_carlo\nstderr={}\nsamples={}",
                r.value,
                r.stderr.unwrap_or(0.0),
                r.samples.unwrap_or(samples)
            )
        }),
    }
    .map_err(Failure::invalid)?;
    println!("{line}");
    Ok(())
}

/// Cut links as `t-h` (undirected) or `t<>h` (opposite pair), one per link.
fn format_cuts<T: Scalar>(g: &MixedGraph<T>, cut: &CutSystem) -> String {
    cut.iter()
        .filter(|&e| g.edge(e).pair.is_none_or(|p| p > e))
        .map(|e| {
            let edge = g.edge(e);
            let sep = if edge.pair.is_some() { "<>" } else { "-" };
            format!("{}{sep}{}", edge.tail.0, edge.head.0)
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn solve<T: Scalar>(inst: &Instance<T>, algo: SolveAlgo) -> Result<()> {
    let sol: Solution<T> = match algo {
        SolveAlgo::Tree => solve_tree(inst).map_err(Failure::invalid)?,
        SolveAlgo::Exhaustive => solve_exhaustive(inst).map_err(Failure::invalid)?,
    };
    println!("saved={}", sol.saved);
    println!("risk={}", sol.risk);
    println!("cost={}", sol.cost);
    println!("cuts={}", format_cuts(&inst.graph, &sol.cut));
    if let Some(t) = &inst.risk_threshold {
        if sol.risk > *t {
            return Err(Failure::new(
                "infeasible",
                3,
                format!("optimal risk {} exceeds the risk threshold {t}", sol.risk),
            )
            .into());
        }
    }
    Ok(())
}

fn export<T: Scalar>(inst: &Instance<T>) -> String {
    let cut = solve_tree(inst).ok().map(|s| s.cut).or_else(|| solve_exhaustive(inst).ok().map(|s| s.cut));
    to_dot(&inst.graph, cut.as_ref())
}

fn cert_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".cert.json");
    PathBuf::from(name)
}

fn parse_weights(text: &str) -> Result<Vec<u64>, Failure> {
    let t = text.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| Failure::invalid(format!("weights: {e}")));
    }
    t.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .map(|w| w.parse().map_err(|_| Failure::invalid(format!("weights: `{w}` is not a non-negative integer"))))
        .collect()
}

fn reduce(kind: Reduction, k: Option<usize>, f: Option<u64>, input: &Path, output: &Path) -> Result<()> {
    if k.is_some() && kind != Reduction::TwoSatWfl {
        return Err(Failure::new("usage", 2, "--k only applies to 2sat-wfl").into());
    }
    if f.is_some() && kind != Reduction::FlattenCosts {
        return Err(Failure::new("usage", 2, "--f only applies to flatten-costs").into());
    }
    let text = read_text(input)?;
    let (body, cert): (String, ReductionCertificate) = match kind {
        Reduction::Partition => {
            let (inst, cert) = partition_to_star(&parse_weights(&text)?).map_err(Failure::invalid)?;
            (serialize_instance(&inst), cert)
        }
        Reduction::ThreeSatTwoSat => {
            let d = parse_cnf(&text).map_err(Failure::invalid)?;
            let red = r3sat_to_max2sat(&d.cnf).map_err(Failure::invalid)?;
            let cert = ReductionCertificate::new("3sat-max2sat")
                .with("K", red.instance.k)
                .with("clause_origin", serde_json::to_value(&red.origins)?)
                .with(
                    "fresh_vars",
                    json!(red.fresh_vars.iter().map(|(v, l)| json!({"var": v + 1, "label": l})).collect::<Vec<_>>()),
                );
            (write_max2sat(&red.instance), cert)
        }
        Reduction::TwoSatWfl => {
            let phi = parse_max2sat(&text, k).map_err(Failure::invalid)?;
            let (inst, cert) = max2sat_to_wfl(&phi).map_err(Failure::invalid)?;
            (serialize_instance(&inst), cert)
        }
        Reduction::FlattenValues => {
            let inst = parse_instance_str(&text).map_err(|e| Failure::new("format", 1, e.to_string()))?;
            match inst {
                AnyInstance::Rational(i) => {
                    let (out, cert) = flatten_values(&i).map_err(Failure::invalid)?;
                    (serialize_instance(&out), cert)
                }
                AnyInstance::Float(i) => {
                    let (out, cert) = flatten_values(&i).map_err(Failure::invalid)?;
                    (serialize_instance(&out), cert)
                }
            }
        }
        Reduction::FlattenCosts => {
            let inst: Instance<Rational> =
                parse_instance_as(&text).map_err(|e| Failure::new("format", 1, e.to_string()))?;
            let f = match f {
                Some(f) => f,
                None => default_cost_factor(&inst)
                    .ok_or_else(|| Failure::invalid("no default f: costs must be integers; pass --f"))?,
            };
            let (out, cert) = flatten_costs(&inst, f).map_err(Failure::invalid)?;
            (serialize_instance(&out), cert)
        }
    };
    write(output, &body)?;
    write(&cert_path(output), &cert.to_json_string())
}

fn verify(suite: VerifySuite) -> Result<()> {
    let mut failed = 0;
    match suite {
        VerifySuite::Gadgets => {
            for c in verify_gadget_claims().claims {
                println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
        }
        VerifySuite::Chains => {
            for r in [verify_partition_chain(), verify_3sat_chain(), verify_wfl_chain()] {
                println!(
                    "[{}] {}: {}/{} agree",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.name,
                    r.agreements,
                    r.instances
                );
                for f in &r.failures {
                    println!("    {f}");
                }
                failed += usize::from(!r.passed());
            }
        }
    }
    if failed > 0 {
        return Err(Failure::new("verification", 1, format!("{failed} checks failed")).into());
    }
    Ok(())
}
