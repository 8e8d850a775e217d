//! Acceptance checks. Prints one `[PASS]` or `[FAIL]` line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use firebreak::bench::tree_scaling;
use firebreak::exact::solve_exhaustive;
use firebreak::gen::{random_tree, TreeOptions};
use firebreak::reductions::chains::{verify_3sat_chain, verify_partition_chain, verify_wfl_chain};
use firebreak::reductions::{flatten_costs, flatten_values, verify_gadget_claims, ReductionCertificate};
use firebreak::risk::{exact_risk, mc_risk, naive_risk, windy_risk};
use firebreak::tree::solve_tree;
use firebreak::{CutSystem, EdgeId, EdgeSpec, Instance, MixedGraph, Rational, Scalar, Vertex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn r(p: i64, q: i64) -> Rational {
    Rational::from_ratio(p, q)
}

fn sample_tree() -> Instance<Rational> {
    firebreak::instance::parse_instance_as(include_str!("../../../data/sample_tree.json"))
        .expect("sample instance parses")
}

fn ac1() -> Outcome {
    let inst = sample_tree();
    let start = Instant::now();
    let sol = solve_tree(&inst).expect("tree solver runs");
    let elapsed = start.elapsed();
    let cuts: Vec<(usize, usize)> = sol
        .cut
        .iter()
        .map(|e| {
            let e = inst.graph.edge(e);
            (e.tail.0, e.head.0)
        })
        .collect();
    let want = vec![(3, 0), (3, 1), (7, 6)];
    outcome(
        sol.saved == Rational::from_u64(4) && cuts == want && elapsed < Duration::from_millis(10),
        format!("saved={} cuts={cuts:?} time={elapsed:?}", sol.saved),
    )
}

/// Random tree with shuffled labels; half the trees use unit weights.
fn oracle_tree(seed: u64) -> Instance<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=12);
    let unit = seed.is_multiple_of(2);
    let opts = TreeOptions {
        burn_rate: rng.gen_range(0.1..0.6),
        max_value: if unit { 1 } else { 4 },
        max_cost: if unit { 1 } else { 4 },
        budget: 0,
    };
    let base = random_tree::<f64>(n, rng.gen(), &opts).expect("valid options");
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut vertices = base.graph.vertices().to_vec();
    for (old, v) in base.graph.vertices().iter().enumerate() {
        vertices[perm[old]] = v.clone();
    }
    let specs = base
        .graph
        .edge_specs()
        .into_iter()
        .map(|s| EdgeSpec::undirected(perm[s.tail.0], perm[s.head.0], s.spread, s.cost))
        .collect();
    Instance::new(MixedGraph::build(vertices, specs).expect("relabelled tree"), 0.0, None).expect("valid")
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let trees = 500u64;
    let results: Vec<(usize, usize, Option<String>)> = (0..trees)
        .into_par_iter()
        .map(|seed| {
            let mut inst = oracle_tree(seed);
            let total: f64 = inst.graph.edges().iter().map(|e| e.cost).sum();
            let mut cases = 0;
            let mut agree = 0;
            let mut first_bad = None;
            for b in 0..=total as u64 {
                inst.budget = b as f64;
                let dp = solve_tree(&inst).map(|s| s.saved);
                let ex = solve_exhaustive(&inst).map(|s| s.saved);
                cases += 1;
                match (dp, ex) {
                    (Ok(a), Ok(e)) if a == e => agree += 1,
                    (dp, ex) => {
                        first_bad.get_or_insert(format!("seed {seed} B={b}: tree {dp:?} exhaustive {ex:?}"));
                    }
                }
            }
            (cases, agree, first_bad)
        })
        .collect();
    let cases: usize = results.iter().map(|r| r.0).sum();
    let agree: usize = results.iter().map(|r| r.1).sum();
    let bad = results.iter().find_map(|r| r.2.clone());
    let elapsed = start.elapsed();
    outcome(
        cases == agree && elapsed < Duration::from_secs(60),
        format!(
            "{trees} trees, {agree}/{cases} (tree, budget) cases agree, time={elapsed:.2?}{}",
            bad.map(|b| format!("; first mismatch: {b}")).unwrap_or_default()
        ),
    )
}

fn two_p3(p: &Rational, q: &Rational, nu: &Rational) -> MixedGraph<Rational> {
    let vs = (0..2).flat_map(|_| [(p, nu), (q, nu), (p, nu)]).map(|(i, v)| Vertex::new(v.clone(), i.clone())).collect();
    let one = Rational::from_u64(1);
    let es = [(0, 1), (1, 2), (3, 4), (4, 5)]
        .into_iter()
        .map(|(a, b)| EdgeSpec::undirected(a, b, one.clone(), one.clone()))
        .collect();
    MixedGraph::build(vs, es).expect("two paths")
}

fn ac3() -> Outcome {
    let nu = Rational::from_u64(176);
    let ps = [r(0, 1), r(1, 4), r(1, 2), r(2, 3), r(1, 1)];
    let qs = [r(0, 1), r(1, 2), r(1, 1)];
    let mut ok = 0;
    let mut bad = Vec::new();
    for p in &ps {
        for q in &qs {
            let g = two_p3(p, q, &nu);
            // H1: both edges of the first path; H2: one edge of each path
            let h1 = g.remove_cut(&CutSystem::from_edges([EdgeId(0), EdgeId(1)])).expect("closed");
            let h2 = g.remove_cut(&CutSystem::from_edges([EdgeId(1), EdgeId(3)])).expect("closed");
            let diff = windy_risk(&h1).expect("windy").value - windy_risk(&h2).expect("windy").value;
            let one = Rational::from_u64(1);
            let want = p * (Rational::from_u64(2) - Rational::from_u64(3) * p) * (&one - q) * &nu;
            if diff == want {
                ok += 1;
            } else {
                bad.push(format!("p={p} q={q}: {diff} vs {want}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{ok}/15 grid points exact{}",
            if bad.is_empty() { String::new() } else { format!("; {}", bad.join(", ")) }
        ),
    )
}

/// Random mixed graph with `|V| + |E| ≤ budget`.
fn small_graph(rng: &mut ChaCha8Rng, size: usize, windy: bool) -> MixedGraph<Rational> {
    let n = rng.gen_range(1..=size.min(6));
    let vs =
        (0..n).map(|_| Vertex::new(Rational::from_u64(rng.gen_range(0..=3)), r(rng.gen_range(0..=4), 4))).collect();
    let mut specs = Vec::new();
    let mut seen = BTreeSet::new();
    let spread = |rng: &mut ChaCha8Rng| if windy { r(1, 1) } else { r(rng.gen_range(0..=4), 4) };
    for _ in 0..size {
        if n < 2 || n + specs.len() >= size {
            break;
        }
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b || !seen.insert((a.min(b), a.max(b))) {
            continue;
        }
        let cost = Rational::from_u64(1);
        match rng.gen_range(0..3) {
            0 => specs.push(EdgeSpec::undirected(a, b, spread(rng), cost)),
            1 => specs.push(EdgeSpec::directed(a, b, spread(rng), cost)),
            _ if n + specs.len() + 2 <= size => {
                specs.push(EdgeSpec::directed(a, b, spread(rng), cost.clone()));
                specs.push(EdgeSpec::directed(b, a, spread(rng), cost));
            }
            _ => specs.push(EdgeSpec::directed(b, a, spread(rng), cost)),
        }
    }
    MixedGraph::build(vs, specs).expect("generated graph is valid")
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut agree = 0;
    let total = 250;
    for _ in 0..total {
        let g = small_graph(&mut rng, 10, false);
        if exact_risk(&g).expect("exact").value == naive_risk(&g).expect("naive").value {
            agree += 1;
        }
    }
    let mut within = 0;
    let mc_total = 100;
    for i in 0..mc_total {
        let g = small_graph(&mut rng, 14, i % 2 == 0);
        let exact = exact_risk(&g).expect("exact").value.to_f64();
        let mc = mc_risk(&g, 10_000, i as u64).expect("mc");
        let se = mc.stderr.unwrap_or(0.0);
        if (mc.value - exact).abs() <= 5.0 * se + 1e-12 * exact.abs().max(1.0) {
            within += 1;
        }
    }
    outcome(
        agree == total && within >= 95,
        format!("exact = naive on {agree}/{total}; Monte Carlo within 5 stderr on {within}/{mc_total}"),
    )
}

fn ac5() -> Outcome {
    let start = Instant::now();
    let report = verify_gadget_claims();
    let elapsed = start.elapsed();
    let passed = report.claims.iter().filter(|c| c.passed).count();
    outcome(
        report.all_passed() && report.claims.len() == 4 && elapsed < Duration::from_secs(1),
        format!("{passed}/{} claims, time={elapsed:.2?}", report.claims.len()),
    )
}

fn ac6() -> Outcome {
    let start = Instant::now();
    let reports = [verify_partition_chain(), verify_3sat_chain(), verify_wfl_chain()];
    let elapsed = start.elapsed();
    let detail: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "{} {}/{}{}",
                r.name,
                r.agreements,
                r.instances,
                r.failures.first().map(|f| format!(" ({f})")).unwrap_or_default()
            )
        })
        .collect();
    outcome(
        reports.iter().all(|r| r.passed()) && elapsed < Duration::from_secs(300),
        format!("{}; time={elapsed:.2?}", detail.join(", ")),
    )
}

/// Windy instance on at most 8 vertices: random tree plus extra links.
fn windy_instance(rng: &mut ChaCha8Rng, unit_values: bool, ignition_den: i64) -> Instance<Rational> {
    let n = rng.gen_range(2..=if unit_values { 4 } else { 8 });
    let vs = (0..n)
        .map(|_| {
            let v = if unit_values { 1 } else { rng.gen_range(1..=3) };
            Vertex::new(Rational::from_u64(v), r(rng.gen_range(0..=ignition_den), ignition_den))
        })
        .collect();
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    let mut seen: BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
    for _ in 0..n / 2 {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && seen.insert((a.min(b), a.max(b))) {
            pairs.push((a, b));
        }
    }
    let one = Rational::from_u64(1);
    let mut specs = Vec::new();
    for (a, b) in pairs {
        let cost = Rational::from_u64(rng.gen_range(1..=2));
        match rng.gen_range(0..3) {
            0 => specs.push(EdgeSpec::undirected(a, b, one.clone(), cost)),
            1 => specs.push(EdgeSpec::directed(a, b, one.clone(), cost)),
            _ => {
                specs.push(EdgeSpec::directed(a, b, one.clone(), cost.clone()));
                specs.push(EdgeSpec::directed(b, a, one.clone(), cost));
            }
        }
    }
    let budget = Rational::from_u64(rng.gen_range(0..=3));
    let threshold = Rational::from_u64(rng.gen_range(1..=3));
    Instance::new(MixedGraph::build(vs, specs).expect("valid"), budget, Some(threshold)).expect("valid")
}

/// Every closed cut system of `g` with cost at most `budget`, as input edge ids.
fn cuts_within_budget(g: &MixedGraph<Rational>, budget: &Rational) -> Vec<Vec<usize>> {
    let links = g.links();
    let mut out = Vec::new();
    for mask in 0u32..1 << links.len() {
        let edges: Vec<usize> = links
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .flat_map(|(_, l)| l.edges.iter().map(|e| e.0))
            .collect();
        let h = CutSystem::from_edges(edges.iter().map(|&e| EdgeId(e)));
        if g.cut_cost(&h) <= *budget {
            out.push(edges);
        }
    }
    out
}

fn image(cert: &ReductionCertificate, cut: &[usize]) -> CutSystem {
    CutSystem::from_edges(cert.map_edges(cut.iter().copied()).into_iter().map(EdgeId))
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut value_ok = 0;
    let mut value_cuts = 0;
    let value_total = 60;
    for _ in 0..value_total {
        let inst = windy_instance(&mut rng, false, 4);
        let (out, cert) = flatten_values(&inst).expect("flatten values");
        let mut all = true;
        for cut in cuts_within_budget(&inst.graph, &inst.budget) {
            value_cuts += 1;
            let before = windy_risk(
                &inst.graph.remove_cut(&CutSystem::from_edges(cut.iter().map(|&e| EdgeId(e)))).expect("closed"),
            );
            let after = windy_risk(&out.graph.remove_cut(&image(&cert, &cut)).expect("closed"));
            all &= before.expect("windy").value == after.expect("windy").value;
        }
        value_ok += usize::from(all && out.graph.vertices().iter().all(|v| v.value == Rational::from_u64(1)));
    }

    let mut cost_ok = 0;
    let mut cost_cuts = 0;
    let mut worst = 0.0f64;
    let cost_total = 24;
    for _ in 0..cost_total {
        let inst = windy_instance(&mut rng, true, 2);
        let (out, cert) = flatten_costs(&inst, 2).expect("flatten costs");
        let cells = cert.parameters["cells_per_grid"].as_u64().expect("grid size") as f64;
        let mut all = out.graph.edges().iter().all(|e| e.cost == 1.0);
        for cut in cuts_within_budget(&inst.graph, &inst.budget) {
            cost_cuts += 1;
            let h = CutSystem::from_edges(cut.iter().map(|&e| EdgeId(e)));
            let h2 = image(&cert, &cut);
            all &= out.graph.cut_cost(&h2) == inst.graph.cut_cost(&h).to_f64();
            let want = windy_risk(&inst.graph.remove_cut(&h).expect("closed")).expect("windy").value.to_f64() * cells;
            let got = windy_risk(&out.graph.remove_cut(&h2).expect("closed")).expect("windy").value;
            let rel = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
            if want != 0.0 || got != 0.0 {
                worst = worst.max(rel);
            }
            all &= got == want || rel <= 1e-9;
        }
        cost_ok += usize::from(all);
    }
    outcome(
        value_ok == value_total && cost_ok == cost_total,
        format!(
            "value flattening {value_ok}/{value_total} instances ({value_cuts} cuts) exact; \
             cost flattening {cost_ok}/{cost_total} instances ({cost_cuts} cuts), worst relative error {worst:.1e}"
        ),
    )
}

fn ac8() -> Outcome {
    let sizes = [1_000, 10_000];
    let budgets = [10, 50, 100];
    let rows = match tree_scaling(&sizes, &budgets, 8, 5) {
        Ok(rows) => rows,
        Err(e) => return outcome(false, e.to_string()),
    };
    // Least squares in log space for log t = log c + log V + 2 log B gives
    // c as the geometric mean of t/(V·B²).
    let norm: Vec<f64> = rows.iter().map(|&(n, b, ms)| ms / (n as f64 * (b * b) as f64)).collect();
    let c = (norm.iter().map(|x| x.ln()).sum::<f64>() / norm.len() as f64).exp();
    let worst = norm.iter().map(|x| (x / c).max(c / x)).fold(1.0, f64::max);
    let at = |n: usize, b: u64| rows.iter().find(|r| r.0 == n && r.1 == b).map(|r| r.2).unwrap_or(f64::NAN);
    let slope_v: Vec<String> =
        budgets.iter().map(|&b| format!("{:.2}", (at(10_000, b) / at(1_000, b)).log10())).collect();
    let slope_b: Vec<String> = sizes.iter().map(|&n| format!("{:.2}", (at(n, 100) / at(n, 10)).log10())).collect();
    let table: Vec<String> = rows.iter().map(|(n, b, ms)| format!("V={n} B={b}: {ms:.1} ms")).collect();
    outcome(
        worst <= 3.0,
        format!(
            "fitted c = {c:.3e} ms, worst deviation from c·V·B² ×{worst:.2}; log-log slope in V [{}], in B [{}]; {}",
            slope_v.join(", "),
            slope_b.join(", "),
            table.join(", ")
        ),
    )
}

fn main() {
    type Check = (&'static str, &'static str, fn() -> Outcome);
    let checks: [Check; 8] = [
        ("AC1", "sample tree: saved 4 with the expected cut set", ac1),
        ("AC2", "tree DP equals exhaustive search", ac2),
        ("AC3", "two-path risk difference identity", ac3),
        ("AC4", "risk engine agreement", ac4),
        ("AC5", "gadget claims", ac5),
        ("AC6", "reduction chain equivalences", ac6),
        ("AC7", "flattening fidelity", ac7),
        ("AC8", "tree DP scaling with |V|·B²", ac8),
    ];
    let mut failed = 0;
    for (id, name, check) in checks {
        let o = check();
        println!("[{}] {id} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
