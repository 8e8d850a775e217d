//! CNF and Max 2SAT instances, the 3SAT → Max 2SAT gadget construction,
//! exhaustive Max 2SAT, and the gadget claims checked by enumeration.

use std::fmt;

use serde::Serialize;

use super::ReductionError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    pub fn negate(self) -> Self {
        Literal { var: self.var, positive: !self.positive }
    }

    /// `assignment` bit `v` holds the value of variable `v`.
    pub fn eval(self, assignment: u64) -> bool {
        (assignment >> self.var & 1 == 1) == self.positive
    }

    /// Signed 1-based DIMACS form.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(x: i64) -> Option<Self> {
        if x == 0 {
            return None;
        }
        let var = (x.unsigned_abs() - 1) as usize;
        Some(Literal { var, positive: x > 0 })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

fn check_clause(clause: &[Literal], num_vars: usize, index: usize) -> Result<(), ReductionError> {
    for (i, a) in clause.iter().enumerate() {
        if a.var >= num_vars {
            return Err(ReductionError::Invalid(format!(
                "clause {index} uses variable {} but there are only {num_vars}",
                a.var + 1
            )));
        }
        for b in &clause[i + 1..] {
            if a.var == b.var {
                return Err(ReductionError::Invalid(format!("clause {index} mentions variable {} twice", a.var + 1)));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Literal>>,
}

impl CnfInstance {
    /// Rejects empty clauses, repeated variables within a clause, and
    /// out-of-range variables.
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, ReductionError> {
        for (i, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(ReductionError::Invalid(format!("clause {i} is empty")));
            }
            check_clause(c, num_vars, i)?;
        }
        Ok(CnfInstance { num_vars, clauses })
    }

    pub fn is_satisfied_by(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    /// Exhaustive satisfiability check.
    pub fn brute_satisfiable(&self) -> Result<bool, ReductionError> {
        if self.num_vars > MAX2SAT_VAR_BOUND {
            return Err(ReductionError::TooLarge(format!(
                "{} variables exceed the bound of {MAX2SAT_VAR_BOUND}",
                self.num_vars
            )));
        }
        Ok((0u64..1 << self.num_vars).any(|a| self.is_satisfied_by(a)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Max2SatInstance {
    pub num_vars: usize,
    pub clauses: Vec<[Literal; 2]>,
    pub k: usize,
}

impl Max2SatInstance {
    pub fn new(num_vars: usize, clauses: Vec<[Literal; 2]>, k: usize) -> Result<Self, ReductionError> {
        for (i, c) in clauses.iter().enumerate() {
            check_clause(c, num_vars, i)?;
        }
        if k > clauses.len() {
            return Err(ReductionError::Invalid(format!("threshold {k} exceeds the clause count {}", clauses.len())));
        }
        Ok(Max2SatInstance { num_vars, clauses, k })
    }

    pub fn satisfied_count(&self, assignment: u64) -> usize {
        count_satisfied(&self.clauses, assignment)
    }

    /// Largest number of clauses mentioning any single literal.
    pub fn max_literal_frequency(&self) -> usize {
        let mut counts = vec![0usize; 2 * self.num_vars];
        for c in &self.clauses {
            for l in c {
                counts[2 * l.var + usize::from(!l.positive)] += 1;
            }
        }
        counts.into_iter().max().unwrap_or(0)
    }
}

pub fn count_satisfied(clauses: &[[Literal; 2]], assignment: u64) -> usize {
    clauses.iter().filter(|c| c[0].eval(assignment) || c[1].eval(assignment)).count()
}

pub const MAX2SAT_VAR_BOUND: usize = 24;

/// The ten clauses attached to a 3-clause `(l1, l2, l3)` with fresh variable
/// `a`, unit clauses written as one-element vectors.
pub fn three_clause_gadget(l: [Literal; 3], a: usize) -> Vec<Vec<Literal>> {
    let a = Literal::pos(a);
    vec![
        vec![l[0], l[1]],
        vec![l[0], l[2]],
        vec![l[1], l[2]],
        vec![l[0], a],
        vec![l[1], a],
        vec![l[2], a],
        vec![l[0].negate()],
        vec![l[1].negate()],
        vec![l[2].negate()],
        vec![a.negate()],
    ]
}

/// Eight clauses on fresh `x, y, z` of which exactly six hold under any
/// assignment.
pub fn two_clause_gadget(x: usize, y: usize, z: usize) -> Vec<[Literal; 2]> {
    let (x, y, z) = (Literal::pos(x), Literal::pos(y), Literal::pos(z));
    vec![
        [x, y],
        [x, y.negate()],
        [x, z],
        [x, z.negate()],
        [x.negate(), y],
        [x.negate(), y.negate()],
        [x.negate(), z],
        [x.negate(), z.negate()],
    ]
}

/// A unit clause `(l)` as the pair `(l, r), (l, ¬r)` on fresh `r`.
pub fn unit_expansion(l: Literal, r: usize) -> [[Literal; 2]; 2] {
    [[l, Literal::pos(r)], [l, Literal::neg(r)]]
}

/// Where each output clause of the 3SAT → Max 2SAT construction came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseOrigin {
    pub source_clause: usize,
    pub gadget: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Max2SatReduction {
    pub instance: Max2SatInstance,
    pub origins: Vec<ClauseOrigin>,
    pub fresh_vars: Vec<(usize, String)>,
}

/// 3SAT (clauses of size 2 and 3) to Max 2SAT with threshold
/// `K = 7|C| + 4|C₃|`.
pub fn r3sat_to_max2sat(cnf: &CnfInstance) -> Result<Max2SatReduction, ReductionError> {
    let mut next = cnf.num_vars;
    let mut fresh = |label: String, names: &mut Vec<(usize, String)>| {
        let v = next;
        next += 1;
        names.push((v, label));
        v
    };
    let mut names = Vec::new();
    let mut clauses = Vec::new();
    let mut origins = Vec::new();
    let mut threes = 0;
    for (ci, c) in cnf.clauses.iter().enumerate() {
        match c.as_slice() {
            &[l1, l2, l3] => {
                threes += 1;
                let a = fresh(format!("a[{ci}]"), &mut names);
                for g in three_clause_gadget([l1, l2, l3], a) {
                    match *g.as_slice() {
                        [x, y] => {
                            clauses.push([x, y]);
                            origins.push(ClauseOrigin { source_clause: ci, gadget: "three-clause" });
                        }
                        [l] => {
                            let r = fresh(format!("r[{ci}:{}]", l.to_dimacs()), &mut names);
                            for pair in unit_expansion(l, r) {
                                clauses.push(pair);
                                origins.push(ClauseOrigin { source_clause: ci, gadget: "unit-expansion" });
                            }
                        }
                        _ => unreachable!(),
                    }
                }
            }
            &[l1, l2] => {
                clauses.push([l1, l2]);
                origins.push(ClauseOrigin { source_clause: ci, gadget: "original" });
                let x = fresh(format!("x[{ci}]"), &mut names);
                let y = fresh(format!("y[{ci}]"), &mut names);
                let z = fresh(format!("z[{ci}]"), &mut names);
                for pair in two_clause_gadget(x, y, z) {
                    clauses.push(pair);
                    origins.push(ClauseOrigin { source_clause: ci, gadget: "two-clause" });
                }
            }
            other => {
                return Err(ReductionError::Invalid(format!(
                    "clause {ci} has {} literals; only 2- and 3-clauses are accepted",
                    other.len()
                )))
            }
        }
    }
    let k = 7 * cnf.clauses.len() + 4 * threes;
    Ok(Max2SatReduction { instance: Max2SatInstance::new(next, clauses, k)?, origins, fresh_vars: names })
}

/// Maximum number of simultaneously satisfied clauses.
pub fn max2sat_brute(phi: &Max2SatInstance) -> Result<usize, ReductionError> {
    if phi.num_vars > MAX2SAT_VAR_BOUND {
        return Err(ReductionError::TooLarge(format!(
            "{} variables exceed the bound of {MAX2SAT_VAR_BOUND}",
            phi.num_vars
        )));
    }
    let mut search = BranchAndBound::new(phi);
    search.run(0, 0);
    Ok(search.best)
}

/// Whether some assignment satisfies at least `k` clauses; stops at the
/// first such assignment.
pub fn max2sat_reaches(phi: &Max2SatInstance, k: usize) -> Result<bool, ReductionError> {
    if phi.num_vars > MAX2SAT_VAR_BOUND {
        return Err(ReductionError::TooLarge(format!(
            "{} variables exceed the bound of {MAX2SAT_VAR_BOUND}",
            phi.num_vars
        )));
    }
    if k == 0 {
        return Ok(true);
    }
    let mut search = BranchAndBound::new(phi);
    search.best = k - 1;
    search.stop_at = Some(k);
    search.run(0, 0);
    Ok(search.best >= k)
}

/// Plain enumeration of all assignments; slow but obviously correct.
pub fn max2sat_enumerate(phi: &Max2SatInstance) -> Result<usize, ReductionError> {
    if phi.num_vars > MAX2SAT_VAR_BOUND {
        return Err(ReductionError::TooLarge(format!(
            "{} variables exceed the bound of {MAX2SAT_VAR_BOUND}",
            phi.num_vars
        )));
    }
    Ok((0u64..1 << phi.num_vars).map(|a| phi.satisfied_count(a)).max().unwrap_or(0))
}

/// Depth-first search over variables in index order. The bound counts every
/// clause with two free literals as satisfiable and, per free variable, the
/// larger of its positive and negative "unit" clauses (clauses whose other
/// literal is already false).
struct BranchAndBound<'a> {
    phi: &'a Max2SatInstance,
    /// Clauses indexed by their larger variable, so a clause is decided once
    /// that variable is assigned.
    by_last: Vec<Vec<usize>>,
    best: usize,
    stop_at: Option<usize>,
    assignment: u64,
}

impl<'a> BranchAndBound<'a> {
    fn new(phi: &'a Max2SatInstance) -> Self {
        let mut by_last = vec![Vec::new(); phi.num_vars];
        for (i, c) in phi.clauses.iter().enumerate() {
            by_last[c[0].var.max(c[1].var)].push(i);
        }
        BranchAndBound { phi, by_last, best: 0, stop_at: None, assignment: 0 }
    }

    fn upper_bound(&self, depth: usize, satisfied: usize) -> usize {
        let mut units = vec![[0usize; 2]; self.phi.num_vars];
        let mut free = 0;
        for v in depth..self.phi.num_vars {
            for &ci in &self.by_last[v] {
                let c = self.phi.clauses[ci];
                let (lo, hi) = if c[0].var < c[1].var { (c[0], c[1]) } else { (c[1], c[0]) };
                // Either both literals are open or the assigned one already holds.
                if lo.var >= depth || lo.eval(self.assignment) {
                    free += 1;
                } else {
                    units[hi.var][usize::from(hi.positive)] += 1;
                }
            }
        }
        satisfied + free + units.iter().map(|u| u[0].max(u[1])).sum::<usize>()
    }

    fn run(&mut self, depth: usize, satisfied: usize) {
        if depth == self.phi.num_vars {
            self.best = self.best.max(satisfied);
            return;
        }
        if self.upper_bound(depth, satisfied) <= self.best || self.stop_at.is_some_and(|k| self.best >= k) {
            return;
        }
        for value in [true, false] {
            if value {
                self.assignment |= 1 << depth;
            } else {
                self.assignment &= !(1 << depth);
            }
            let gained = self.by_last[depth]
                .iter()
                .filter(|&&ci| {
                    let c = self.phi.clauses[ci];
                    c[0].eval(self.assignment) || c[1].eval(self.assignment)
                })
                .count();
            self.run(depth + 1, satisfied + gained);
        }
        self.assignment &= !(1 << depth);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Exhaustive checks of the gadget properties the reduction relies on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetReport {
    pub claims: Vec<ClaimCheck>,
}

impl GadgetReport {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }
}

fn count_mixed(clauses: &[Vec<Literal>], assignment: u64) -> usize {
    clauses.iter().filter(|c| c.iter().any(|l| l.eval(assignment))).count()
}

pub fn verify_gadget_claims() -> GadgetReport {
    verify_gadget_claims_with(two_clause_gadget(3, 4, 5))
}

/// As [`verify_gadget_claims`], with the eight-clause gadget supplied on
/// variables 3, 4, 5 (lets tests check that a broken gadget is caught).
pub fn verify_gadget_claims_with(two_clause: Vec<[Literal; 2]>) -> GadgetReport {
    // variables 0..3 are l1..l3 (positive literals suffice by symmetry of the
    // check: every sign pattern is covered by enumerating their values), 3 is a
    let ten = three_clause_gadget([Literal::pos(0), Literal::pos(1), Literal::pos(2)], 3);

    let mut max_seen = 0;
    for a in 0u64..16 {
        max_seen = max_seen.max(count_mixed(&ten, a));
    }
    let claim1 = ClaimCheck {
        name: "three-clause gadget satisfies at most 7 of 10",
        passed: max_seen <= 7,
        detail: format!("maximum over 16 assignments: {max_seen}"),
    };

    let mut ok2 = true;
    let mut detail2 = Vec::new();
    for lits in 0u64..8 {
        let satisfied = lits != 0;
        let best = (0..2u64).map(|av| count_mixed(&ten, lits | av << 3)).max().unwrap_or(0);
        let good = if satisfied { best == 7 } else { best <= 6 };
        if !good {
            ok2 = false;
            detail2.push(format!("literals {lits:03b}: best {best}"));
        }
    }
    let claim2 = ClaimCheck {
        name: "unsatisfied 3-clause allows at most 6, satisfied allows 7",
        passed: ok2,
        detail: if ok2 { "8 literal patterns checked".into() } else { detail2.join("; ") },
    };

    let counts: Vec<usize> = (0u64..8).map(|a| count_satisfied(&two_clause, a << 3)).collect();
    let claim4 = ClaimCheck {
        name: "two-clause gadget satisfies exactly 6 of 8 under every assignment",
        passed: counts.iter().all(|&c| c == 6),
        detail: format!("counts over 8 assignments: {counts:?}"),
    };

    let mut ok_unit = true;
    for a in 0u64..4 {
        let l = Literal::pos(0);
        let pair = unit_expansion(l, 1);
        let got = count_satisfied(&pair, a);
        let want = if l.eval(a) { 2 } else { 1 };
        ok_unit &= got == want;
    }
    let claim_unit = ClaimCheck {
        name: "unit expansion: both hold if the literal is true, else exactly one",
        passed: ok_unit,
        detail: "4 assignments checked".into(),
    };

    GadgetReport { claims: vec![claim1, claim2, claim4, claim_unit] }
}
