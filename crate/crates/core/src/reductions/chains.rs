//! Brute-force equivalence checks for the reduction chains on every small
//! input of a family.

use rayon::prelude::*;
use serde::Serialize;

use crate::exact::decide;

use super::partition::{partition_brute, partition_to_star};
use super::sat::{max2sat_reaches, r3sat_to_max2sat, CnfInstance, Literal, Max2SatInstance};
use super::wfl::max2sat_to_wfl;
use super::ReductionError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub name: &'static str,
    pub instances: usize,
    pub agreements: usize,
    /// Up to ten disagreeing or failing inputs.
    pub failures: Vec<String>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.instances > 0 && self.agreements == self.instances
    }

    fn collect<I: Send + Sync>(
        name: &'static str,
        inputs: Vec<I>,
        check: impl Fn(&I) -> Result<bool, String> + Sync,
    ) -> Self {
        let results: Vec<Result<bool, String>> = inputs.par_iter().map(&check).collect();
        let agreements = results.iter().filter(|r| matches!(r, Ok(true))).count();
        let failures = results
            .iter()
            .enumerate()
            .filter_map(|(i, r)| match r {
                Ok(true) => None,
                Ok(false) => Some(format!("input {i}: disagreement")),
                Err(e) => Some(format!("input {i}: {e}")),
            })
            .take(10)
            .collect();
        ChainReport { name, instances: inputs.len(), agreements, failures }
    }
}

/// Non-decreasing sequences of length `1..=max_len` over `1..=max_value`.
pub fn small_multisets(max_len: usize, max_value: u64) -> Vec<Vec<u64>> {
    fn extend(prefix: &mut Vec<u64>, max_len: usize, max_value: u64, out: &mut Vec<Vec<u64>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        if prefix.len() == max_len {
            return;
        }
        let start = prefix.last().copied().unwrap_or(1);
        for x in start..=max_value {
            prefix.push(x);
            extend(prefix, max_len, max_value, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), max_len, max_value, &mut out);
    out
}

/// Partition against the star instance, on every even-sum multiset of at most
/// five integers in `1..=6`.
pub fn verify_partition_chain() -> ChainReport {
    let inputs: Vec<Vec<u64>> = small_multisets(5, 6).into_iter().filter(|s| s.iter().sum::<u64>() % 2 == 0).collect();
    ChainReport::collect("partition-star", inputs, |s| {
        let (inst, _) = partition_to_star(s).map_err(|e| e.to_string())?;
        let star = decide(&inst).map_err(|e| e.to_string())?;
        Ok(star == partition_brute(s))
    })
}

/// All clauses over `n` variables with `size` distinct variables.
fn all_clauses(n: usize, size: usize) -> Vec<Vec<Literal>> {
    let mut out = Vec::new();
    for vars in 0u32..1 << n {
        if vars.count_ones() as usize != size {
            continue;
        }
        let vs: Vec<usize> = (0..n).filter(|&v| vars >> v & 1 == 1).collect();
        for signs in 0u32..1 << size {
            out.push(vs.iter().enumerate().map(|(i, &v)| Literal { var: v, positive: signs >> i & 1 == 0 }).collect());
        }
    }
    out
}

/// Sets of `1..=max` distinct items, as index lists in increasing order.
fn subsets_up_to(count: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(start: usize, count: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..count {
            cur.push(i);
            go(i + 1, count, max, cur, out);
            cur.pop();
        }
    }
    go(0, count, max, &mut Vec::new(), &mut out);
    out
}

/// Every 2/3-CNF with 1 to 3 distinct clauses over 2 to 4 variables.
pub fn small_cnfs() -> Vec<CnfInstance> {
    let mut out = Vec::new();
    for n in 2..=4 {
        let mut clauses = all_clauses(n, 2);
        clauses.extend(all_clauses(n, 3));
        for pick in subsets_up_to(clauses.len(), 3) {
            let cs = pick.iter().map(|&i| clauses[i].clone()).collect();
            out.push(CnfInstance::new(n, cs).expect("generated clauses are valid"));
        }
    }
    out
}

/// Satisfiability of the CNF against "Max 2SAT optimum ≥ K" of its image.
pub fn verify_3sat_chain() -> ChainReport {
    ChainReport::collect("3sat-max2sat", small_cnfs(), |cnf| {
        let red = r3sat_to_max2sat(cnf).map_err(|e| e.to_string())?;
        let sat = cnf.brute_satisfiable().map_err(|e| e.to_string())?;
        let reaches = max2sat_reaches(&red.instance, red.instance.k).map_err(|e| e.to_string())?;
        Ok(sat == reaches)
    })
}

/// Every Max 2SAT instance with 2 or 3 variables, 1 to 3 distinct clauses and
/// each threshold `1..=m`.
pub fn small_max2sat() -> Vec<Max2SatInstance> {
    let mut out = Vec::new();
    for n in 2..=3 {
        let clauses = all_clauses(n, 2);
        for pick in subsets_up_to(clauses.len(), 3) {
            let cs: Vec<[Literal; 2]> = pick.iter().map(|&i| [clauses[i][0], clauses[i][1]]).collect();
            for k in 1..=cs.len() {
                out.push(Max2SatInstance::new(n, cs.clone(), k).expect("generated clauses are valid"));
            }
        }
    }
    out
}

pub fn max2sat_wfl_agrees(phi: &Max2SatInstance) -> Result<bool, ReductionError> {
    let (inst, _) = max2sat_to_wfl(phi)?;
    Ok(max2sat_reaches(phi, phi.k)? == decide(&inst)?)
}

/// "Max 2SAT optimum ≥ K" against the decision on the constructed instance.
pub fn verify_wfl_chain() -> ChainReport {
    ChainReport::collect("max2sat-wfl", small_max2sat(), |phi| max2sat_wfl_agrees(phi).map_err(|e| e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        // multisets of size ≤ 5 over 6 values: C(6+5, 5) − 1
        assert_eq!(small_multisets(5, 6).len(), 461);
        assert_eq!(all_clauses(4, 2).len(), 24);
        assert_eq!(all_clauses(4, 3).len(), 32);
        assert_eq!(small_max2sat().len(), 28 + 804);
    }

    #[test]
    fn partition_chain_passes() {
        let r = verify_partition_chain();
        assert!(r.passed(), "{r:?}");
    }
}
