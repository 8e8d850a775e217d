//! DIMACS CNF reading and writing. A Max 2SAT threshold travels in a
//! `c threshold K` comment line.

use std::fmt::Write;

use thiserror::Error;

use crate::reductions::sat::{CnfInstance, Literal, Max2SatInstance};
use crate::reductions::ReductionError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] ReductionError),
}

fn syntax(line: usize, message: impl Into<String>) -> DimacsError {
    DimacsError::Syntax { line, message: message.into() }
}

/// A parsed CNF with the threshold comment, if present.
#[derive(Debug, Clone, PartialEq)]
pub struct DimacsCnf {
    pub cnf: CnfInstance,
    pub threshold: Option<usize>,
}

pub fn parse_cnf(text: &str) -> Result<DimacsCnf, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut threshold = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if let Some(comment) = t.strip_prefix('c') {
            let mut words = comment.split_whitespace();
            if words.next() == Some("threshold") {
                let k = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| syntax(line, "malformed threshold comment"))?;
                threshold = Some(k);
            }
            continue;
        }
        if let Some(rest) = t.strip_prefix('p') {
            if header.is_some() {
                return Err(syntax(line, "duplicate problem line"));
            }
            let words: Vec<&str> = rest.split_whitespace().collect();
            match words.as_slice() {
                ["cnf", n, m] => {
                    let n = n.parse().map_err(|_| syntax(line, "bad variable count"))?;
                    let m = m.parse().map_err(|_| syntax(line, "bad clause count"))?;
                    header = Some((n, m));
                }
                _ => return Err(syntax(line, "expected `p cnf VARS CLAUSES`")),
            }
            continue;
        }
        let (n, _) = header.ok_or_else(|| syntax(line, "clause before the problem line"))?;
        for w in t.split_whitespace() {
            let x: i64 = w.parse().map_err(|_| syntax(line, format!("`{w}` is not an integer")))?;
            match Literal::from_dimacs(x) {
                None => clauses.push(std::mem::take(&mut current)),
                Some(l) if l.var < n => current.push(l),
                Some(_) => return Err(syntax(line, format!("literal {x} exceeds the {n} declared variables"))),
            }
        }
    }
    let (n, m) = header.ok_or_else(|| syntax(last_line.max(1), "missing problem line"))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != m {
        return Err(syntax(last_line.max(1), format!("declared {m} clauses, found {}", clauses.len())));
    }
    Ok(DimacsCnf { cnf: CnfInstance::new(n, clauses)?, threshold })
}

/// Reads a Max 2SAT instance; `k` overrides the file's threshold comment.
pub fn parse_max2sat(text: &str, k: Option<usize>) -> Result<Max2SatInstance, DimacsError> {
    let d = parse_cnf(text)?;
    let k = k.or(d.threshold).ok_or_else(|| syntax(1, "no threshold: add `c threshold K` or pass K"))?;
    let mut clauses = Vec::with_capacity(d.cnf.clauses.len());
    for (i, c) in d.cnf.clauses.iter().enumerate() {
        match c.as_slice() {
            &[a, b] => clauses.push([a, b]),
            _ => return Err(ReductionError::Invalid(format!("clause {i} has {} literals, expected 2", c.len())).into()),
        }
    }
    Ok(Max2SatInstance::new(d.cnf.num_vars, clauses, k)?)
}

pub fn write_cnf(cnf: &CnfInstance, threshold: Option<usize>) -> String {
    let mut s = String::new();
    if let Some(k) = threshold {
        let _ = writeln!(s, "c threshold {k}");
    }
    let _ = writeln!(s, "p cnf {} {}", cnf.num_vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c {
            let _ = write!(s, "{} ", l.to_dimacs());
        }
        s.push_str("0\n");
    }
    s
}

pub fn write_max2sat(phi: &Max2SatInstance) -> String {
    let cnf = CnfInstance { num_vars: phi.num_vars, clauses: phi.clauses.iter().map(|c| c.to_vec()).collect() };
    write_cnf(&cnf, Some(phi.k))
}
