//! Exhaustive search over cut systems for small instances.

use thiserror::Error;

use crate::graph::{CutSystem, EdgeId, Link};
use crate::instance::{Instance, Solution};
use crate::numeric::Scalar;
use crate::risk::{RiskError, RiskOracle, DEFAULT_ENUMERATION_BOUND};

pub const LINK_BOUND: usize = 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("{count} affordable cuttable links exceed the exhaustive bound of {bound}")]
    TooManyLinks { count: usize, bound: usize },
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error("the instance has no risk threshold")]
    MissingThreshold,
}

struct Search<'g, T> {
    links: Vec<(Link, T)>,
    oracle: RiskOracle<'g, T>,
    alive: Vec<bool>,
    chosen: Vec<bool>,
    budget: T,
}

impl<'g, T: Scalar> Search<'g, T> {
    fn new(inst: &'g Instance<T>) -> Result<Self, ExactError> {
        let g = &inst.graph;
        let links: Vec<(Link, T)> = g
            .links()
            .into_iter()
            .map(|l| {
                let c = g.link_cost(&l);
                (l, c)
            })
            .filter(|(_, c)| *c <= inst.budget)
            .collect();
        if links.len() > LINK_BOUND {
            return Err(ExactError::TooManyLinks { count: links.len(), bound: LINK_BOUND });
        }
        let uncertain = RiskOracle::uncertain_count(g);
        if uncertain > DEFAULT_ENUMERATION_BOUND {
            return Err(RiskError::EnumerationBound { count: uncertain, bound: DEFAULT_ENUMERATION_BOUND }.into());
        }
        Ok(Search {
            chosen: vec![false; links.len()],
            links,
            oracle: RiskOracle::new(g, DEFAULT_ENUMERATION_BOUND),
            alive: vec![true; g.edge_count()],
            budget: inst.budget.clone(),
        })
    }

    fn members(&self) -> Vec<EdgeId> {
        let mut m: Vec<EdgeId> = self
            .links
            .iter()
            .zip(&self.chosen)
            .filter(|(_, &c)| c)
            .flat_map(|((l, _), _)| l.edges.iter().copied())
            .collect();
        m.sort_unstable();
        m
    }

    fn set_link(&mut self, i: usize, cut: bool) {
        self.chosen[i] = cut;
        for e in &self.links[i].0.edges {
            self.alive[e.0] = !cut;
        }
    }

    /// Visits every affordable subset of links in a fixed order; `visit`
    /// returns `true` to stop the search.
    fn walk(
        &mut self,
        i: usize,
        spent: T,
        visit: &mut dyn FnMut(&mut Self, &T) -> Result<bool, ExactError>,
        floor: Option<&T>,
    ) -> Result<bool, ExactError> {
        if i == self.links.len() {
            return visit(self, &spent);
        }
        if let Some(threshold) = floor {
            if self.floor_risk(i)? > *threshold {
                return Ok(false);
            }
        }
        if self.walk(i + 1, spent.clone(), visit, floor)? {
            return Ok(true);
        }
        let with = spent + self.links[i].1.clone();
        if with <= self.budget {
            self.set_link(i, true);
            let stop = self.walk(i + 1, with, visit, floor)?;
            self.set_link(i, false);
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Risk with every link from `i` on cut as well. Risk never increases
    /// when edges are removed, so no completion of the current choice does
    /// better.
    fn floor_risk(&mut self, i: usize) -> Result<T, ExactError> {
        let mut alive = std::mem::take(&mut self.alive);
        for (l, _) in &self.links[i..] {
            for e in &l.edges {
                alive[e.0] = false;
            }
        }
        let risk = self.oracle.risk(&alive);
        for (j, (l, _)) in self.links.iter().enumerate().skip(i) {
            for e in &l.edges {
                alive[e.0] = !self.chosen[j];
            }
        }
        self.alive = alive;
        Ok(risk?)
    }
}

/// Minimum-risk cut system within budget; ties go to the lexicographically
/// smallest sorted edge list.
pub fn solve_exhaustive<T: Scalar>(inst: &Instance<T>) -> Result<Solution<T>, ExactError> {
    let mut search = Search::new(inst)?;
    let mut best: Option<(T, Vec<EdgeId>, T)> = None;
    search.walk(
        0,
        T::zero(),
        &mut |s, spent| {
            let alive = std::mem::take(&mut s.alive);
            let risk = s.oracle.risk(&alive);
            s.alive = alive;
            let risk = risk?;
            let better = match &best {
                None => true,
                Some((r, m, _)) => risk < *r || (risk == *r && s.members() < *m),
            };
            if better {
                best = Some((risk, s.members(), spent.clone()));
            }
            Ok(false)
        },
        None,
    )?;
    let (risk, members, cost) = best.expect("the empty cut system is always affordable");
    Ok(Solution { cut: CutSystem::from_edges(members), saved: inst.graph.total_value_all() - risk.clone(), cost, risk })
}

/// Some cut system within budget with risk at most the threshold, if any.
pub fn find_feasible<T: Scalar>(inst: &Instance<T>) -> Result<Option<CutSystem>, ExactError> {
    let threshold = inst.risk_threshold.clone().ok_or(ExactError::MissingThreshold)?;
    let mut search = Search::new(inst)?;
    let mut witness = None;
    search.walk(
        0,
        T::zero(),
        &mut |s, _| {
            let alive = std::mem::take(&mut s.alive);
            let risk = s.oracle.risk(&alive);
            s.alive = alive;
            if risk? <= threshold {
                witness = Some(CutSystem::from_edges(s.members()));
                return Ok(true);
            }
            Ok(false)
        },
        Some(&threshold),
    )?;
    Ok(witness)
}

/// Is there a cut system with cost ≤ B and risk ≤ R?
pub fn decide<T: Scalar>(inst: &Instance<T>) -> Result<bool, ExactError> {
    Ok(find_feasible(inst)?.is_some())
}
