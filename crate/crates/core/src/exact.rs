//! Exact finalizability deciders.
//!
//! Both deciders walk the same tree. A node is a partial extension of the
//! input together with its settled engine state. Completions are never
//! listed one by one: a node branches only where the rest of the execution
//! depends on information the node does not fix yet.
//!
//! - A free resident whose list is used up branches on the hospital it
//!   proposes to next. Hospitals that would reject it on the spot are skipped
//!   (their proposal cannot change anything), unless no other is left.
//! - A hospital holding more residents than its quota branches on where one
//!   of its unranked residents goes in the tail of its list. Positions that
//!   compare the same way against the current proposers are merged.
//!
//! A node where neither happens is a leaf: no completion consistent with it
//! adds another event, so it stands for a whole class of completions.
//!
//! When every resident-list entry is ranked by its hospital and the query is
//! ranked too, a proposal to a hospital that does not rank the resident can
//! only hold the resident idle, and an idle resident rejects nobody. Such
//! inputs are searched over proposals to ranking hospitals only, and a
//! resident with none left simply stops. [`ftm_enumerate`] can switch this
//! off for cross-checking.

use serde::Serialize;
use thiserror::Error;

use crate::engine::{run_da, State};
use crate::instance::{Instance, Match};
use crate::minimal::is_resident_minimal;
use crate::rm::{ftm_rm_marriage, RootPolicy};
use crate::safe::maximal_safe_set;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Finalizable,
    NotFinalizable,
    /// The node budget ran out first.
    Unknown,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FtmStats {
    pub nodes: u64,
    /// Leaves reached, each a class of completions.
    pub completions: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FtmAnswer {
    pub verdict: Verdict,
    /// A complete extension of the input whose engine run rejects the match.
    pub counterexample: Option<Instance>,
    pub stats: FtmStats,
}

impl FtmAnswer {
    pub fn finalizable(&self) -> Option<bool> {
        match self.verdict {
            Verdict::Finalizable => Some(true),
            Verdict::NotFinalizable => Some(false),
            Verdict::Unknown => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("match {0} is not tentative")]
    NotTentative(String),
    #[error("more than {limit} completion classes (the instance has {count} completions)")]
    LimitExceeded { limit: u64, count: u128 },
}

/// Number of completions: the product of the factorials of the missing
/// list lengths on both sides, saturating.
pub fn completion_count(inst: &Instance) -> u128 {
    let fact = |n: usize| (1..=n as u128).fold(1u128, |a, b| a.saturating_mul(b));
    let rs = (0..inst.n_residents()).map(|r| fact(inst.n_hospitals() - inst.resident_list(r).len()));
    let hs = (0..inst.n_hospitals()).map(|h| fact(inst.n_residents() - inst.hospital_list(h).len()));
    rs.chain(hs).fold(1u128, |a, b| a.saturating_mul(b))
}

/// Enumerates every completion class; fails once more than `limit` leaves
/// have been reached.
pub fn ftm_bruteforce(inst: &Instance, m: Match, limit: u64) -> Result<FtmAnswer, ExactError> {
    ftm_enumerate(inst, m, limit, true)
}

/// [`ftm_bruteforce`] with the ranked-proposal reduction under caller
/// control; with `reduce` off every completion class is visited.
pub fn ftm_enumerate(inst: &Instance, m: Match, limit: u64, reduce: bool) -> Result<FtmAnswer, ExactError> {
    let mut s = Search::new(inst, m, Some(limit), None, false)?;
    s.ranked_only = reduce && ranked_only_applies(inst, m);
    let flow = s.explore(Node::root(inst));
    match flow {
        Flow::LimitHit => Err(ExactError::LimitExceeded { limit, count: completion_count(inst) }),
        _ => Ok(s.answer(flow)),
    }
}

/// Depth-first search with safe-set pruning and, on hospital-complete
/// resident-minimal marriage branches, the digraph test. Gives up with
/// [`Verdict::Unknown`] after `budget` nodes.
pub fn ftm_backtrack(inst: &Instance, m: Match, budget: u64) -> Result<FtmAnswer, ExactError> {
    let mut s = Search::new(inst, m, None, Some(budget), true)?;
    s.ranked_only = ranked_only_applies(inst, m);
    let flow = s.explore(Node::root(inst));
    Ok(s.answer(flow))
}

/// Every resident-list entry, and the query, is ranked by its hospital.
pub fn ranked_only_applies(inst: &Instance, m: Match) -> bool {
    inst.is_listed(m.h, m.r)
        && (0..inst.n_residents()).all(|r| inst.resident_list(r).iter().all(|&h| inst.is_listed(h, r)))
}

#[derive(Clone)]
struct Node {
    inst: Instance,
    state: State,
}

impl Node {
    fn root(inst: &Instance) -> Self {
        let mut state = State::new(inst);
        state.settle(inst);
        Node { inst: inst.clone(), state }
    }

    /// Appends missing entries in declaration order on both sides.
    fn completion(&self) -> Instance {
        let mut out = self.inst.clone();
        for r in 0..out.n_residents() {
            for h in 0..out.n_hospitals() {
                if !out.resident_list(r).contains(&h) {
                    out.push_resident_pref(r, h);
                }
            }
        }
        for h in 0..out.n_hospitals() {
            for r in 0..out.n_residents() {
                if !out.is_listed(h, r) {
                    out.push_hospital_pref(h, r);
                }
            }
        }
        out
    }

    /// The node's resident lists with the input's hospital lists; every
    /// completion below the node completes this instance too.
    fn relaxed(&self) -> Instance {
        let mut out = self.inst.clone();
        for h in 0..out.n_hospitals() {
            out.truncate_hospital_list(h, self.state.fixed[h]);
        }
        out
    }

    /// Would `r` be turned away by `h` right after proposing?
    fn dead(&self, r: usize, h: usize) -> bool {
        let list = self.inst.hospital_list(h);
        let q = self.inst.quota(h);
        let proposers = |xs: &[usize]| xs.iter().filter(|&&x| self.state.is_proposed(x, h)).count();
        match list.iter().position(|&x| x == r) {
            Some(i) => proposers(&list[..i]) >= q,
            None => proposers(&list[..self.state.fixed[h]]) >= q,
        }
    }

    fn over_quota(&self) -> Option<usize> {
        (0..self.inst.n_hospitals()).find(|&h| self.state.held(h).len() > self.inst.quota(h))
    }

    fn stuck(&self, ranked_only: bool) -> Option<usize> {
        (0..self.inst.n_residents()).find(|&r| {
            let len = self.inst.resident_list(r).len();
            self.state.holder[r].is_none()
                && self.state.next[r] == len
                && len < self.inst.n_hospitals()
                && (!ranked_only || !self.ranking(r).is_empty())
        })
    }

    /// Unproposed hospitals that rank `r` and would not turn it away.
    fn ranking(&self, r: usize) -> Vec<usize> {
        (0..self.inst.n_hospitals())
            .filter(|&h| !self.inst.resident_list(r).contains(&h) && self.inst.is_listed(h, r) && !self.dead(r, h))
            .collect()
    }

    fn children_for_hospital(&self, h: usize) -> Vec<Node> {
        let r = self
            .state
            .held(h)
            .into_iter()
            .find(|&x| !self.state.is_listed(x, h))
            .expect("an over-full hospital holds an unranked resident");
        let list = self.inst.hospital_list(h);
        let q = self.inst.quota(h);
        let fixed = self.state.fixed[h];
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for pos in fixed..=list.len() {
            let above = list[..pos].iter().filter(|&&x| self.state.is_proposed(x, h)).count();
            let key = if above >= q {
                None
            } else {
                Some(list[fixed..pos].iter().filter(|&&x| self.state.holder[x] == Some(h)).count())
            };
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let mut child = self.clone();
            child.inst.insert_hospital_pref(h, pos, r);
            child.state.sync_lists(&child.inst);
            child.state.flush(&child.inst, h);
            child.state.settle(&child.inst);
            out.push(child);
        }
        out
    }

    fn children_for_resident(&self, r: usize, ranked_only: bool) -> Vec<Node> {
        let cands: Vec<usize> =
            (0..self.inst.n_hospitals()).filter(|h| !self.inst.resident_list(r).contains(h)).collect();
        let live: Vec<usize> =
            if ranked_only { self.ranking(r) } else { cands.iter().copied().filter(|&h| !self.dead(r, h)).collect() };
        let groups: Vec<Vec<usize>> =
            if live.is_empty() { vec![cands] } else { live.into_iter().map(|h| vec![h]).collect() };
        groups
            .into_iter()
            .map(|hs| {
                let mut child = self.clone();
                for h in hs {
                    child.inst.push_resident_pref(r, h);
                }
                child.state.settle(&child.inst);
                child
            })
            .collect()
    }
}

enum Flow {
    Continue,
    Found(Box<Instance>),
    LimitHit,
    OutOfBudget,
}

struct Search {
    m: Match,
    limit: Option<u64>,
    budget: Option<u64>,
    prune: bool,
    ranked_only: bool,
    stats: FtmStats,
}

impl Search {
    fn new(inst: &Instance, m: Match, limit: Option<u64>, budget: Option<u64>, prune: bool) -> Result<Self, ExactError> {
        let in_range = m.r < inst.n_residents() && m.h < inst.n_hospitals();
        if !in_range || !run_da(inst).tent.contains(&m) {
            let name = if in_range { inst.fmt_match(m) } else { format!("{m:?}") };
            return Err(ExactError::NotTentative(name));
        }
        Ok(Search { m, limit, budget, prune, ranked_only: false, stats: FtmStats::default() })
    }

    fn answer(&self, flow: Flow) -> FtmAnswer {
        let (verdict, counterexample) = match flow {
            Flow::Continue => (Verdict::Finalizable, None),
            Flow::Found(j) => (Verdict::NotFinalizable, Some(*j)),
            Flow::OutOfBudget => (Verdict::Unknown, None),
            Flow::LimitHit => unreachable!("reported as an error"),
        };
        FtmAnswer { verdict, counterexample, stats: self.stats }
    }

    fn safe_below(&self, node: &Node) -> bool {
        let relaxed = node.relaxed();
        if maximal_safe_set(&relaxed).maximal_safe.contains(&self.m) {
            return true;
        }
        relaxed.is_marriage()
            && relaxed.is_hospital_complete()
            && is_resident_minimal(&relaxed)
            && ftm_rm_marriage(&relaxed, self.m, RootPolicy::POnly).is_ok_and(|a| a.finalizable)
    }

    fn explore(&mut self, node: Node) -> Flow {
        self.stats.nodes += 1;
        if self.budget.is_some_and(|b| self.stats.nodes > b) {
            return Flow::OutOfBudget;
        }
        if node.state.is_rejected(self.m.r, self.m.h) {
            return Flow::Found(Box::new(node.completion()));
        }
        if self.prune && self.safe_below(&node) {
            return Flow::Continue;
        }
        let children = if let Some(h) = node.over_quota() {
            node.children_for_hospital(h)
        } else if let Some(r) = node.stuck(self.ranked_only) {
            node.children_for_resident(r, self.ranked_only)
        } else {
            self.stats.completions += 1;
            if self.limit.is_some_and(|l| self.stats.completions > l) {
                return Flow::LimitHit;
            }
            return Flow::Continue;
        };
        for child in children {
            match self.explore(child) {
                Flow::Continue => {}
                other => return other,
            }
        }
        Flow::Continue
    }
}
