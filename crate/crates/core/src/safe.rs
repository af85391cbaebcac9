//! Safe sets: a polynomial sufficient condition for finalizability.
//!
//! A resident is relevant to `h` with respect to `M` when `M` matches it to
//! `h` or to nothing. A tentative match is endangered when enough relevant
//! residents could still push it out; a set with no endangered member can
//! never lose a match under any completion.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::engine::{run_da, ExecResult};
use crate::instance::{Instance, Match, MatchSet};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("match {0} is not tentative")]
pub struct NotTentative(pub String);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafeSetReport {
    pub maximal_safe: MatchSet,
    /// `(iteration, removed matches)`, iterations counted from 1.
    pub removal_trace: Vec<(usize, MatchSet)>,
}

fn check_subset(inst: &Instance, tent: &MatchSet, m: &MatchSet) -> Result<(), NotTentative> {
    match m.iter().find(|x| !tent.contains(x)) {
        Some(x) => Err(NotTentative(inst.fmt_match(*x))),
        None => Ok(()),
    }
}

/// Residents matched in `m` to `h` or to no hospital.
pub fn relevant_residents(inst: &Instance, m: &MatchSet, h: usize) -> Result<BTreeSet<usize>, NotTentative> {
    check_subset(inst, &run_da(inst).tent, m)?;
    Ok(relevant(inst, m, h))
}

fn relevant(inst: &Instance, m: &MatchSet, h: usize) -> BTreeSet<usize> {
    let mut partner = vec![None; inst.n_residents()];
    for x in m {
        partner[x.r] = Some(x.h);
    }
    (0..inst.n_residents()).filter(|&r| partner[r].is_none_or(|p| p == h)).collect()
}

/// Endangered members of `m`.
pub fn endangered(inst: &Instance, m: &MatchSet) -> Result<MatchSet, NotTentative> {
    check_subset(inst, &run_da(inst).tent, m)?;
    Ok(dang(inst, m))
}

fn dang(inst: &Instance, m: &MatchSet) -> MatchSet {
    let mut partner = vec![None; inst.n_residents()];
    for x in m {
        partner[x.r] = Some(x.h);
    }
    let is_relevant = |r: usize, h: usize| partner[r].is_none_or(|p| p == h);
    let mut out = MatchSet::new();
    for &Match { r, h } in m {
        let q = inst.quota(h);
        let list = inst.hospital_list(h);
        let hit = match list.iter().position(|&x| x == r) {
            Some(i) => list[..i].iter().filter(|&&x| is_relevant(x, h)).count() >= q,
            // pending: anyone relevant could be ranked above r
            None => (0..inst.n_residents()).filter(|&x| is_relevant(x, h)).count() > q,
        };
        if hit {
            out.insert(Match::new(r, h));
        }
    }
    out
}

/// Removes endangered matches from tent(I) until none is left.
pub fn maximal_safe_set(inst: &Instance) -> SafeSetReport {
    maximal_safe_set_given(inst, &run_da(inst))
}

pub(crate) fn maximal_safe_set_given(inst: &Instance, res: &ExecResult) -> SafeSetReport {
    let mut current = res.tent.clone();
    let mut trace = Vec::new();
    loop {
        let d = dang(inst, &current);
        if d.is_empty() {
            break;
        }
        current = current.difference(&d).copied().collect();
        trace.push((trace.len() + 1, d));
    }
    SafeSetReport { maximal_safe: current, removal_trace: trace }
}

/// Safety of an arbitrary subset of tent(I).
pub fn is_safe(inst: &Instance, m: &MatchSet) -> Result<bool, NotTentative> {
    Ok(endangered(inst, m)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::nine_residents;

    fn set(inst: &Instance, pairs: &[(&str, &str)]) -> MatchSet {
        pairs.iter().map(|(r, h)| inst.m(r, h)).collect()
    }

    fn names(inst: &Instance, rs: &BTreeSet<usize>) -> Vec<String> {
        let mut v: Vec<String> = rs.iter().map(|&r| inst.resident_name(r).to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn nine_safe_set_and_trace() {
        let t = nine_residents();
        let rep = maximal_safe_set(&t);
        assert_eq!(rep.maximal_safe, set(&t, &[("a", "X"), ("c", "X"), ("b", "Y"), ("g", "Y"), ("i", "Z")]));
        assert_eq!(
            rep.removal_trace,
            vec![(1, set(&t, &[("e", "Y")])), (2, set(&t, &[("f", "X")]))]
        );
    }

    #[test]
    fn nine_relevant_residents() {
        let t = nine_residents();
        let x = t.hospital("X").unwrap();
        let safe = set(&t, &[("a", "X"), ("c", "X"), ("b", "Y"), ("g", "Y"), ("i", "Z")]);
        assert_eq!(names(&t, &relevant_residents(&t, &safe, x).unwrap()), ["a", "c", "d", "e", "f", "h"]);
        let tent = run_da(&t).tent;
        assert_eq!(names(&t, &relevant_residents(&t, &tent, x).unwrap()), ["a", "c", "d", "f", "h"]);
        assert_eq!(relevant_residents(&t, &MatchSet::new(), x).unwrap().len(), 9);
        assert!(relevant_residents(&t, &set(&t, &[("d", "X")]), x).is_err());
    }

    #[test]
    fn nine_endangered() {
        let t = nine_residents();
        let tent = run_da(&t).tent;
        assert_eq!(endangered(&t, &tent).unwrap(), set(&t, &[("e", "Y")]));
        let safe = set(&t, &[("a", "X"), ("c", "X"), ("b", "Y"), ("g", "Y"), ("i", "Z")]);
        assert!(endangered(&t, &safe).unwrap().is_empty());
        assert!(endangered(&t, &MatchSet::new()).unwrap().is_empty());
    }

    #[test]
    fn everyone_on_top_is_safe() {
        let i = Instance::from_names(
            &[("h1", 1, &["r1", "r2"]), ("h2", 1, &["r2", "r1"])],
            &[("r1", &["h1", "h2"]), ("r2", &["h2", "h1"])],
        );
        let rep = maximal_safe_set(&i);
        assert_eq!(rep.maximal_safe, run_da(&i).tent);
        assert!(rep.removal_trace.is_empty());
    }

    #[test]
    fn empty_tent() {
        let i = Instance::from_names(&[("h1", 1, &[])], &[("r1", &[])]);
        let rep = maximal_safe_set(&i);
        assert!(rep.maximal_safe.is_empty() && rep.removal_trace.is_empty());
    }

    #[test]
    fn lone_pending_match_is_safe_only_without_rivals() {
        let alone = Instance::from_names(&[("h1", 1, &[])], &[("r1", &["h1"])]);
        assert_eq!(maximal_safe_set(&alone).maximal_safe.len(), 1);
        let rival = Instance::from_names(&[("h1", 1, &[])], &[("r1", &["h1"]), ("r2", &[])]);
        assert!(maximal_safe_set(&rival).maximal_safe.is_empty());
    }
}
