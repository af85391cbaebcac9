//! The deferred-acceptance event engine for truncated instances.
//!
//! Residents propose down their (possibly truncated) lists. A proposal stays
//! tentative until the hospital's list certifies that it can never be among
//! the hospital's top `q_h` proposers, whatever the completion of that list.
//! Proposals by residents missing from a short hospital list therefore stay
//! pending instead of being refused outright.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::instance::{Instance, Match, MatchSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Proposal,
    Rejection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub kind: EventKind,
    pub m: Match,
}

impl Event {
    pub fn proposal(m: Match) -> Self {
        Event { kind: EventKind::Proposal, m }
    }

    pub fn rejection(m: Match) -> Self {
        Event { kind: EventKind::Rejection, m }
    }
}

pub type EventSequence = Vec<Event>;

/// A maximal feasible event sequence and the sets derived from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecResult {
    pub sequence: EventSequence,
    pub prop: MatchSet,
    pub rej: MatchSet,
    pub tent: MatchSet,
    pub pend: MatchSet,
}

impl ExecResult {
    /// Derives prop/rej/tent/pend from a sequence.
    pub fn from_sequence(inst: &Instance, sequence: EventSequence) -> Self {
        let mut prop = MatchSet::new();
        let mut rej = MatchSet::new();
        for e in &sequence {
            match e.kind {
                EventKind::Proposal => prop.insert(e.m),
                EventKind::Rejection => rej.insert(e.m),
            };
        }
        let tent: MatchSet = prop.difference(&rej).copied().collect();
        let pend = tent.iter().filter(|m| !inst.is_listed(m.h, m.r)).copied().collect();
        ExecResult { sequence, prop, rej, tent, pend }
    }

    /// Tentative hospital of `r`, if any.
    pub fn tent_of(&self, r: usize) -> Option<usize> {
        self.tent.iter().find(|m| m.r == r).map(|m| m.h)
    }

    /// Same events regardless of order.
    pub fn same_events(&self, other: &ExecResult) -> bool {
        self.prop == other.prop && self.rej == other.rej
    }
}

/// Residents of M at hospital h, i.e. res_h M.
pub fn res_h(m: &MatchSet, h: usize) -> BTreeSet<usize> {
    m.iter().filter(|x| x.h == h).map(|x| x.r).collect()
}

/// Residents appearing in M.
pub fn res(m: &MatchSet) -> BTreeSet<usize> {
    m.iter().map(|x| x.r).collect()
}

/// Matches of `m` that cannot be among the top `q_h` of their hospital under
/// any completion of the hospital's list.
pub fn ousted(inst: &Instance, m: &MatchSet) -> MatchSet {
    let mut out = MatchSet::new();
    for h in 0..inst.n_hospitals() {
        let members = res_h(m, h);
        if members.is_empty() {
            continue;
        }
        let q = inst.quota(h);
        let list = inst.hospital_list(h);
        let listed = list.iter().filter(|r| members.contains(r)).count();
        if listed < q {
            continue;
        }
        let mut before = 0;
        for &r in list {
            if members.contains(&r) {
                if before >= q {
                    out.insert(Match::new(r, h));
                }
                before += 1;
            }
        }
        for &r in &members {
            if !list.contains(&r) {
                out.insert(Match::new(r, h));
            }
        }
    }
    out
}

/// Mutable execution state shared by the deterministic engine and the
/// completion searches.
///
/// `fixed[h]` is the length of the part of π_h that every completion under
/// consideration keeps in front of all unlisted residents; entries past it
/// are a provisional ranking that later residents may be inserted into.
#[derive(Clone, Debug)]
pub(crate) struct State {
    n_h: usize,
    pub next: Vec<usize>,
    pub holder: Vec<Option<usize>>,
    proposed: Vec<bool>,
    rejected: Vec<bool>,
    pos: Vec<usize>,
    pub fixed: Vec<usize>,
    pub seq: EventSequence,
}

const UNLISTED: usize = usize::MAX;

impl State {
    pub fn new(inst: &Instance) -> Self {
        let (n_r, n_h) = (inst.n_residents(), inst.n_hospitals());
        let mut s = State {
            n_h,
            next: vec![0; n_r],
            holder: vec![None; n_r],
            proposed: vec![false; n_r * n_h],
            rejected: vec![false; n_r * n_h],
            pos: vec![UNLISTED; n_r * n_h],
            fixed: (0..n_h).map(|h| inst.hospital_list(h).len()).collect(),
            seq: Vec::new(),
        };
        s.sync_lists(inst);
        s
    }

    /// Refreshes the rank table after hospital lists changed.
    pub fn sync_lists(&mut self, inst: &Instance) {
        self.pos.iter_mut().for_each(|p| *p = UNLISTED);
        for h in 0..self.n_h {
            for (i, &r) in inst.hospital_list(h).iter().enumerate() {
                self.pos[r * self.n_h + h] = i;
            }
        }
    }

    pub fn is_proposed(&self, r: usize, h: usize) -> bool {
        self.proposed[r * self.n_h + h]
    }

    pub fn is_rejected(&self, r: usize, h: usize) -> bool {
        self.rejected[r * self.n_h + h]
    }

    /// Runs proposals and rejections until nothing is feasible.
    pub fn settle(&mut self, inst: &Instance) {
        let n_r = self.holder.len();
        while let Some(r) =
            (0..n_r).find(|&r| self.holder[r].is_none() && self.next[r] < inst.resident_list(r).len())
        {
            let h = inst.resident_list(r)[self.next[r]];
            self.next[r] += 1;
            self.proposed[r * self.n_h + h] = true;
            self.holder[r] = Some(h);
            self.seq.push(Event::proposal(Match::new(r, h)));
            self.flush(inst, h);
        }
    }

    /// Rejects every currently ousted match at `h`.
    pub fn flush(&mut self, inst: &Instance, h: usize) {
        let q = inst.quota(h);
        let list = inst.hospital_list(h);
        let nh = self.n_h;
        let mut before = 0;
        let mut before_fixed = 0;
        let mut out: Vec<usize> = Vec::new();
        for (i, &r) in list.iter().enumerate() {
            if self.proposed[r * nh + h] {
                if before >= q && !self.rejected[r * nh + h] {
                    out.push(r);
                }
                before += 1;
                if i < self.fixed[h] {
                    before_fixed += 1;
                }
            }
        }
        if before_fixed >= q {
            for r in 0..self.holder.len() {
                if self.proposed[r * nh + h] && !self.rejected[r * nh + h] && self.pos[r * nh + h] == UNLISTED {
                    out.push(r);
                }
            }
        }
        for r in out {
            self.rejected[r * nh + h] = true;
            debug_assert_eq!(self.holder[r], Some(h));
            self.holder[r] = None;
            self.seq.push(Event::rejection(Match::new(r, h)));
        }
    }

    /// Residents tentatively held by `h`.
    pub fn held(&self, h: usize) -> Vec<usize> {
        (0..self.holder.len()).filter(|&r| self.holder[r] == Some(h)).collect()
    }

    pub fn is_listed(&self, r: usize, h: usize) -> bool {
        self.pos[r * self.n_h + h] != UNLISTED
    }

    pub fn into_result(self, inst: &Instance) -> ExecResult {
        ExecResult::from_sequence(inst, self.seq)
    }
}

/// Runs the engine with the deterministic schedule: proposals in resident
/// declaration order, each followed by every rejection it makes feasible.
pub fn run_da(inst: &Instance) -> ExecResult {
    let mut s = State::new(inst);
    s.settle(inst);
    s.into_result(inst)
}

/// All events that may extend `seq` feasibly, proposals first (by resident),
/// then rejections (by match order).
pub fn feasible_events(inst: &Instance, prop: &MatchSet, rej: &MatchSet) -> Vec<Event> {
    let tent: MatchSet = prop.difference(rej).copied().collect();
    let matched = res(&tent);
    let mut out = Vec::new();
    for r in 0..inst.n_residents() {
        if matched.contains(&r) {
            continue;
        }
        for &h in inst.resident_list(r) {
            let m = Match::new(r, h);
            if !prop.contains(&m) {
                out.push(Event::proposal(m));
                break;
            }
            if !rej.contains(&m) {
                break;
            }
        }
    }
    for m in ousted(inst, prop) {
        if !rej.contains(&m) {
            out.push(Event::rejection(m));
        }
    }
    out
}

/// Runs the engine letting `choose` pick, at each step, the index of the next
/// event among all feasible ones. Used to exercise order independence.
pub fn run_da_scheduled(inst: &Instance, mut choose: impl FnMut(usize) -> usize) -> ExecResult {
    let mut prop = MatchSet::new();
    let mut rej = MatchSet::new();
    let mut seq = Vec::new();
    loop {
        let evs = feasible_events(inst, &prop, &rej);
        if evs.is_empty() {
            break;
        }
        let e = evs[choose(evs.len()) % evs.len()];
        match e.kind {
            EventKind::Proposal => prop.insert(e.m),
            EventKind::Rejection => rej.insert(e.m),
        };
        seq.push(e);
    }
    ExecResult::from_sequence(inst, seq)
}

/// True iff `seq` can be built event by event with the feasibility rules.
pub fn is_feasible(inst: &Instance, seq: &[Event]) -> bool {
    let mut prop = MatchSet::new();
    let mut rej = MatchSet::new();
    for e in seq {
        let Match { r, h } = e.m;
        if r >= inst.n_residents() || h >= inst.n_hospitals() {
            return false;
        }
        match e.kind {
            EventKind::Proposal => {
                let busy = prop.iter().any(|m| m.r == r && !rej.contains(m));
                let list = inst.resident_list(r);
                let Some(i) = list.iter().position(|&x| x == h) else {
                    return false;
                };
                if busy || prop.contains(&e.m) || !list[..i].iter().all(|&x| rej.contains(&Match::new(r, x))) {
                    return false;
                }
                prop.insert(e.m);
            }
            EventKind::Rejection => {
                if rej.contains(&e.m) || !ousted(inst, &prop).contains(&e.m) {
                    return false;
                }
                rej.insert(e.m);
            }
        }
    }
    true
}
