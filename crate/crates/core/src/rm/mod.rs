//! Resident-minimal instances: prescriptions, the marriage-case digraph and
//! the integer-program emitter.
//!
//! A prescription `(P, X)` names new proposals `P` and rejections `X` of
//! tentative matches. When it satisfies the conditions P1..P6 (or P6' on
//! instances with pending matches), every match of its target set can be
//! rejected by some extension, so none of them is finalizable.

mod gi;
mod ip;
mod search;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::engine::{res, res_h, run_da, ExecResult};
use crate::instance::{Instance, Match, MatchSet};
use crate::minimal::is_resident_minimal_given;

pub use gi::{build_gi, ftm_rm_marriage, DigraphGI, RmMarriageAnswer, RootPolicy};
pub use ip::{emit_ip, IpModel, IpSense, DEFAULT_Z_CAP};
pub use search::find_prescription;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prescription {
    pub p: MatchSet,
    pub x: MatchSet,
}

impl Prescription {
    pub fn new(p: MatchSet, x: MatchSet) -> Self {
        Prescription { p, x }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P6Prime,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::P1 => "P1",
            Condition::P2 => "P2",
            Condition::P3 => "P3",
            Condition::P4 => "P4",
            Condition::P5 => "P5",
            Condition::P6 => "P6",
            Condition::P6Prime => "P6'",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// P1..P6; requires an instance without pending matches.
    HospitalComplete,
    /// P1..P5 and P6'.
    General,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrescriptionVerdict {
    pub valid: bool,
    pub failed_conditions: BTreeSet<Condition>,
    pub target: MatchSet,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RmError {
    #[error("instance is not resident-minimal")]
    NotResidentMinimal,
    #[error("instance has pending matches; use the general mode")]
    PendingMatches,
    #[error("hospital `{0}` has quota above one")]
    QuotaAboveOne(String),
    #[error("match {0} is not tentative")]
    NotTentative(String),
    #[error("match {0} is pending")]
    PendingQuery(String),
    #[error("prescription fails {0:?}")]
    Invalid(Vec<Condition>),
    #[error("extension stalled before rejecting the whole target set")]
    Stalled,
    #[error("second instance is not a resident-changeless hospital-complete extension of the first")]
    NotAnExtension,
    #[error("hospital `{hospital}` has {size} pending residents, above the cap of {cap}")]
    ZCap { hospital: String, size: usize, cap: usize },
}

/// `{(r,h) ∈ X : r ∉ res P}`.
pub fn target_set(p: &Prescription) -> MatchSet {
    let busy = res(&p.p);
    p.x.iter().filter(|m| !busy.contains(&m.r)).copied().collect()
}

fn precedes(inst: &Instance, h: usize, a: usize, b: usize) -> bool {
    match (inst.rank(h, a), inst.rank(h, b)) {
        (Some(i), Some(j)) => i < j,
        _ => false,
    }
}

/// Checks the prescription conditions literally and reports every failure.
pub fn validate_prescription(inst: &Instance, p: &Prescription, mode: Mode) -> Result<PrescriptionVerdict, RmError> {
    let run = run_da(inst);
    if !is_resident_minimal_given(inst, &run) {
        return Err(RmError::NotResidentMinimal);
    }
    if mode == Mode::HospitalComplete && !run.pend.is_empty() {
        return Err(RmError::PendingMatches);
    }
    Ok(check_conditions(inst, &run, p, mode))
}

pub(crate) fn check_conditions(inst: &Instance, run: &ExecResult, p: &Prescription, mode: Mode) -> PrescriptionVerdict {
    let mut failed = BTreeSet::new();
    let (tent, pend) = (&run.tent, &run.pend);
    if p.p.iter().any(|m| run.prop.contains(m)) {
        failed.insert(Condition::P1);
    }
    let mut seen = BTreeSet::new();
    if p.p.iter().any(|m| !seen.insert(m.r)) {
        failed.insert(Condition::P2);
    }
    if !p.x.is_subset(tent) {
        failed.insert(Condition::P3);
    }
    let res_x = res(&p.x);
    if res(&p.p).intersection(&res(tent)).any(|r| !res_x.contains(r)) {
        failed.insert(Condition::P4);
    }
    let kept: MatchSet = tent.difference(&p.x).copied().collect();
    for h in 0..inst.n_hospitals() {
        let q = inst.quota(h);
        let mut members = res_h(&p.p, h);
        members.extend(res_h(&kept, h));
        let xs = res_h(&p.x, h);
        if members.len() > q || (!xs.is_empty() && members.len() != q) {
            failed.insert(Condition::P5);
        }
        match mode {
            Mode::HospitalComplete => {
                if members.iter().any(|&a| xs.iter().any(|&b| !precedes(inst, h, a, b))) {
                    failed.insert(Condition::P6);
                }
            }
            Mode::General => {
                let kept_listed: MatchSet = kept.difference(pend).copied().collect();
                let mut front = res_h(&p.p, h);
                front.extend(res_h(&kept_listed, h));
                let x_listed: MatchSet = p.x.difference(pend).copied().collect();
                let back = res_h(&x_listed, h);
                let order_ok = front.iter().all(|&a| back.iter().all(|&b| precedes(inst, h, a, b)));
                let pend_ok = back.is_empty() || res_h(pend, h).is_subset(&xs);
                if !order_ok || !pend_ok {
                    failed.insert(Condition::P6Prime);
                }
            }
        }
    }
    let target = target_set(p);
    // only holds without pending matches: an over-full hospital can start a
    // chain with no fresh proposer
    if failed.is_empty() && pend.is_empty() {
        let fresh = res(&p.p).difference(&res(tent)).count();
        assert!(fresh >= target.len(), "readiness bound violated by a valid prescription");
    }
    PrescriptionVerdict { valid: failed.is_empty(), failed_conditions: failed, target }
}

/// Builds a simple extension rejecting the target set by repeatedly letting
/// the residents of `P` that are currently free make their prescribed
/// proposal.
pub fn prescription_to_extension(inst: &Instance, p: &Prescription) -> Result<(Instance, ExecResult), RmError> {
    let verdict = validate_prescription(inst, p, Mode::HospitalComplete)?;
    if !verdict.valid {
        return Err(RmError::Invalid(verdict.failed_conditions.into_iter().collect()));
    }
    let base = run_da(inst);
    let mut j = inst.clone();
    let mut left = p.p.clone();
    loop {
        let run = run_da(&j);
        let new_prop = run.prop.difference(&base.prop).all(|m| p.p.contains(m));
        let new_rej = run.rej.difference(&base.rej).all(|m| p.x.contains(m));
        if !new_prop || !new_rej {
            return Err(RmError::Stalled);
        }
        if verdict.target.is_subset(&run.rej) {
            return Ok((j, run));
        }
        let matched = res(&run.tent);
        let ready: Vec<Match> = left.iter().filter(|m| !matched.contains(&m.r)).copied().collect();
        if ready.is_empty() {
            return Err(RmError::Stalled);
        }
        for m in ready {
            j.push_resident_pref(m.r, m.h);
            left.remove(&m);
        }
    }
}

fn check_changeless_completion(inst: &Instance, inst_hc: &Instance) -> Result<(), RmError> {
    let changeless = (0..inst.n_residents()).all(|r| inst.resident_list(r) == inst_hc.resident_list(r));
    if !inst.is_extended_by(inst_hc) || !changeless || !inst_hc.is_hospital_complete() {
        return Err(RmError::NotAnExtension);
    }
    Ok(())
}

/// Turns a prescription for a hospital-complete extension into one for the
/// original instance by adding the pending matches the extension rejects.
pub fn lift_prescription(inst: &Instance, inst_hc: &Instance, p: &Prescription) -> Result<Prescription, RmError> {
    check_changeless_completion(inst, inst_hc)?;
    let run = run_da(inst);
    if !is_resident_minimal_given(inst, &run) {
        return Err(RmError::NotResidentMinimal);
    }
    let run_hc = run_da(inst_hc);
    let mut x = p.x.clone();
    x.extend(run_hc.rej.difference(&run.rej).copied());
    Ok(Prescription::new(p.p.clone(), x))
}

/// Completes the hospital lists so that pending residents named in `X` rank
/// last, and restates the prescription for that completion.
pub fn project_prescription(inst: &Instance, p: &Prescription) -> Result<(Instance, Prescription), RmError> {
    let verdict = validate_prescription(inst, p, Mode::General)?;
    if !verdict.valid {
        return Err(RmError::Invalid(verdict.failed_conditions.into_iter().collect()));
    }
    let run = run_da(inst);
    let hc = pending_last_completion(inst, &run.pend, &p.x);
    let run_hc = run_da(&hc);
    let y = p.x.difference(&run_hc.rej).copied().collect();
    Ok((hc, Prescription::new(p.p.clone(), y)))
}

/// Appends missing residents in declaration order, except that residents of
/// `pend ∩ x` at a hospital go after everyone else.
pub(crate) fn pending_last_completion(inst: &Instance, pend: &MatchSet, x: &MatchSet) -> Instance {
    let mut out = inst.clone();
    for h in 0..inst.n_hospitals() {
        let last: BTreeSet<usize> = pend.iter().filter(|m| m.h == h && x.contains(m)).map(|m| m.r).collect();
        let missing: Vec<usize> = (0..inst.n_residents()).filter(|&r| !inst.is_listed(h, r)).collect();
        for &r in missing.iter().filter(|r| !last.contains(r)) {
            out.push_hospital_pref(h, r);
        }
        for &r in &last {
            out.push_hospital_pref(h, r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(inst: &Instance, pairs: &[(&str, &str)]) -> MatchSet {
        pairs.iter().map(|(r, h)| inst.m(r, h)).collect()
    }

    /// r1 holds h1; r2 is free and ranked above r1.
    pub(crate) fn single_chain() -> Instance {
        Instance::from_names(
            &[("h1", 1, &["r2", "r1"]), ("h2", 1, &["r1", "r2"])],
            &[("r1", &["h1"]), ("r2", &[])],
        )
    }

    #[test]
    fn target_set_examples() {
        let t = crate::instance::nine_residents();
        let x = set(&t, &[("a", "X")]);
        assert_eq!(target_set(&Prescription::new(MatchSet::new(), x.clone())), x);
        assert!(target_set(&Prescription::new(set(&t, &[("a", "Z")]), x)).is_empty());
        let p = Prescription::new(set(&t, &[("b", "Z")]), set(&t, &[("a", "X"), ("b", "Y")]));
        assert_eq!(target_set(&p), set(&t, &[("a", "X")]));
    }

    #[test]
    fn empty_prescription_is_valid() {
        let i = single_chain();
        let v = validate_prescription(&i, &Prescription::default(), Mode::HospitalComplete).unwrap();
        assert!(v.valid && v.target.is_empty());
        let (j, run) = prescription_to_extension(&i, &Prescription::default()).unwrap();
        assert_eq!(j, i);
        assert_eq!(run, run_da(&i));
    }

    #[test]
    fn single_chain_prescription() {
        let i = single_chain();
        let p = Prescription::new(set(&i, &[("r2", "h1")]), set(&i, &[("r1", "h1")]));
        let v = validate_prescription(&i, &p, Mode::HospitalComplete).unwrap();
        assert!(v.valid, "{:?}", v.failed_conditions);
        assert_eq!(v.target, set(&i, &[("r1", "h1")]));
        let (j, run) = prescription_to_extension(&i, &p).unwrap();
        assert_eq!(j.resident_list(1), &[0]);
        assert!(run.rej.contains(&i.m("r1", "h1")));

        let bad = Prescription::new(p.p.clone(), set(&i, &[("r1", "h1"), ("r2", "h2")]));
        let v = validate_prescription(&i, &bad, Mode::HospitalComplete).unwrap();
        assert!(v.failed_conditions.contains(&Condition::P3));
    }

    #[test]
    fn two_step_prescription() {
        // r3 ousts r2 from h2, r2 moves to h1 and ousts r1
        let i = Instance::from_names(
            &[("h1", 1, &["r2", "r1", "r3"]), ("h2", 1, &["r3", "r2", "r1"]), ("h3", 1, &["r1", "r2", "r3"])],
            &[("r1", &["h1"]), ("r2", &["h2"]), ("r3", &[])],
        );
        let p = Prescription::new(set(&i, &[("r3", "h2"), ("r2", "h1")]), set(&i, &[("r2", "h2"), ("r1", "h1")]));
        let v = validate_prescription(&i, &p, Mode::HospitalComplete).unwrap();
        assert!(v.valid, "{:?}", v.failed_conditions);
        assert_eq!(v.target, set(&i, &[("r1", "h1")]));
        let (j, run) = prescription_to_extension(&i, &p).unwrap();
        assert!(run.rej.contains(&i.m("r1", "h1")) && run.rej.contains(&i.m("r2", "h2")));
        assert_eq!(run_da(&j), run);
    }

    #[test]
    fn hospital_complete_mode_rejects_pending() {
        let i = Instance::from_names(&[("h1", 1, &[])], &[("r1", &["h1"])]);
        assert_eq!(
            validate_prescription(&i, &Prescription::default(), Mode::HospitalComplete),
            Err(RmError::PendingMatches)
        );
        assert!(validate_prescription(&i, &Prescription::default(), Mode::General).unwrap().valid);
    }

    #[test]
    fn not_resident_minimal_is_an_error() {
        let i = Instance::from_names(&[("h1", 1, &["r1"]), ("h2", 1, &["r1"])], &[("r1", &["h1", "h2"])]);
        assert_eq!(
            validate_prescription(&i, &Prescription::default(), Mode::General),
            Err(RmError::NotResidentMinimal)
        );
    }

    /// r1 pends at h1; r2 is listed at h1 and free.
    fn pending_rival() -> Instance {
        Instance::from_names(&[("h1", 1, &["r2"]), ("h2", 1, &["r1", "r2"])], &[("r1", &["h1"]), ("r2", &[])])
    }

    #[test]
    fn lift_and_project_with_pending() {
        let i = pending_rival();
        let run = run_da(&i);
        assert_eq!(run.pend, set(&i, &[("r1", "h1")]));
        let p = Prescription::new(set(&i, &[("r2", "h1")]), set(&i, &[("r1", "h1")]));
        assert!(validate_prescription(&i, &p, Mode::General).unwrap().valid);

        let (hc, y) = project_prescription(&i, &p).unwrap();
        assert!(hc.is_hospital_complete());
        assert_eq!(hc.hospital_list(0), &[1, 0]);
        assert!(validate_prescription(&hc, &y, Mode::HospitalComplete).unwrap().valid);
        assert_eq!(y.x, p.x);

        let lifted = lift_prescription(&i, &hc, &y).unwrap();
        assert_eq!(lifted, p);
    }

    #[test]
    fn lift_adds_rejected_pending_matches() {
        // h1 lists r2 only; the completion ranks r1 below r2, who holds h1
        let i = Instance::from_names(&[("h1", 1, &["r2"])], &[("r1", &["h1"]), ("r2", &["h1"])]);
        let run = run_da(&i);
        assert_eq!(run.pend, MatchSet::new());
        let mut hc = i.clone();
        hc.push_hospital_pref(0, 0);
        let lifted = lift_prescription(&i, &hc, &Prescription::default()).unwrap();
        assert!(lifted.x.is_empty());

        let j = Instance::from_names(&[("h1", 2, &["r2"])], &[("r1", &["h1"]), ("r2", &["h1"]), ("r3", &["h1"])]);
        let mut jc = j.clone();
        jc.push_hospital_pref(0, 2);
        jc.push_hospital_pref(0, 0);
        let rj = run_da(&j);
        assert_eq!(rj.pend, set(&j, &[("r1", "h1"), ("r3", "h1")]));
        let lifted = lift_prescription(&j, &jc, &Prescription::default()).unwrap();
        assert_eq!(lifted.x, set(&j, &[("r1", "h1")]));
        assert_eq!(lift_prescription(&j, &j, &Prescription::default()), Err(RmError::NotAnExtension));
    }

    #[test]
    fn project_without_pending_keeps_x() {
        let i = single_chain();
        let p = Prescription::new(set(&i, &[("r2", "h1")]), set(&i, &[("r1", "h1")]));
        let (hc, y) = project_prescription(&i, &p).unwrap();
        assert_eq!(hc, i);
        assert_eq!(y, p);
    }

    #[test]
    fn overfull_pending_hospital_needs_no_fresh_proposer() {
        // h2 holds two pending residents on one seat; ranking r2 first frees r1
        let i = Instance::from_names(
            &[("h1", 1, &["r1", "r3"]), ("h2", 1, &["r3"])],
            &[("r1", &["h2"]), ("r2", &["h2"]), ("r3", &["h1"])],
        );
        let m = i.m("r3", "h1");
        let p = Prescription::new([i.m("r1", "h1")].into(), [i.m("r1", "h2"), m].into());
        let v = validate_prescription(&i, &p, Mode::General).unwrap();
        assert!(v.valid);
        assert_eq!(v.target, [m].into());
        let exact = crate::exact::ftm_bruteforce(&i, m, 1000).unwrap();
        assert_eq!(exact.finalizable(), Some(false));
    }
}
