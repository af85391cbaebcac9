//! Resident-minimality and list completion utilities.

use thiserror::Error;

use crate::engine::{run_da, ExecResult};
use crate::instance::{Instance, Match};

/// True iff every entry of every resident list gets proposed.
pub fn is_resident_minimal(inst: &Instance) -> bool {
    is_resident_minimal_given(inst, &run_da(inst))
}

pub(crate) fn is_resident_minimal_given(inst: &Instance, res: &ExecResult) -> bool {
    (0..inst.n_residents())
        .all(|r| inst.resident_list(r).iter().all(|&h| res.prop.contains(&Match::new(r, h))))
}

/// Cuts each resident list to the prefix the engine actually proposed.
pub fn resident_minimal_truncation(inst: &Instance) -> Instance {
    let res = run_da(inst);
    let mut out = inst.clone();
    for r in 0..inst.n_residents() {
        let used = inst
            .resident_list(r)
            .iter()
            .take_while(|&&h| res.prop.contains(&Match::new(r, h)))
            .count();
        out.truncate_resident_list(r, used);
    }
    out
}

/// How missing residents are appended to a hospital list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompletionPolicy {
    /// By resident name.
    Lexicographic,
    /// By resident declaration order.
    Declaration,
    /// Per hospital, the exact order of its missing residents.
    Specified(Vec<Vec<usize>>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompletionError {
    #[error("specified order for hospital `{0}` is not a permutation of its missing residents")]
    NotAPermutation(String),
    #[error("specified orders given for {0} hospitals, expected {1}")]
    WrongLength(usize, usize),
}

/// Extends every hospital list to contain all residents; existing prefixes and
/// resident lists are untouched.
pub fn hospital_complete_extension(inst: &Instance, policy: &CompletionPolicy) -> Result<Instance, CompletionError> {
    let mut out = inst.clone();
    if let CompletionPolicy::Specified(orders) = policy {
        if orders.len() != inst.n_hospitals() {
            return Err(CompletionError::WrongLength(orders.len(), inst.n_hospitals()));
        }
    }
    for h in 0..inst.n_hospitals() {
        let mut missing: Vec<usize> = (0..inst.n_residents()).filter(|&r| !inst.is_listed(h, r)).collect();
        match policy {
            CompletionPolicy::Lexicographic => missing.sort_by(|&a, &b| inst.resident_name(a).cmp(inst.resident_name(b))),
            CompletionPolicy::Declaration => {}
            CompletionPolicy::Specified(orders) => {
                let mut given = orders[h].clone();
                given.sort_unstable();
                if given != missing {
                    return Err(CompletionError::NotAPermutation(inst.hospital_name(h).to_string()));
                }
                missing = orders[h].clone();
            }
        }
        for r in missing {
            out.push_hospital_pref(h, r);
        }
    }
    Ok(out)
}
