//! Oracles and generators shared by the integration tests. The oracles
//! are written independently of the library's search code.

#![allow(dead_code)]

use finalize::gen::{random_instance, ClauseSet, RandomParams};
use finalize::{run_da, Instance, Match};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every completion of `inst`, built literally: each list gets every
/// permutation of its missing entries appended. Calls `f` until it returns
/// false; returns whether the enumeration ran to the end.
pub fn for_each_completion(inst: &Instance, mut f: impl FnMut(&Instance) -> bool) -> bool {
    let mut tails: Vec<Vec<Vec<usize>>> = Vec::new();
    for r in 0..inst.n_residents() {
        let missing: Vec<usize> = (0..inst.n_hospitals()).filter(|h| !inst.resident_list(r).contains(h)).collect();
        tails.push(permutations(&missing));
    }
    for h in 0..inst.n_hospitals() {
        let missing: Vec<usize> = (0..inst.n_residents()).filter(|&r| !inst.is_listed(h, r)).collect();
        tails.push(permutations(&missing));
    }
    let mut pick = vec![0; tails.len()];
    loop {
        let mut j = inst.clone();
        for (slot, &k) in pick.iter().enumerate() {
            for &x in &tails[slot][k] {
                if slot < inst.n_residents() {
                    j.push_resident_pref(slot, x);
                } else {
                    j.push_hospital_pref(slot - inst.n_residents(), x);
                }
            }
        }
        if !f(&j) {
            return false;
        }
        let mut i = 0;
        loop {
            if i == pick.len() {
                return true;
            }
            pick[i] += 1;
            if pick[i] < tails[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

pub fn permutations(xs: &[usize]) -> Vec<Vec<usize>> {
    if xs.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// `m` is tentative in every completion.
pub fn literally_finalizable(inst: &Instance, m: Match) -> bool {
    for_each_completion(inst, |j| run_da(j).tent.contains(&m))
}

/// Textbook resident-proposing deferred acceptance with quotas, for
/// complete instances. Returns the matched pairs.
pub fn textbook_da(inst: &Instance) -> Vec<Match> {
    let (nr, nh) = (inst.n_residents(), inst.n_hospitals());
    let mut next = vec![0; nr];
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); nh];
    let mut free: Vec<usize> = (0..nr).rev().collect();
    while let Some(r) = free.pop() {
        let Some(&h) = inst.resident_list(r).get(next[r]) else {
            continue;
        };
        next[r] += 1;
        held[h].push(r);
        held[h].sort_by_key(|&x| inst.rank(h, x).expect("complete"));
        if held[h].len() > inst.quota(h) {
            free.push(held[h].pop().expect("non-empty"));
        }
    }
    let mut out: Vec<Match> =
        held.iter().enumerate().flat_map(|(h, rs)| rs.iter().map(move |&r| Match::new(r, h))).collect();
    out.sort();
    out
}

/// A random instance with sizes drawn up to the given bounds.
pub fn small_instance(seed: u64, max_r: usize, max_h: usize, max_q: usize, rm: bool, hc: bool) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let nr = rng.random_range(1..=max_r);
    let nh = rng.random_range(1..=max_h);
    let params = RandomParams::new(nr, nh, max_q).resident_minimal(rm).hospital_complete(hc);
    random_instance(&params, seed).expect("valid bounds")
}

/// Drops resident-list entries whose hospital does not rank the resident.
pub fn ranked_entries_only(inst: &Instance) -> Instance {
    let mut out = inst.clone();
    for r in 0..inst.n_residents() {
        let keep: Vec<usize> = inst.resident_list(r).iter().copied().filter(|&h| inst.is_listed(h, r)).collect();
        out.set_resident_list(r, keep).expect("subset of a valid list");
    }
    out
}

/// Up to `max_vars` variables and five clauses of one to three distinct
/// literals each.
pub fn random_clause_set(seed: u64, max_vars: usize) -> ClauseSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_vars);
    let m = rng.random_range(1..=5usize);
    let clauses = (0..m)
        .map(|_| {
            let k = rng.random_range(1..=n.min(3));
            let mut vs: Vec<i32> = (1..=n as i32).collect();
            vs.shuffle(&mut rng);
            vs.truncate(k);
            vs.into_iter().map(|v| if rng.random_bool(0.5) { v } else { -v }).collect()
        })
        .collect();
    ClauseSet::new(n, clauses).expect("clauses are non-empty and duplicate-free")
}
