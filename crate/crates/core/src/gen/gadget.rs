//! SAT to the complement of 1-FTM: the activation gadget.
//!
//! Per variable `x`, two free residents `r_x^1`, `r_x^2` decide whether
//! `p_x^0` (the negative occurrence) or both of `p_x^1`, `p_x^2` get pushed
//! out of their variable hospitals and on to their clause hospital. An
//! activated occurrence ousts `r_0` from its clause hospital; `r_0` walking
//! through every clause hospital reaches `h_0` and ousts `r_1`.

use crate::instance::{Instance, Match};

use super::sat::{ClauseSet, SatError};

/// Names used by the gadget, handy for decoding counterexamples.
pub fn gadget_resident(kind: &str, var: usize, i: usize) -> String {
    format!("{kind}{var}_{i}")
}

/// Builds the instance and the query `(r_1, h_0)`.
pub fn sat_to_ftm(s: &ClauseSet) -> Result<(Instance, Match), SatError> {
    if !s.is_normalized() {
        return Err(SatError::NotNormalized);
    }
    let n = s.n_vars;
    let m = s.clauses.len();
    // occurrences per variable: negative clause, then positive ones in order
    let mut neg = vec![0; n];
    let mut pos: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, c) in s.clauses.iter().enumerate() {
        for &l in c {
            let v = l.unsigned_abs() as usize - 1;
            if l < 0 {
                neg[v] = j;
            } else {
                pos[v].push(j);
            }
        }
    }

    let mut residents = vec!["r0".to_string(), "r1".to_string()];
    for v in 1..=n {
        residents.push(gadget_resident("rx", v, 1));
        residents.push(gadget_resident("rx", v, 2));
        for i in 0..3 {
            residents.push(gadget_resident("px", v, i));
        }
    }
    let rx = |v: usize, i: usize| 2 + 5 * v + (i - 1);
    let px = |v: usize, i: usize| 2 + 5 * v + 2 + i;

    let mut hospitals = vec!["h0".to_string()];
    for v in 1..=n {
        hospitals.push(format!("hn{v}_1"));
        hospitals.push(format!("hn{v}_2"));
        hospitals.push(format!("hp{v}_1"));
        hospitals.push(format!("hp{v}_2"));
    }
    for j in 1..=m {
        hospitals.push(format!("hc{j}"));
    }
    let hn = |v: usize, i: usize| 1 + 4 * v + (i - 1);
    let hp = |v: usize, i: usize| 1 + 4 * v + 2 + (i - 1);
    let hc = |j: usize| 1 + 4 * n + j;

    let mut hlist = vec![Vec::new(); hospitals.len()];
    hlist[0] = vec![0, 1];
    for v in 0..n {
        for i in 1..=2 {
            hlist[hn(v, i)] = vec![rx(v, i), px(v, 0)];
            hlist[hp(v, i)] = vec![rx(v, i), px(v, i)];
        }
    }
    // the resident standing for the k-th literal of clause j
    let occupant = |j: usize, l: i32| {
        let v = l.unsigned_abs() as usize - 1;
        if l < 0 {
            px(v, 0)
        } else {
            px(v, 1 + pos[v].iter().position(|&c| c == j).expect("positive occurrence"))
        }
    };
    for (j, c) in s.clauses.iter().enumerate() {
        let mut list: Vec<usize> = c.iter().map(|&l| occupant(j, l)).collect();
        list.push(0);
        hlist[hc(j)] = list;
    }

    let mut rlist = vec![Vec::new(); residents.len()];
    rlist[0] = (0..m).map(hc).chain([0]).collect();
    rlist[1] = vec![0];
    for v in 0..n {
        rlist[px(v, 0)] = vec![hn(v, 1), hn(v, 2), hc(neg[v])];
        for i in 1..=2 {
            rlist[px(v, i)] = vec![hp(v, i), hc(pos[v][i - 1])];
        }
    }
    let quota = vec![1; hospitals.len()];
    let inst = Instance::from_parts(residents, hospitals, quota, rlist, hlist).expect("gadget is well formed");
    Ok((inst, Match::new(1, 0)))
}

/// Reads a truth assignment off a completion that rejects the query:
/// `x` is false exactly when `p_x^0` reached its clause hospital.
pub fn decode_assignment(s: &ClauseSet, j: &Instance) -> Vec<bool> {
    let prop = crate::engine::run_da(j).prop;
    (1..=s.n_vars)
        .map(|v| {
            let p0 = j.resident(&gadget_resident("px", v, 0)).expect("gadget resident");
            let clause = j.resident_list(p0)[2];
            !prop.contains(&Match::new(p0, clause))
        })
        .collect()
}
