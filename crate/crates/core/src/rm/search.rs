//! Exhaustive minimum-|P| prescription search.

use crate::engine::{run_da, ExecResult};
use crate::instance::{Instance, Match, MatchSet};
use crate::minimal::is_resident_minimal_given;

use super::{check_conditions, Mode, Prescription, RmError};

/// Searches general-mode prescriptions whose target contains `m`, by
/// increasing `|P|`. Among those of minimum size the smallest in the
/// lexicographic order of `(P, X)` is returned. Exponential; meant for small
/// instances.
pub fn find_prescription(inst: &Instance, m: Match) -> Result<Option<Prescription>, RmError> {
    let run = run_da(inst);
    if !is_resident_minimal_given(inst, &run) {
        return Err(RmError::NotResidentMinimal);
    }
    if !run.tent.contains(&m) {
        return Err(RmError::NotTentative(inst.fmt_match(m)));
    }
    if run.pend.contains(&m) {
        return Err(RmError::PendingQuery(inst.fmt_match(m)));
    }
    let s = Search { inst, run: &run, m };
    for k in 0..inst.n_residents() {
        let mut best: Option<Prescription> = None;
        let mut load = vec![0; inst.n_hospitals()];
        s.choose_p(0, k, &mut Vec::new(), &mut load, &mut best);
        if best.is_some() {
            return Ok(best);
        }
    }
    Ok(None)
}

struct Search<'a> {
    inst: &'a Instance,
    run: &'a ExecResult,
    m: Match,
}

impl Search<'_> {
    fn choose_p(&self, r: usize, k: usize, p: &mut Vec<Match>, load: &mut [usize], best: &mut Option<Prescription>) {
        if p.len() == k {
            self.choose_x(p.iter().copied().collect(), load, best);
            return;
        }
        if r == self.inst.n_residents() || self.inst.n_residents() - r < k - p.len() {
            return;
        }
        if r != self.m.r {
            for h in 0..self.inst.n_hospitals() {
                let cand = Match::new(r, h);
                // P5 bounds the proposals each hospital can absorb
                if self.run.prop.contains(&cand) || load[h] == self.inst.quota(h) {
                    continue;
                }
                p.push(cand);
                load[h] += 1;
                self.choose_p(r + 1, k, p, load, best);
                load[h] -= 1;
                p.pop();
            }
        }
        self.choose_p(r + 1, k, p, load, best);
    }

    /// P5 fixes how many tentative matches each hospital must give up; try
    /// every choice of that many.
    fn choose_x(&self, p: MatchSet, load: &[usize], best: &mut Option<Prescription>) {
        let n_h = self.inst.n_hospitals();
        let mut options: Vec<Vec<Vec<Match>>> = Vec::with_capacity(n_h);
        for (h, &l) in load.iter().enumerate() {
            let tents: Vec<Match> = self.run.tent.iter().filter(|x| x.h == h).copied().collect();
            let excess = (l + tents.len()).saturating_sub(self.inst.quota(h));
            let forced = |x: &Match| *x == self.m || p.iter().any(|y| y.r == x.r);
            let subsets: Vec<Vec<Match>> = subsets_of_size(&tents, excess)
                .into_iter()
                .filter(|sub| tents.iter().all(|x| !forced(x) || sub.contains(x)))
                .collect();
            if subsets.is_empty() {
                return;
            }
            options.push(subsets);
        }
        let mut pick = vec![0; n_h];
        loop {
            let x: MatchSet = (0..n_h).flat_map(|h| options[h][pick[h]].iter().copied()).collect();
            let cand = Prescription::new(p.clone(), x);
            let v = check_conditions(self.inst, self.run, &cand, Mode::General);
            if v.valid && v.target.contains(&self.m) && best.as_ref().is_none_or(|b| cand < *b) {
                *best = Some(cand);
            }
            let mut h = 0;
            while h < n_h {
                pick[h] += 1;
                if pick[h] < options[h].len() {
                    break;
                }
                pick[h] = 0;
                h += 1;
            }
            if h == n_h {
                return;
            }
        }
    }
}

fn subsets_of_size(items: &[Match], k: usize) -> Vec<Vec<Match>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in subsets_of_size(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
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

    #[test]
    fn top_of_complete_list_has_none() {
        let i = Instance::from_names(&[("h1", 1, &["r1", "r2"]), ("h2", 1, &["r1", "r2"])], &[("r1", &["h1"]), ("r2", &[])]);
        assert_eq!(find_prescription(&i, i.m("r1", "h1")).unwrap(), None);
    }

    #[test]
    fn single_chain() {
        let i = Instance::from_names(&[("h1", 1, &["r2", "r1"]), ("h2", 1, &["r1", "r2"])], &[("r1", &["h1"]), ("r2", &[])]);
        let p = find_prescription(&i, i.m("r1", "h1")).unwrap().unwrap();
        assert_eq!(p, Prescription::new(set(&i, &[("r2", "h1")]), set(&i, &[("r1", "h1")])));
    }

    #[test]
    fn pending_query_is_refused() {
        let i = Instance::from_names(&[("h1", 1, &[])], &[("r1", &["h1"])]);
        assert!(matches!(find_prescription(&i, i.m("r1", "h1")), Err(RmError::PendingQuery(_))));
    }

    #[test]
    fn subset_enumeration() {
        let items: Vec<Match> = (0..4).map(|r| Match::new(r, 0)).collect();
        assert_eq!(subsets_of_size(&items, 2).len(), 6);
        assert_eq!(subsets_of_size(&items, 0), vec![Vec::<Match>::new()]);
        assert!(subsets_of_size(&items, 5).is_empty());
    }
}
