//! Clause sets, DIMACS text, truth tables and the three-occurrence normal
//! form used by both reductions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

/// CNF over variables `1..=n_vars`; a literal is a signed variable index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseSet {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SatError {
    #[error("line {0}: {1}")]
    Dimacs(usize, String),
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("clause {0} repeats a literal")]
    RepeatedLiteral(usize),
    #[error("clause {0} uses variable {1}, outside 1..={2}")]
    BadVariable(usize, i32, usize),
    #[error("clause set is not in normal form (each variable twice positive, once negative)")]
    NotNormalized,
}

impl ClauseSet {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self, SatError> {
        for (i, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(SatError::EmptyClause(i));
            }
            for (k, &l) in c.iter().enumerate() {
                if l == 0 || l.unsigned_abs() as usize > n_vars {
                    return Err(SatError::BadVariable(i, l, n_vars));
                }
                if c[..k].contains(&l) {
                    return Err(SatError::RepeatedLiteral(i));
                }
            }
        }
        Ok(ClauseSet { n_vars, clauses })
    }

    /// `(positive, negative)` occurrence counts, indexed by variable - 1.
    fn occurrences(&self) -> Vec<(usize, usize)> {
        let mut occ = vec![(0, 0); self.n_vars];
        for &l in self.clauses.iter().flatten() {
            let e = &mut occ[l.unsigned_abs() as usize - 1];
            if l > 0 {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
        occ
    }

    /// Every variable occurs exactly twice positively and once negatively.
    pub fn is_normalized(&self) -> bool {
        self.n_vars > 0 && self.occurrences().iter().all(|&o| o == (2, 1))
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    /// First satisfying assignment in binary-counter order, if any.
    pub fn solve_truth_table(&self) -> Option<Vec<bool>> {
        assert!(self.n_vars <= 24, "truth tables are for small clause sets");
        (0u32..1 << self.n_vars)
            .map(|bits| (0..self.n_vars).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
            .find(|a| self.eval(a))
    }

    pub fn is_satisfiable(&self) -> bool {
        self.solve_truth_table().is_some()
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.n_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(s, "{l} ");
            }
            s.push_str("0\n");
        }
        s
    }
}

pub fn parse_dimacs(text: &str) -> Result<ClauseSet, SatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        let no = i + 1;
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(SatError::Dimacs(no, "bad problem line".into()));
            }
            let v = parts[2].parse().map_err(|_| SatError::Dimacs(no, "bad variable count".into()))?;
            let c = parts[3].parse().map_err(|_| SatError::Dimacs(no, "bad clause count".into()))?;
            header = Some((v, c));
            continue;
        }
        if header.is_none() {
            return Err(SatError::Dimacs(no, "clause before problem line".into()));
        }
        for tok in line.split_whitespace() {
            let l: i32 = tok.parse().map_err(|_| SatError::Dimacs(no, format!("bad literal `{tok}`")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else {
                cur.push(l);
            }
        }
    }
    if !cur.is_empty() {
        clauses.push(cur);
    }
    let (n_vars, n_clauses) = header.ok_or(SatError::Dimacs(0, "missing problem line".into()))?;
    if clauses.len() != n_clauses {
        return Err(SatError::Dimacs(0, format!("expected {n_clauses} clauses, found {}", clauses.len())));
    }
    ClauseSet::new(n_vars, clauses)
}

/// Satisfiable set returned when normalization leaves nothing: `(x ∨ ¬x) ∧ (x)`.
fn trivially_satisfiable() -> ClauseSet {
    ClauseSet { n_vars: 1, clauses: vec![vec![1, -1], vec![1]] }
}

/// Equisatisfiable clause set in which each variable occurs twice
/// positively and once negatively.
///
/// Pure variables (every occurrence of one sign, including variables
/// occurring once) are fixed to satisfy their clauses, repeatedly, since
/// dropping clauses changes other counts. A variable occurring three times
/// with both signs is kept, negated if it has two negative occurrences.
/// Any other variable gets one fresh copy per occurrence, tied together by
/// the cycle `¬x_i ∨ x_{i+1}`; copies standing for a negative occurrence are
/// then flipped. Inputs already in normal form are returned unchanged.
pub fn normalize_sat(s: &ClauseSet) -> ClauseSet {
    if s.is_normalized() {
        return s.clone();
    }
    let mut clauses = s.clauses.clone();
    loop {
        let cur = ClauseSet { n_vars: s.n_vars, clauses: clauses.clone() };
        let occ = cur.occurrences();
        let pure = clauses.iter().flatten().copied().find(|l| {
            let (p, n) = occ[l.unsigned_abs() as usize - 1];
            p == 0 || n == 0
        });
        let Some(pure) = pure else {
            break;
        };
        clauses.retain(|c| !c.contains(&pure));
    }
    if clauses.is_empty() {
        return trivially_satisfiable();
    }
    let occ = ClauseSet { n_vars: s.n_vars, clauses: clauses.clone() }.occurrences();
    let mut copies: BTreeMap<i32, Vec<(usize, usize)>> = BTreeMap::new();
    let mut order = Vec::new();
    for (ci, c) in clauses.iter().enumerate() {
        for (li, &l) in c.iter().enumerate() {
            if !copies.contains_key(&l.abs()) {
                order.push(l.abs());
            }
            copies.entry(l.abs()).or_default().push((ci, li));
        }
    }
    // variables in order of first appearance
    let mut out = clauses.clone();
    let mut n_vars = 0i32;
    for v in order {
        let sites = &copies[&v];
        let (p, n) = occ[v as usize - 1];
        if p + n == 3 {
            n_vars += 1;
            let flip = n == 2;
            for &(ci, li) in sites {
                let positive = (clauses[ci][li] > 0) != flip;
                out[ci][li] = if positive { n_vars } else { -n_vars };
            }
            continue;
        }
        let base = n_vars;
        let mut flipped = Vec::new();
        for &(ci, li) in sites {
            n_vars += 1;
            // a copy of a negative occurrence is renamed to its negation
            flipped.push(clauses[ci][li] < 0);
            out[ci][li] = n_vars;
        }
        let k = sites.len();
        for i in 0..k {
            let lit = |j: usize, positive: bool| {
                let x = base + j as i32 + 1;
                if positive != flipped[j] { x } else { -x }
            };
            out.push(vec![lit(i, false), lit((i + 1) % k, true)]);
        }
    }
    ClauseSet { n_vars: n_vars as usize, clauses: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(n: usize, c: &[&[i32]]) -> ClauseSet {
        ClauseSet::new(n, c.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn dimacs_round_trip() {
        let s = cs(3, &[&[1, -2], &[2, 3], &[-1]]);
        assert_eq!(parse_dimacs(&s.to_dimacs()).unwrap(), s);
        let t = "c comment\np cnf 2 2\n1 -2 0\n2\n0\n";
        assert_eq!(parse_dimacs(t).unwrap(), cs(2, &[&[1, -2], &[2]]));
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
    }

    #[test]
    fn invariants() {
        assert_eq!(ClauseSet::new(1, vec![vec![]]), Err(SatError::EmptyClause(0)));
        assert_eq!(ClauseSet::new(1, vec![vec![1, 1]]), Err(SatError::RepeatedLiteral(0)));
    }

    #[test]
    fn normal_form_is_kept() {
        let s = cs(1, &[&[1, -1], &[1]]);
        assert!(s.is_normalized());
        assert_eq!(normalize_sat(&s), s);
    }

    #[test]
    fn x_or_y() {
        let s = cs(2, &[&[1, 2]]);
        let n = normalize_sat(&s);
        assert!(n.is_normalized());
        assert!(n.is_satisfiable());
    }

    #[test]
    fn x_and_not_x() {
        let s = cs(1, &[&[1], &[-1]]);
        let n = normalize_sat(&s);
        assert!(n.is_normalized());
        assert_eq!(n.n_vars, 2);
        assert!(!n.is_satisfiable());
    }

    #[test]
    fn four_occurrences_become_four_copies() {
        let s = cs(2, &[&[1, 2], &[-1, -2], &[1, 2], &[-1, 2]]);
        let n = normalize_sat(&s);
        assert!(n.is_normalized());
        assert_eq!(n.n_vars, 8);
        assert_eq!(n.clauses.len(), 12);
        assert_eq!(n.is_satisfiable(), s.is_satisfiable());
    }

    #[test]
    fn mixed_triple_is_kept_and_pure_variables_fixed() {
        // x2 is pure; x1 then occurs once positively and twice negatively
        let s = cs(2, &[&[1, 2], &[-1], &[-1, 1], &[-1, 2]]);
        let n = normalize_sat(&s);
        assert!(n.is_normalized());
        assert_eq!(n.n_vars, 1);
        assert_eq!(n.clauses, vec![vec![1], vec![1, -1]]);
    }
}
