//! The rejection-chain digraph for resident-minimal marriage instances.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::engine::{res, run_da, ExecResult};
use crate::instance::{Instance, Match, MatchSet};
use crate::minimal::is_resident_minimal_given;

use super::RmError;

/// Vertices are tentative matches (T) and unproposed pairs (P). A T vertex
/// points to every P vertex of its resident; a P vertex `(r',h)` points to the
/// T vertex `(r,h)` when `h` lists `r'` above `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigraphGI {
    pub t_vertices: MatchSet,
    pub p_vertices: MatchSet,
    pub edges: BTreeSet<(Match, Match)>,
    /// Vertices without incoming edges.
    pub roots: MatchSet,
}

impl DigraphGI {
    fn predecessors(&self) -> BTreeMap<Match, Vec<Match>> {
        let mut pred: BTreeMap<Match, Vec<Match>> = BTreeMap::new();
        for &(a, b) in &self.edges {
            pred.entry(b).or_default().push(a);
        }
        pred
    }
}

/// Where rejection chains may start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RootPolicy {
    /// Unproposed pairs of free residents, plus every pending match.
    #[default]
    WithPending,
    /// Unproposed pairs of free residents only.
    POnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RmMarriageAnswer {
    pub finalizable: bool,
    /// A chain from a start vertex to the query, when one exists.
    pub path: Option<Vec<Match>>,
}

fn check_rm_marriage(inst: &Instance, run: &ExecResult) -> Result<(), RmError> {
    if let Some(h) = (0..inst.n_hospitals()).find(|&h| inst.quota(h) > 1) {
        return Err(RmError::QuotaAboveOne(inst.hospital_name(h).to_string()));
    }
    if !is_resident_minimal_given(inst, run) {
        return Err(RmError::NotResidentMinimal);
    }
    Ok(())
}

pub fn build_gi(inst: &Instance) -> Result<DigraphGI, RmError> {
    let run = run_da(inst);
    check_rm_marriage(inst, &run)?;
    Ok(gi_given(inst, &run))
}

fn gi_given(inst: &Instance, run: &ExecResult) -> DigraphGI {
    let t_vertices = run.tent.clone();
    let mut p_vertices = MatchSet::new();
    for r in 0..inst.n_residents() {
        for h in 0..inst.n_hospitals() {
            let m = Match::new(r, h);
            if !run.prop.contains(&m) {
                p_vertices.insert(m);
            }
        }
    }
    let mut edges = BTreeSet::new();
    for &t in &t_vertices {
        for &p in p_vertices.iter().filter(|p| p.r == t.r) {
            edges.insert((t, p));
        }
        if let Some(rank) = inst.rank(t.h, t.r) {
            for &r2 in &inst.hospital_list(t.h)[..rank] {
                let p = Match::new(r2, t.h);
                if p_vertices.contains(&p) {
                    edges.insert((p, t));
                }
            }
        }
    }
    let targets: MatchSet = edges.iter().map(|e| e.1).collect();
    let roots = t_vertices.iter().chain(&p_vertices).filter(|v| !targets.contains(v)).copied().collect();
    DigraphGI { t_vertices, p_vertices, edges, roots }
}

/// Decides whether `m` survives every completion, by searching for a
/// rejection chain ending at `m`.
pub fn ftm_rm_marriage(inst: &Instance, m: Match, policy: RootPolicy) -> Result<RmMarriageAnswer, RmError> {
    let run = run_da(inst);
    check_rm_marriage(inst, &run)?;
    if !run.tent.contains(&m) {
        return Err(RmError::NotTentative(inst.fmt_match(m)));
    }
    let g = gi_given(inst, &run);
    let matched = res(&run.tent);
    let starts: MatchSet = g
        .roots
        .iter()
        .filter(|v| match policy {
            RootPolicy::WithPending => (g.p_vertices.contains(v) && !matched.contains(&v.r)) || run.pend.contains(v),
            RootPolicy::POnly => g.p_vertices.contains(v) && !matched.contains(&v.r),
        })
        .copied()
        .collect();
    // backwards search from m, so the path comes out start-first
    let pred = g.predecessors();
    let mut next: BTreeMap<Match, Match> = BTreeMap::new();
    let mut queue = VecDeque::from([m]);
    let mut seen = MatchSet::from([m]);
    while let Some(v) = queue.pop_front() {
        if starts.contains(&v) {
            let mut path = vec![v];
            let mut cur = v;
            while let Some(&n) = next.get(&cur) {
                path.push(n);
                cur = n;
            }
            return Ok(RmMarriageAnswer { finalizable: false, path: Some(path) });
        }
        for &u in pred.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(u) {
                next.insert(u, v);
                queue.push_back(u);
            }
        }
    }
    Ok(RmMarriageAnswer { finalizable: true, path: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_tent_gives_only_roots() {
        let i = Instance::from_names(&[("h1", 1, &["r1"]), ("h2", 1, &[])], &[("r1", &[])]);
        let g = build_gi(&i).unwrap();
        assert!(g.t_vertices.is_empty());
        assert_eq!(g.p_vertices.len(), 2);
        assert_eq!(g.roots, g.p_vertices);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn edges_by_definition() {
        let i = Instance::from_names(&[("h1", 1, &["r2", "r1"]), ("h2", 1, &["r2"])], &[("r1", &["h1"]), ("r2", &["h2"])]);
        let g = build_gi(&i).unwrap();
        let (r2h1, r1h1, r2h2) = (i.m("r2", "h1"), i.m("r1", "h1"), i.m("r2", "h2"));
        assert!(g.edges.contains(&(r2h1, r1h1)));
        assert!(g.edges.contains(&(r2h2, r2h1)));
        assert!(!g.roots.contains(&r2h1));
        assert!(ftm_rm_marriage(&i, r1h1, RootPolicy::WithPending).unwrap().finalizable);
    }

    #[test]
    fn tenants_on_top_have_no_incoming_edges() {
        let i = Instance::from_names(
            &[("h1", 1, &["r1", "r2", "r3"]), ("h2", 1, &["r2", "r3", "r1"]), ("h3", 1, &["r3", "r1", "r2"])],
            &[("r1", &["h1"]), ("r2", &["h2"]), ("r3", &["h3"])],
        );
        let g = build_gi(&i).unwrap();
        for t in &g.t_vertices {
            assert!(g.edges.iter().all(|e| e.1 != *t));
        }
        for p in &g.p_vertices {
            assert_eq!(g.edges.iter().filter(|e| e.1 == *p).count(), 1);
        }
        for &t in &g.t_vertices {
            for policy in [RootPolicy::WithPending, RootPolicy::POnly] {
                assert!(ftm_rm_marriage(&i, t, policy).unwrap().finalizable);
            }
        }
    }

    #[test]
    fn single_chain_is_not_finalizable() {
        let i = Instance::from_names(&[("h1", 1, &["r2", "r1"]), ("h2", 1, &["r1", "r2"])], &[("r1", &["h1"]), ("r2", &[])]);
        let m = i.m("r1", "h1");
        let ans = ftm_rm_marriage(&i, m, RootPolicy::POnly).unwrap();
        assert!(!ans.finalizable);
        assert_eq!(ans.path, Some(vec![i.m("r2", "h1"), m]));
    }

    #[test]
    fn policies_disagree_on_lone_pending_match() {
        // r1 pends at h1 and nobody can ever reach h1
        let i = Instance::from_names(&[("h1", 1, &[]), ("h2", 1, &["r2", "r1"])], &[("r1", &["h1"]), ("r2", &["h2"])]);
        let m = i.m("r1", "h1");
        assert!(!ftm_rm_marriage(&i, m, RootPolicy::WithPending).unwrap().finalizable);
        assert!(ftm_rm_marriage(&i, m, RootPolicy::POnly).unwrap().finalizable);
    }

    #[test]
    fn preconditions() {
        let q2 = Instance::from_names(&[("h1", 2, &[])], &[("r1", &["h1"])]);
        assert!(matches!(build_gi(&q2), Err(RmError::QuotaAboveOne(_))));
        let i = Instance::from_names(&[("h1", 1, &["r1"])], &[("r1", &[])]);
        assert!(matches!(ftm_rm_marriage(&i, Match::new(0, 0), RootPolicy::WithPending), Err(RmError::NotTentative(_))));
    }
}
