//! Digraph firing: instances, the SAT reduction, the reduction to 2-FTM-RM
//! and exhaustive firing search.
//!
//! A θ-firing is a set of edges in which every endpoint has in-degree at
//! least its threshold and out-degree at most one. Its vertex set is the set
//! of endpoints plus any isolated vertices named explicitly; an isolated
//! vertex is only allowed when its threshold is zero.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::instance::{Instance, Match};

use super::sat::{ClauseSet, SatError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiringInstance {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub target: usize,
    pub theta: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Firing {
    /// Indices into the instance's edge list.
    pub edges: Vec<usize>,
    pub isolated: Vec<usize>,
}

impl Firing {
    pub fn vertices(&self, f: &FiringInstance) -> BTreeSet<usize> {
        let mut vs: BTreeSet<usize> = self.edges.iter().flat_map(|&e| [f.edges[e].0, f.edges[e].1]).collect();
        vs.extend(&self.isolated);
        vs
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FiringError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("graph has a cycle")]
    Cyclic,
    #[error("target `{0}` has outgoing edges")]
    TargetNotSink(String),
    #[error("target `{0}` has no incoming edges")]
    TargetIsRoot(String),
    #[error("vertex `{0}` has threshold 0 but incoming edges; hospitals need a positive quota")]
    ZeroThreshold(String),
    #[error("{0} edges exceed the enumeration cap of {1}")]
    CapExceeded(usize, usize),
    #[error(transparent)]
    Sat(#[from] SatError),
}

pub const DEFAULT_EDGE_CAP: usize = 20;

impl FiringInstance {
    fn in_neighbors(&self, v: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.1 == v).map(|e| e.0).collect()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.vertices.len();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.in_degree(v)).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for e in self.edges.iter().filter(|e| e.0 == v) {
                indeg[e.1] -= 1;
                if indeg[e.1] == 0 {
                    stack.push(e.1);
                }
            }
        }
        seen == n
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (v, name) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "vertex {name} theta {}", self.theta[v]);
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "edge {} {}", self.vertices[u], self.vertices[v]);
        }
        let _ = writeln!(s, "target {}", self.vertices[self.target]);
        s
    }
}

/// Parses `vertex <id> theta <n>`, `edge <u> <v>` and `target <id>` lines.
pub fn parse_firing(text: &str) -> Result<FiringInstance, FiringError> {
    let mut vertices: Vec<String> = Vec::new();
    let mut theta = Vec::new();
    let mut edges = Vec::new();
    let mut target = None;
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<&str>>()))
        .filter(|(_, t)| !t.is_empty())
        .collect();
    for (no, t) in &lines {
        if t[0] == "vertex" {
            if t.len() != 4 || t[2] != "theta" {
                return Err(FiringError::Parse(*no, "expected `vertex <id> theta <n>`".into()));
            }
            if vertices.iter().any(|v| v == t[1]) {
                return Err(FiringError::Parse(*no, format!("duplicate vertex `{}`", t[1])));
            }
            let th = t[3].parse().map_err(|_| FiringError::Parse(*no, format!("bad threshold `{}`", t[3])))?;
            vertices.push(t[1].to_string());
            theta.push(th);
        }
    }
    let find = |no: usize, name: &str| {
        vertices.iter().position(|v| v == name).ok_or_else(|| FiringError::Parse(no, format!("unknown vertex `{name}`")))
    };
    for (no, t) in &lines {
        match t[0] {
            "vertex" => {}
            "edge" if t.len() == 3 => {
                let e = (find(*no, t[1])?, find(*no, t[2])?);
                if edges.contains(&e) {
                    return Err(FiringError::Parse(*no, "duplicate edge".into()));
                }
                edges.push(e);
            }
            "target" if t.len() == 2 => {
                if target.is_some() {
                    return Err(FiringError::Parse(*no, "second target".into()));
                }
                target = Some(find(*no, t[1])?);
            }
            _ => return Err(FiringError::Parse(*no, format!("unrecognized line starting with `{}`", t[0]))),
        }
    }
    let target = target.ok_or(FiringError::Parse(0, "missing target line".into()))?;
    Ok(FiringInstance { vertices, edges, target, theta })
}

/// True iff `sub` (edge indices) is a θ-firing.
pub fn check_firing(f: &FiringInstance, sub: &[usize]) -> bool {
    let n = f.vertices.len();
    let (mut indeg, mut outdeg, mut used) = (vec![0; n], vec![0; n], vec![false; n]);
    for &e in sub {
        let (u, v) = f.edges[e];
        outdeg[u] += 1;
        indeg[v] += 1;
        used[u] = true;
        used[v] = true;
    }
    (0..n).all(|v| !used[v] || (indeg[v] >= f.theta[v] && outdeg[v] <= 1))
}

/// Tries every edge subset in binary-counter order.
pub fn find_firing_bruteforce(f: &FiringInstance, must_contain: usize, cap: usize) -> Result<Option<Firing>, FiringError> {
    if f.edges.len() > cap {
        return Err(FiringError::CapExceeded(f.edges.len(), cap));
    }
    if f.theta[must_contain] == 0 {
        return Ok(Some(Firing { edges: Vec::new(), isolated: vec![must_contain] }));
    }
    for bits in 1u64..1 << f.edges.len() {
        let sub: Vec<usize> = (0..f.edges.len()).filter(|&e| bits >> e & 1 == 1).collect();
        if sub.iter().any(|&e| f.edges[e].0 == must_contain || f.edges[e].1 == must_contain) && check_firing(f, &sub) {
            return Ok(Some(Firing { edges: sub, isolated: Vec::new() }));
        }
    }
    Ok(None)
}

/// Exhaustive search over in-trees rooted at `must_contain`.
///
/// Any firing containing a vertex contains an in-tree in which every vertex
/// has exactly its threshold many children: out-degree one means no vertex
/// can feed two parents. So it suffices to grow such trees, which scales far
/// beyond subset enumeration.
pub fn find_firing(f: &FiringInstance, must_contain: usize) -> Option<Firing> {
    if f.theta[must_contain] == 0 {
        return Some(Firing { edges: Vec::new(), isolated: vec![must_contain] });
    }
    let mut used = vec![false; f.vertices.len()];
    used[must_contain] = true;
    let mut edges = Vec::new();
    if grow(f, &mut vec![must_contain], &mut used, &mut edges) {
        edges.sort_unstable();
        Some(Firing { edges, isolated: Vec::new() })
    } else {
        None
    }
}

fn grow(f: &FiringInstance, open: &mut Vec<usize>, used: &mut [bool], edges: &mut Vec<usize>) -> bool {
    let Some(v) = open.pop() else {
        return true;
    };
    let cands: Vec<usize> = (0..f.edges.len()).filter(|&e| f.edges[e].1 == v && !used[f.edges[e].0]).collect();
    let need = f.theta[v];
    let ok = choose(f, &cands, need, 0, open, used, edges);
    if !ok {
        open.push(v);
    }
    ok
}

fn choose(
    f: &FiringInstance,
    cands: &[usize],
    need: usize,
    from: usize,
    open: &mut Vec<usize>,
    used: &mut [bool],
    edges: &mut Vec<usize>,
) -> bool {
    if need == 0 {
        return grow(f, open, used, edges);
    }
    for i in from..cands.len() {
        let e = cands[i];
        let u = f.edges[e].0;
        if used[u] || cands.len() - i < need {
            continue;
        }
        used[u] = true;
        edges.push(e);
        let pushed = f.theta[u] > 0;
        if pushed {
            open.push(u);
        }
        if choose(f, cands, need - 1, i + 1, open, used, edges) {
            return true;
        }
        if pushed {
            open.retain(|&x| x != u);
        }
        edges.pop();
        used[u] = false;
    }
    false
}

/// Clause chain `a_i → b_i → b_{i+1}` with variable gadgets feeding the
/// `a_i`; the target is `b_m`.
pub fn sat_to_firing(s: &ClauseSet) -> Result<FiringInstance, SatError> {
    if !s.is_normalized() {
        return Err(SatError::NotNormalized);
    }
    let (n, m) = (s.n_vars, s.clauses.len());
    let mut vertices = Vec::new();
    for i in 1..=m {
        vertices.push(format!("a{i}"));
    }
    for i in 1..=m {
        vertices.push(format!("b{i}"));
    }
    for x in 1..=n {
        for k in ["u", "v", "ln", "l1", "l2"] {
            vertices.push(format!("{k}{x}"));
        }
    }
    let a = |i: usize| i;
    let b = |i: usize| m + i;
    let g = |x: usize, k: usize| 2 * m + 5 * x + k;
    let mut edges = Vec::new();
    for i in 0..m {
        edges.push((a(i), b(i)));
    }
    for i in 0..m.saturating_sub(1) {
        edges.push((b(i), b(i + 1)));
    }
    let mut neg = vec![0; n];
    let mut pos: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, c) in s.clauses.iter().enumerate() {
        for &l in c {
            let x = l.unsigned_abs() as usize - 1;
            if l < 0 {
                neg[x] = j;
            } else {
                pos[x].push(j);
            }
        }
    }
    for x in 0..n {
        let (u, v, ln, l1, l2) = (g(x, 0), g(x, 1), g(x, 2), g(x, 3), g(x, 4));
        edges.extend([(u, ln), (v, ln), (u, l1), (v, l2), (ln, a(neg[x])), (l1, a(pos[x][0])), (l2, a(pos[x][1]))]);
    }
    let mut f = FiringInstance { vertices, edges, target: b(m - 1), theta: Vec::new() };
    f.theta = (0..f.vertices.len()).map(|v| if v < m { 1 } else { f.in_degree(v) }).collect();
    Ok(f)
}

/// Reads an assignment off a firing of a graph built by [`sat_to_firing`]:
/// `x` is true unless `l^-_x` fires.
pub fn decode_firing(s: &ClauseSet, f: &FiringInstance, firing: &Firing) -> Vec<bool> {
    let vs = firing.vertices(f);
    (1..=s.n_vars).map(|x| !vs.contains(&f.vertex(&format!("ln{x}")).expect("gadget vertex"))).collect()
}

/// One resident per vertex and one hospital per non-root vertex; the query
/// is `(r_t, h_t)`.
pub fn firing_to_ftm_rm(f: &FiringInstance) -> Result<(Instance, Match), FiringError> {
    if !f.is_acyclic() {
        return Err(FiringError::Cyclic);
    }
    let t = f.target;
    if f.out_degree(t) > 0 {
        return Err(FiringError::TargetNotSink(f.vertices[t].clone()));
    }
    if f.in_degree(t) == 0 {
        return Err(FiringError::TargetIsRoot(f.vertices[t].clone()));
    }
    let n = f.vertices.len();
    let non_roots: Vec<usize> = (0..n).filter(|&v| f.in_degree(v) > 0).collect();
    if let Some(&v) = non_roots.iter().find(|&&v| f.theta[v] == 0) {
        return Err(FiringError::ZeroThreshold(f.vertices[v].clone()));
    }
    let residents = f.vertices.iter().map(|v| format!("r_{v}")).collect();
    let hospitals = non_roots.iter().map(|&v| format!("h_{}", f.vertices[v])).collect();
    let quota = non_roots.iter().map(|&v| f.theta[v]).collect();
    let hlist = non_roots
        .iter()
        .map(|&v| {
            let mut l = f.in_neighbors(v);
            l.sort_unstable();
            l.push(v);
            l
        })
        .collect();
    let rlist = (0..n).map(|v| non_roots.iter().position(|&x| x == v).into_iter().collect()).collect();
    let inst = Instance::from_parts(residents, hospitals, quota, rlist, hlist).expect("firing instance is well formed");
    let ht = non_roots.iter().position(|&x| x == t).expect("target is not a root");
    Ok((inst, Match::new(t, ht)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run_da;
    use crate::exact::ftm_bruteforce;
    use crate::gen::normalize_sat;
    use crate::minimal::is_resident_minimal;

    fn single_edge(theta_v: usize) -> FiringInstance {
        parse_firing(&format!("vertex u theta 0\nvertex v theta {theta_v}\nedge u v\ntarget v\n")).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let f = single_edge(1);
        assert_eq!(parse_firing(&f.to_text()).unwrap(), f);
        assert!(parse_firing("vertex a theta 0\nedge a b\ntarget a\n").is_err());
    }

    #[test]
    fn check_examples() {
        let f = single_edge(1);
        assert!(check_firing(&f, &[]));
        assert!(check_firing(&f, &[0]));
        let two = parse_firing("vertex u theta 0\nvertex a theta 1\nvertex b theta 1\nedge u a\nedge u b\ntarget a\n").unwrap();
        assert!(!check_firing(&two, &[0, 1]));
    }

    #[test]
    fn single_edge_firing() {
        let f = single_edge(1);
        let found = find_firing_bruteforce(&f, 1, DEFAULT_EDGE_CAP).unwrap().unwrap();
        assert_eq!(found.edges, vec![0]);
        assert_eq!(find_firing(&f, 1), Some(found));
        let (i, q) = firing_to_ftm_rm(&f).unwrap();
        assert!(is_resident_minimal(&i));
        let a = ftm_bruteforce(&i, q, 1000).unwrap();
        assert_eq!(a.finalizable(), Some(false));
        let j = a.counterexample.unwrap();
        assert_eq!(j.resident_list(0)[0], 0, "r_u proposes to h_v first");
    }

    #[test]
    fn isolated_zero_threshold_vertex() {
        let f = parse_firing("vertex a theta 0\ntarget a\n").unwrap();
        let found = find_firing_bruteforce(&f, 0, DEFAULT_EDGE_CAP).unwrap().unwrap();
        assert_eq!(found.isolated, vec![0]);
    }

    #[test]
    fn threshold_two_with_one_fireable_parent() {
        // w needs both u and x, but x needs a parent it does not have
        let f = parse_firing(
            "vertex u theta 0\nvertex y theta 0\nvertex x theta 2\nvertex w theta 2\n\
             edge u w\nedge x w\nedge y x\ntarget w\n",
        )
        .unwrap();
        assert_eq!(find_firing_bruteforce(&f, 3, DEFAULT_EDGE_CAP).unwrap(), None);
        assert_eq!(find_firing(&f, 3), None);
        let (i, q) = firing_to_ftm_rm(&f).unwrap();
        assert_eq!(ftm_bruteforce(&i, q, 100_000).unwrap().finalizable(), Some(true));
    }

    #[test]
    fn built_instance_tent() {
        let s = normalize_sat(&ClauseSet::new(2, vec![vec![1, 2], vec![-1]]).unwrap());
        let f = sat_to_firing(&s).unwrap();
        let (i, _) = firing_to_ftm_rm(&f).unwrap();
        let tent = run_da(&i).tent;
        let want: std::collections::BTreeSet<Match> = (0..f.vertices.len())
            .filter(|&v| f.in_degree(v) > 0)
            .enumerate()
            .map(|(h, v)| Match::new(v, h))
            .collect();
        assert_eq!(tent, want);
        assert!(is_resident_minimal(&i));
        assert_eq!(i.quotas().iter().max(), f.theta.iter().max());
    }

    #[test]
    fn counts() {
        let s = normalize_sat(&ClauseSet::new(2, vec![vec![1, 2], vec![-1, -2]]).unwrap());
        let f = sat_to_firing(&s).unwrap();
        let (n, m) = (s.n_vars, s.clauses.len());
        assert_eq!(f.vertices.len(), 2 * m + 5 * n);
        assert_eq!(f.edges.len(), m + (m - 1) + 7 * n);
        assert!(f.is_acyclic());
        assert!(f.theta.iter().all(|&t| t <= 2));
    }

    #[test]
    fn errors() {
        let f = parse_firing("vertex u theta 0\nvertex v theta 0\nedge u v\ntarget v\n").unwrap();
        assert!(matches!(firing_to_ftm_rm(&f), Err(FiringError::ZeroThreshold(_))));
        let c = parse_firing("vertex u theta 1\nvertex v theta 1\nedge u v\nedge v u\ntarget v\n").unwrap();
        assert_eq!(firing_to_ftm_rm(&c), Err(FiringError::Cyclic));
        let r = parse_firing("vertex u theta 0\nvertex v theta 1\nedge u v\ntarget u\n").unwrap();
        assert!(matches!(firing_to_ftm_rm(&r), Err(FiringError::TargetNotSink(_))));
    }
}
