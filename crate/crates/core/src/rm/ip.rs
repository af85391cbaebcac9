//! Integer-program emission for prescription search.
//!
//! Every variable is binary. `p_r_h` selects an unproposed pair into `P`,
//! `x_r_h` a tentative match into `X`, and `z_h_k` says that the pending
//! residents of `h` put into `X` form the `k`-th subset of that hospital's
//! pending residents (bit `i` of `k` stands for the `i`-th one, by index).

use std::fmt::Write as _;

use crate::engine::{run_da, ExecResult};
use crate::instance::{Instance, Match};
use crate::minimal::is_resident_minimal_given;

use super::{Prescription, RmError};

pub const DEFAULT_Z_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IpSense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpConstraint {
    pub name: String,
    pub terms: Vec<(i64, usize)>,
    pub sense: IpSense,
    pub rhs: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Var {
    P(Match),
    X(Match),
    Z { h: usize, members: Vec<usize>, k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpModel {
    vars: Vec<Var>,
    pub names: Vec<String>,
    pub constraints: Vec<IpConstraint>,
    header: Vec<String>,
}

impl IpModel {
    pub fn build(inst: &Instance, m: Match, z_cap: usize) -> Result<Self, RmError> {
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
        Builder::new(inst, &run, m, z_cap)?.finish()
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    /// Indices of the `p` variables, whose sum is minimized.
    pub fn objective(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| matches!(self.vars[i], Var::P(_))).collect()
    }

    pub fn objective_value(&self, point: &[bool]) -> i64 {
        self.objective().iter().filter(|&&i| point[i]).count() as i64
    }

    pub fn is_feasible(&self, point: &[bool]) -> bool {
        assert_eq!(point.len(), self.vars.len());
        self.constraints.iter().all(|c| {
            let lhs: i64 = c.terms.iter().map(|&(a, v)| if point[v] { a } else { 0 }).sum();
            match c.sense {
                IpSense::Le => lhs <= c.rhs,
                IpSense::Ge => lhs >= c.rhs,
                IpSense::Eq => lhs == c.rhs,
            }
        })
    }

    /// Reads `(P, X)` off a 0/1 point.
    pub fn decode(&self, point: &[bool]) -> Prescription {
        let mut p = Prescription::default();
        for (v, _) in self.vars.iter().zip(point).filter(|(_, &b)| b) {
            match v {
                Var::P(m) => {
                    p.p.insert(*m);
                }
                Var::X(m) => {
                    p.x.insert(*m);
                }
                Var::Z { .. } => {}
            }
        }
        p
    }

    /// The point representing `p`, if all its matches have variables.
    pub fn encode(&self, p: &Prescription) -> Option<Vec<bool>> {
        let covered = |m: &Match, want_p: bool| {
            self.vars.iter().any(|v| match v {
                Var::P(x) => want_p && x == m,
                Var::X(x) => !want_p && x == m,
                Var::Z { .. } => false,
            })
        };
        if !p.p.iter().all(|m| covered(m, true)) || !p.x.iter().all(|m| covered(m, false)) {
            return None;
        }
        Some(
            self.vars
                .iter()
                .map(|v| match v {
                    Var::P(m) => p.p.contains(m),
                    Var::X(m) => p.x.contains(m),
                    Var::Z { h, members, k } => members
                        .iter()
                        .enumerate()
                        .all(|(i, &r)| p.x.contains(&Match::new(r, *h)) == (k >> i & 1 == 1)),
                })
                .collect(),
        )
    }

    /// LP file text.
    pub fn to_lp(&self) -> String {
        let mut s = String::new();
        for line in &self.header {
            let _ = writeln!(s, "\\ {line}");
        }
        s.push_str("Minimize\n obj:");
        let obj = self.objective();
        if obj.is_empty() {
            // LP readers want at least one term
            let _ = write!(s, " 0 {}", self.names[0]);
        }
        for i in obj {
            let _ = write!(s, " + {}", self.names[i]);
        }
        s.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(s, " {}:", c.name);
            for &(a, v) in &c.terms {
                let sign = if a < 0 { '-' } else { '+' };
                let _ = write!(s, " {sign} {} {}", a.abs(), self.names[v]);
            }
            let op = match c.sense {
                IpSense::Le => "<=",
                IpSense::Ge => ">=",
                IpSense::Eq => "=",
            };
            let _ = writeln!(s, " {op} {}", c.rhs);
        }
        s.push_str("Binary\n");
        for n in &self.names {
            let _ = writeln!(s, " {n}");
        }
        s.push_str("End\n");
        s
    }
}

/// Emits the model in LP text format.
pub fn emit_ip(inst: &Instance, m: Match, z_cap: usize) -> Result<String, RmError> {
    Ok(IpModel::build(inst, m, z_cap)?.to_lp())
}

struct Builder<'a> {
    inst: &'a Instance,
    run: &'a ExecResult,
    m: Match,
    model: IpModel,
}

impl<'a> Builder<'a> {
    fn new(inst: &'a Instance, run: &'a ExecResult, m: Match, z_cap: usize) -> Result<Self, RmError> {
        let mut vars = Vec::new();
        for r in 0..inst.n_residents() {
            for h in 0..inst.n_hospitals() {
                if !run.prop.contains(&Match::new(r, h)) {
                    vars.push(Var::P(Match::new(r, h)));
                }
            }
        }
        vars.extend(run.tent.iter().map(|&t| Var::X(t)));
        for h in 0..inst.n_hospitals() {
            let members: Vec<usize> = run.pend.iter().filter(|x| x.h == h).map(|x| x.r).collect();
            if members.is_empty() {
                continue;
            }
            if members.len() > z_cap {
                return Err(RmError::ZCap { hospital: inst.hospital_name(h).to_string(), size: members.len(), cap: z_cap });
            }
            for k in 0..1usize << members.len() {
                vars.push(Var::Z { h, members: members.clone(), k });
            }
        }
        let names = vars
            .iter()
            .map(|v| match v {
                Var::P(x) => format!("p_{}_{}", x.r, x.h),
                Var::X(x) => format!("x_{}_{}", x.r, x.h),
                Var::Z { h, k, .. } => format!("z_{h}_{k}"),
            })
            .collect();
        let mut header = vec![
            format!("Prescription model for the query {}.", inst.fmt_match(m)),
            "p_r_h: r makes a new proposal to h. x_r_h: tentative match (r,h) is rejected.".to_string(),
            "z_h_k: the pending residents of h that are rejected form subset k of them (binary counter).".to_string(),
        ];
        let rs: Vec<String> = (0..inst.n_residents()).map(|r| format!("{r}={}", inst.resident_name(r))).collect();
        let hs: Vec<String> = (0..inst.n_hospitals()).map(|h| format!("{h}={}", inst.hospital_name(h))).collect();
        header.push(format!("residents: {}", rs.join(" ")));
        header.push(format!("hospitals: {}", hs.join(" ")));
        let model = IpModel { vars, names, constraints: Vec::new(), header };
        Ok(Builder { inst, run, m, model })
    }

    fn p(&self, r: usize, h: usize) -> Option<usize> {
        self.model.vars.iter().position(|v| *v == Var::P(Match::new(r, h)))
    }

    fn x(&self, m: Match) -> usize {
        self.model.vars.iter().position(|v| *v == Var::X(m)).expect("tentative match has a variable")
    }

    fn add(&mut self, name: String, terms: Vec<(i64, usize)>, sense: IpSense, rhs: i64) {
        // merge repeated variables
        let mut merged: Vec<(i64, usize)> = Vec::new();
        for (a, v) in terms {
            match merged.iter_mut().find(|t| t.1 == v) {
                Some(t) => t.0 += a,
                None => merged.push((a, v)),
            }
        }
        merged.retain(|t| t.0 != 0);
        merged.sort_by_key(|t| t.1);
        self.model.constraints.push(IpConstraint { name, terms: merged, sense, rhs });
    }

    fn finish(mut self) -> Result<IpModel, RmError> {
        let (inst, run) = (self.inst, self.run);
        let (n_r, n_h) = (inst.n_residents(), inst.n_hospitals());
        let tent_of = |r: usize| run.tent.iter().find(|t| t.r == r).copied();
        for r in 0..n_r {
            let ps: Vec<usize> = (0..n_h).filter_map(|h| self.p(r, h)).collect();
            if ps.len() > 1 {
                self.add(format!("p2_{r}"), ps.iter().map(|&v| (1, v)).collect(), IpSense::Le, 1);
            }
            if let Some(t) = tent_of(r) {
                if !ps.is_empty() {
                    let mut terms: Vec<(i64, usize)> = ps.iter().map(|&v| (1, v)).collect();
                    terms.push((-1, self.x(t)));
                    self.add(format!("p4_{r}"), terms, IpSense::Le, 0);
                }
            }
        }
        for h in 0..n_h {
            let q = inst.quota(h) as i64;
            let tents: Vec<Match> = run.tent.iter().filter(|t| t.h == h).copied().collect();
            let ps: Vec<(usize, usize)> = (0..n_r).filter_map(|r| self.p(r, h).map(|v| (r, v))).collect();
            // members = Σp + |T_h| - Σx
            let mut count: Vec<(i64, usize)> = ps.iter().map(|&(_, v)| (1, v)).collect();
            count.extend(tents.iter().map(|&t| (-1, self.x(t))));
            let n_t = tents.len() as i64;
            if !count.is_empty() {
                self.add(format!("p5_le_{h}"), count.clone(), IpSense::Le, q - n_t);
            }
            for &t in &tents {
                let mut terms = count.clone();
                terms.push((-q, self.x(t)));
                self.add(format!("p5_eq_{h}_{}", t.r), terms, IpSense::Ge, -n_t);
            }
            let precedes = |a: usize, b: usize| match (inst.rank(h, a), inst.rank(h, b)) {
                (Some(i), Some(j)) => i < j,
                _ => false,
            };
            for &t in tents.iter().filter(|t| !run.pend.contains(t)) {
                let xt = self.x(t);
                for &(y, v) in &ps {
                    if !precedes(y, t.r) {
                        self.add(format!("p6_p_{h}_{y}_{}", t.r), vec![(1, v), (1, xt)], IpSense::Le, 1);
                    }
                }
                for &u in tents.iter().filter(|u| u.r != t.r) {
                    let xu = self.x(u);
                    if run.pend.contains(&u) {
                        self.add(format!("p6_pend_{h}_{}_{}", u.r, t.r), vec![(1, xt), (-1, xu)], IpSense::Le, 0);
                    } else if !precedes(u.r, t.r) {
                        self.add(format!("p6_t_{h}_{}_{}", u.r, t.r), vec![(1, xt), (-1, xu)], IpSense::Le, 0);
                    }
                }
            }
        }
        let zs: Vec<(usize, usize, Vec<usize>, usize)> = self
            .model
            .vars
            .iter()
            .enumerate()
            .filter_map(|(i, v)| match v {
                Var::Z { h, members, k } => Some((i, *h, members.clone(), *k)),
                _ => None,
            })
            .collect();
        for h in 0..n_h {
            let hz: Vec<&(usize, usize, Vec<usize>, usize)> = zs.iter().filter(|z| z.1 == h).collect();
            if hz.is_empty() {
                continue;
            }
            self.add(format!("z_one_{h}"), hz.iter().map(|z| (1, z.0)).collect(), IpSense::Eq, 1);
            for (bit, &r) in hz[0].2.iter().enumerate() {
                let mut terms = vec![(1, self.x(Match::new(r, h)))];
                terms.extend(hz.iter().filter(|z| z.3 >> bit & 1 == 1).map(|z| (-1, z.0)));
                self.add(format!("z_bit_{h}_{r}"), terms, IpSense::Eq, 0);
            }
        }
        let m = self.m;
        let xm = self.x(m);
        self.add("target_x".to_string(), vec![(1, xm)], IpSense::Eq, 1);
        let pm: Vec<(i64, usize)> = (0..n_h).filter_map(|h| self.p(m.r, h)).map(|v| (1, v)).collect();
        if !pm.is_empty() {
            self.add("target_free".to_string(), pm, IpSense::Le, 0);
        }
        Ok(self.model)
    }
}
