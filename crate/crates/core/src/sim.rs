//! The student/supervisor market model and its first round.
//!
//! Students are residents and supervisors are hospitals. Each run draws a
//! market, submits every student's top `r` supervisors, runs deferred
//! acceptance and finalizes the maximal safe set.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::run_da;
use crate::instance::Instance;
use crate::safe::maximal_safe_set;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_students: usize,
    pub n_supervisors: usize,
    pub n_topics: usize,
    /// Interviews per student, with its top `k` supervisors.
    pub k: usize,
    /// Round-one list length.
    pub r: usize,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub runs: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_students: 100,
            n_supervisors: 10,
            n_topics: 4,
            k: 5,
            r: 3,
            sigma1: 0.1,
            sigma2: 0.1,
            sigma3: 0.5,
            runs: 100,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_students == 0 || self.n_supervisors == 0 || self.n_topics == 0 {
            return Err("students, supervisors and topics must be positive".into());
        }
        if self.r == 0 {
            return Err("round-one list length must be at least 1".into());
        }
        for s in [self.sigma1, self.sigma2, self.sigma3] {
            if !(s.is_finite() && s >= 0.0) {
                return Err(format!("standard deviation {s} is not a non-negative number"));
            }
        }
        Ok(())
    }

    /// As even as possible: the first `|S| mod |P|` supervisors get one more.
    pub fn quotas(&self) -> Vec<usize> {
        let (q, extra) = (self.n_students / self.n_supervisors, self.n_students % self.n_supervisors);
        (0..self.n_supervisors).map(|p| q + usize::from(p < extra)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Market {
    pub grade: Vec<f64>,
    /// `interest[s][t]`, rows summing to 1.
    pub interest: Vec<Vec<f64>>,
    /// `attractiveness[p][t]`, rows summing to a total in `[0.5, 1.5]`.
    pub attractiveness: Vec<Vec<f64>>,
    pub student_lists: Vec<Vec<usize>>,
    pub supervisor_lists: Vec<Vec<usize>>,
    pub quotas: Vec<usize>,
}

impl Market {
    pub fn attraction(&self, s: usize, p: usize) -> f64 {
        self.interest[s].iter().zip(&self.attractiveness[p]).map(|(i, a)| i * a).sum()
    }

    /// The round-one instance: student lists cut to their top `r`.
    pub fn instance(&self, r: usize) -> Instance {
        let students = (1..=self.grade.len()).map(|s| format!("s{s}")).collect();
        let supervisors = (1..=self.quotas.len()).map(|p| format!("p{p}")).collect();
        let rlist = self.student_lists.iter().map(|l| l[..r.min(l.len())].to_vec()).collect();
        Instance::from_parts(students, supervisors, self.quotas.clone(), rlist, self.supervisor_lists.clone())
            .expect("market lists are permutations")
    }
}

fn normal(mean: f64, sd: f64) -> Normal<f64> {
    Normal::new(mean, sd).expect("validated standard deviation")
}

/// Topic weights summing to `total`: clipped Normal(0.5, σ3) draws, rescaled.
fn topic_weights(rng: &mut ChaCha8Rng, n: usize, sigma3: f64, total: f64) -> Vec<f64> {
    let d = normal(0.5, sigma3);
    loop {
        let w: Vec<f64> = (0..n).map(|_| d.sample(rng).clamp(0.0, 1.0)).collect();
        let sum: f64 = w.iter().sum();
        if sum > 0.0 {
            return w.into_iter().map(|x| x * total / sum).collect();
        }
    }
}

/// Normal(1, σ2) conditioned on `[0.5, 1.5]`, by rejection.
fn total_attractiveness(rng: &mut ChaCha8Rng, sigma2: f64) -> f64 {
    let d = normal(1.0, sigma2);
    loop {
        let x = d.sample(rng);
        if (0.5..=1.5).contains(&x) {
            return x;
        }
    }
}

/// Indices sorted by descending score, ties by index.
fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

/// Draws the market of run `run`, seeded with `cfg.seed ^ run`.
pub fn gen_market(cfg: &SimConfig, run: u64) -> Market {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ run);
    let g = normal(0.5, cfg.sigma1);
    let grade: Vec<f64> = (0..cfg.n_students).map(|_| g.sample(&mut rng)).collect();
    let interest: Vec<Vec<f64>> =
        (0..cfg.n_students).map(|_| topic_weights(&mut rng, cfg.n_topics, cfg.sigma3, 1.0)).collect();
    let attractiveness: Vec<Vec<f64>> = (0..cfg.n_supervisors)
        .map(|_| {
            let total = total_attractiveness(&mut rng, cfg.sigma2);
            topic_weights(&mut rng, cfg.n_topics, cfg.sigma3, total)
        })
        .collect();
    let mut market = Market {
        grade,
        interest,
        attractiveness,
        student_lists: Vec::new(),
        supervisor_lists: Vec::new(),
        quotas: cfg.quotas(),
    };
    market.student_lists = (0..cfg.n_students)
        .map(|s| ranking(&(0..cfg.n_supervisors).map(|p| market.attraction(s, p)).collect::<Vec<_>>()))
        .collect();
    let mut score = vec![market.grade.clone(); cfg.n_supervisors];
    for (s, list) in market.student_lists.iter().enumerate() {
        for &p in list.iter().take(cfg.k) {
            score[p][s] += market.attraction(s, p);
        }
    }
    market.supervisor_lists = score.iter().map(|sc| ranking(sc)).collect();
    market
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundOne {
    pub tentative: usize,
    pub finalized: usize,
    /// Supervisors whose finalized matches fill their quota.
    pub filled: usize,
}

impl RoundOne {
    /// Finalized over tentative; 1 when nothing is tentative.
    pub fn ratio(&self) -> f64 {
        if self.tentative == 0 {
            1.0
        } else {
            self.finalized as f64 / self.tentative as f64
        }
    }
}

pub fn run_round1(market: &Market, r: usize) -> RoundOne {
    let inst = market.instance(r);
    let tent = run_da(&inst).tent;
    let safe = maximal_safe_set(&inst).maximal_safe;
    let filled = (0..inst.n_hospitals()).filter(|&p| safe.iter().filter(|m| m.h == p).count() == inst.quota(p)).count();
    RoundOne { tentative: tent.len(), finalized: safe.len(), filled }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub avg: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    fn of(xs: impl Iterator<Item = f64> + Clone) -> Self {
        let n = xs.clone().count() as f64;
        Summary {
            avg: xs.clone().sum::<f64>() / n,
            min: xs.clone().fold(f64::INFINITY, f64::min),
            max: xs.fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimStats {
    pub sigma3: f64,
    pub runs: usize,
    pub tentative: Summary,
    pub finalized: Summary,
    pub ratio: Summary,
    pub filled: Summary,
}

impl SimStats {
    pub fn from_runs(sigma3: f64, records: &[RoundOne]) -> Self {
        assert!(!records.is_empty(), "at least one run");
        let it = records.iter();
        SimStats {
            sigma3,
            runs: records.len(),
            tentative: Summary::of(it.clone().map(|r| r.tentative as f64)),
            finalized: Summary::of(it.clone().map(|r| r.finalized as f64)),
            ratio: Summary::of(it.clone().map(RoundOne::ratio)),
            filled: Summary::of(it.map(|r| r.filled as f64)),
        }
    }
}

/// Runs are drawn in parallel and aggregated in run order.
pub fn simulate(cfg: &SimConfig) -> SimStats {
    assert!(cfg.runs >= 1, "at least one run");
    let records: Vec<RoundOne> =
        (0..cfg.runs as u64).into_par_iter().map(|run| run_round1(&gen_market(cfg, run), cfg.r)).collect();
    SimStats::from_runs(cfg.sigma3, &records)
}

/// One row per σ3 value, laid out like the published results table.
pub fn format_table(rows: &[SimStats]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>6} | {:^22} | {:^22} | {:^22} | {:^22}",
        "sigma3", "tentative matches", "finalized matches", "finalized/tentative", "filled supervisors"
    );
    let head = format!("{:>6} {:>7} {:>7} ", "avg", "min", "max");
    let _ = writeln!(s, "{:>6} |{head}|{head}|{head}|{head}", "");
    for row in rows {
        let cell = |x: &Summary, p: usize| format!("{:>6.*} {:>7.*} {:>7.*} ", p, x.avg, p, x.min, p, x.max);
        let _ = writeln!(
            s,
            "{:>6.2} |{}|{}|{}|{}",
            row.sigma3,
            cell(&row.tentative, 2),
            cell(&row.finalized, 2),
            cell(&row.ratio, 2),
            cell(&row.filled, 2)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        SimConfig { n_students: 12, n_supervisors: 4, runs: 5, ..SimConfig::default() }
    }

    #[test]
    fn quotas_split_evenly() {
        let cfg = SimConfig { n_students: 23, n_supervisors: 5, ..SimConfig::default() };
        assert_eq!(cfg.quotas(), vec![5, 5, 5, 4, 4]);
    }

    #[test]
    fn market_invariants() {
        let cfg = SimConfig { sigma2: 0.8, sigma3: 0.7, ..small() };
        for run in 0..5 {
            let m = gen_market(&cfg, run);
            for row in &m.interest {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
            for row in &m.attractiveness {
                let t: f64 = row.iter().sum();
                assert!((0.5 - 1e-9..=1.5 + 1e-9).contains(&t));
            }
            for l in m.student_lists.iter().chain(&m.supervisor_lists) {
                let mut sorted = l.clone();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), l.len());
            }
            assert_eq!(m.quotas.iter().sum::<usize>(), cfg.n_students);
        }
        assert_eq!(gen_market(&cfg, 3), gen_market(&cfg, 3));
    }

    #[test]
    fn degenerate_market() {
        let cfg = SimConfig { sigma1: 0.0, sigma2: 0.0, sigma3: 0.0, ..small() };
        let m = gen_market(&cfg, 0);
        for s in 0..cfg.n_students {
            for p in 0..cfg.n_supervisors {
                assert!((m.attraction(s, p) - 1.0 / cfg.n_topics as f64).abs() < 1e-12);
            }
            assert_eq!(m.student_lists[s], (0..cfg.n_supervisors).collect::<Vec<_>>());
        }
        assert_eq!(run_round1(&m, cfg.r), run_round1(&gen_market(&cfg, 1), cfg.r));
    }

    #[test]
    fn one_topic_collapses() {
        let cfg = SimConfig { n_topics: 1, ..small() };
        let m = gen_market(&cfg, 2);
        for s in 0..cfg.n_students {
            for p in 0..cfg.n_supervisors {
                assert!((m.attraction(s, p) - m.attractiveness[p][0]).abs() < 1e-12);
            }
            assert_eq!(m.student_lists[s], m.student_lists[0]);
        }
    }

    #[test]
    fn complete_lists_finalize_everyone() {
        let cfg = SimConfig { r: 4, ..small() };
        let rec = run_round1(&gen_market(&cfg, 0), cfg.r);
        assert_eq!(rec, RoundOne { tentative: 12, finalized: 12, filled: 4 });
    }

    #[test]
    fn single_run_summary_is_flat() {
        let st = simulate(&SimConfig { runs: 1, ..small() });
        for x in [st.tentative, st.finalized, st.ratio, st.filled] {
            assert_eq!(x.min, x.avg);
            assert_eq!(x.avg, x.max);
        }
        assert_eq!(simulate(&small()), simulate(&small()));
        assert!(format_table(&[st]).lines().count() == 3);
    }
}
