//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;
use crate::minimal::resident_minimal_truncation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomParams {
    pub n_residents: usize,
    pub n_hospitals: usize,
    /// Quotas are drawn from `1..=max_quota`.
    pub max_quota: usize,
    /// Inclusive bounds on resident list lengths.
    pub resident_len: (usize, usize),
    /// Inclusive bounds on hospital list lengths; ignored when hospital-complete.
    pub hospital_len: (usize, usize),
    pub resident_minimal: bool,
    pub hospital_complete: bool,
}

impl RandomParams {
    /// Lists of any length, quotas up to `max_quota`.
    pub fn new(n_residents: usize, n_hospitals: usize, max_quota: usize) -> Self {
        RandomParams {
            n_residents,
            n_hospitals,
            max_quota,
            resident_len: (0, n_hospitals),
            hospital_len: (0, n_residents),
            resident_minimal: false,
            hospital_complete: false,
        }
    }

    pub fn resident_minimal(mut self, on: bool) -> Self {
        self.resident_minimal = on;
        self
    }

    pub fn hospital_complete(mut self, on: bool) -> Self {
        self.hospital_complete = on;
        self
    }

    fn check(&self) -> Result<(), BoundsError> {
        if self.n_residents == 0 || self.n_hospitals == 0 || self.max_quota == 0 {
            return Err(BoundsError("sizes and quota bound must be positive".into()));
        }
        let (a, b) = self.resident_len;
        if a > b || b > self.n_hospitals {
            return Err(BoundsError(format!("resident list length {a}..={b} with {} hospitals", self.n_hospitals)));
        }
        let (a, b) = self.hospital_len;
        if !self.hospital_complete && (a > b || b > self.n_residents) {
            return Err(BoundsError(format!("hospital list length {a}..={b} with {} residents", self.n_residents)));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("contradictory bounds: {0}")]
pub struct BoundsError(pub String);

fn random_list(rng: &mut ChaCha8Rng, n: usize, (lo, hi): (usize, usize)) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    all.truncate(rng.random_range(lo..=hi));
    all
}

/// Draws an instance from `params`; the same seed always gives the same
/// instance. Resident-minimality is imposed after the draw by truncation.
pub fn random_instance(params: &RandomParams, seed: u64) -> Result<Instance, BoundsError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quota = (0..params.n_hospitals).map(|_| rng.random_range(1..=params.max_quota)).collect();
    let rlist = (0..params.n_residents).map(|_| random_list(&mut rng, params.n_hospitals, params.resident_len)).collect();
    let full = (params.n_residents, params.n_residents);
    let hlen = if params.hospital_complete { full } else { params.hospital_len };
    let hlist = (0..params.n_hospitals).map(|_| random_list(&mut rng, params.n_residents, hlen)).collect();
    let residents = (1..=params.n_residents).map(|i| format!("r{i}")).collect();
    let hospitals = (1..=params.n_hospitals).map(|i| format!("h{i}")).collect();
    let inst = Instance::from_parts(residents, hospitals, quota, rlist, hlist).expect("generated lists are valid");
    Ok(if params.resident_minimal { resident_minimal_truncation(&inst) } else { inst })
}
