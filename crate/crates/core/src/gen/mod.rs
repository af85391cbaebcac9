//! Hardness-reduction generators, firing search and random instances.

mod firing;
mod gadget;
mod random;
mod sat;

pub use firing::{
    check_firing, decode_firing, find_firing, find_firing_bruteforce, firing_to_ftm_rm, parse_firing, sat_to_firing,
    Firing, FiringError, FiringInstance, DEFAULT_EDGE_CAP,
};
pub use gadget::{decode_assignment, gadget_resident, sat_to_ftm};
pub use random::{random_instance, BoundsError, RandomParams};
pub use sat::{normalize_sat, parse_dimacs, ClauseSet, SatError};
