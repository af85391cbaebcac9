//! Finalizability of tentative matches produced by deferred acceptance on
//! truncated hospitals/residents instances.
//!
//! - [`instance`], [`engine`], [`minimal`]: the instance model, the event
//!   engine and resident-minimality utilities.
//! - [`safe`]: relevant residents, endangered matches and the maximal safe set.
//! - [`rm`]: prescriptions, the digraph algorithm for the marriage case,
//!   prescription search and integer-program emission.
//! - [`exact`]: completion-enumeration and backtracking deciders.
//! - [`gen`]: reduction generators, firing brute force, random instances.
//! - [`sim`]: the student/supervisor market simulation.

pub mod engine;
pub mod exact;
pub mod gen;
pub mod instance;
pub mod minimal;
pub mod rm;
pub mod safe;
pub mod sim;

pub use engine::{is_feasible, ousted, run_da, Event, EventKind, ExecResult};
pub use instance::{parse_instance, Instance, Match, MatchSet};
pub use minimal::{hospital_complete_extension, is_resident_minimal, resident_minimal_truncation, CompletionPolicy};
pub use safe::{endangered, maximal_safe_set, relevant_residents, SafeSetReport};
pub use exact::{ftm_backtrack, ftm_bruteforce, FtmAnswer, Verdict};
pub use rm::{find_prescription, ftm_rm_marriage, validate_prescription, Prescription, RootPolicy};
pub use sim::{simulate, SimConfig, SimStats};
