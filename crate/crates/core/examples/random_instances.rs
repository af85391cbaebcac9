//! Draws seeded random instances and compares the safe set with the exact
//! answer on each tentative match.

use finalize::gen::{random_instance, RandomParams};
use finalize::{ftm_bruteforce, maximal_safe_set, run_da};

fn main() {
    let params = RandomParams::new(4, 3, 2).resident_minimal(true);
    for seed in 0..5 {
        let inst = random_instance(&params, seed).unwrap();
        let safe = maximal_safe_set(&inst).maximal_safe;
        print!("seed {seed}:");
        for m in run_da(&inst).tent {
            let exact = ftm_bruteforce(&inst, m, 1_000_000).unwrap().finalizable().unwrap();
            print!(" {}={}/{}", inst.fmt_match(m), safe.contains(&m) as u8, exact as u8);
        }
        println!();
    }
}
