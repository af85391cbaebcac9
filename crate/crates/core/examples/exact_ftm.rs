//! Decides finalizability exactly for every tentative match of the worked
//! example and prints a counterexample completion for the unsafe ones.

use finalize::instance::nine_residents;
use finalize::{ftm_backtrack, ftm_bruteforce, run_da};

fn main() {
    let inst = nine_residents();
    for m in run_da(&inst).tent {
        let fast = ftm_backtrack(&inst, m, 1_000_000).unwrap();
        let slow = ftm_bruteforce(&inst, m, 1_000_000).unwrap();
        assert_eq!(fast.verdict, slow.verdict);
        println!(
            "{} {:?} (backtrack {} nodes, enumeration {} leaves)",
            inst.fmt_match(m),
            fast.verdict,
            fast.stats.nodes,
            slow.stats.completions
        );
        if let Some(j) = fast.counterexample {
            print!("{}", j.to_text(Some(m)));
        }
    }
}
