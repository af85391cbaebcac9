//! Runs deferred acceptance on the safe-set worked example and prints the
//! event sets.

use finalize::instance::nine_residents;
use finalize::run_da;

fn main() {
    let inst = nine_residents();
    let run = run_da(&inst);
    println!("events: {}", run.sequence.len());
    println!("prop {}", inst.fmt_set(&run.prop));
    println!("rej  {}", inst.fmt_set(&run.rej));
    println!("tent {}", inst.fmt_set(&run.tent));
    println!("pend {}", inst.fmt_set(&run.pend));
}
