//! Computes the maximal safe set of the worked example, iteration by
//! iteration.

use finalize::instance::nine_residents;
use finalize::{endangered, maximal_safe_set, run_da};

fn main() {
    let inst = nine_residents();
    let tent = run_da(&inst).tent;
    println!("tent {}", inst.fmt_set(&tent));
    println!("endangered in tent {}", inst.fmt_set(&endangered(&inst, &tent).unwrap()));
    let rep = maximal_safe_set(&inst);
    for (i, removed) in &rep.removal_trace {
        println!("iteration {i}: drop {}", inst.fmt_set(removed));
    }
    println!("maximal safe set {}", inst.fmt_set(&rep.maximal_safe));
}
