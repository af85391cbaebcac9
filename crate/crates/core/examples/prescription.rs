//! Finds a prescription for a non-finalizable match, validates it and turns
//! it into an extension that rejects the match.

use finalize::rm::{prescription_to_extension, target_set, Mode};
use finalize::{find_prescription, run_da, validate_prescription, Instance};

fn main() {
    let inst = Instance::from_names(
        &[("h1", 1, &["r2", "r1"]), ("h2", 1, &["r3", "r2"]), ("h3", 1, &["r2", "r3"])],
        &[("r1", &["h1"]), ("r2", &["h2"]), ("r3", &[])],
    );
    let m = inst.m("r1", "h1");
    let p = find_prescription(&inst, m).unwrap().expect("r1 can be pushed out");
    println!("P {}  X {}", inst.fmt_set(&p.p), inst.fmt_set(&p.x));
    println!("target {}", inst.fmt_set(&target_set(&p)));
    println!("valid {}", validate_prescription(&inst, &p, Mode::HospitalComplete).unwrap().valid);
    let (ext, run) = prescription_to_extension(&inst, &p).unwrap();
    print!("{}", ext.to_text(Some(m)));
    println!("rejected in the extension: {}", run.rej.contains(&m) && !run_da(&ext).tent.contains(&m));
}
