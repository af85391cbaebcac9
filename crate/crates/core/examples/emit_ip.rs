//! Writes the prescription integer program for a match in LP format and
//! checks a hand-made solution against it.

use finalize::rm::{IpModel, DEFAULT_Z_CAP};
use finalize::{Instance, Prescription};

fn main() {
    let inst = Instance::from_names(
        &[("h1", 1, &["r2", "r1"]), ("h2", 1, &["r1", "r2"])],
        &[("r1", &["h1"]), ("r2", &[])],
    );
    let m = inst.m("r1", "h1");
    let model = IpModel::build(&inst, m, DEFAULT_Z_CAP).unwrap();
    print!("{}", model.to_lp());
    let p = Prescription::new([inst.m("r2", "h1")].into(), [m].into());
    let point = model.encode(&p).expect("representable");
    println!("feasible {} objective {}", model.is_feasible(&point), model.objective_value(&point));
}
