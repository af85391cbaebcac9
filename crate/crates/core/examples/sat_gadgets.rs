//! Builds both hardness gadgets from a small formula and checks that
//! satisfiability, firing existence and non-finalizability line up.

use finalize::exact::ftm_bruteforce;
use finalize::gen::{decode_assignment, find_firing, firing_to_ftm_rm, normalize_sat, sat_to_firing, sat_to_ftm};
use finalize::gen::ClauseSet;

fn main() {
    // (x1 ∨ x2) ∧ ¬x1
    let s = ClauseSet::new(2, vec![vec![1, 2], vec![-1]]).unwrap();
    let n = normalize_sat(&s);
    println!("normalized: {} variables, {} clauses", n.n_vars, n.clauses.len());
    println!("satisfiable {}", n.is_satisfiable());

    let (inst, q) = sat_to_ftm(&n).unwrap();
    let a = ftm_bruteforce(&inst, q, 1_000_000).unwrap();
    println!("activation gadget: {} finalizable {:?}", inst.fmt_match(q), a.finalizable());
    if let Some(j) = &a.counterexample {
        let x = decode_assignment(&n, j);
        println!("decoded {x:?} satisfies: {}", n.eval(&x));
    }

    let f = sat_to_firing(&n).unwrap();
    println!("firing graph: {} vertices, {} edges", f.vertices.len(), f.edges.len());
    println!("firing containing t: {}", find_firing(&f, f.target).is_some());
    let (inst, q) = firing_to_ftm_rm(&f).unwrap();
    let a = ftm_bruteforce(&inst, q, 10_000_000).unwrap();
    println!("firing instance: {} finalizable {:?}", inst.fmt_match(q), a.finalizable());
}
