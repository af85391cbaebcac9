//! The rejection-chain digraph on a small resident-minimal marriage
//! instance: r2 can still propose to h1 and push r1 out.

use finalize::rm::build_gi;
use finalize::{ftm_rm_marriage, Instance, RootPolicy};

fn main() {
    let inst = Instance::from_names(
        &[("h1", 1, &["r2", "r1"]), ("h2", 1, &["r1", "r3"]), ("h3", 1, &["r3", "r2"])],
        &[("r1", &["h1"]), ("r2", &[]), ("r3", &["h3"])],
    );
    let g = build_gi(&inst).unwrap();
    println!("{} T vertices, {} P vertices, {} edges", g.t_vertices.len(), g.p_vertices.len(), g.edges.len());
    for m in &g.t_vertices {
        let a = ftm_rm_marriage(&inst, *m, RootPolicy::WithPending).unwrap();
        let chain: Vec<String> = a.path.unwrap_or_default().iter().map(|&x| inst.fmt_match(x)).collect();
        println!("{} finalizable: {} {}", inst.fmt_match(*m), a.finalizable, chain.join(" -> "));
    }
}
