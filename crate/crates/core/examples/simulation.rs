//! The market simulation at its default size for a few diversity levels.

use finalize::sim::{format_table, simulate, SimConfig};

fn main() {
    let rows: Vec<_> = [0.1, 0.3, 0.5, 0.7]
        .into_iter()
        .map(|sigma3| simulate(&SimConfig { sigma3, ..SimConfig::default() }))
        .collect();
    print!("{}", format_table(&rows));
}
