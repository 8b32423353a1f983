//! Generates one graph with girth greater than k and prints it as an edge
//! list.
//!
//! cargo run --example generate -- [n] [m] [k] [seed]

use girthgen::sampler::{generate_with_retries, regime_advisory};
use girthgen::seed::seeded;
use girthgen::girth;

fn arg(i: usize, default: u64) -> u64 {
    std::env::args().nth(i).map_or(default, |s| s.parse().expect("integer argument"))
}

fn main() {
    let (n, m, k, seed) = (arg(1, 100) as usize, arg(2, 108) as usize, arg(3, 4) as usize, arg(4, 1));
    if let Some(warning) = regime_advisory(n, m, k) {
        eprintln!("warning: {warning}");
    }
    let report = generate_with_retries(n, m, k, &mut seeded(seed), 10).expect("generation failed");
    eprintln!(
        "n={n} m={m} k={k}: girth {} after {} attempt(s)",
        girth(&report.graph),
        report.attempts
    );
    print!("{}", report.graph.to_edge_list_string());
}
