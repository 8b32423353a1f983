//! Builds a regular Tanner graph with no 4-cycles and writes it in alist
//! format.
//!
//! cargo run --example ldpc -- [variables] [var_degree] [checks] [check_degree] [k] [seed]

use girthgen::bipartite::{bip_generate_with_retries, BipConfig, DegreeSequence};
use girthgen::graph::girth;
use girthgen::seed::seeded;

fn arg(i: usize, default: u64) -> u64 {
    std::env::args().nth(i).map_or(default, |s| s.parse().expect("integer argument"))
}

fn main() {
    let (vars, dv, checks, dc) = (arg(1, 48) as usize, arg(2, 3) as usize, arg(3, 24) as usize, arg(4, 6) as usize);
    let (k, seed) = (arg(5, 4) as usize, arg(6, 7));
    let degrees = DegreeSequence::regular(vars, dv, checks, dc).expect("edge counts must agree");
    let report = bip_generate_with_retries(&degrees, BipConfig::new(k).expect("k must be even"), &mut seeded(seed), 100)
        .expect("no Tanner graph found");
    let g = &report.graph;
    eprintln!(
        "{vars} variables x {checks} checks, {} edges, girth {}, {} attempt(s)",
        g.edge_count(),
        girth(g.graph()),
        report.attempts
    );
    print!("{}", g.to_alist_string());
}
