//! Lists every labeled graph with n vertices, m edges and girth > k.
//!
//! cargo run --example enumerate -- [n] [m] [k]

use girthgen::counting::{exact_enumerate_with, DEFAULT_ENUMERATION_BUDGET};

fn arg(i: usize, default: usize) -> usize {
    std::env::args().nth(i).map_or(default, |s| s.parse().expect("integer argument"))
}

fn main() {
    let (n, m, k) = (arg(1, 5), arg(2, 5), arg(3, 4));
    let result = exact_enumerate_with(n, m, k, DEFAULT_ENUMERATION_BUDGET, |edges| {
        let line: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        println!("{}", line.join(" "));
    })
    .expect("enumeration budget exceeded");
    eprintln!("{} of {} edge subsets have girth > {k}", result.count, result.subsets);
}
