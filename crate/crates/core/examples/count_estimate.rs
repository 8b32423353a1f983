//! Compares the Poisson-approximation count of graphs with girth > k to the
//! exact count where enumeration is cheap.
//!
//! cargo run --example count_estimate

use girthgen::counting::{exact_enumerate, janson_log_count, JansonBound};

fn main() {
    println!("  n   m  k    ln estimate     ln exact     gap  regime");
    for (n, m, k) in [(6, 6, 3), (7, 8, 3), (8, 9, 3), (7, 7, 4), (8, 8, 4), (40, 45, 4)] {
        let est = janson_log_count(n, m, k);
        let exact = (n <= 8)
            .then(|| exact_enumerate(n, m, k).ok())
            .flatten()
            .map(|e| e.count.to_string().parse::<f64>().unwrap().ln());
        let (ex, gap) = match exact {
            Some(x) => (format!("{x:12.4}"), format!("{:7.4}", est.log_count - x)),
            None => ("           -".into(), "      -".into()),
        };
        println!("{n:3} {m:3} {k:2} {:14.4} {ex} {gap}  {}", est.log_count, est.regime_ok);
    }

    let b = JansonBound::short_cycles(8, 0.1, 3);
    println!("\nP(G(8, 0.1) is triangle-free) in [{:.4}, {:.4}]", b.lower, b.upper);
}
