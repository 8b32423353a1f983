//! Mean time per sampler step as n doubles; O(n^2) steps give ratios near 4.
//!
//! cargo run --release --example bench -- [k] [steps]

use girthgen::sampler::{theorem_regime, time_steps};
use girthgen::seed::run_rng;
use girthgen::Params;

fn main() {
    let k = std::env::args().nth(1).map_or(4, |s| s.parse().expect("integer"));
    let steps: Option<usize> = std::env::args().nth(2).map(|s| s.parse().expect("integer"));
    let mut last: Option<f64> = None;
    println!("    n     m  steps  ms/step  ratio");
    for (idx, n) in [125usize, 250, 500, 1000].into_iter().enumerate() {
        let m = theorem_regime(n, 0, k).m_max;
        let t = time_steps(Params::new(n, m, k).unwrap(), steps.unwrap_or(m), &mut run_rng(0, 0, idx as u64));
        let ratio = last.map_or("-".to_string(), |p| format!("{:.2}", t.mean_step_ms / p));
        println!("{n:5} {m:5} {:6} {:8.3}  {ratio}", t.steps, t.mean_step_ms);
        last = Some(t.mean_step_ms);
    }
}
