//! Paired uniformity check: the sequential sampler and the exact rejection
//! baseline draw the same number of samples and both are scored against
//! the enumerated set.
//!
//! cargo run --release --example uniformity -- [samples]

use girthgen::counting::exact_enumerate_graphs;
use girthgen::validation::{uniformity_campaign, GroundTruth, Instance, RejectionBaseline, SequentialSampler};
use girthgen::Params;

fn main() {
    let samples = std::env::args().nth(1).map_or(20_000, |s| s.parse().expect("integer"));
    let (n, m, k) = (7, 8, 3);
    let truth = GroundTruth::from_graphs(&exact_enumerate_graphs(n, m, k, 1 << 24).unwrap());
    let params = Params::new(n, m, k).unwrap();
    let report = uniformity_campaign(
        Instance::Simple { n, m, k },
        &SequentialSampler(params),
        &RejectionBaseline { params, max_attempts: 1_000_000 },
        &truth,
        samples,
        0,
    )
    .unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    println!("excess tv over the baseline: {:.4}", report.excess_tv());
}
