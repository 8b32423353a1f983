//! Random simple graphs and bipartite Tanner graphs with girth greater than
//! a fixed `k`, built one edge at a time with Poisson-approximation weights.
//!
//! Each capability has a runnable example:
//!
//! ```bash
//! cargo run --example generate -- 100 108 4 1      # simple graph, edge list
//! cargo run --example ldpc                         # Tanner graph, alist
//! cargo run --example count_estimate               # approximate vs exact counts
//! cargo run --example enumerate -- 5 5 4           # every member of a small family
//! cargo run --release --example uniformity         # paired TV campaign
//! cargo run --example incremental_powers           # power cache and pair mask
//! cargo run --release --example bench              # per-step scaling
//! ```
//!
//! The `girthgen` binary exposes the same operations as subcommands.

pub mod bipartite;
pub mod cli;
pub mod counting;
pub mod graph;
pub mod matrix;
pub mod sampler;
pub mod seed;
pub mod validation;

pub use graph::{girth, Graph, Length};
pub use sampler::{generate, generate_with_retries, GenerationOutcome, Params, SamplerState};
