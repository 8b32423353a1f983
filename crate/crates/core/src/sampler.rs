//! Sequential sampler for graphs with `n` vertices, `m` edges and girth
//! greater than `k`.
//!
//! Starting from the empty graph, each step adds one pair `(i, j)` whose
//! endpoints are at distance at least `k`, chosen with probability
//! proportional to `exp(-E[i][j])`, where `E` is the expected number of
//! short closed walks through `(i, j)` if the remaining `m - t` edges were
//! spread uniformly over the `N - t` free pairs (`q_t = (m - t) / (N - t)`).
//! When no pair is admissible the run fails.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    count_simple_cycles_through, girth, pair_count, pair_index, Graph, GraphError, Length, MAX_K,
    MAX_N,
};
use crate::matrix::{
    exponent_matrix_affine, exponent_matrix_naive, suitable_mask, DenseSymMatrix, PowerCache,
    SuitableMask,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SamplerError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no suitable pair at step {0}")]
    NoSuitablePair(usize),
    #[error("all {attempts} attempts failed (last failure at step {last_failed_at})")]
    RetriesExhausted {
        attempts: usize,
        last_failed_at: usize,
    },
}

/// Validated `(n, m, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Params {
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

impl Params {
    pub fn new(n: usize, m: usize, k: usize) -> Result<Self, SamplerError> {
        if !(2..=MAX_N).contains(&n) {
            return Err(SamplerError::InvalidParams(format!(
                "n = {n} outside 2..={MAX_N}"
            )));
        }
        if !(2..=MAX_K).contains(&k) {
            return Err(SamplerError::InvalidParams(format!(
                "k = {k} outside 2..={MAX_K}"
            )));
        }
        if m > pair_count(n) {
            return Err(SamplerError::InvalidParams(format!(
                "m = {m} exceeds the {} vertex pairs",
                pair_count(n)
            )));
        }
        Ok(Params { n, m, k })
    }

    /// `N = n (n - 1) / 2`.
    pub fn pairs(&self) -> usize {
        pair_count(self.n)
    }

    /// `q_t = (m - t) / (N - t)`; zero once `t >= m`.
    pub fn q(&self, t: usize) -> f64 {
        if t >= self.m {
            return 0.0;
        }
        (self.m - t) as f64 / (self.pairs() - t) as f64
    }
}

/// Where `(n, m, k)` sits relative to `m <= n^{1 + 1/(2k(k+3))}`, the range
/// with a proven vanishing failure probability and asymptotic uniformity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeCheck {
    pub alpha: f64,
    pub alpha_max: f64,
    pub m_max: usize,
    pub in_regime: bool,
}

pub fn theorem_regime(n: usize, m: usize, k: usize) -> RegimeCheck {
    let alpha_max = 1.0 / (2.0 * k as f64 * (k as f64 + 3.0));
    let m_max = (n as f64).powf(1.0 + alpha_max).floor() as usize;
    let alpha = if n > 1 && m > 0 {
        (m as f64).ln() / (n as f64).ln() - 1.0
    } else {
        f64::NEG_INFINITY
    };
    RegimeCheck {
        alpha,
        alpha_max,
        m_max,
        in_regime: k < 3 || m <= m_max,
    }
}

/// Human-readable warning when `(n, m, k)` is outside the proven regime.
pub fn regime_advisory(n: usize, m: usize, k: usize) -> Option<String> {
    let r = theorem_regime(n, m, k);
    (!r.in_regime).then(|| {
        format!(
            "m = {m} exceeds n^(1+1/(2k(k+3))) = {} for n = {n}, k = {k} \
             (alpha = {:.4} > {:.4}); uniformity and low failure rate are not guaranteed",
            r.m_max, r.alpha, r.alpha_max
        )
    })
}

/// Which evaluation of the exponent matrix a sampler uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentRoute {
    /// Decomposition over cached adjacency powers, `O(k^2 n^2)`.
    #[default]
    Affine,
    /// Repeated dense multiplication, `O(k n^3)`.
    Naive,
}

/// Edge probabilities over unordered pairs, stored as a packed upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    n: usize,
    probs: Vec<f64>,
}

impl ProbabilityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.probs[pair_index(self.n, a, b)]
    }

    /// Pairs with positive probability, lexicographic.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.probs[idx] > 0.0 {
                    out.push((i, j));
                }
                idx += 1;
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn to_matrix(&self) -> DenseSymMatrix {
        let mut m = DenseSymMatrix::zeros(self.n);
        for (i, j) in self.support() {
            m.set(i, j, self.get(i, j));
        }
        m
    }

    /// Normalizes nonnegative weights given per pair; unlisted pairs get 0.
    pub fn from_weights(n: usize, weights: &[((usize, usize), f64)]) -> Result<Self, SamplerError> {
        let mut probs = vec![0.0; pair_count(n)];
        for &((i, j), w) in weights {
            if i == j || i >= n || j >= n || !(w >= 0.0 && w.is_finite()) {
                return Err(SamplerError::InvalidParams(format!("bad weight {w} for ({i}, {j})")));
            }
            probs[pair_index(n, i.min(j), i.max(j))] += w;
        }
        let z: f64 = probs.iter().sum();
        if z <= 0.0 {
            return Err(SamplerError::InvalidParams("weights sum to zero".into()));
        }
        probs.iter_mut().for_each(|p| *p /= z);
        Ok(ProbabilityMatrix { n, probs })
    }

    /// Normalizes `exp(-(e - min e))` over the mask's pairs.
    fn from_exponents(mask: &SuitableMask, exponent: &DenseSymMatrix) -> Option<Self> {
        let n = mask.n();
        let min = mask
            .pairs()
            .map(|(i, j)| exponent.get(i, j))
            .fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return None;
        }
        let mut probs = vec![0.0; pair_count(n)];
        let mut z = 0.0;
        for (i, j) in mask.pairs() {
            let w = (-(exponent.get(i, j) - min)).exp();
            probs[pair_index(n, i, j)] = w;
            z += w;
        }
        for p in &mut probs {
            *p /= z;
        }
        Some(ProbabilityMatrix { n, probs })
    }
}

/// Draws one pair by a single cumulative scan of the upper triangle.
pub fn sample_edge<R: Rng + ?Sized>(p: &ProbabilityMatrix, rng: &mut R) -> (usize, usize) {
    let target = rng.random::<f64>() * p.total();
    let n = p.n;
    let mut acc = 0.0;
    let mut idx = 0;
    let mut last = None;
    for i in 0..n {
        for j in i + 1..n {
            let w = p.probs[idx];
            idx += 1;
            if w <= 0.0 {
                continue;
            }
            acc += w;
            if acc > target {
                return (i, j);
            }
            last = Some((i, j));
        }
    }
    // Only reachable through rounding in the running sum.
    last.expect("probability matrix has empty support")
}

/// A run that stopped because every remaining pair closes a short cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fail {
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerationOutcome {
    Success(Graph),
    Fail(Fail),
}

impl GenerationOutcome {
    pub fn graph(&self) -> Option<&Graph> {
        match self {
            GenerationOutcome::Success(g) => Some(g),
            GenerationOutcome::Fail(_) => None,
        }
    }
}

/// State of one run after `t` edges.
#[derive(Debug, Clone)]
pub struct SamplerState {
    params: Params,
    t: usize,
    graph: Graph,
    cache: PowerCache,
    route: ExponentRoute,
}

impl SamplerState {
    pub fn new(params: Params) -> Self {
        Self::with_route(params, ExponentRoute::Affine)
    }

    pub fn with_route(params: Params, route: ExponentRoute) -> Self {
        let cache = PowerCache::new(params.n, params.k).expect("k validated by Params");
        SamplerState {
            params,
            t: 0,
            graph: Graph::empty(params.n),
            cache,
            route,
        }
    }

    /// Resumes from an arbitrary partial graph with at most `m` edges.
    pub fn from_graph(params: Params, graph: Graph) -> Result<Self, SamplerError> {
        if graph.n() != params.n || graph.edge_count() > params.m {
            return Err(SamplerError::InvalidParams(format!(
                "partial graph has {} vertices and {} edges, expected {} vertices and at most {} edges",
                graph.n(),
                graph.edge_count(),
                params.n,
                params.m
            )));
        }
        let cache = PowerCache::from_graph(&graph, params.k).expect("k validated by Params");
        Ok(SamplerState {
            params,
            t: graph.edge_count(),
            graph,
            cache,
            route: ExponentRoute::Affine,
        })
    }

    /// Switches the exponent evaluation used by later steps.
    pub fn set_route(&mut self, route: ExponentRoute) {
        self.route = route;
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn q(&self) -> f64 {
        self.params.q(self.t)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn cache(&self) -> &PowerCache {
        &self.cache
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn is_complete(&self) -> bool {
        self.t == self.params.m
    }

    pub fn suitable_mask(&self) -> SuitableMask {
        suitable_mask(&self.cache)
    }

    /// Walk-weight exponent matrix `sum_{a=2}^{k-1} X_t^a`.
    pub fn exponent_matrix(&self) -> DenseSymMatrix {
        match self.route {
            ExponentRoute::Affine => exponent_matrix_affine(&self.cache, self.q()),
            ExponentRoute::Naive => exponent_matrix_naive(&self.cache, self.q()),
        }
    }

    pub fn probability_matrix(&self) -> Result<ProbabilityMatrix, SamplerError> {
        let mask = self.suitable_mask();
        if mask.is_empty() {
            return Err(SamplerError::NoSuitablePair(self.t));
        }
        let exponent = self.exponent_matrix();
        ProbabilityMatrix::from_exponents(&mask, &exponent)
            .ok_or(SamplerError::NoSuitablePair(self.t))
    }

    /// Adds one edge. On failure the state is left untouched.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(usize, usize), Fail> {
        assert!(self.t < self.params.m, "run already complete");
        let p = self
            .probability_matrix()
            .map_err(|_| Fail { step: self.t })?;
        let (i, j) = sample_edge(&p, rng);
        self.graph
            .add_edge(i, j)
            .expect("sampled pair is a non-edge");
        self.cache
            .apply_edge_update(i, j)
            .expect("cache tracks the graph");
        self.t += 1;
        Ok((i, j))
    }

    /// Expected number of simple cycles of length `3..=k` through `pair` if
    /// the remaining edges are added uniformly:
    /// `sum_r sum_{l <= r-2} N[r][l] q_t^{r-1-l}`.
    pub fn expected_simple_cycles(&self, pair: (usize, usize)) -> Result<f64, GraphError> {
        let k = self.params.k;
        if k < 3 {
            return Ok(0.0);
        }
        let table = count_simple_cycles_through(&self.graph, pair, k)?;
        let q = self.q();
        let mut total = 0.0;
        for r in 3..=k {
            for l in 0..=r - 2 {
                total += table.get(r, l) as f64 * q.powi((r - 1 - l) as i32);
            }
        }
        Ok(total)
    }
}

/// One full run. Emits a `log` warning outside the proven parameter range.
pub fn generate<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut R,
) -> Result<GenerationOutcome, SamplerError> {
    let params = Params::new(n, m, k)?;
    if let Some(msg) = regime_advisory(n, m, k) {
        log::warn!("{msg}");
    }
    Ok(run(params, rng))
}

/// One full run with already validated parameters.
pub fn run<R: Rng + ?Sized>(params: Params, rng: &mut R) -> GenerationOutcome {
    let mut state = SamplerState::new(params);
    while !state.is_complete() {
        if let Err(fail) = state.step(rng) {
            return GenerationOutcome::Fail(fail);
        }
    }
    GenerationOutcome::Success(state.into_graph())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetryReport {
    pub graph: Graph,
    pub attempts: usize,
    /// Failing step of each unsuccessful attempt, in order.
    pub failed_at: Vec<usize>,
}

/// Restarts from scratch after each failure, up to `max_retries` attempts.
pub fn generate_with_retries<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut R,
    max_retries: usize,
) -> Result<RetryReport, SamplerError> {
    if max_retries == 0 {
        return Err(SamplerError::InvalidParams("max_retries must be at least 1".into()));
    }
    let params = Params::new(n, m, k)?;
    if let Some(msg) = regime_advisory(n, m, k) {
        log::warn!("{msg}");
    }
    let mut failed_at = Vec::new();
    for attempt in 1..=max_retries {
        match run(params, rng) {
            GenerationOutcome::Success(graph) => {
                return Ok(RetryReport {
                    graph,
                    attempts: attempt,
                    failed_at,
                })
            }
            GenerationOutcome::Fail(f) => failed_at.push(f.step),
        }
    }
    Err(SamplerError::RetriesExhausted {
        attempts: max_retries,
        last_failed_at: *failed_at.last().unwrap(),
    })
}

/// Checks the output contract: exactly `m` edges and girth above `k`.
pub fn is_valid_output(g: &Graph, params: Params) -> bool {
    g.n() == params.n && g.edge_count() == params.m && girth(g).exceeds(params.k)
}

/// Per-step timing of the first `steps` steps of a run.
#[derive(Debug, Clone, Serialize)]
pub struct StepTiming {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub steps: usize,
    pub mean_step_ms: f64,
    pub girth: Length,
}

pub fn time_steps<R: Rng + ?Sized>(params: Params, steps: usize, rng: &mut R) -> StepTiming {
    let mut state = SamplerState::new(params);
    let steps = steps.min(params.m);
    let start = Instant::now();
    let mut done = 0;
    for _ in 0..steps {
        if state.step(rng).is_err() {
            break;
        }
        done += 1;
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    StepTiming {
        n: params.n,
        m: params.m,
        k: params.k,
        steps: done,
        mean_step_ms: if done > 0 { elapsed / done as f64 } else { 0.0 },
        girth: girth(state.graph()),
    }
}
