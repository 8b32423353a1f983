//! Counting graphs with girth above `k`: the Poisson/Janson estimate,
//! exhaustive enumeration for small instances, and exactly uniform
//! rejection samplers used as baselines.

use num_bigint::BigUint;
use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use statrs::function::factorial::ln_binomial as ln_binom_u64;
use thiserror::Error;

use crate::bipartite::{BipartiteGraph, DegreeSequence};
use crate::graph::{binomial_big, girth, ln_count_cycles, pair_count, pair_from_index, Graph};

/// Default cap on the number of subsets an exhaustive enumeration visits.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("enumeration needs {total} subsets, budget is {budget}")]
    BudgetExceeded { total: BigUint, budget: u64 },
    #[error("no acceptable sample in {0} attempts")]
    AttemptsExhausted(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// `ln C(n, r)`.
pub fn ln_binomial(n: u64, r: u64) -> f64 {
    if r > n {
        return f64::NEG_INFINITY;
    }
    ln_binom_u64(n, r)
}

/// Exact `C(n, r)`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    binomial_big(n, r)
}

/// Estimate of `ln |{graphs on n vertices, m edges, girth > k}|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountEstimate {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub log_count: f64,
    pub log_binom: f64,
    /// `sum_{r=3}^k |C_r| (m/N)^r`.
    pub correction: f64,
    /// `m = n^{1+alpha}`.
    pub alpha: f64,
    /// `alpha < 1/(2k-1)`, the hypothesis of the count formula.
    pub regime_ok: bool,
    /// `alpha <= 1/(2k(k+3))`, the range of the sampler guarantee.
    pub sampler_regime_ok: bool,
}

/// `sum_{r=3}^k |C_r| p^r` over cycles of the complete graph on `n` vertices.
pub fn short_cycle_mean(n: usize, p: f64, k: usize) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    (3..=k)
        .map(|r| (ln_count_cycles(n as u64, r as u64) + r as f64 * p.ln()).exp())
        .sum()
}

/// `ln C(N, m) - sum_{r=3}^k |C_r| (m/N)^r`. `k = 2` gives `ln C(N, m)`.
pub fn janson_log_count(n: usize, m: usize, k: usize) -> CountEstimate {
    let pairs = pair_count(n);
    let log_binom = ln_binomial(pairs as u64, m as u64);
    let p = if pairs == 0 { 0.0 } else { m as f64 / pairs as f64 };
    let correction = short_cycle_mean(n, p, k);
    let alpha = if n > 1 && m > 0 {
        (m as f64).ln() / (n as f64).ln() - 1.0
    } else {
        f64::NEG_INFINITY
    };
    let kf = k as f64;
    CountEstimate {
        n,
        m,
        k,
        log_count: log_binom - correction,
        log_binom,
        correction,
        alpha,
        regime_ok: alpha < 1.0 / (2.0 * kf - 1.0),
        sampler_regime_ok: alpha <= 1.0 / (2.0 * kf * (kf + 3.0)),
    }
}

/// Poisson approximation of `P(G(n, p) has girth > k)`.
pub fn gnp_girth_probability(n: usize, p: f64, k: usize) -> f64 {
    (-short_cycle_mean(n, p, k)).exp()
}

/// Janson bounds on the probability that none of a family of bad events
/// occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JansonBound {
    pub lower: f64,
    pub upper: f64,
    /// Largest single-event probability.
    pub beta: f64,
    /// `sum over ordered dependent pairs i != j of P(B_i and B_j)`.
    pub gamma: f64,
}

impl JansonBound {
    /// `probs[i] = P(B_i)`; `joint` lists `P(B_i and B_j)` for every ordered
    /// dependent pair.
    pub fn from_events(probs: &[f64], joint: impl IntoIterator<Item = f64>) -> Self {
        let beta = probs.iter().copied().fold(0.0, f64::max);
        let gamma: f64 = joint.into_iter().sum();
        let lower = probs.iter().map(|p| (1.0 - p).ln()).sum::<f64>().exp();
        JansonBound {
            lower,
            upper: lower * (gamma / (2.0 * (1.0 - beta))).exp(),
            beta,
            gamma,
        }
    }

    /// Bounds on `P(G(n, p) has girth > k)` with one bad event per cycle of
    /// length `3..=k` in the complete graph. Two cycles are dependent when
    /// they share an edge. Enumerates every cycle, so keep `n` small.
    pub fn short_cycles(n: usize, p: f64, k: usize) -> Self {
        let cycles = complete_graph_cycles(n, k);
        let probs: Vec<f64> = cycles.iter().map(|c| p.powi(c.len() as i32)).collect();
        let mut joint = Vec::new();
        for (a, ca) in cycles.iter().enumerate() {
            for (b, cb) in cycles.iter().enumerate() {
                if a == b {
                    continue;
                }
                let shared = ca.iter().filter(|e| cb.binary_search(e).is_ok()).count();
                if shared > 0 {
                    joint.push(p.powi((ca.len() + cb.len() - shared) as i32));
                }
            }
        }
        Self::from_events(&probs, joint)
    }
}

// Edge sets (sorted pair indices) of all cycles of length 3..=k in K_n.
fn complete_graph_cycles(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, k: usize, path: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let first = path[0];
        let last = *path.last().unwrap();
        if path.len() >= 3 && path[1] < last {
            let mut edges: Vec<usize> = path
                .windows(2)
                .map(|w| crate::graph::pair_index(n, w[0].min(w[1]), w[0].max(w[1])))
                .collect();
            edges.push(crate::graph::pair_index(n, first, last));
            edges.sort_unstable();
            out.push(edges);
        }
        if path.len() == k {
            return;
        }
        for x in first + 1..n {
            if !used[x] {
                used[x] = true;
                path.push(x);
                extend(n, k, path, used, out);
                path.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    for s in 0..n {
        used[s] = true;
        extend(n, k, &mut vec![s], &mut used, &mut out);
        used[s] = false;
    }
    out
}

/// Result of an exhaustive enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub count: BigUint,
    pub subsets: BigUint,
}

/// Counts all `m`-edge graphs on `n` vertices with girth above `k`.
pub fn exact_enumerate(n: usize, m: usize, k: usize) -> Result<Enumeration, CountError> {
    exact_enumerate_with(n, m, k, DEFAULT_ENUMERATION_BUDGET, |_| {})
}

/// Lists every member as a sorted edge list.
pub fn exact_enumerate_graphs(n: usize, m: usize, k: usize, budget: u64) -> Result<Vec<Graph>, CountError> {
    let mut out = Vec::new();
    exact_enumerate_with(n, m, k, budget, |edges| {
        out.push(Graph::from_edges(n, edges.iter().copied()).expect("valid enumerated edges"));
    })?;
    Ok(out)
}

/// Walks the `m`-subsets of vertex pairs in lexicographic order, skipping
/// every extension of a prefix that already closes a cycle of length at
/// most `k`, and calls `visit` on each member in order.
pub fn exact_enumerate_with<F>(
    n: usize,
    m: usize,
    k: usize,
    budget: u64,
    mut visit: F,
) -> Result<Enumeration, CountError>
where
    F: FnMut(&[(usize, usize)]),
{
    if n < 2 {
        return Err(CountError::InvalidParams("n must be at least 2".into()));
    }
    let pairs = pair_count(n);
    let total = binomial(pairs as u64, m as u64);
    if total > BigUint::from(budget) {
        return Err(CountError::BudgetExceeded { total, budget });
    }
    let all: Vec<(usize, usize)> = (0..pairs).map(|i| pair_from_index(n, i)).collect();
    let mut walker = SubsetWalker {
        all: &all,
        m,
        k,
        adj: vec![Vec::new(); n],
        chosen: Vec::with_capacity(m),
        dist: vec![usize::MAX; n],
        queue: Vec::with_capacity(n),
        count: 0,
    };
    walker.descend(0, &mut visit);
    Ok(Enumeration {
        count: BigUint::from(walker.count),
        subsets: total,
    })
}

struct SubsetWalker<'a> {
    all: &'a [(usize, usize)],
    m: usize,
    k: usize,
    adj: Vec<Vec<usize>>,
    chosen: Vec<(usize, usize)>,
    dist: Vec<usize>,
    queue: Vec<usize>,
    count: u64,
}

impl SubsetWalker<'_> {
    fn descend<F: FnMut(&[(usize, usize)])>(&mut self, start: usize, visit: &mut F) {
        if self.chosen.len() == self.m {
            self.count += 1;
            visit(&self.chosen);
            return;
        }
        let last = self.all.len() - (self.m - self.chosen.len());
        for idx in start..=last {
            let (i, j) = self.all[idx];
            if self.closes_short_cycle(i, j) {
                continue;
            }
            self.adj[i].push(j);
            self.adj[j].push(i);
            self.chosen.push((i, j));
            self.descend(idx + 1, visit);
            self.chosen.pop();
            self.adj[i].pop();
            self.adj[j].pop();
        }
    }

    // Is there a path of length <= k - 1 from i to j?
    fn closes_short_cycle(&mut self, i: usize, j: usize) -> bool {
        if self.k < 3 {
            return false;
        }
        let limit = self.k - 1;
        self.queue.clear();
        self.queue.push(i);
        self.dist[i] = 0;
        let mut head = 0;
        let mut found = false;
        while head < self.queue.len() && !found {
            let x = self.queue[head];
            head += 1;
            if self.dist[x] >= limit {
                continue;
            }
            for &y in &self.adj[x] {
                if self.dist[y] == usize::MAX {
                    self.dist[y] = self.dist[x] + 1;
                    if y == j {
                        found = true;
                        break;
                    }
                    self.queue.push(y);
                }
            }
        }
        for &v in &self.queue {
            self.dist[v] = usize::MAX;
        }
        self.dist[j] = usize::MAX;
        found
    }
}

/// Draws uniform `m`-edge graphs until one has girth above `k`. Returns the
/// graph and the number of draws.
pub fn rejection_sample<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut R,
    max_attempts: usize,
) -> Result<(Graph, usize), CountError> {
    let pairs = pair_count(n);
    if m > pairs {
        return Err(CountError::InvalidParams(format!("m = {m} exceeds {pairs} pairs")));
    }
    for attempt in 1..=max_attempts {
        let chosen = index::sample(rng, pairs, m);
        let g = Graph::from_edges(n, chosen.iter().map(|idx| pair_from_index(n, idx)))
            .expect("distinct pairs form a simple graph");
        if k < 3 || girth(&g).exceeds(k) {
            return Ok((g, attempt));
        }
    }
    Err(CountError::AttemptsExhausted(max_attempts))
}

/// Every bipartite realization of `deg` with girth above `k`, in
/// lexicographic order of left neighbourhoods. `budget` caps the number of
/// complete 0/1 matrices examined.
pub fn enumerate_bipartite(
    deg: &DegreeSequence,
    k: usize,
    budget: u64,
) -> Result<Vec<BipartiteGraph>, CountError> {
    let mut walker = MatrixWalker {
        deg,
        k,
        budget,
        cap: deg.right().to_vec(),
        edges: Vec::with_capacity(deg.edges()),
        seen: 0,
        out: Vec::new(),
    };
    walker.fill(0, 0, 0)?;
    Ok(walker.out)
}

// Row-by-row fill of a 0/1 matrix; column capacities never go negative and
// the sums agree, so every completed matrix has the exact margins.
struct MatrixWalker<'a> {
    deg: &'a DegreeSequence,
    k: usize,
    budget: u64,
    cap: Vec<usize>,
    edges: Vec<(usize, usize)>,
    seen: u64,
    out: Vec<BipartiteGraph>,
}

impl MatrixWalker<'_> {
    fn fill(&mut self, u: usize, in_row: usize, from: usize) -> Result<(), CountError> {
        let (n, m) = (self.deg.left().len(), self.deg.right().len());
        if u == n {
            self.seen += 1;
            if self.seen > self.budget {
                return Err(CountError::BudgetExceeded {
                    total: BigUint::from(self.seen),
                    budget: self.budget,
                });
            }
            let g = BipartiteGraph::from_edges(n, m, self.edges.iter().copied()).expect("distinct pairs");
            if girth(g.graph()).exceeds(self.k) {
                self.out.push(g);
            }
            return Ok(());
        }
        if in_row == self.deg.left()[u] {
            return self.fill(u + 1, 0, 0);
        }
        for v in from..m {
            if self.cap[v] == 0 {
                continue;
            }
            self.cap[v] -= 1;
            self.edges.push((u, v));
            let res = self.fill(u, in_row + 1, v + 1);
            self.edges.pop();
            self.cap[v] += 1;
            res?;
        }
        Ok(())
    }
}

/// Uniform random pairing of half-edges, retried until the result is simple
/// with girth above `k`. Every simple realization arises from the same
/// number of pairings, so accepted outputs are exactly uniform.
pub fn bipartite_rejection_sample<R: Rng + ?Sized>(
    deg: &DegreeSequence,
    k: usize,
    rng: &mut R,
    max_attempts: usize,
) -> Result<(BipartiteGraph, usize), CountError> {
    let (n, m) = (deg.left().len(), deg.right().len());
    let left_stubs: Vec<usize> = deg.left().iter().enumerate().flat_map(|(u, &d)| std::iter::repeat_n(u, d)).collect();
    let mut right_stubs: Vec<usize> = deg.right().iter().enumerate().flat_map(|(v, &d)| std::iter::repeat_n(v, d)).collect();
    'attempt: for attempt in 1..=max_attempts {
        right_stubs.shuffle(rng);
        let mut g = BipartiteGraph::empty(n, m);
        for (&u, &v) in left_stubs.iter().zip(&right_stubs) {
            if g.add_edge(u, v).is_err() {
                continue 'attempt;
            }
        }
        if girth(g.graph()).exceeds(k) {
            return Ok((g, attempt));
        }
    }
    Err(CountError::AttemptsExhausted(max_attempts))
}
