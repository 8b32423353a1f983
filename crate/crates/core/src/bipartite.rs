//! Bipartite graphs with prescribed degrees and girth greater than an even
//! `k`, for LDPC Tanner-graph construction.
//!
//! Left vertices `u_0..u_{n-1}` and right vertices `v_0..v_{m-1}` are kept
//! in local indices; the underlying [`Graph`] numbers `v_j` as `n + j`.
//! A pair `(u_i, v_j)` is drawn with probability proportional to
//! `r_i c_j exp(-E(u_i, v_j))`, where `r`, `c` are residual degrees and
//! `E` is the configuration-model expectation of short cycles through the
//! pair once the remaining edges are paired at random.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::Rng;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::graph::{girth, parse_ints, Graph, GraphError, MAX_K};

/// Default cap on `(n m)^{k/2 - 1}`, the per-pair cycle enumeration size.
pub const DEFAULT_CYCLE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BipError {
    #[error("degree sums differ: left {left}, right {right}")]
    SumMismatch { left: usize, right: usize },
    #[error("invalid degree sequence: {0}")]
    InvalidDegrees(String),
    #[error("girth parameter k = {0} must be even and in 2..={MAX_K}")]
    InvalidK(usize),
    #[error("cycle enumeration needs {needed} sequences per pair, budget is {budget}")]
    EnumerationCap { needed: u128, budget: u64 },
    #[error("no suitable pair at step {0}")]
    NoSuitablePair(usize),
    #[error("cycle does not pass through the anchor pair")]
    AnchorNotOnCycle,
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),
    #[error("all {attempts} attempts failed (last failure at step {last_failed_at})")]
    RetriesExhausted {
        attempts: usize,
        last_failed_at: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Left degrees `r` and right degrees `c` with equal sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl DegreeSequence {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Result<Self, BipError> {
        if left.is_empty() || right.is_empty() {
            return Err(BipError::InvalidDegrees("both sides need at least one vertex".into()));
        }
        if left.iter().chain(&right).any(|&d| d == 0) {
            return Err(BipError::InvalidDegrees("degrees must be positive".into()));
        }
        let (l, r) = (left.iter().sum(), right.iter().sum());
        if l != r {
            return Err(BipError::SumMismatch { left: l, right: r });
        }
        Ok(DegreeSequence { left, right })
    }

    /// `d` on each of `n` left vertices, `d'` on each of `m` right vertices.
    pub fn regular(n: usize, d: usize, m: usize, d2: usize) -> Result<Self, BipError> {
        Self::new(vec![d; n], vec![d2; m])
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    /// Total number of edges `e`.
    pub fn edges(&self) -> usize {
        self.left.iter().sum()
    }

    /// Gale–Ryser test for a simple bipartite realization (ignores girth).
    pub fn is_graphical(&self) -> bool {
        let mut a = self.left.clone();
        a.sort_unstable_by(|x, y| y.cmp(x));
        let mut prefix = 0;
        for (kk, &ak) in a.iter().enumerate() {
            prefix += ak;
            let bound: usize = self.right.iter().map(|&c| c.min(kk + 1)).sum();
            if prefix > bound {
                return false;
            }
        }
        true
    }

    /// Parses two whitespace-separated integer lines: left degrees, then
    /// right degrees.
    pub fn parse(text: &str) -> Result<Self, BipError> {
        let mut rows = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            rows.push((idx + 1, parse_ints(line, idx + 1)?));
        }
        if rows.len() != 2 {
            let line = rows.get(2).map_or(rows.len() + 1, |r| r.0);
            return Err(GraphError::Parse {
                line,
                column: 1,
                message: format!("expected 2 degree lines, found {}", rows.len()),
            }
            .into());
        }
        let right = rows.pop().unwrap().1;
        let left = rows.pop().unwrap().1;
        Self::new(left, right)
    }
}

/// Bipartite graph with `left + right` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    graph: Graph,
}

impl BipartiteGraph {
    pub fn empty(left: usize, right: usize) -> Self {
        BipartiteGraph {
            left,
            right,
            graph: Graph::empty(left + right),
        }
    }

    pub fn from_edges<I>(left: usize, right: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(left, right);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn left_count(&self) -> usize {
        self.left
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    /// Underlying graph; right vertex `v` is vertex `left + v`.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u >= self.left {
            return Err(GraphError::VertexOutOfRange { vertex: u, n: self.left });
        }
        if v >= self.right {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.right });
        }
        self.graph.add_edge(u, self.left + v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.graph.has_edge(u, self.left + v)
    }

    /// Edges as local `(u, v)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.graph.edges().map(|(a, b)| (a, b - self.left)).collect()
    }

    pub fn left_degree(&self, u: usize) -> usize {
        self.graph.degree(u)
    }

    pub fn right_degree(&self, v: usize) -> usize {
        self.graph.degree(self.left + v)
    }

    pub fn right_neighbors(&self, u: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.graph.neighbors(u).iter().map(|&w| w - self.left).collect();
        out.sort_unstable();
        out
    }

    pub fn left_neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = self.graph.neighbors(self.left + v).to_vec();
        out.sort_unstable();
        out
    }

    pub fn realizes(&self, deg: &DegreeSequence) -> bool {
        deg.left().len() == self.left
            && deg.right().len() == self.right
            && (0..self.left).all(|u| self.left_degree(u) == deg.left()[u])
            && (0..self.right).all(|v| self.right_degree(v) == deg.right()[v])
    }

    /// alist: sizes, max degrees, degree lists, then 1-indexed neighbor
    /// lists zero-padded to the maximum degree of each side.
    pub fn write_alist<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let ld: Vec<usize> = (0..self.left).map(|u| self.left_degree(u)).collect();
        let rd: Vec<usize> = (0..self.right).map(|v| self.right_degree(v)).collect();
        let max_l = ld.iter().copied().max().unwrap_or(0);
        let max_r = rd.iter().copied().max().unwrap_or(0);
        let join = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(w, "{} {}", self.left, self.right)?;
        writeln!(w, "{max_l} {max_r}")?;
        writeln!(w, "{}", join(&ld))?;
        writeln!(w, "{}", join(&rd))?;
        for u in 0..self.left {
            let mut row: Vec<usize> = self.right_neighbors(u).iter().map(|v| v + 1).collect();
            // isolated vertices get a lone 0 so the row is not blank
            row.resize(max_l.max(1), 0);
            writeln!(w, "{}", join(&row))?;
        }
        for v in 0..self.right {
            let mut row: Vec<usize> = self.left_neighbors(v).iter().map(|u| u + 1).collect();
            row.resize(max_r.max(1), 0);
            writeln!(w, "{}", join(&row))?;
        }
        Ok(())
    }

    pub fn to_alist_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_alist(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("alist is ASCII")
    }

    pub fn read_alist<R: BufRead>(r: R) -> Result<Self, GraphError> {
        let mut rows = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line.map_err(|e| GraphError::Io(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            rows.push((idx + 1, parse_ints(&line, idx + 1)?));
        }
        let bad = |line: usize, msg: String| GraphError::Parse {
            line,
            column: 1,
            message: msg,
        };
        if rows.len() < 4 {
            return Err(bad(rows.len() + 1, "truncated alist header".into()));
        }
        let (left, right) = match rows[0].1[..] {
            [a, b] => (a, b),
            _ => return Err(bad(rows[0].0, "expected \"n m\"".into())),
        };
        if rows.len() != 4 + left + right {
            return Err(bad(
                rows.last().map_or(1, |r| r.0),
                format!("expected {} lines, found {}", 4 + left + right, rows.len()),
            ));
        }
        let ldeg = &rows[2].1;
        if ldeg.len() != left || rows[3].1.len() != right {
            return Err(bad(rows[2].0, "degree list lengths do not match sizes".into()));
        }
        let mut g = BipartiteGraph::empty(left, right);
        for u in 0..left {
            let (line, ref nbrs) = rows[4 + u];
            for &v in nbrs.iter().filter(|&&v| v != 0) {
                g.add_edge(u, v - 1)
                    .map_err(|e| bad(line, e.to_string()))?;
            }
            if g.left_degree(u) != ldeg[u] {
                return Err(bad(line, format!("left vertex {} degree mismatch", u + 1)));
            }
        }
        for v in 0..right {
            let (line, ref nbrs) = rows[4 + left + v];
            let mut listed: Vec<usize> = nbrs.iter().filter(|&&u| u != 0).map(|u| u - 1).collect();
            listed.sort_unstable();
            if listed != g.left_neighbors(v) || rows[3].1[v] != listed.len() {
                return Err(bad(line, format!("right vertex {} inconsistent", v + 1)));
            }
        }
        Ok(g)
    }

    pub fn parse_alist(s: &str) -> Result<Self, GraphError> {
        Self::read_alist(s.as_bytes())
    }
}

/// An alternating cycle `u_0 v_0 u_1 v_1 .. u_{r-1} v_{r-1}` of length `2r`;
/// `v_a` is adjacent to `u_a` and `u_{a+1 mod r}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingCycle {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl AlternatingCycle {
    pub fn len(&self) -> usize {
        2 * self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    /// Cycle edges as local `(u, v)` pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let r = self.left.len();
        let mut out = Vec::with_capacity(2 * r);
        for a in 0..r {
            out.push((self.left[a], self.right[a]));
            out.push((self.left[(a + 1) % r], self.right[a]));
        }
        out
    }
}

/// Sampler configuration: even girth bound and enumeration cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipConfig {
    k: usize,
    cycle_budget: u64,
}

impl BipConfig {
    pub fn new(k: usize) -> Result<Self, BipError> {
        if !k.is_multiple_of(2) || !(2..=MAX_K).contains(&k) {
            return Err(BipError::InvalidK(k));
        }
        Ok(BipConfig {
            k,
            cycle_budget: DEFAULT_CYCLE_BUDGET,
        })
    }

    pub fn with_cycle_budget(mut self, budget: u64) -> Self {
        self.cycle_budget = budget;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cycle_budget(&self) -> u64 {
        self.cycle_budget
    }
}

/// Normalized `q(u_i v_j | G_t)` over the suitable pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct BipProbability {
    pub pairs: Vec<(usize, usize)>,
    pub probs: Vec<f64>,
}

impl BipProbability {
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.pairs
            .binary_search(&(u, v))
            .map_or(0.0, |idx| self.probs[idx])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let total: f64 = self.probs.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        for (pair, &p) in self.pairs.iter().zip(&self.probs) {
            acc += p;
            if acc > target && p > 0.0 {
                return *pair;
            }
        }
        *self
            .pairs
            .iter()
            .zip(&self.probs)
            .rev()
            .find(|(_, &p)| p > 0.0)
            .expect("non-empty support")
            .0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BipOutcome {
    Success(BipartiteGraph),
    Fail { step: usize },
}

/// Partial Tanner graph after `t` edges.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    deg: DegreeSequence,
    config: BipConfig,
    graph: BipartiteGraph,
    present: Vec<bool>,
    res_left: Vec<usize>,
    res_right: Vec<usize>,
    t: usize,
}

impl BipartiteState {
    pub fn new(deg: DegreeSequence, config: BipConfig) -> Self {
        let (n, m) = (deg.left().len(), deg.right().len());
        BipartiteState {
            res_left: deg.left().to_vec(),
            res_right: deg.right().to_vec(),
            graph: BipartiteGraph::empty(n, m),
            present: vec![false; n * m],
            deg,
            config,
            t: 0,
        }
    }

    /// Rebuilds a state from a partial graph whose degrees do not exceed `deg`.
    pub fn from_graph(
        deg: DegreeSequence,
        config: BipConfig,
        graph: BipartiteGraph,
    ) -> Result<Self, BipError> {
        let mut s = Self::new(deg, config);
        if graph.left_count() != s.res_left.len() || graph.right_count() != s.res_right.len() {
            return Err(BipError::InvalidDegrees("graph sides do not match the degree sequence".into()));
        }
        for (u, v) in graph.edges() {
            if s.res_left[u] == 0 || s.res_right[v] == 0 {
                return Err(BipError::InvalidDegrees(format!(
                    "edge ({u}, {v}) exceeds the prescribed degree"
                )));
            }
            s.insert(u, v);
        }
        Ok(s)
    }

    fn insert(&mut self, u: usize, v: usize) {
        let m = self.res_right.len();
        self.graph.add_edge(u, v).expect("pair is a non-edge");
        self.present[u * m + v] = true;
        self.res_left[u] -= 1;
        self.res_right[v] -= 1;
        self.t += 1;
    }

    pub fn degrees(&self) -> &DegreeSequence {
        &self.deg
    }

    pub fn config(&self) -> BipConfig {
        self.config
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn residual_left(&self) -> &[usize] {
        &self.res_left
    }

    pub fn residual_right(&self) -> &[usize] {
        &self.res_right
    }

    /// Edges still to place, `e - t`.
    pub fn remaining(&self) -> usize {
        self.deg.edges() - self.t
    }

    pub fn is_complete(&self) -> bool {
        self.remaining() == 0
    }

    #[inline]
    fn has(&self, u: usize, v: usize) -> bool {
        self.present[u * self.res_right.len() + v]
    }

    /// Pairs with positive residual degrees on both ends, not yet adjacent,
    /// and at distance at least `k`.
    pub fn suitable_pairs(&self) -> Vec<(usize, usize)> {
        let (n, m) = (self.res_left.len(), self.res_right.len());
        let g = self.graph.graph();
        let k = self.config.k;
        let mut out = Vec::new();
        let mut dist = vec![usize::MAX; n + m];
        let mut queue = VecDeque::new();
        for u in 0..n {
            if self.res_left[u] == 0 {
                continue;
            }
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[u] = 0;
            queue.clear();
            queue.push_back(u);
            while let Some(x) = queue.pop_front() {
                if dist[x] + 1 >= k {
                    continue;
                }
                for &y in g.neighbors(x) {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            for v in 0..m {
                if self.res_right[v] > 0 && dist[n + v] == usize::MAX {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn residual_after(&self, anchor: (usize, usize), side_left: bool, x: usize) -> usize {
        if side_left {
            self.res_left[x] - usize::from(x == anchor.0)
        } else {
            self.res_right[x] - usize::from(x == anchor.1)
        }
    }

    fn ln_b(&self, anchor: (usize, usize), side_left: bool, x: usize, covered: usize) -> f64 {
        let r = self.residual_after(anchor, side_left, x) as f64;
        match covered {
            2 => 0.0,
            1 => r.ln(),
            _ => (r * (r - 1.0)).ln(),
        }
    }

    fn ln_factorial_ratio(&self, cycle_len: usize, in_graph: usize) -> f64 {
        // (e - t - 2r + |gamma ∩ G_t|)! / (e - t - 1)!
        let remaining = self.remaining() as i64;
        let top = remaining - cycle_len as i64 + in_graph as i64;
        if top < 0 {
            return f64::NEG_INFINITY;
        }
        ln_gamma(top as f64 + 1.0) - ln_gamma(remaining as f64)
    }

    /// `a(gamma, G_t, anchor)`: configuration-model expectation that the
    /// cycle appears once the anchor is placed and the remaining edges are
    /// paired uniformly. Residual degrees are those of `G_t + anchor`.
    pub fn cycle_weight(
        &self,
        gamma: &AlternatingCycle,
        anchor: (usize, usize),
    ) -> Result<f64, BipError> {
        let r = gamma.left.len();
        if r < 2 || gamma.right.len() != r {
            return Err(BipError::InvalidCycle("need r >= 2 vertices on each side".into()));
        }
        let (n, m) = (self.res_left.len(), self.res_right.len());
        let mut seen_l = vec![false; n];
        let mut seen_r = vec![false; m];
        for a in 0..r {
            let (u, v) = (gamma.left[a], gamma.right[a]);
            if u >= n || v >= m || std::mem::replace(&mut seen_l[u], true) || std::mem::replace(&mut seen_r[v], true) {
                return Err(BipError::InvalidCycle("vertices must be distinct and in range".into()));
            }
        }
        let edges = gamma.edges();
        if !edges.contains(&anchor) {
            return Err(BipError::AnchorNotOnCycle);
        }
        if self.has(anchor.0, anchor.1) {
            return Err(BipError::InvalidCycle("anchor is already an edge".into()));
        }
        let covered = |e: (usize, usize)| e == anchor || self.has(e.0, e.1);
        let in_graph = edges.iter().filter(|&&e| self.has(e.0, e.1)).count();
        let mut ln_w = self.ln_factorial_ratio(2 * r, in_graph);
        for a in 0..r {
            // u_a touches (u_a, v_{a-1}) and (u_a, v_a); v_a touches (u_a, v_a), (u_{a+1}, v_a).
            let u = gamma.left[a];
            let cu = usize::from(covered((u, gamma.right[(a + r - 1) % r])))
                + usize::from(covered((u, gamma.right[a])));
            ln_w += self.ln_b(anchor, true, u, cu);
            let v = gamma.right[a];
            let cv = usize::from(covered((u, v))) + usize::from(covered((gamma.left[(a + 1) % r], v)));
            ln_w += self.ln_b(anchor, false, v, cv);
        }
        Ok(if ln_w == f64::NEG_INFINITY { 0.0 } else { ln_w.exp() })
    }

    /// Sequences enumerated per anchor: `(n m)^{k/2 - 1}`.
    pub fn enumeration_size(&self) -> u128 {
        let nm = (self.res_left.len() * self.res_right.len()) as u128;
        let exp = (self.config.k / 2).saturating_sub(1) as u32;
        nm.checked_pow(exp).unwrap_or(u128::MAX)
    }

    fn check_budget(&self) -> Result<(), BipError> {
        let needed = self.enumeration_size();
        if needed > u128::from(self.config.cycle_budget) {
            return Err(BipError::EnumerationCap {
                needed,
                budget: self.config.cycle_budget,
            });
        }
        Ok(())
    }

    /// `E_k(G_t, anchor)`: sum of [`cycle_weight`](Self::cycle_weight) over
    /// the simple cycles of length `4..=k` through the anchor in the complete
    /// bipartite graph. Length-2 "cycles" are not simple and contribute 0.
    pub fn exponent(&self, anchor: (usize, usize)) -> Result<f64, BipError> {
        self.check_budget()?;
        if self.config.k < 4 {
            return Ok(0.0);
        }
        let mut walker = CycleWalker::new(self, anchor);
        walker.extend();
        Ok(walker.total)
    }

    pub fn probability(&self) -> Result<BipProbability, BipError> {
        let pairs = self.suitable_pairs();
        if pairs.is_empty() {
            return Err(BipError::NoSuitablePair(self.t));
        }
        let mut logw = Vec::with_capacity(pairs.len());
        for &(u, v) in &pairs {
            let e = self.exponent((u, v))?;
            logw.push((self.res_left[u] as f64).ln() + (self.res_right[v] as f64).ln() - e);
        }
        let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= z);
        Ok(BipProbability { pairs, probs })
    }

    /// Places one edge; `Ok(None)` signals failure with the state unchanged.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Option<(usize, usize)>, BipError> {
        let p = match self.probability() {
            Ok(p) => p,
            Err(BipError::NoSuitablePair(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let (u, v) = p.sample(rng);
        self.insert(u, v);
        Ok(Some((u, v)))
    }

    pub fn into_graph(self) -> BipartiteGraph {
        self.graph
    }
}

// Depth-first enumeration of u0 v0 u1 v1 .. with (u0, v0) = anchor,
// accumulating log b-factors of vertices whose two cycle edges are fixed.
struct CycleWalker<'a> {
    state: &'a BipartiteState,
    anchor: (usize, usize),
    max_r: usize,
    left: Vec<usize>,
    right: Vec<usize>,
    used_l: Vec<bool>,
    used_r: Vec<bool>,
    total: f64,
}

impl<'a> CycleWalker<'a> {
    fn new(state: &'a BipartiteState, anchor: (usize, usize)) -> Self {
        let (n, m) = (state.res_left.len(), state.res_right.len());
        let mut used_l = vec![false; n];
        let mut used_r = vec![false; m];
        used_l[anchor.0] = true;
        used_r[anchor.1] = true;
        CycleWalker {
            state,
            anchor,
            max_r: state.config.k / 2,
            left: vec![anchor.0],
            right: vec![anchor.1],
            used_l,
            used_r,
            total: 0.0,
        }
    }

    fn covered(&self, u: usize, v: usize) -> usize {
        usize::from((u, v) == self.anchor || self.state.has(u, v))
    }

    fn extend(&mut self) {
        // path u0 v0 .. u_{a-1} v_{a-1}; next add u_a then v_a
        self.walk(0.0, 0);
    }

    // ln_b: log b-factors of completed vertices v_0 .. u_{a-1}, in_graph:
    // path edges other than the anchor present in G_t.
    fn walk(&mut self, ln_b: f64, in_graph: usize) {
        let a = self.left.len();
        let (n, m) = (self.state.res_left.len(), self.state.res_right.len());
        let v_prev = self.right[a - 1];
        for u in 0..n {
            if self.used_l[u] {
                continue;
            }
            // v_{a-1} is now complete: edges (u_{a-1}, v_{a-1}), (u, v_{a-1}).
            let e_in = self.covered(u, v_prev);
            let cv = self.covered(self.left[a - 1], v_prev) + e_in;
            let lb_v = ln_b + self.state.ln_b(self.anchor, false, v_prev, cv);
            if lb_v == f64::NEG_INFINITY {
                continue;
            }
            let ig_u = in_graph + usize::from(self.state.has(u, v_prev));
            self.used_l[u] = true;
            self.left.push(u);
            for v in 0..m {
                if self.used_r[v] {
                    continue;
                }
                let cu = e_in + self.covered(u, v);
                let lb_u = lb_v + self.state.ln_b(self.anchor, true, u, cu);
                if lb_u == f64::NEG_INFINITY {
                    continue;
                }
                let ig = ig_u + usize::from(self.state.has(u, v));
                self.used_r[v] = true;
                self.right.push(v);
                self.close(lb_u, ig);
                if a + 1 < self.max_r {
                    self.walk(lb_u, ig);
                }
                self.right.pop();
                self.used_r[v] = false;
            }
            self.left.pop();
            self.used_l[u] = false;
        }
    }

    // Close v_{r-1} back to u_0.
    fn close(&mut self, ln_b: f64, in_graph: usize) {
        let r = self.left.len();
        let (u0, v_last, u_last) = (self.left[0], self.right[r - 1], self.left[r - 1]);
        let closing = self.covered(u0, v_last);
        let cv = self.covered(u_last, v_last) + closing;
        let cu = 1 + closing;
        let ig = in_graph + usize::from(self.state.has(u0, v_last));
        let ln_w = ln_b
            + self.state.ln_b(self.anchor, false, v_last, cv)
            + self.state.ln_b(self.anchor, true, u0, cu)
            + self.state.ln_factorial_ratio(2 * r, ig);
        if ln_w > f64::NEG_INFINITY {
            self.total += ln_w.exp();
        }
    }
}

fn validate_k(k: usize) -> Result<BipConfig, BipError> {
    BipConfig::new(k)
}

/// One full run over `e` steps.
pub fn bip_generate<R: Rng + ?Sized>(
    deg: &DegreeSequence,
    k: usize,
    rng: &mut R,
) -> Result<BipOutcome, BipError> {
    bip_run(deg, validate_k(k)?, rng)
}

/// One full run with an explicit configuration. Logs a warning when the
/// degrees fail the Gale–Ryser test.
pub fn bip_run<R: Rng + ?Sized>(
    deg: &DegreeSequence,
    config: BipConfig,
    rng: &mut R,
) -> Result<BipOutcome, BipError> {
    if !deg.is_graphical() {
        log::warn!("degree sequence fails the Gale-Ryser condition; every run will fail");
    }
    let mut state = BipartiteState::new(deg.clone(), config);
    state.check_budget()?;
    while !state.is_complete() {
        if state.step(rng)?.is_none() {
            return Ok(BipOutcome::Fail { step: state.t() });
        }
    }
    Ok(BipOutcome::Success(state.into_graph()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipRetryReport {
    pub graph: BipartiteGraph,
    pub attempts: usize,
    pub failed_at: Vec<usize>,
}

pub fn bip_generate_with_retries<R: Rng + ?Sized>(
    deg: &DegreeSequence,
    config: BipConfig,
    rng: &mut R,
    max_retries: usize,
) -> Result<BipRetryReport, BipError> {
    if max_retries == 0 {
        return Err(BipError::InvalidDegrees("max_retries must be at least 1".into()));
    }
    let mut failed_at = Vec::new();
    for attempt in 1..=max_retries {
        match bip_run(deg, config, rng)? {
            BipOutcome::Success(graph) => {
                return Ok(BipRetryReport {
                    graph,
                    attempts: attempt,
                    failed_at,
                })
            }
            BipOutcome::Fail { step } => failed_at.push(step),
        }
    }
    Err(BipError::RetriesExhausted {
        attempts: max_retries,
        last_failed_at: *failed_at.last().unwrap(),
    })
}

/// Exact degrees and girth above `k`.
pub fn is_valid_bipartite_output(g: &BipartiteGraph, deg: &DegreeSequence, k: usize) -> bool {
    g.realizes(deg) && girth(g.graph()).exceeds(k)
}
