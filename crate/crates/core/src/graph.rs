//! Simple undirected graphs over dense vertex labels `0..n`, plus the
//! cycle/distance queries the samplers are built on.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigUint;
use thiserror::Error;

/// Largest supported girth parameter.
pub const MAX_K: usize = 10;
/// Largest supported vertex count.
pub const MAX_N: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(usize, usize),
    #[error("cycle length bound k = {0} outside 3..={MAX_K}")]
    CycleBound(usize),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

/// A length that may be unbounded: a hop distance or a girth.
///
/// `Finite(_)` orders before `Infinite`, so `Length::Infinite > Length::Finite(x)`
/// for every `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Length {
    Finite(usize),
    Infinite,
}

impl Length {
    pub fn is_finite(self) -> bool {
        matches!(self, Length::Finite(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Length::Finite(x) => Some(x),
            Length::Infinite => None,
        }
    }

    /// `true` when the length is strictly greater than `k`.
    pub fn exceeds(self, k: usize) -> bool {
        match self {
            Length::Finite(x) => x > k,
            Length::Infinite => true,
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Finite(x) => write!(f, "{x}"),
            Length::Infinite => write!(f, "inf"),
        }
    }
}

impl serde::Serialize for Length {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Length::Finite(x) => s.serialize_u64(*x as u64),
            Length::Infinite => s.serialize_none(),
        }
    }
}

/// Number of unordered vertex pairs, `n(n-1)/2`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of the pair `(i, j)`, `i < j`, in the lexicographic list of all pairs.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(n: usize, mut idx: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - i - 1;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
        i += 1;
    }
}

fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n],
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.edges.contains(&ordered(i, j))
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<(), GraphError> {
        for v in [i, j] {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        if i == j {
            return Err(GraphError::SelfLoop(i));
        }
        if !self.edges.insert(ordered(i, j)) {
            let (a, b) = ordered(i, j);
            return Err(GraphError::DuplicateEdge(a, b));
        }
        self.adj[i].push(j);
        self.adj[j].push(i);
        Ok(())
    }

    /// Dense 0/1 adjacency matrix, row-major.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.n]; self.n];
        for &(i, j) in &self.edges {
            a[i][j] = 1;
            a[j][i] = 1;
        }
        a
    }

    /// Writes the edge-list text format: `n m` followed by one `i j` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.n, self.edges.len())?;
        for &(i, j) in &self.edges {
            writeln!(w, "{i} {j}")?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge list is ASCII")
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self, GraphError> {
        let mut lines = r.lines().enumerate();
        let (n, m) = match lines.next() {
            Some((_, line)) => {
                let line = line.map_err(|e| GraphError::Io(e.to_string()))?;
                let v = parse_ints(&line, 1)?;
                if v.len() != 2 {
                    return Err(parse_err(1, 1, "header must be \"n m\""));
                }
                (v[0], v[1])
            }
            None => return Err(parse_err(1, 1, "empty input")),
        };
        let mut g = Graph::empty(n);
        for (idx, line) in lines {
            let line = line.map_err(|e| GraphError::Io(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let v = parse_ints(&line, lineno)?;
            if v.len() != 2 {
                return Err(parse_err(lineno, 1, "edge line must be \"i j\""));
            }
            g.add_edge(v[0], v[1]).map_err(|e| parse_err(lineno, 1, &e.to_string()))?;
        }
        if g.edge_count() != m {
            return Err(parse_err(
                1,
                1,
                &format!("header declares {m} edges, found {}", g.edge_count()),
            ));
        }
        Ok(g)
    }

    pub fn parse_edge_list(s: &str) -> Result<Self, GraphError> {
        Graph::read_edge_list(s.as_bytes())
    }
}

fn parse_err(line: usize, column: usize, message: &str) -> GraphError {
    GraphError::Parse {
        line,
        column,
        message: message.to_string(),
    }
}

/// Parses whitespace-separated non-negative integers, reporting the 1-based
/// column of the first bad token.
pub(crate) fn parse_ints(line: &str, lineno: usize) -> Result<Vec<usize>, GraphError> {
    line.split_whitespace()
        .map(|tok| {
            let column = tok.as_ptr() as usize - line.as_ptr() as usize + 1;
            tok.parse::<usize>().map_err(|_| {
                parse_err(lineno, column, &format!("expected integer, got {tok:?}"))
            })
        })
        .collect()
}

/// Breadth-first hop distances from `v`.
pub fn distances_from(g: &Graph, v: usize) -> Vec<Length> {
    let mut dist = vec![Length::Infinite; g.n()];
    dist[v] = Length::Finite(0);
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].finite().unwrap();
        for &w in g.neighbors(u) {
            if dist[w] == Length::Infinite {
                dist[w] = Length::Finite(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Hop distance from `src` to `dst`, exploring at most `limit` levels.
/// Returns `None` when `dst` is farther than `limit` (or unreachable).
pub fn bounded_distance(g: &Graph, src: usize, dst: usize, limit: usize) -> Option<usize> {
    if src == dst {
        return Some(0);
    }
    let mut seen = vec![false; g.n()];
    seen[src] = true;
    let mut frontier = vec![src];
    for depth in 1..=limit {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if w == dst {
                    return Some(depth);
                }
                if !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    None
}

/// Length of the shortest cycle, via one BFS per vertex.
pub fn girth(g: &Graph) -> Length {
    let n = g.n();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        for &v in &touched {
            dist[v] = usize::MAX;
            parent[v] = usize::MAX;
        }
        touched.clear();
        dist[s] = 0;
        touched.push(s);
        queue.clear();
        queue.push_back(s);
        'bfs: while let Some(u) = queue.pop_front() {
            // Nothing shorter can be found beyond this depth.
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    touched.push(w);
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                    if best == 3 {
                        break 'bfs;
                    }
                }
            }
        }
        if best == 3 {
            break;
        }
    }
    if best == usize::MAX {
        Length::Infinite
    } else {
        Length::Finite(best)
    }
}

/// `N[r][l]`: number of simple cycles of length `r` in the complete graph on
/// the vertex set that pass through a fixed pair and use exactly `l` other
/// edges of a given graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleTable {
    k: usize,
    // counts[r - 3][l]
    counts: Vec<Vec<u64>>,
}

impl CycleTable {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Count for cycle length `r` (3..=k) with `l` (0..r) edges in the graph.
    pub fn get(&self, r: usize, l: usize) -> u64 {
        if r < 3 || r > self.k || l >= r {
            return 0;
        }
        self.counts[r - 3][l]
    }

    /// All cycles of length `r` through the pair, regardless of overlap.
    pub fn total(&self, r: usize) -> u64 {
        if r < 3 || r > self.k {
            return 0;
        }
        self.counts[r - 3].iter().sum()
    }
}

/// Exact cycle table for the pair `(i, j)` by depth-first search over vertex
/// sequences `i, j, x1, .., x_{r-2}` with all vertices distinct.
pub fn count_simple_cycles_through(
    g: &Graph,
    pair: (usize, usize),
    k: usize,
) -> Result<CycleTable, GraphError> {
    if !(3..=MAX_K).contains(&k) {
        return Err(GraphError::CycleBound(k));
    }
    let (i, j) = pair;
    for v in [i, j] {
        if v >= g.n() {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: g.n() });
        }
    }
    if i == j {
        return Err(GraphError::SelfLoop(i));
    }
    let mut table = CycleTable {
        k,
        counts: (3..=k).map(|r| vec![0; r]).collect(),
    };
    let mut on_path = vec![false; g.n()];
    on_path[i] = true;
    on_path[j] = true;
    extend_path(g, i, j, 1, 0, k, &mut on_path, &mut table);
    Ok(table)
}

// `len` = number of edges on the path i -> j -> .. -> last, `present` = how
// many of those (excluding i-j) are edges of `g`.
#[allow(clippy::too_many_arguments)]
fn extend_path(
    g: &Graph,
    start: usize,
    last: usize,
    len: usize,
    present: usize,
    k: usize,
    on_path: &mut [bool],
    table: &mut CycleTable,
) {
    // Closing back to `start` gives a cycle of length len + 1.
    if len >= 2 {
        let closing = usize::from(g.has_edge(last, start));
        table.counts[len + 1 - 3][present + closing] += 1;
    }
    if len + 2 > k {
        return;
    }
    for x in 0..g.n() {
        if on_path[x] {
            continue;
        }
        on_path[x] = true;
        let step = usize::from(g.has_edge(last, x));
        extend_path(g, start, x, len + 1, present + step, k, on_path, table);
        on_path[x] = false;
    }
}

/// Exact `C(n, r)`.
pub fn binomial_big(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::from(0u32);
    }
    let r = r.min(n - r);
    let mut acc = BigUint::from(1u32);
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `|C_r|`: the number of simple cycles of length `r` in the complete graph
/// on `n` vertices, `C(n, r) (r-1)! / 2`. Zero when `r > n` or `r < 3`.
pub fn count_cycles(n: u64, r: u64) -> BigUint {
    if r < 3 || r > n {
        return BigUint::from(0u32);
    }
    let mut acc = binomial_big(n, r);
    for f in 3..r {
        acc *= f;
    }
    // (r-1)!/2 = 3 * 4 * .. * (r-1)
    acc
}

/// Natural log of [`count_cycles`], usable for large `n`.
pub fn ln_count_cycles(n: u64, r: u64) -> f64 {
    if r < 3 || r > n {
        return f64::NEG_INFINITY;
    }
    // n (n-1) .. (n-r+1) / (2r)
    let falling: f64 = (0..r).map(|i| ((n - i) as f64).ln()).sum();
    falling - (2.0 * r as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, e).unwrap()
    }

    #[test]
    fn girth_small_graphs() {
        assert_eq!(girth(&cycle(3)), Length::Finite(3));
        assert_eq!(girth(&cycle(5)), Length::Finite(5));
        assert_eq!(girth(&petersen()), Length::Finite(5));
        let tree = Graph::from_edges(6, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)]).unwrap();
        assert_eq!(girth(&tree), Length::Infinite);
        assert_eq!(girth(&Graph::empty(4)), Length::Infinite);
        // K4 minus an edge still has triangles; C4 plus pendant has girth 4.
        let mut g = cycle(4);
        g.add_edge(0, 2).unwrap();
        assert_eq!(girth(&g), Length::Finite(3));
        let h = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4)]).unwrap();
        assert_eq!(girth(&h), Length::Finite(4));
    }

    #[test]
    fn girth_even_cycle_found_from_any_root() {
        // Two cycles sharing a vertex: 4-cycle and 6-cycle.
        let mut e: Vec<_> = (0..4).map(|i| (i, (i + 1) % 4)).collect();
        e.extend([(0, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 0)]);
        let g = Graph::from_edges(9, e).unwrap();
        assert_eq!(girth(&g), Length::Finite(4));
    }

    #[test]
    fn distances() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        use Length::*;
        assert_eq!(distances_from(&path, 0), vec![Finite(0), Finite(1), Finite(2)]);
        assert_eq!(
            distances_from(&Graph::empty(3), 1),
            vec![Infinite, Finite(0), Infinite]
        );
        assert_eq!(
            distances_from(&cycle(4), 0),
            vec![Finite(0), Finite(1), Finite(2), Finite(1)]
        );
        assert_eq!(bounded_distance(&path, 0, 2, 1), None);
        assert_eq!(bounded_distance(&path, 0, 2, 2), Some(2));
    }

    #[test]
    fn length_ordering() {
        assert!(Length::Infinite > Length::Finite(1_000));
        assert!(Length::Finite(4).exceeds(3));
        assert!(!Length::Finite(3).exceeds(3));
        assert!(Length::Infinite.exceeds(MAX_K));
    }

    #[test]
    fn invalid_edges_rejected() {
        let mut g = Graph::empty(3);
        assert_eq!(g.add_edge(1, 1), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            g.add_edge(0, 3),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })
        );
        g.add_edge(2, 0).unwrap();
        assert_eq!(g.add_edge(0, 2), Err(GraphError::DuplicateEdge(0, 2)));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn adjacency_is_symmetric_with_zero_diagonal() {
        let a = petersen().adjacency_matrix();
        let mut total = 0usize;
        for i in 0..10 {
            assert_eq!(a[i][i], 0);
            for j in 0..10 {
                assert_eq!(a[i][j], a[j][i]);
                total += a[i][j] as usize;
            }
        }
        assert_eq!(total / 2, 15);
    }

    #[test]
    fn pair_indexing_roundtrip() {
        for n in 2..9 {
            let mut idx = 0;
            for i in 0..n {
                for j in i + 1..n {
                    assert_eq!(pair_index(n, i, j), idx);
                    assert_eq!(pair_from_index(n, idx), (i, j));
                    idx += 1;
                }
            }
            assert_eq!(idx, pair_count(n));
        }
    }

    #[test]
    fn cycle_table_on_sparse_graphs() {
        let t = count_simple_cycles_through(&Graph::empty(6), (1, 4), 3).unwrap();
        assert_eq!(t.get(3, 0), 4);
        assert_eq!(t.get(3, 1), 0);
        let g = Graph::from_edges(6, [(1, 4)]).unwrap();
        let t = count_simple_cycles_through(&g, (1, 4), 3).unwrap();
        assert_eq!(t.get(3, 0), 4);
        assert_eq!(t.get(3, 1), 0);
        // Path 1-0-4 closes exactly one triangle with both other edges present.
        let g = Graph::from_edges(6, [(1, 0), (0, 4)]).unwrap();
        let t = count_simple_cycles_through(&g, (1, 4), 3).unwrap();
        assert_eq!(t.get(3, 2), 1);
        assert_eq!(t.get(3, 0), 3);
        assert_eq!(
            count_simple_cycles_through(&g, (0, 1), 2),
            Err(GraphError::CycleBound(2))
        );
    }

    #[test]
    fn cycle_counts_in_complete_graph() {
        assert_eq!(count_cycles(4, 3), BigUint::from(4u32));
        assert_eq!(count_cycles(4, 4), BigUint::from(3u32));
        assert_eq!(count_cycles(5, 5), BigUint::from(12u32));
        assert_eq!(count_cycles(4, 5), BigUint::from(0u32));
        assert_eq!(count_cycles(7, 3), BigUint::from(35u32));
        for (n, r) in [(4u64, 3u64), (10, 6), (30, 8)] {
            let exact: f64 = count_cycles(n, r).to_string().parse().unwrap();
            assert!((ln_count_cycles(n, r) - exact.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn edge_list_format() {
        let g = petersen();
        let s = g.to_edge_list_string();
        assert!(s.starts_with("10 15\n0 1\n0 4\n0 5\n"));
        assert!(s.ends_with('\n'));
        assert_eq!(Graph::parse_edge_list(&s).unwrap(), g);
        assert!(matches!(
            Graph::parse_edge_list(""),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Graph::parse_edge_list("3 1\n0 x\n"),
            Err(GraphError::Parse { line: 2, column: 3, .. })
        ));
        assert!(matches!(
            Graph::parse_edge_list("3 2\n0 1\n"),
            Err(GraphError::Parse { .. })
        ));
        assert!(Graph::parse_edge_list("3 1\n1 1\n").is_err());
    }
}
