#![allow(dead_code)]

use girthgen::graph::{pair_count, pair_from_index, Graph};
use girthgen::{Params, SamplerState};
use rand::Rng;

pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let edges: Vec<(usize, usize)> = (0..pair_count(n))
        .map(|idx| pair_from_index(n, idx))
        .filter(|_| rng.random::<f64>() < p)
        .collect();
    Graph::from_edges(n, edges).unwrap()
}

/// A state reached by running the sampler for a random number of steps.
pub fn reachable_state<R: Rng>(rng: &mut R, max_n: usize, k_range: std::ops::RangeInclusive<usize>) -> SamplerState {
    let n = rng.random_range(4..=max_n);
    let k = rng.random_range(k_range);
    let m = rng.random_range(1..=(2 * n).min(pair_count(n)));
    let mut state = SamplerState::new(Params::new(n, m, k).unwrap());
    let steps = rng.random_range(0..=m);
    for _ in 0..steps {
        if state.is_complete() || state.step(rng).is_err() {
            break;
        }
    }
    state
}

/// All-pairs hop distances; `None` when unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.n();
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for (i, j) in g.edges() {
        d[i][j] = Some(1);
        d[j][i] = Some(1);
    }
    for via in 0..n {
        for a in 0..n {
            for b in 0..n {
                if let (Some(x), Some(y)) = (d[a][via], d[via][b]) {
                    if d[a][b].is_none_or(|cur| x + y < cur) {
                        d[a][b] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

/// Every simple cycle of `g` as a sorted edge list, by brute force over
/// vertex sequences starting at their minimum vertex.
pub fn brute_force_cycles(g: &Graph, max_len: usize) -> Vec<Vec<(usize, usize)>> {
    let n = g.n();
    let mut out = Vec::new();
    fn go(g: &Graph, path: &mut Vec<usize>, max_len: usize, out: &mut Vec<Vec<(usize, usize)>>) {
        let s = path[0];
        let last = *path.last().unwrap();
        if path.len() >= 3 && path[1] < last && g.has_edge(last, s) {
            let mut e: Vec<(usize, usize)> = path.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
            e.push((s.min(last), s.max(last)));
            e.sort_unstable();
            out.push(e);
        }
        if path.len() == max_len {
            return;
        }
        for x in s + 1..g.n() {
            if !path.contains(&x) && g.has_edge(last, x) {
                path.push(x);
                go(g, path, max_len, out);
                path.pop();
            }
        }
    }
    for s in 0..n {
        go(g, &mut vec![s], max_len, &mut out);
    }
    out
}
