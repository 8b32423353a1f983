use girthgen::bipartite::{
    bip_generate, is_valid_bipartite_output, AlternatingCycle, BipConfig, BipOutcome, BipartiteGraph, BipartiteState,
    DegreeSequence,
};
use girthgen::graph::{distances_from, girth};
use girthgen::seed::seeded;
use proptest::prelude::*;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

fn random_degrees<R: Rng>(rng: &mut R, n: usize, m: usize, max: usize) -> DegreeSequence {
    loop {
        let left: Vec<usize> = (0..n).map(|_| rng.random_range(1..=max.min(m))).collect();
        let total: usize = left.iter().sum();
        if total < m || total > m * max.min(n) {
            continue;
        }
        // spread `total` over the right side with each entry in 1..=min(n, max)
        let cap = max.min(n);
        let mut right = vec![1usize; m];
        let mut left_over = total - m;
        while left_over > 0 {
            let v = rng.random_range(0..m);
            if right[v] < cap {
                right[v] += 1;
                left_over -= 1;
            }
        }
        return DegreeSequence::new(left, right).unwrap();
    }
}

/// Runs the sampler for a random number of steps and returns the state.
fn partial_state<R: Rng>(rng: &mut R, deg: &DegreeSequence, k: usize) -> BipartiteState {
    let mut s = BipartiteState::new(deg.clone(), BipConfig::new(k).unwrap());
    let steps = rng.random_range(0..deg.edges());
    for _ in 0..steps {
        if s.step(rng).unwrap().is_none() {
            break;
        }
    }
    s
}

// Average over every uniform pairing of the remaining half-edges (after the
// anchor) of the number of stub-level copies of the cycle's missing edges.
fn brute_force_expectation(state: &BipartiteState, gamma: &AlternatingCycle, anchor: (usize, usize)) -> f64 {
    let g = state.graph();
    let mut left_stubs = Vec::new();
    let mut right_stubs = Vec::new();
    for (u, &r) in state.residual_left().iter().enumerate() {
        left_stubs.extend(std::iter::repeat_n(u, r - usize::from(u == anchor.0)));
    }
    for (v, &c) in state.residual_right().iter().enumerate() {
        right_stubs.extend(std::iter::repeat_n(v, c - usize::from(v == anchor.1)));
    }
    let missing: Vec<(usize, usize)> =
        gamma.edges().into_iter().filter(|&e| e != anchor && !g.has_edge(e.0, e.1)).collect();
    let mut perm: Vec<usize> = (0..right_stubs.len()).collect();
    let mut total = 0.0;
    let mut count = 0u64;
    permutations(&mut perm, 0, &mut |p| {
        let copies: usize = missing
            .iter()
            .map(|&(u, v)| {
                left_stubs.iter().zip(p).filter(|&(&a, &b)| a == u && right_stubs[b] == v).count()
            })
            .product();
        total += copies as f64;
        count += 1;
    });
    total / count as f64
}

fn permutations(xs: &mut [usize], at: usize, f: &mut impl FnMut(&[usize])) {
    if at == xs.len() {
        f(xs);
        return;
    }
    for i in at..xs.len() {
        xs.swap(at, i);
        permutations(xs, at + 1, f);
        xs.swap(at, i);
    }
}

// All alternating cycles of length 4..=k through the anchor, listed as
// explicit vertex tuples.
fn cycles_through(n: usize, m: usize, k: usize, anchor: (usize, usize)) -> Vec<AlternatingCycle> {
    let mut out = Vec::new();
    for r in 2..=k / 2 {
        let others_l: Vec<usize> = (0..n).filter(|&u| u != anchor.0).collect();
        let others_r: Vec<usize> = (0..m).filter(|&v| v != anchor.1).collect();
        for ls in ordered_tuples(&others_l, r - 1) {
            for rs in ordered_tuples(&others_r, r - 1) {
                let mut left = vec![anchor.0];
                left.extend(&ls);
                let mut right = vec![anchor.1];
                right.extend(&rs);
                out.push(AlternatingCycle { left, right });
            }
        }
    }
    out
}

fn ordered_tuples(pool: &[usize], len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (idx, &x) in pool.iter().enumerate() {
        let rest: Vec<usize> = pool.iter().enumerate().filter(|&(i, _)| i != idx).map(|(_, &y)| y).collect();
        for mut tail in ordered_tuples(&rest, len - 1) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

fn suitable_by_bfs(state: &BipartiteState) -> Vec<(usize, usize)> {
    let g = state.graph();
    let n = g.left_count();
    let k = state.config().k();
    let mut out = Vec::new();
    for u in 0..n {
        if state.residual_left()[u] == 0 {
            continue;
        }
        let d = distances_from(g.graph(), u);
        for v in 0..g.right_count() {
            if state.residual_right()[v] > 0 && !d[n + v].finite().is_some_and(|x| x < k) {
                out.push((u, v));
            }
        }
    }
    out
}

#[test]
fn cycle_weight_matches_configuration_model() {
    let mut rng = seeded(41);
    let mut checked = 0;
    while checked < 60 {
        let deg = random_degrees(&mut rng, 3, 3, 3);
        if deg.edges() > 7 {
            continue;
        }
        let state = partial_state(&mut rng, &deg, 4);
        let pairs = state.suitable_pairs();
        let Some(&anchor) = pairs.choose(&mut rng) else { continue };
        for gamma in cycles_through(3, 3, 6, anchor) {
            let w = state.cycle_weight(&gamma, anchor).unwrap();
            let oracle = brute_force_expectation(&state, &gamma, anchor);
            assert!((w - oracle).abs() < 1e-12, "{gamma:?} anchor {anchor:?}: {w} vs {oracle}");
        }
        checked += 1;
    }
}

#[test]
fn cycle_weight_on_the_fixed_six_edge_instance() {
    let deg = DegreeSequence::regular(3, 2, 3, 2).unwrap();
    let g = BipartiteGraph::from_edges(3, 3, [(0, 0), (1, 1)]).unwrap();
    let state = BipartiteState::from_graph(deg, BipConfig::new(6).unwrap(), g).unwrap();
    let anchor = (2, 2);
    for gamma in cycles_through(3, 3, 6, anchor) {
        let w = state.cycle_weight(&gamma, anchor).unwrap();
        assert!((w - brute_force_expectation(&state, &gamma, anchor)).abs() < 1e-12);
    }
}

#[test]
fn fully_present_cycle_weighs_one() {
    let deg = DegreeSequence::regular(3, 2, 3, 2).unwrap();
    let gamma = AlternatingCycle { left: vec![0, 1, 2], right: vec![0, 1, 2] };
    let mut edges = gamma.edges();
    let anchor = edges.remove(0);
    let g = BipartiteGraph::from_edges(3, 3, edges).unwrap();
    let state = BipartiteState::from_graph(deg, BipConfig::new(2).unwrap(), g).unwrap();
    assert!((state.cycle_weight(&gamma, anchor).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn exponent_matches_explicit_cycle_sum() {
    let mut rng = seeded(42);
    for k in [4, 6] {
        for _ in 0..40 {
            let deg = random_degrees(&mut rng, 4, 4, 3);
            let state = partial_state(&mut rng, &deg, k);
            for anchor in state.suitable_pairs() {
                let explicit: f64 = cycles_through(4, 4, k, anchor)
                    .iter()
                    .map(|c| state.cycle_weight(c, anchor).unwrap())
                    .sum();
                let e = state.exponent(anchor).unwrap();
                assert!((e - explicit).abs() <= 1e-12 * (1.0 + explicit), "k={k} {anchor:?}: {e} vs {explicit}");
            }
        }
    }
}

#[test]
fn probability_matches_scripted_evaluation() {
    let mut rng = seeded(43);
    for _ in 0..40 {
        let deg = random_degrees(&mut rng, 4, 3, 3);
        let state = partial_state(&mut rng, &deg, 4);
        let pairs = suitable_by_bfs(&state);
        let Ok(p) = state.probability() else {
            assert!(pairs.is_empty());
            continue;
        };
        assert_eq!(p.pairs, pairs);
        let weights: Vec<f64> = pairs
            .iter()
            .map(|&(u, v)| {
                let e: f64 = cycles_through(4, 3, 4, (u, v)).iter().map(|c| state.cycle_weight(c, (u, v)).unwrap()).sum();
                state.residual_left()[u] as f64 * state.residual_right()[v] as f64 * (-e).exp()
            })
            .collect();
        let z: f64 = weights.iter().sum();
        for (idx, &(u, v)) in pairs.iter().enumerate() {
            assert!((p.get(u, v) - weights[idx] / z).abs() < 1e-12);
        }
    }
}

#[test]
fn weight_shrinks_as_more_edges_remain() {
    let gamma = AlternatingCycle { left: vec![0, 1], right: vec![0, 1] };
    let base = DegreeSequence::new(vec![2, 2, 1], vec![2, 2, 1]).unwrap();
    let bigger = DegreeSequence::new(vec![2, 2, 3], vec![2, 2, 3]).unwrap();
    let a = BipartiteState::new(base, BipConfig::new(4).unwrap()).cycle_weight(&gamma, (0, 0)).unwrap();
    let b = BipartiteState::new(bigger, BipConfig::new(4).unwrap()).cycle_weight(&gamma, (0, 0)).unwrap();
    assert!(b < a, "{b} !< {a}");
}

#[test]
fn outputs_realize_degrees_with_large_girth() {
    let mut rng = seeded(44);
    let mut successes = 0;
    for _ in 0..200 {
        let deg = random_degrees(&mut rng, 6, 6, 2);
        let k = *[2usize, 4].choose(&mut rng).unwrap();
        match bip_generate(&deg, k, &mut rng).unwrap() {
            BipOutcome::Success(g) => {
                assert!(is_valid_bipartite_output(&g, &deg, k));
                let back = BipartiteGraph::parse_alist(&g.to_alist_string()).unwrap();
                assert_eq!(back, g);
                successes += 1;
            }
            BipOutcome::Fail { step } => assert!(step < deg.edges()),
        }
    }
    assert!(successes > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn probabilities_are_equivariant_within_sides(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let deg = random_degrees(&mut rng, 4, 4, 3);
        let state = partial_state(&mut rng, &deg, 4);
        let mut pl: Vec<usize> = (0..4).collect();
        let mut pr: Vec<usize> = (0..4).collect();
        pl.shuffle(&mut rng);
        pr.shuffle(&mut rng);
        let mut left = vec![0; 4];
        let mut right = vec![0; 4];
        for i in 0..4 {
            left[pl[i]] = deg.left()[i];
            right[pr[i]] = deg.right()[i];
        }
        let moved_deg = DegreeSequence::new(left, right).unwrap();
        let moved_graph = BipartiteGraph::from_edges(4, 4, state.graph().edges().into_iter().map(|(u, v)| (pl[u], pr[v]))).unwrap();
        let moved = BipartiteState::from_graph(moved_deg, state.config(), moved_graph).unwrap();
        match (state.probability(), moved.probability()) {
            (Ok(a), Ok(b)) => {
                for (idx, &(u, v)) in a.pairs.iter().enumerate() {
                    prop_assert!((a.probs[idx] - b.get(pl[u], pr[v])).abs() < 1e-12);
                }
                prop_assert_eq!(a.pairs.len(), b.pairs.len());
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "support differs"),
        }
    }

    #[test]
    fn alist_roundtrip(edges in proptest::collection::btree_set((0usize..5, 0usize..7), 0..20)) {
        let g = BipartiteGraph::from_edges(5, 7, edges).unwrap();
        prop_assert_eq!(BipartiteGraph::parse_alist(&g.to_alist_string()).unwrap(), g);
    }

    #[test]
    fn states_keep_girth_and_residuals(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let deg = random_degrees(&mut rng, 5, 5, 3);
        let state = partial_state(&mut rng, &deg, 4);
        prop_assert!(girth(state.graph().graph()).exceeds(4));
        let rl: usize = state.residual_left().iter().sum();
        let rr: usize = state.residual_right().iter().sum();
        prop_assert_eq!(rl, deg.edges() - state.t());
        prop_assert_eq!(rr, deg.edges() - state.t());
    }
}
