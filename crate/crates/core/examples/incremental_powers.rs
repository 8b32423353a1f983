//! Keeps adjacency powers current under edge insertions and reads the
//! suitable-pair mask and exponent matrix off them.
//!
//! cargo run --example incremental_powers

use girthgen::graph::{distances_from, Graph};
use girthgen::matrix::{exponent_matrix_affine, exponent_matrix_naive, suitable_mask, PowerCache};

fn main() {
    let n = 8;
    let k = 4;
    let mut cache = PowerCache::new(n, k).unwrap();
    let mut g = Graph::empty(n);
    for (i, j) in [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6)] {
        cache.apply_edge_update(i, j).unwrap();
        g.add_edge(i, j).unwrap();
    }
    let scratch = PowerCache::from_graph(&g, k).unwrap();
    for r in 1..k {
        println!("A^{r}: max gap to recomputed power = {}", scratch.power(r).max_abs_diff(cache.power(r)));
    }

    let mask = suitable_mask(&cache);
    println!("{} suitable pairs (distance >= {k}):", mask.count());
    for (i, j) in mask.pairs() {
        let d = distances_from(&g, i)[j];
        println!("  ({i}, {j}) at distance {d}");
    }

    let q = 0.2;
    let affine = exponent_matrix_affine(&cache, q);
    let naive = exponent_matrix_naive(&cache, q);
    println!("exponent at (0, 3): {:.6} (naive {:.6})", affine.get(0, 3), naive.get(0, 3));
}
