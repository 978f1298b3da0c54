//! Shared helpers for the integration suites.
#![allow(dead_code)] // each test target uses a different subset

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treesum::{build_fenwick, build_sierpinski, Forest};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A fresh Fenwick or Sierpinski forest with a random sequence of edge
/// deletions applied, all drawn from the given generator.
pub fn random_pruned_forest(rng: &mut ChaCha8Rng, max_n: usize) -> Forest {
    let n = rng.random_range(1..=max_n);
    let mut forest = if rng.random_bool(0.5) {
        build_sierpinski(n).unwrap()
    } else {
        build_fenwick(n).unwrap()
    };
    let deletions = rng.random_range(0..=n);
    for _ in 0..deletions {
        let children: Vec<usize> = (0..n).filter(|&c| forest.parent(c).is_some()).collect();
        if children.is_empty() {
            break;
        }
        let child = children[rng.random_range(0..children.len())];
        forest = forest.delete_edge(child).unwrap();
    }
    forest
}
