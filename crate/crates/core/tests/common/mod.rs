#![allow(dead_code)]

use matroid_im::graph::{Edge, Graph};
use matroid_im::matroid::Matroid;
use matroid_im::{PartitionMatroid, RRCollection, RngStream};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    RngStream::new(seed, 0).rng()
}

/// Random collection on `n` elements; every set is nonempty.
pub fn random_coll(r: &mut ChaCha8Rng, n: usize, sets: usize, density: f64) -> RRCollection {
    let sets: Vec<Vec<usize>> = (0..sets)
        .map(|_| {
            let mut s: Vec<usize> = (0..n).filter(|_| r.gen_bool(density)).collect();
            if s.is_empty() {
                s.push(r.gen_range(0..n));
            }
            s
        })
        .collect();
    RRCollection::from_sets(n, sets).unwrap()
}

/// Uniform matroid or a random partition matroid on `n` elements.
pub fn random_matroid(r: &mut ChaCha8Rng, n: usize) -> PartitionMatroid {
    if r.gen_bool(0.5) {
        PartitionMatroid::uniform(n, r.gen_range(1..=n.min(4)))
    } else {
        let parts = r.gen_range(1..=n.min(4));
        let mut of: Vec<usize> = (0..n).map(|i| i % parts).collect();
        of.shuffle(r);
        let caps = (0..parts).map(|_| r.gen_range(1..=2)).collect();
        PartitionMatroid::new(of, caps).unwrap()
    }
}

/// A uniformly shuffled greedy base.
pub fn random_base(r: &mut ChaCha8Rng, m: &dyn Matroid) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m.ground_size()).collect();
    order.shuffle(r);
    let mut b = Vec::new();
    for u in order {
        b.push(u);
        if !m.is_independent(&b) {
            b.pop();
        }
    }
    b.sort_unstable();
    b
}

/// Random simple digraph; under `lt` every node's in-weights sum to at most 1.
pub fn random_graph(r: &mut ChaCha8Rng, n: usize, m: usize, lt: bool) -> Graph {
    let m = m.min(n * (n - 1));
    let mut pairs = Vec::new();
    while pairs.len() < m {
        let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
        if u != v && !pairs.contains(&(u, v)) {
            pairs.push((u, v));
        }
    }
    let mut indeg = vec![0usize; n];
    for &(_, v) in &pairs {
        indeg[v] += 1;
    }
    let edges = pairs
        .into_iter()
        .map(|(u, v)| {
            let p: f64 = r.gen_range(0.1..0.9);
            Edge::new(u, v, if lt { p / indeg[v] as f64 } else { p })
        })
        .collect();
    Graph::from_edges(n, edges).unwrap()
}
