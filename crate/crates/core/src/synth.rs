//! Synthetic graph generators for fixtures and benchmarks.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::rng::RngStream;

/// How generated edges get their probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthWeights {
    /// `p(u, v) = 1 / indeg(v)`; valid under both IC and LT.
    WeightedCascade,
    Constant(f64),
}

fn finish(n: usize, pairs: Vec<(usize, usize)>, w: SynthWeights) -> Result<Graph> {
    let mut indeg = vec![0u32; n];
    for &(_, v) in &pairs {
        indeg[v] += 1;
    }
    let edges = pairs
        .into_iter()
        .map(|(u, v)| {
            let p = match w {
                SynthWeights::WeightedCascade => 1.0 / indeg[v] as f64,
                SynthWeights::Constant(p) => p,
            };
            Edge::new(u, v, p)
        })
        .collect();
    Graph::from_edges(n, edges)
}

/// Directed `G(n, m)`: `m` distinct ordered pairs without self-loops.
pub fn erdos_renyi(n: usize, m: usize, weights: SynthWeights, seed: u64) -> Result<Graph> {
    let max = n.saturating_mul(n.saturating_sub(1));
    if m > max {
        return Err(Error::Config(format!("{m} edges do not fit in a simple digraph on {n} nodes")));
    }
    let mut rng = RngStream::new(seed, 0).rng();
    let mut seen = HashSet::with_capacity(m);
    let mut pairs = Vec::with_capacity(m);
    while pairs.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && seen.insert((u, v)) {
            pairs.push((u, v));
        }
    }
    finish(n, pairs, weights)
}

/// Preferential attachment: each new node links to `m` distinct earlier nodes chosen
/// proportionally to degree, with edges in both directions.
pub fn preferential_attachment(n: usize, m: usize, weights: SynthWeights, seed: u64) -> Result<Graph> {
    if m == 0 || n <= m {
        return Err(Error::Config(format!("preferential attachment needs 1 <= m < n, got m = {m}, n = {n}")));
    }
    let mut rng = RngStream::new(seed, 0).rng();
    let mut pairs = Vec::with_capacity(2 * m * n);
    // Every node appears once per incident edge, plus once for itself.
    let mut urn: Vec<usize> = (0..m).collect();
    let mut picked = Vec::with_capacity(m);
    for v in m..n {
        picked.clear();
        while picked.len() < m {
            let u = urn[rng.gen_range(0..urn.len())];
            if !picked.contains(&u) {
                picked.push(u);
            }
        }
        for &u in &picked {
            pairs.push((u, v));
            pairs.push((v, u));
            urn.push(u);
            urn.push(v);
        }
        urn.push(v);
    }
    finish(n, pairs, weights)
}
