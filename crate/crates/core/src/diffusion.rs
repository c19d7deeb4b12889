//! Forward IC/LT simulation and the reverse-diffusion primitives behind RR sets.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffusionModel {
    IC,
    LT,
}

impl DiffusionModel {
    /// Fails if `g` cannot carry this model.
    pub fn check(self, g: &Graph) -> Result<()> {
        match self {
            DiffusionModel::IC => Ok(()),
            DiffusionModel::LT => g.check_lt(),
        }
    }
}

impl std::str::FromStr for DiffusionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ic" => Ok(DiffusionModel::IC),
            "lt" => Ok(DiffusionModel::LT),
            other => Err(Error::Config(format!("unknown diffusion model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadEstimate {
    pub mean: f64,
    pub stderr: f64,
}

impl SpreadEstimate {
    /// Mean and standard error of a sample (stderr 0 for fewer than two values).
    pub fn from_samples(samples: &[f64]) -> SpreadEstimate {
        let n = samples.len();
        if n == 0 {
            return SpreadEstimate { mean: 0.0, stderr: 0.0 };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return SpreadEstimate { mean, stderr: 0.0 };
        }
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64;
        SpreadEstimate { mean, stderr: (var / n as f64).sqrt() }
    }
}

pub(crate) fn check_nodes(g: &Graph, nodes: &[usize]) -> Result<()> {
    match nodes.iter().find(|&&v| v >= g.node_count()) {
        Some(&v) => Err(Error::Validation(format!("node {v} out of range for graph with {} nodes", g.node_count()))),
        None => Ok(()),
    }
}

/// Reusable scratch state for forward simulations on one graph.
///
/// Visited marks use an epoch counter so that consecutive runs need no clearing.
#[derive(Debug, Clone)]
pub struct Simulator<'g> {
    g: &'g Graph,
    model: DiffusionModel,
    mark: Vec<u32>,
    epoch: u32,
    weight: Vec<f64>,
    threshold: Vec<f64>,
    touched: Vec<u32>,
    active: Vec<usize>,
}

impl<'g> Simulator<'g> {
    pub fn new(g: &'g Graph, model: DiffusionModel) -> Self {
        let n = g.node_count();
        let lt = model == DiffusionModel::LT;
        Simulator {
            g,
            model,
            mark: vec![0; n],
            epoch: 0,
            weight: if lt { vec![0.0; n] } else { Vec::new() },
            threshold: if lt { vec![0.0; n] } else { Vec::new() },
            touched: vec![0; if lt { n } else { 0 }],
            active: Vec::new(),
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.touched.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
    }

    /// Runs one diffusion instance; the activated nodes are left in [`Simulator::active`].
    pub fn run<R: Rng>(&mut self, seeds: &[usize], rng: &mut R) -> usize {
        self.next_epoch();
        let ep = self.epoch;
        self.active.clear();
        for &s in seeds {
            if self.mark[s] != ep {
                self.mark[s] = ep;
                self.active.push(s);
            }
        }
        let mut head = 0;
        while head < self.active.len() {
            let u = self.active[head];
            head += 1;
            let (dst, p, _) = self.g.out_slices(u);
            match self.model {
                DiffusionModel::IC => {
                    for (&v, &p) in dst.iter().zip(p) {
                        let v = v as usize;
                        if self.mark[v] != ep && rng.gen::<f64>() < p {
                            self.mark[v] = ep;
                            self.active.push(v);
                        }
                    }
                }
                DiffusionModel::LT => {
                    for (&v, &p) in dst.iter().zip(p) {
                        let v = v as usize;
                        if self.mark[v] == ep {
                            continue;
                        }
                        if self.touched[v] != ep {
                            self.touched[v] = ep;
                            self.weight[v] = 0.0;
                            self.threshold[v] = rng.gen::<f64>();
                        }
                        self.weight[v] += p;
                        if self.weight[v] > self.threshold[v] {
                            self.mark[v] = ep;
                            self.active.push(v);
                        }
                    }
                }
            }
        }
        self.active.len()
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }
}

/// One forward diffusion instance from `seeds`; returns the activated nodes (seeds first).
pub fn simulate_spread(g: &Graph, model: DiffusionModel, seeds: &[usize], rng: RngStream) -> Result<Vec<usize>> {
    check_nodes(g, seeds)?;
    let mut sim = Simulator::new(g, model);
    sim.run(seeds, &mut rng.rng());
    Ok(sim.active().to_vec())
}

/// Mean and standard error of the spread over `n_sims` runs on consecutive stream indices.
pub fn estimate_spread(
    g: &Graph,
    model: DiffusionModel,
    seeds: &[usize],
    n_sims: usize,
    rng: RngStream,
) -> Result<SpreadEstimate> {
    check_nodes(g, seeds)?;
    if n_sims == 0 {
        return Err(Error::Config("n_sims must be at least 1".into()));
    }
    let mut sim = Simulator::new(g, model);
    let samples: Vec<f64> = (0..n_sims as u64).map(|i| sim.run(seeds, &mut rng.advance(i).rng()) as f64).collect();
    Ok(SpreadEstimate::from_samples(&samples))
}

/// Scratch state for reverse walks: epoch-stamped visited marks and a work queue.
#[derive(Debug, Clone, Default)]
pub struct ReverseScratch {
    mark: Vec<u32>,
    epoch: u32,
    queue: Vec<u32>,
}

impl ReverseScratch {
    pub fn new(node_count: usize) -> Self {
        ReverseScratch { mark: vec![0; node_count], epoch: 0, queue: Vec::new() }
    }

    fn begin(&mut self, node_count: usize) -> u32 {
        if self.mark.len() < node_count {
            self.mark.resize(node_count, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Stochastic reverse BFS from `root`, appending reached nodes (root first) to `out`.
    pub fn reverse_ic<R: Rng>(&mut self, g: &Graph, root: usize, rng: &mut R, out: &mut Vec<u32>) {
        let ep = self.begin(g.node_count());
        self.queue.clear();
        self.mark[root] = ep;
        self.queue.push(root as u32);
        let mut head = 0;
        while head < self.queue.len() {
            let a = self.queue[head] as usize;
            head += 1;
            let (src, p, _) = g.in_slices(a);
            for (&b, &p) in src.iter().zip(p) {
                if self.mark[b as usize] != ep && rng.gen::<f64>() < p {
                    self.mark[b as usize] = ep;
                    self.queue.push(b);
                }
            }
        }
        out.extend_from_slice(&self.queue);
    }

    /// Random in-neighbour walk from `root`.
    ///
    /// At node `a` the walk moves along in-edge `(b, a)` with probability `p_{b,a}` and
    /// stops with the remaining mass. It also stops at a revisit (the repeated node and
    /// its edge are not recorded) or right after stepping onto a node where `halt`
    /// returns true. Returns whether the walk ended through `halt`.
    pub fn reverse_lt<R: Rng>(
        &mut self,
        g: &Graph,
        root: usize,
        rng: &mut R,
        mut halt: impl FnMut(usize) -> bool,
        nodes: &mut Vec<u32>,
        edges: &mut Vec<u32>,
    ) -> bool {
        let ep = self.begin(g.node_count());
        self.mark[root] = ep;
        nodes.push(root as u32);
        let mut a = root;
        loop {
            let (src, p, eid) = g.in_slices(a);
            if src.is_empty() {
                return false;
            }
            let r = rng.gen::<f64>();
            let mut acc = 0.0;
            let mut step = None;
            for (i, &pi) in p.iter().enumerate().take(src.len()) {
                acc += pi;
                if r < acc {
                    step = Some(i);
                    break;
                }
            }
            let Some(i) = step else { return false };
            let b = src[i] as usize;
            if self.mark[b] == ep {
                return false;
            }
            self.mark[b] = ep;
            edges.push(eid[i]);
            nodes.push(b as u32);
            if halt(b) {
                return true;
            }
            a = b;
        }
    }
}

/// Nodes reached by one stochastic reverse BFS from `root` (root included).
pub fn reverse_step_ic<R: Rng>(g: &Graph, root: usize, rng: &mut R) -> Vec<usize> {
    let mut out = Vec::new();
    ReverseScratch::new(g.node_count()).reverse_ic(g, root, rng, &mut out);
    out.into_iter().map(|v| v as usize).collect()
}

/// One LT reverse walk from `root`: visited nodes in order and traversed edge ids in order.
pub fn reverse_step_lt<R: Rng>(g: &Graph, root: usize, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let (mut nodes, mut edges) = (Vec::new(), Vec::new());
    ReverseScratch::new(g.node_count()).reverse_lt(g, root, rng, |_| false, &mut nodes, &mut edges);
    (nodes.into_iter().map(|v| v as usize).collect(), edges.into_iter().map(|e| e as usize).collect())
}

/// Samples an LT live-edge graph: for every node, the id of its single live in-edge
/// (chosen with probability `p`), or `None` with the leftover mass.
pub fn sample_lt_live_edges<R: Rng>(g: &Graph, rng: &mut R) -> Vec<Option<u32>> {
    (0..g.node_count())
        .map(|v| {
            let (_, p, eid) = g.in_slices(v);
            if p.is_empty() {
                return None;
            }
            let r = rng.gen::<f64>();
            let mut acc = 0.0;
            for i in 0..p.len() {
                acc += p[i];
                if r < acc {
                    return Some(eid[i]);
                }
            }
            None
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn g(n: usize, edges: &[(usize, usize, f64)]) -> Graph {
        Graph::from_edges(n, edges.iter().map(|&(s, d, p)| Edge::new(s, d, p)).collect()).unwrap()
    }

    #[test]
    fn certain_and_impossible_edges() {
        let chain = g(2, &[(0, 1, 1.0)]);
        for model in [DiffusionModel::IC, DiffusionModel::LT] {
            let mut r = simulate_spread(&chain, model, &[0], RngStream::new(1, 0)).unwrap();
            r.sort();
            assert_eq!(r, vec![0, 1]);
        }
        let dead = g(2, &[(0, 1, 0.0)]);
        assert_eq!(simulate_spread(&dead, DiffusionModel::IC, &[0], RngStream::new(1, 0)).unwrap(), vec![0]);
        assert!(simulate_spread(&dead, DiffusionModel::IC, &[5], RngStream::new(1, 0)).is_err());
    }

    #[test]
    fn star_mean_matches_binomial() {
        let deg = 10;
        let star = g(deg + 1, &(1..=deg).map(|v| (0, v, 0.5)).collect::<Vec<_>>());
        let n = 100_000;
        let est = estimate_spread(&star, DiffusionModel::IC, &[0], n, RngStream::new(42, 0)).unwrap();
        let expected = 1.0 + 0.5 * deg as f64;
        let sigma = (deg as f64 * 0.25 / n as f64).sqrt();
        assert!((est.mean - expected).abs() < 3.0 * sigma, "{est:?}");
    }

    #[test]
    fn estimate_trivial_cases() {
        let chain = g(2, &[(0, 1, 1.0)]);
        let e = estimate_spread(&chain, DiffusionModel::IC, &[], 10, RngStream::new(0, 0)).unwrap();
        assert_eq!((e.mean, e.stderr), (0.0, 0.0));
        let e = estimate_spread(&chain, DiffusionModel::IC, &[0], 7, RngStream::new(0, 0)).unwrap();
        assert_eq!((e.mean, e.stderr), (2.0, 0.0));
    }

    #[test]
    fn reverse_ic_basics() {
        let mut rng = RngStream::new(3, 0).rng();
        assert_eq!(reverse_step_ic(&g(1, &[]), 0, &mut rng), vec![0]);
        assert_eq!(reverse_step_ic(&g(2, &[(1, 0, 1.0)]), 0, &mut rng), vec![0, 1]);
    }

    #[test]
    fn reverse_ic_inclusion_frequency() {
        let graph = g(2, &[(1, 0, 0.3)]);
        let mut scratch = ReverseScratch::new(2);
        let mut rng = RngStream::new(9, 0).rng();
        let n = 100_000;
        let mut hits = 0;
        let mut out = Vec::new();
        for _ in 0..n {
            out.clear();
            scratch.reverse_ic(&graph, 0, &mut rng, &mut out);
            hits += (out.len() == 2) as usize;
        }
        let f = hits as f64 / n as f64;
        assert!((f - 0.3).abs() < 3.0 * (0.3f64 * 0.7 / n as f64).sqrt(), "{f}");
    }

    #[test]
    fn reverse_lt_basics() {
        let mut rng = RngStream::new(3, 0).rng();
        assert_eq!(reverse_step_lt(&g(1, &[]), 0, &mut rng), (vec![0], vec![]));
        assert_eq!(reverse_step_lt(&g(2, &[(1, 0, 1.0)]), 0, &mut rng), (vec![0, 1], vec![0]));
    }

    #[test]
    fn reverse_lt_full_mass_always_leaves_root() {
        let tri = g(3, &[(1, 0, 0.5), (2, 0, 0.5), (0, 1, 0.5), (2, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)]);
        let mut rng = RngStream::new(5, 0).rng();
        for _ in 0..10_000 {
            let (nodes, edges) = reverse_step_lt(&tri, 0, &mut rng);
            assert!(nodes.len() >= 2);
            assert_eq!(edges.len(), nodes.len() - 1);
            let mut dedup = nodes.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), nodes.len());
        }
    }

    #[test]
    fn lt_live_edges_respect_mass() {
        let graph = g(3, &[(1, 0, 0.25), (2, 0, 0.25)]);
        let mut rng = RngStream::new(1, 1).rng();
        let n = 40_000;
        let none = (0..n).filter(|_| sample_lt_live_edges(&graph, &mut rng)[0].is_none()).count();
        let f = none as f64 / n as f64;
        assert!((f - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn model_parse() {
        assert_eq!("IC".parse::<DiffusionModel>().unwrap(), DiffusionModel::IC);
        assert!("xx".parse::<DiffusionModel>().is_err());
    }
}
