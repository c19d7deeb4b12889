//! The four IM-GM problem instances: ground-set encodings, matroids, RR-set
//! generators, estimator scales and the constants the adaptive sampler needs.

mod io;
mod objective;
mod rr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diffusion::{estimate_spread, DiffusionModel, ReverseScratch};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matroid::{Matroid, PartitionMatroid};
use crate::rng::RngStream;

pub use io::{read_collection, write_collection, RrFile, RrHeader};
pub use objective::{estimate_objective, monte_carlo_objective};
pub use rr::{grow_collection, RRCollection, RrGenerator};

/// Monte Carlo runs used to estimate `ρ_G(A) - |A|` in regeneration mode.
pub const REGEN_KAPPA_SIMS: usize = 10_000;

/// Walks attempted per RR set in regeneration mode before giving up with an empty set.
pub const REGEN_MAX_ATTEMPTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    IM,
    RM,
    MRIM,
    AdvIM,
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "im" => Ok(InstanceKind::IM),
            "rm" => Ok(InstanceKind::RM),
            "mrim" => Ok(InstanceKind::MRIM),
            "advim" => Ok(InstanceKind::AdvIM),
            other => Err(Error::Config(format!("unknown instance kind `{other}`"))),
        }
    }
}

/// How AdvIM treats reverse walks that never reach the seed set `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdvMode {
    /// Keep them as empty RR sets; the estimator scale is exactly `|V \ A|`.
    #[default]
    EmptyMiss,
    /// Resample until the walk hits `A`; the scale `ρ_G(A) - |A|` is estimated by simulation.
    Regenerate,
}

impl std::str::FromStr for AdvMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "empty-miss" | "empty_miss" => Ok(AdvMode::EmptyMiss),
            "regenerate" => Ok(AdvMode::Regenerate),
            other => Err(Error::Config(format!("unknown AdvIM mode `{other}`"))),
        }
    }
}

/// Instance-specific parameters. Node ids are dense graph ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceParams {
    IM {
        k: usize,
    },
    /// Revenue maximization: `alpha[t]` is the revenue per node of campaign `t`,
    /// `caps[v]` bounds how many campaigns may seed node `v`.
    RM {
        alpha: Vec<f64>,
        caps: Vec<usize>,
    },
    MRIM {
        rounds: usize,
        k: usize,
    },
    AdvIM {
        seeds: Vec<usize>,
        k_v: usize,
        k_e: usize,
        #[serde(default)]
        mode: AdvMode,
        #[serde(default)]
        kappa_seed: u64,
    },
}

impl InstanceParams {
    pub fn kind(&self) -> InstanceKind {
        match self {
            InstanceParams::IM { .. } => InstanceKind::IM,
            InstanceParams::RM { .. } => InstanceKind::RM,
            InstanceParams::MRIM { .. } => InstanceKind::MRIM,
            InstanceParams::AdvIM { .. } => InstanceKind::AdvIM,
        }
    }

    /// RM with the same per-node cap `k` for every node.
    pub fn rm_uniform(alpha: Vec<f64>, node_count: usize, k: usize) -> InstanceParams {
        InstanceParams::RM { alpha, caps: vec![k; node_count] }
    }
}

/// A ground-set element in natural coordinates (dense node and edge ids, rounds from 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    Node(usize),
    NodeRound(usize, usize),
    Edge(usize),
}

/// Dense element-id encoding for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundSet {
    kind: InstanceKind,
    nodes: usize,
    rounds: usize,
    edges: usize,
    compact: Vec<u32>,
    index: Vec<u32>,
}

const NOT_IN_GROUND: u32 = u32::MAX;

impl GroundSet {
    pub fn new(params: &InstanceParams, node_count: usize, edge_count: usize) -> GroundSet {
        let mut gs = GroundSet {
            kind: params.kind(),
            nodes: node_count,
            rounds: 1,
            edges: 0,
            compact: Vec::new(),
            index: Vec::new(),
        };
        match params {
            InstanceParams::IM { .. } => {}
            InstanceParams::RM { alpha, .. } => gs.rounds = alpha.len(),
            InstanceParams::MRIM { rounds, .. } => gs.rounds = *rounds,
            InstanceParams::AdvIM { seeds, .. } => {
                let mut in_a = vec![false; node_count];
                for &a in seeds {
                    if a < node_count {
                        in_a[a] = true;
                    }
                }
                gs.index = vec![NOT_IN_GROUND; node_count];
                for v in (0..node_count).filter(|&v| !in_a[v]) {
                    gs.index[v] = gs.compact.len() as u32;
                    gs.compact.push(v as u32);
                }
                gs.edges = edge_count;
            }
        }
        gs
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        match self.kind {
            InstanceKind::IM => self.nodes,
            InstanceKind::RM | InstanceKind::MRIM => self.nodes * self.rounds,
            InstanceKind::AdvIM => self.compact.len() + self.edges,
        }
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Number of node elements for AdvIM (`|V \ A|`).
    pub fn node_elements(&self) -> usize {
        self.compact.len()
    }

    pub fn encode(&self, e: Element) -> Result<usize> {
        let bad = || Error::validation(format!("element {e:?} is not part of this {:?} ground set", self.kind));
        match (self.kind, e) {
            (InstanceKind::IM, Element::Node(v)) if v < self.nodes => Ok(v),
            (InstanceKind::RM | InstanceKind::MRIM, Element::NodeRound(v, t))
                if v < self.nodes && (1..=self.rounds).contains(&t) =>
            {
                Ok((t - 1) * self.nodes + v)
            }
            (InstanceKind::AdvIM, Element::Node(v)) if v < self.nodes && self.index[v] != NOT_IN_GROUND => {
                Ok(self.index[v] as usize)
            }
            (InstanceKind::AdvIM, Element::Edge(id)) if id < self.edges => Ok(self.compact.len() + id),
            _ => Err(bad()),
        }
    }

    pub fn decode(&self, id: usize) -> Element {
        debug_assert!(id < self.size());
        match self.kind {
            InstanceKind::IM => Element::Node(id),
            InstanceKind::RM | InstanceKind::MRIM => Element::NodeRound(id % self.nodes, id / self.nodes + 1),
            InstanceKind::AdvIM if id < self.compact.len() => Element::Node(self.compact[id] as usize),
            InstanceKind::AdvIM => Element::Edge(id - self.compact.len()),
        }
    }

    /// Compact id of node `v` (AdvIM), or `None` if `v ∈ A`.
    #[inline]
    pub(crate) fn node_element(&self, v: usize) -> Option<u32> {
        let i = self.index[v];
        (i != NOT_IN_GROUND).then_some(i)
    }

    #[inline]
    pub(crate) fn compact_node(&self, i: usize) -> usize {
        self.compact[i] as usize
    }
}

/// `ln C(n, k)` through log-gamma.
pub fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    let (n, k) = (n as f64, k as f64);
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

/// A fully bound IM-GM problem.
#[derive(Debug, Clone)]
pub struct Instance {
    graph: Graph,
    model: DiffusionModel,
    params: InstanceParams,
    ground: GroundSet,
    matroid: PartitionMatroid,
    kappa: f64,
    theta_kappa: f64,
    sigma_l_star: f64,
    ln_num_bases: f64,
    alpha_cumulative: Vec<f64>,
    in_a: Vec<bool>,
}

/// Builds the partition matroid of an instance over its ground set.
pub fn build_matroid(params: &InstanceParams, ground: &GroundSet) -> Result<PartitionMatroid> {
    let n = ground.size();
    let nodes = ground.nodes;
    match params {
        InstanceParams::IM { k } => Ok(PartitionMatroid::uniform(n, *k)),
        InstanceParams::RM { caps, .. } => PartitionMatroid::new((0..n).map(|id| id % nodes).collect(), caps.clone()),
        InstanceParams::MRIM { rounds, k } => {
            PartitionMatroid::new((0..n).map(|id| id / nodes).collect(), vec![*k; *rounds])
        }
        InstanceParams::AdvIM { k_v, k_e, .. } => {
            let nv = ground.node_elements();
            PartitionMatroid::new((0..n).map(|id| usize::from(id >= nv)).collect(), vec![*k_v, *k_e])
        }
    }
}

/// Validates `params` against `graph` and binds the instance.
///
/// Under LT, parallel edges are merged (probabilities summed) before the weight check.
pub fn make_instance(graph: Graph, model: DiffusionModel, params: InstanceParams) -> Result<Instance> {
    let graph = match model {
        DiffusionModel::IC => graph,
        DiffusionModel::LT => graph.merge_parallel_edges()?,
    };
    model.check(&graph)?;
    let nv = graph.node_count();
    if nv == 0 {
        return Err(Error::validation("graph has no nodes"));
    }
    let nvf = nv as f64;
    let mut in_a = Vec::new();
    let mut alpha_cumulative = Vec::new();
    let (kappa, theta_kappa, sigma_l_star, ln_num_bases) = match &params {
        InstanceParams::IM { k } => {
            if *k == 0 || *k > nv {
                return Err(Error::validation(format!("IM requires 1 <= k <= |V| = {nv}, got k = {k}")));
            }
            (nvf, nvf, *k as f64, ln_choose(nv, *k))
        }
        InstanceParams::RM { alpha, caps } => {
            let t = alpha.len();
            if t == 0 {
                return Err(Error::validation("RM requires at least one campaign"));
            }
            if let Some(a) = alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
                return Err(Error::validation(format!("RM campaign revenues must be positive, got {a}")));
            }
            if caps.len() != nv {
                return Err(Error::validation(format!("RM needs one cap per node ({nv}), got {}", caps.len())));
            }
            if let Some((v, c)) = caps.iter().enumerate().find(|(_, &c)| c == 0 || c > t) {
                return Err(Error::validation(format!("RM cap of node {v} is {c}, must lie in [1, T = {t}]")));
            }
            let mut acc = 0.0;
            alpha_cumulative = alpha
                .iter()
                .map(|a| {
                    acc += a;
                    acc
                })
                .collect();
            let kappa = acc * nvf;
            let best = alpha.iter().cloned().fold(f64::MIN, f64::max);
            (kappa, kappa, best * nvf, caps.iter().map(|&c| ln_choose(t, c)).sum())
        }
        InstanceParams::MRIM { rounds, k } => {
            if *rounds == 0 || *k == 0 || *k > nv {
                return Err(Error::validation(format!(
                    "MRIM requires T >= 1 and 1 <= k <= |V| = {nv}, got T = {rounds}, k = {k}"
                )));
            }
            let sigma_l = (*rounds * *k).min(nv) as f64;
            (nvf, nvf, sigma_l, *rounds as f64 * ln_choose(nv, *k))
        }
        InstanceParams::AdvIM { seeds, k_v, k_e, mode, kappa_seed } => {
            if model != DiffusionModel::LT {
                return Err(Error::Unsupported("AdvIM is defined for the linear threshold model only".into()));
            }
            if seeds.is_empty() {
                return Err(Error::validation("AdvIM requires a nonempty seed set A"));
            }
            in_a = vec![false; nv];
            for &a in seeds {
                if a >= nv {
                    return Err(Error::validation(format!("seed node {a} out of range")));
                }
                in_a[a] = true;
            }
            let a_count = in_a.iter().filter(|&&b| b).count();
            let rest = nv - a_count;
            if rest == 0 {
                return Err(Error::validation("AdvIM seed set covers every node"));
            }
            if *k_v > rest || *k_e > graph.edge_count() {
                return Err(Error::validation(format!(
                    "AdvIM caps exceed their parts: k_v = {k_v} > {rest} or k_e = {k_e} > {}",
                    graph.edge_count()
                )));
            }
            let kappa = match mode {
                AdvMode::EmptyMiss => rest as f64,
                AdvMode::Regenerate => {
                    let mut a_nodes: Vec<usize> = seeds.clone();
                    a_nodes.sort_unstable();
                    a_nodes.dedup();
                    let est =
                        estimate_spread(&graph, model, &a_nodes, REGEN_KAPPA_SIMS, RngStream::new(*kappa_seed, 0))?;
                    let kappa = est.mean - a_count as f64;
                    if kappa <= 0.0 {
                        return Err(Error::validation(
                            "AdvIM regeneration mode: the seed set never activates other nodes, so no RR set can hit it",
                        ));
                    }
                    kappa
                }
            };
            let lnb = ln_choose(rest, *k_v) + ln_choose(graph.edge_count(), *k_e);
            (kappa, rest as f64, 1.0, lnb)
        }
    };
    let ground = GroundSet::new(&params, nv, graph.edge_count());
    let matroid = build_matroid(&params, &ground)?;
    Ok(Instance {
        graph,
        model,
        params,
        ground,
        matroid,
        kappa,
        theta_kappa,
        sigma_l_star,
        ln_num_bases,
        alpha_cumulative,
        in_a,
    })
}

impl Instance {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn model(&self) -> DiffusionModel {
        self.model
    }

    pub fn kind(&self) -> InstanceKind {
        self.params.kind()
    }

    pub fn params(&self) -> &InstanceParams {
        &self.params
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn matroid(&self) -> &PartitionMatroid {
        &self.matroid
    }

    /// Scale making `κ/θ · Λ` an unbiased estimator of the objective.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Scale used inside the worst-case sample size (`|V \ A|` for AdvIM in both modes).
    pub fn theta_kappa(&self) -> f64 {
        self.theta_kappa
    }

    pub fn sigma_l_star(&self) -> f64 {
        self.sigma_l_star
    }

    pub fn ln_num_bases(&self) -> f64 {
        self.ln_num_bases
    }

    pub(crate) fn in_a(&self, v: usize) -> bool {
        self.in_a[v]
    }

    pub fn adv_mode(&self) -> Option<AdvMode> {
        match &self.params {
            InstanceParams::AdvIM { mode, .. } => Some(*mode),
            _ => None,
        }
    }

    /// Fails unless `set` is an independent set of distinct, in-range elements.
    pub fn check_independent(&self, set: &[usize]) -> Result<()> {
        if let Some(&e) = set.iter().find(|&&e| e >= self.ground.size()) {
            return Err(Error::OutOfRange { index: e, size: self.ground.size() });
        }
        if !self.matroid.is_independent(set) {
            return Err(Error::validation("solution violates the matroid constraint"));
        }
        Ok(())
    }

    pub(crate) fn sample_campaign<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.alpha_cumulative.last().expect("RM has campaigns");
        let u = rng.gen::<f64>() * total;
        self.alpha_cumulative.partition_point(|&c| c <= u).min(self.alpha_cumulative.len() - 1)
    }

    /// One RR set for stream `(seed, index)`, sorted and deduplicated.
    pub fn generate_rr(&self, index: u64, seed: u64) -> Vec<u32> {
        let mut gen = RrGenerator::new(self);
        let mut out = Vec::new();
        gen.generate(RngStream::new(seed, index), &mut out);
        out
    }

    pub(crate) fn new_scratch(&self) -> ReverseScratch {
        ReverseScratch::new(self.graph.node_count())
    }
}
