use super::{Element, Instance, InstanceKind, InstanceParams, RRCollection};
use crate::diffusion::{sample_lt_live_edges, Simulator, SpreadEstimate};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::RngStream;

/// `κ/θ · Λ(S)`, the RR-set estimate of the objective.
pub fn estimate_objective(inst: &Instance, coll: &RRCollection, set: &[usize]) -> Result<f64> {
    if coll.is_empty() {
        return Err(Error::Config("cannot estimate from an empty RR collection".into()));
    }
    if let Some(&e) = set.iter().find(|&&e| e >= coll.ground_size()) {
        return Err(Error::OutOfRange { index: e, size: coll.ground_size() });
    }
    Ok(inst.kappa() * coll.coverage(set) as f64 / coll.len() as f64)
}

/// Per-round seed sets of an RM/MRIM solution (rounds indexed from 0).
pub(crate) fn seeds_per_round(inst: &Instance, set: &[usize]) -> Vec<Vec<usize>> {
    let mut rounds = vec![Vec::new(); inst.ground().rounds()];
    for &e in set {
        match inst.ground().decode(e) {
            Element::NodeRound(v, t) => rounds[t - 1].push(v),
            Element::Node(v) => rounds[0].push(v),
            Element::Edge(_) => {}
        }
    }
    rounds
}

/// Blocked node and edge masks of an AdvIM solution.
pub(crate) fn blocked_masks(inst: &Instance, set: &[usize]) -> (Vec<bool>, Vec<bool>) {
    let g = inst.graph();
    let mut nodes = vec![false; g.node_count()];
    let mut edges = vec![false; g.edge_count()];
    for &e in set {
        match inst.ground().decode(e) {
            Element::Node(v) => nodes[v] = true,
            Element::Edge(id) => edges[id] = true,
            Element::NodeRound(..) => {}
        }
    }
    (nodes, edges)
}

pub(crate) fn seed_nodes(inst: &Instance) -> Vec<usize> {
    match inst.params() {
        InstanceParams::AdvIM { seeds, .. } => {
            let mut a = seeds.clone();
            a.sort_unstable();
            a.dedup();
            a
        }
        _ => Vec::new(),
    }
}

/// Nodes reachable from `sources` through live edges that avoid blocked nodes and edges.
pub(crate) fn live_reach(
    g: &Graph,
    live: &[Option<u32>],
    sources: &[usize],
    blocked_nodes: &[bool],
    blocked_edges: &[bool],
    seen: &mut Vec<bool>,
    queue: &mut Vec<usize>,
) -> usize {
    seen.clear();
    seen.resize(g.node_count(), false);
    queue.clear();
    for &s in sources {
        if !seen[s] {
            seen[s] = true;
            queue.push(s);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let (dst, _, eid) = g.out_slices(u);
        for (&v, &e) in dst.iter().zip(eid) {
            let v = v as usize;
            if !seen[v] && live[v] == Some(e) && !blocked_nodes[v] && !blocked_edges[e as usize] {
                seen[v] = true;
                queue.push(v);
            }
        }
    }
    queue.len()
}

/// Monte Carlo estimate of the instance objective σ(S) over `n_sims` runs.
///
/// AdvIM compares the unblocked and blocked graphs on the same live-edge sample, so
/// the empty blocking set yields exactly zero.
pub fn monte_carlo_objective(inst: &Instance, set: &[usize], n_sims: usize, rng: RngStream) -> Result<SpreadEstimate> {
    inst.check_independent(set)?;
    if n_sims == 0 {
        return Err(Error::Config("n_sims must be at least 1".into()));
    }
    let g = inst.graph();
    let mut samples = Vec::with_capacity(n_sims);
    match inst.kind() {
        InstanceKind::IM | InstanceKind::RM | InstanceKind::MRIM => {
            let rounds = seeds_per_round(inst, set);
            let alpha: Vec<f64> = match inst.params() {
                InstanceParams::RM { alpha, .. } => alpha.clone(),
                _ => vec![1.0; rounds.len()],
            };
            let mut sim = Simulator::new(g, inst.model());
            let mut union = vec![u32::MAX; g.node_count()];
            let t_count = rounds.len() as u64;
            for i in 0..n_sims as u64 {
                let mut total = 0.0;
                let mut distinct = 0usize;
                for (t, seeds) in rounds.iter().enumerate() {
                    let mut r = rng.advance(i * t_count + t as u64).rng();
                    let count = sim.run(seeds, &mut r);
                    if inst.kind() == InstanceKind::MRIM {
                        for &v in sim.active() {
                            if union[v] != i as u32 {
                                union[v] = i as u32;
                                distinct += 1;
                            }
                        }
                    } else {
                        total += alpha[t] * count as f64;
                    }
                }
                samples.push(if inst.kind() == InstanceKind::MRIM { distinct as f64 } else { total });
            }
        }
        InstanceKind::AdvIM => {
            let a = seed_nodes(inst);
            let (bn, be) = blocked_masks(inst, set);
            let (no_nodes, no_edges) = (vec![false; g.node_count()], vec![false; g.edge_count()]);
            let (mut seen, mut queue) = (Vec::new(), Vec::new());
            for i in 0..n_sims as u64 {
                let live = sample_lt_live_edges(g, &mut rng.advance(i).rng());
                let full = live_reach(g, &live, &a, &no_nodes, &no_edges, &mut seen, &mut queue);
                let blocked = live_reach(g, &live, &a, &bn, &be, &mut seen, &mut queue);
                samples.push((full - blocked) as f64);
            }
        }
    }
    Ok(SpreadEstimate::from_samples(&samples))
}
