//! Coverage baselines: lazy greedy, partition-by-partition greedy and threshold greedy.

use std::time::Instant;

use super::lazy::{Entry, LazyHeap};
use super::SelectionResult;
use crate::error::{Error, Result};
use crate::instances::RRCollection;
use crate::matroid::{Matroid, PartitionMatroid, Tracker};

/// Marginal coverage bookkeeping shared by the baselines.
struct Marginals<'c> {
    coll: &'c RRCollection,
    covered: Vec<bool>,
    picks: u64,
}

impl<'c> Marginals<'c> {
    fn new(coll: &'c RRCollection) -> Self {
        Marginals { coll, covered: vec![false; coll.len()], picks: 0 }
    }

    fn gain(&self, i: usize) -> usize {
        self.coll.containing(i).iter().filter(|&&r| !self.covered[r as usize]).count()
    }

    fn take(&mut self, i: usize) {
        for &r in self.coll.containing(i) {
            self.covered[r as usize] = true;
        }
        self.picks += 1;
    }

    fn heap(&self, ids: impl Iterator<Item = usize>) -> LazyHeap {
        LazyHeap::new(ids.map(|i| Entry { value: f64::INFINITY, id: i as u32, stamp: u64::MAX }))
    }

    fn pop(&self, heap: &mut LazyHeap, feasible: impl FnMut(usize) -> bool) -> Option<usize> {
        heap.pop_best(self.picks, feasible, |u| self.gain(u) as f64).map(|e| e.id as usize)
    }
}

fn check_sizes(coll: &RRCollection, m: &dyn Matroid) -> Result<()> {
    if coll.ground_size() != m.ground_size() {
        return Err(Error::contract("collection and matroid ground sets differ"));
    }
    Ok(())
}

fn finish(algorithm: &str, coll: &RRCollection, mut chosen: Vec<usize>, start: Instant) -> SelectionResult {
    chosen.sort_unstable();
    let coverage = coll.coverage(&chosen);
    SelectionResult {
        algorithm: algorithm.to_string(),
        epsilon: None,
        coverage,
        objective: coverage as f64,
        chosen,
        f_trace: Vec::new(),
        bound_trace: Vec::new(),
        rounding_swaps: 0,
        rounding_f_trace: Vec::new(),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Lazy greedy: `r` picks of maximum marginal coverage that keep the set independent.
/// Zero-gain elements fill the base once nothing covers new RR sets.
pub fn greedy(coll: &RRCollection, m: &dyn Matroid) -> Result<SelectionResult> {
    let start = Instant::now();
    check_sizes(coll, m)?;
    let r = m.rank();
    let mut marg = Marginals::new(coll);
    let mut heap = marg.heap(0..coll.ground_size());
    let mut tracker = Tracker::new(m);
    let mut chosen = Vec::with_capacity(r);
    while chosen.len() < r {
        let Some(j) = marg.pop(&mut heap, |u| tracker.can_add(u)) else { break };
        tracker.add(j);
        marg.take(j);
        chosen.push(j);
    }
    Ok(finish("greedy", coll, chosen, start))
}

/// Greedy restricted to one part at a time, parts in ascending order.
pub fn local_greedy(coll: &RRCollection, pm: &PartitionMatroid) -> Result<SelectionResult> {
    let start = Instant::now();
    check_sizes(coll, pm)?;
    let mut marg = Marginals::new(coll);
    let mut chosen = Vec::with_capacity(pm.rank());
    for l in 0..pm.partition_count() {
        let mut heap = marg.heap(pm.members(l).iter().map(|&u| u as usize));
        for _ in 0..pm.effective_capacity(l) {
            let j = marg.pop(&mut heap, |_| true).expect("part has enough members");
            marg.take(j);
            chosen.push(j);
        }
    }
    Ok(finish("local", coll, chosen, start))
}

/// Threshold greedy with decreasing threshold.
///
/// The threshold starts at the best single-element coverage `d_max` and is multiplied by
/// `1 - ξ` after every pass over the ground set; elements whose marginal coverage reaches
/// the threshold are added while independence allows. Stops once `r` elements are chosen
/// or the threshold falls below `ξ · d_max / r`, so it may return fewer than `r` elements.
pub fn threshold_greedy(coll: &RRCollection, m: &dyn Matroid, xi: f64) -> Result<SelectionResult> {
    let start = Instant::now();
    check_sizes(coll, m)?;
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::Config(format!("ξ must lie in (0, 1), got {xi}")));
    }
    let n = coll.ground_size();
    let r = m.rank();
    let mut marg = Marginals::new(coll);
    let mut bound: Vec<usize> = (0..n).map(|i| coll.containing(i).len()).collect();
    let d_max = bound.iter().copied().max().unwrap_or(0) as f64;
    let floor = if r == 0 { f64::INFINITY } else { xi * d_max / r as f64 };
    let mut tracker = Tracker::new(m);
    let mut taken = vec![false; n];
    let mut chosen = Vec::with_capacity(r);
    let mut tau = d_max;
    while chosen.len() < r && tau >= floor {
        for i in 0..n {
            if chosen.len() == r {
                break;
            }
            if taken[i] || (bound[i] as f64) < tau || !tracker.can_add(i) {
                continue;
            }
            bound[i] = marg.gain(i);
            if bound[i] as f64 >= tau {
                tracker.add(i);
                marg.take(i);
                taken[i] = true;
                chosen.push(i);
            }
        }
        if tau == 0.0 {
            break;
        }
        tau *= 1.0 - xi;
    }
    Ok(finish("threshold", coll, chosen, start))
}
