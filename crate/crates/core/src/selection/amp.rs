//! Continuous-greedy search over the matroid polytope and deterministic swap rounding.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use super::bound::tightened_upper_bound;
use super::cache::{Factors, QCache, Unit};
use super::lazy::{Entry, LazyHeap};
use super::SelectionResult;
use crate::error::{Error, Result};
use crate::instances::RRCollection;
use crate::matroid::{Matroid, PartitionMatroid, Tracker};
use crate::scalar::Scalar;

const NEVER: u64 = u64::MAX;

/// Which search routine [`amp`] uses per round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    /// Partition search whenever the matroid exposes a partition view.
    #[default]
    Auto,
    General,
    Partition,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AmpOptions {
    pub search: SearchStrategy,
    /// Record the tightened upper bound after every search round.
    pub track_bound: bool,
    /// Record `F(y)` after every rounding swap (costs a pass over the collection per swap).
    pub trace_rounding: bool,
}

/// `x = ε_s · Σ_l 1_{B_l}` kept as integer multiples of `ε_s = 1/steps`, together with its
/// residual-product cache and the lazy derivative bounds reused across search rounds.
#[derive(Debug, Clone)]
pub struct FractionalSolution<S: Scalar, W: Factors<S> = Unit> {
    pub cache: QCache<S, W>,
    counts: Vec<u32>,
    steps: u32,
    bases: Vec<Vec<usize>>,
    bounds: Vec<f64>,
    stamps: Vec<u64>,
}

impl<S: Scalar> FractionalSolution<S, Unit> {
    pub fn new(coll: &RRCollection, steps: u32) -> Self {
        FractionalSolution::with_factors(coll, steps, Unit)
    }
}

impl<S: Scalar, W: Factors<S>> FractionalSolution<S, W> {
    pub fn with_factors(coll: &RRCollection, steps: u32, factors: W) -> Self {
        assert!(steps >= 1, "1/ε_s must be a positive integer");
        let n = coll.ground_size();
        FractionalSolution {
            cache: QCache::with_factors(coll, factors),
            counts: vec![0; n],
            steps,
            bases: Vec::with_capacity(steps as usize),
            bounds: vec![f64::INFINITY; n],
            stamps: vec![NEVER; n],
        }
    }

    /// Number of search rounds, `1/ε_s`.
    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn eps_s(&self) -> f64 {
        1.0 / self.steps as f64
    }

    /// Coordinates as multiples of `ε_s`.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn x(&self) -> &[S] {
        self.cache.x()
    }

    pub fn bases(&self) -> &[Vec<usize>] {
        &self.bases
    }

    fn set_count(&mut self, coll: &RRCollection, i: usize, c: u32) {
        self.counts[i] = c;
        let v = if c >= self.steps { S::one() } else { S::of(c as f64 / self.steps as f64) };
        self.cache.set(coll, i, v);
    }

    /// Replaces the search history with explicit bases, rebuilding `x` and the cache.
    pub fn load_bases(&mut self, coll: &RRCollection, bases: Vec<Vec<usize>>) -> Result<()> {
        if bases.len() != self.steps as usize {
            return Err(Error::contract(format!("expected {} bases, got {}", self.steps, bases.len())));
        }
        for i in 0..self.counts.len() {
            if self.counts[i] != 0 {
                self.set_count(coll, i, 0);
            }
        }
        let mut c = vec![0u32; self.counts.len()];
        for b in &bases {
            for &e in b {
                c[e] += 1;
            }
        }
        for (i, &v) in c.iter().enumerate().filter(|(_, &v)| v > 0) {
            self.set_count(coll, i, v);
        }
        self.bases = bases;
        self.bounds.iter_mut().for_each(|b| *b = f64::INFINITY);
        self.stamps.iter_mut().for_each(|s| *s = NEVER);
        Ok(())
    }

    fn heap_over(&self, ids: impl Iterator<Item = usize>) -> LazyHeap {
        LazyHeap::new(ids.map(|i| Entry { value: self.bounds[i], id: i as u32, stamp: self.stamps[i] }))
    }
}

fn check_sizes(coll: &RRCollection, m: &dyn Matroid) -> Result<()> {
    if coll.ground_size() != m.ground_size() {
        return Err(Error::contract(format!(
            "collection ground set ({}) and matroid ground set ({}) differ",
            coll.ground_size(),
            m.ground_size()
        )));
    }
    Ok(())
}

/// One search round over a general matroid: `r` lazy argmax picks of the partial
/// derivative among elements that keep the base independent, each raising `y[j]` by `ε_s`.
pub fn amp_search<S: Scalar, W: Factors<S>>(
    coll: &RRCollection,
    m: &dyn Matroid,
    sol: &mut FractionalSolution<S, W>,
) -> Result<Vec<usize>> {
    check_sizes(coll, m)?;
    let r = m.rank();
    let mut tracker = Tracker::new(m);
    let mut heap = sol.heap_over(0..coll.ground_size());
    let mut base = Vec::with_capacity(r);
    while base.len() < r {
        let now = sol.cache.updates();
        let FractionalSolution { cache, bounds, stamps, .. } = &mut *sol;
        let picked = heap.pop_best(
            now,
            |u| tracker.can_add(u),
            |u| {
                let d = cache.derivative(coll, u).as_f64();
                bounds[u] = d;
                stamps[u] = now;
                d
            },
        );
        let Some(e) = picked else {
            return Err(Error::contract(format!("matroid supplied only {} of {r} base elements", base.len())));
        };
        let j = e.id as usize;
        tracker.add(j);
        base.push(j);
        let c = sol.counts[j] + 1;
        sol.set_count(coll, j, c);
    }
    sol.bases.push(base.clone());
    Ok(base)
}

/// One search round for a partition matroid: parts in ascending order, each filled to
/// its capacity with lazy argmax picks restricted to that part.
pub fn amp_search_pm<S: Scalar, W: Factors<S>>(
    coll: &RRCollection,
    pm: &PartitionMatroid,
    sol: &mut FractionalSolution<S, W>,
) -> Result<Vec<usize>> {
    check_sizes(coll, pm)?;
    let mut base = Vec::with_capacity(pm.rank());
    for l in 0..pm.partition_count() {
        let cap = pm.effective_capacity(l);
        if cap == 0 {
            continue;
        }
        let mut heap = sol.heap_over(pm.members(l).iter().map(|&u| u as usize));
        for _ in 0..cap {
            let now = sol.cache.updates();
            let FractionalSolution { cache, bounds, stamps, .. } = &mut *sol;
            let e = heap
                .pop_best(
                    now,
                    |_| true,
                    |u| {
                        let d = cache.derivative(coll, u).as_f64();
                        bounds[u] = d;
                        stamps[u] = now;
                        d
                    },
                )
                .expect("part holds at least `cap` members");
            let j = e.id as usize;
            base.push(j);
            let c = sol.counts[j] + 1;
            sol.set_count(coll, j, c);
        }
    }
    sol.bases.push(base.clone());
    Ok(base)
}

#[derive(Debug, Clone, Default)]
pub struct RoundOutcome {
    pub base: Vec<usize>,
    pub swaps: usize,
    /// `F(y)` before the first swap and after each swap (only when tracing).
    pub f_trace: Vec<f64>,
}

/// Merges the bases `B_1..B_{1/ε_s}` of `sol` pairwise into one base.
///
/// For each pair `(B_t, B_{t+1})` the smallest `u_i ∈ B_t \ B_{t+1}` is matched with an
/// exchange partner `u_j`; whichever has the larger partial derivative survives (`u_i`
/// on ties) and `y` moves by `ε_s` or `t·ε_s` accordingly. On return `y` is the indicator
/// of the returned base.
pub fn amp_round<S: Scalar, W: Factors<S>>(
    coll: &RRCollection,
    m: &dyn Matroid,
    sol: &mut FractionalSolution<S, W>,
    trace: bool,
) -> Result<RoundOutcome> {
    check_sizes(coll, m)?;
    let k = sol.bases.len();
    if k == 0 {
        return Err(Error::contract("no bases to round"));
    }
    let n = coll.ground_size();
    let mut out = RoundOutcome::default();
    if trace {
        out.f_trace.push(sol.cache.f_value().as_f64());
    }
    let pm = m.partition_view();
    let mut in_next = vec![false; n];
    for t in 0..k - 1 {
        let weight = (t + 1) as u32;
        let mut cur = std::mem::take(&mut sol.bases[t]);
        let mut next = std::mem::take(&mut sol.bases[t + 1]);
        let orig_next = next.clone();
        for &e in &next {
            in_next[e] = true;
        }
        let mut in_cur_only: Vec<usize> = cur.iter().copied().filter(|&e| !in_next[e]).collect();
        in_cur_only.sort_unstable();
        let mut next_only: Vec<usize> = {
            let in_cur: std::collections::HashSet<usize> = cur.iter().copied().collect();
            next.iter().copied().filter(|e| !in_cur.contains(e)).collect()
        };
        next_only.sort_unstable();
        let mut by_part: HashMap<usize, VecDeque<usize>> = HashMap::new();
        if let Some(pm) = pm {
            for &e in &next_only {
                by_part.entry(pm.partition_of(e)).or_default().push_back(e);
            }
        }
        for &ui in &in_cur_only {
            let uj = match pm {
                Some(pm) => by_part
                    .get_mut(&pm.partition_of(ui))
                    .and_then(|q| q.pop_front())
                    .ok_or_else(|| Error::contract(format!("no exchange partner for element {ui}")))?,
                None => m.find_exchange(&cur, &next, ui)?,
            };
            let di = sol.cache.derivative(coll, ui);
            let dj = sol.cache.derivative(coll, uj);
            if di >= dj {
                let pos = next.iter().position(|&e| e == uj).expect("u_j in B_{t+1}");
                next[pos] = ui;
                let (ci, cj) = (sol.counts[ui] + 1, sol.counts[uj] - 1);
                sol.set_count(coll, ui, ci);
                sol.set_count(coll, uj, cj);
            } else {
                let pos = cur.iter().position(|&e| e == ui).expect("u_i in B_t");
                cur[pos] = uj;
                let (cj, ci) = (sol.counts[uj] + weight, sol.counts[ui] - weight);
                sol.set_count(coll, uj, cj);
                sol.set_count(coll, ui, ci);
            }
            out.swaps += 1;
            if trace {
                out.f_trace.push(sol.cache.f_value().as_f64());
            }
        }
        for &e in &orig_next {
            in_next[e] = false;
        }
        next.sort_unstable();
        cur.sort_unstable();
        debug_assert_eq!(cur, next, "pair not merged");
        sol.bases[t] = cur;
        sol.bases[t + 1] = next;
    }
    let mut base = sol.bases[k - 1].clone();
    base.sort_unstable();
    out.base = base;
    Ok(out)
}

/// Number of search rounds for `ε_s`, which must be the reciprocal of a positive integer.
pub fn steps_for(eps_s: f64) -> Result<u32> {
    if !(eps_s > 0.0 && eps_s <= 1.0) {
        return Err(Error::Config(format!("ε_s must lie in (0, 1], got {eps_s}")));
    }
    let t = (1.0 / eps_s).round();
    if (t * eps_s - 1.0).abs() > 1e-9 || t > u32::MAX as f64 {
        return Err(Error::Config(format!("1/ε_s must be an integer, got ε_s = {eps_s}")));
    }
    Ok(t as u32)
}

/// AMP on the unweighted coverage.
pub fn amp<S: Scalar>(coll: &RRCollection, m: &dyn Matroid, eps_s: f64, opts: AmpOptions) -> Result<SelectionResult> {
    amp_with::<S, Unit>(coll, m, eps_s, Unit, opts)
}

/// AMP with arbitrary residual factors: `1/ε_s` search rounds then rounding.
pub fn amp_with<S: Scalar, W: Factors<S>>(
    coll: &RRCollection,
    m: &dyn Matroid,
    eps_s: f64,
    factors: W,
    opts: AmpOptions,
) -> Result<SelectionResult> {
    let start = Instant::now();
    check_sizes(coll, m)?;
    let steps = steps_for(eps_s)?;
    let pm = match opts.search {
        SearchStrategy::General => None,
        SearchStrategy::Auto => m.partition_view(),
        SearchStrategy::Partition => Some(
            m.partition_view()
                .ok_or_else(|| Error::Unsupported("partition search needs a partition matroid".into()))?,
        ),
    };
    let mut sol = FractionalSolution::with_factors(coll, steps, factors);
    let mut f_trace = vec![0.0];
    let mut bound_trace = Vec::new();
    if opts.track_bound {
        bound_trace.push(tightened_upper_bound(coll, m, &sol.cache, S::zero()).as_f64());
    }
    for _ in 0..steps {
        match pm {
            Some(pm) => amp_search_pm(coll, pm, &mut sol)?,
            None => amp_search(coll, m, &mut sol)?,
        };
        let f = sol.cache.f_value();
        f_trace.push(f.as_f64());
        if opts.track_bound {
            bound_trace.push(tightened_upper_bound(coll, m, &sol.cache, f).as_f64());
        }
    }
    let rounded = amp_round(coll, m, &mut sol, opts.trace_rounding)?;
    let coverage = coll.coverage(&rounded.base);
    let objective = sol.cache.f_value().as_f64();
    Ok(SelectionResult {
        algorithm: String::from(if pm.is_some() { "amp-pm" } else { "amp" }),
        epsilon: Some(eps_s),
        chosen: rounded.base,
        coverage,
        objective,
        f_trace,
        bound_trace,
        rounding_swaps: rounded.swaps,
        rounding_f_trace: rounded.f_trace,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
