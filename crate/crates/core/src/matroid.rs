//! Matroid oracles: the abstract interface, partition (and uniform) matroids, and
//! general matroids given by an independence predicate.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Independence and exchange oracle over the ground set `[0, ground_size)`.
pub trait Matroid: Send + Sync {
    fn ground_size(&self) -> usize;

    fn rank(&self) -> usize;

    fn is_independent(&self, set: &[usize]) -> bool;

    /// Whether `set ∪ {u}` is independent, given that `set` is independent and `u ∉ set`.
    fn can_add(&self, set: &[usize], u: usize) -> Result<bool> {
        check_element(u, self.ground_size())?;
        let mut with = Vec::with_capacity(set.len() + 1);
        with.extend_from_slice(set);
        with.push(u);
        Ok(self.is_independent(&with))
    }

    fn is_base(&self, set: &[usize]) -> bool {
        set.len() == self.rank() && self.is_independent(set)
    }

    /// An element `u_j ∈ b2 \ b1` such that `b1 - u_i + u_j` and `b2 - u_j + u_i` are both bases.
    fn find_exchange(&self, b1: &[usize], b2: &[usize], ui: usize) -> Result<usize> {
        check_exchange_args(b1, b2, ui)?;
        let swapped = |base: &[usize], out: usize, inn: usize| -> Vec<usize> {
            base.iter().copied().filter(|&e| e != out).chain(std::iter::once(inn)).collect()
        };
        let mut candidates: Vec<usize> = b2.iter().copied().filter(|e| !b1.contains(e)).collect();
        candidates.sort_unstable();
        candidates
            .into_iter()
            .find(|&uj| self.is_independent(&swapped(b1, ui, uj)) && self.is_independent(&swapped(b2, uj, ui)))
            .ok_or_else(|| Error::contract(format!("no exchange partner for element {ui}; inputs are not both bases")))
    }

    fn partition_view(&self) -> Option<&PartitionMatroid> {
        None
    }
}

fn check_element(u: usize, n: usize) -> Result<()> {
    if u >= n {
        return Err(Error::OutOfRange { index: u, size: n });
    }
    Ok(())
}

fn check_exchange_args(b1: &[usize], b2: &[usize], ui: usize) -> Result<()> {
    if !b1.contains(&ui) || b2.contains(&ui) {
        return Err(Error::contract(format!("element {ui} is not in B1 \\ B2")));
    }
    Ok(())
}

/// Maintains an independent set under additions (and removals) with cheap `can_add` queries.
pub enum Tracker<'m> {
    Partition { pm: &'m PartitionMatroid, counts: Vec<usize>, len: usize },
    General { m: &'m dyn Matroid, set: Vec<usize> },
}

impl<'m> Tracker<'m> {
    pub fn new(m: &'m dyn Matroid) -> Tracker<'m> {
        match m.partition_view() {
            Some(pm) => Tracker::Partition { pm, counts: vec![0; pm.partition_count()], len: 0 },
            None => Tracker::General { m, set: Vec::new() },
        }
    }

    #[inline]
    pub fn can_add(&mut self, u: usize) -> bool {
        match self {
            Tracker::Partition { pm, counts, .. } => {
                let l = pm.partition_of(u);
                counts[l] < pm.capacity(l)
            }
            Tracker::General { m, set } => {
                set.push(u);
                let ok = m.is_independent(set);
                set.pop();
                ok
            }
        }
    }

    pub fn add(&mut self, u: usize) {
        match self {
            Tracker::Partition { pm, counts, len } => {
                counts[pm.partition_of(u)] += 1;
                *len += 1;
            }
            Tracker::General { set, .. } => set.push(u),
        }
    }

    pub fn remove(&mut self, u: usize) {
        match self {
            Tracker::Partition { pm, counts, len } => {
                counts[pm.partition_of(u)] -= 1;
                *len -= 1;
            }
            Tracker::General { set, .. } => set.retain(|&e| e != u),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Tracker::Partition { len, .. } => *len,
            Tracker::General { set, .. } => set.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ground set split into disjoint parts `U_l`, each allowing at most `k_l` elements.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionMatroid {
    partition_of: Vec<u32>,
    capacities: Vec<usize>,
    member_offsets: Vec<usize>,
    members: Vec<u32>,
    rank: usize,
}

impl PartitionMatroid {
    /// `partition_of[u]` is the part of element `u`; parts are `0..capacities.len()`.
    ///
    /// A capacity larger than its part only limits the rank to the part size.
    pub fn new(partition_of: Vec<usize>, capacities: Vec<usize>) -> Result<PartitionMatroid> {
        let h = capacities.len();
        let mut sizes = vec![0usize; h];
        for (u, &l) in partition_of.iter().enumerate() {
            if l >= h {
                return Err(Error::validation(format!("element {u} assigned to part {l}, but only {h} parts exist")));
            }
            sizes[l] += 1;
        }
        let mut member_offsets = vec![0usize; h + 1];
        for l in 0..h {
            member_offsets[l + 1] = member_offsets[l] + sizes[l];
        }
        let mut cursor = member_offsets.clone();
        let mut members = vec![0u32; partition_of.len()];
        for (u, &l) in partition_of.iter().enumerate() {
            members[cursor[l]] = u as u32;
            cursor[l] += 1;
        }
        let rank = (0..h).map(|l| capacities[l].min(sizes[l])).sum();
        Ok(PartitionMatroid {
            partition_of: partition_of.into_iter().map(|l| l as u32).collect(),
            capacities,
            member_offsets,
            members,
            rank,
        })
    }

    /// The uniform matroid: any `k` of `n` elements.
    pub fn uniform(n: usize, k: usize) -> PartitionMatroid {
        PartitionMatroid::new(vec![0; n], vec![k]).expect("single part is always valid")
    }

    #[inline]
    pub fn partition_of(&self, u: usize) -> usize {
        self.partition_of[u] as usize
    }

    pub fn partition_count(&self) -> usize {
        self.capacities.len()
    }

    #[inline]
    pub fn capacity(&self, l: usize) -> usize {
        self.capacities[l]
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    /// Elements of part `l` in ascending id order.
    pub fn members(&self, l: usize) -> &[u32] {
        &self.members[self.member_offsets[l]..self.member_offsets[l + 1]]
    }

    /// `min(k_l, |U_l|)`: how many elements of part `l` every base holds.
    pub fn effective_capacity(&self, l: usize) -> usize {
        self.capacities[l].min(self.members(l).len())
    }
}

impl Matroid for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.partition_of.len()
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        let mut counts = vec![0usize; self.capacities.len()];
        let mut seen = std::collections::HashSet::with_capacity(set.len());
        for &u in set {
            if u >= self.ground_size() || !seen.insert(u) {
                return false;
            }
            let l = self.partition_of(u);
            counts[l] += 1;
            if counts[l] > self.capacities[l] {
                return false;
            }
        }
        true
    }

    fn can_add(&self, set: &[usize], u: usize) -> Result<bool> {
        check_element(u, self.ground_size())?;
        let l = self.partition_of(u);
        let used = set.iter().filter(|&&e| self.partition_of(e) == l).count();
        Ok(used < self.capacities[l])
    }

    fn find_exchange(&self, b1: &[usize], b2: &[usize], ui: usize) -> Result<usize> {
        check_exchange_args(b1, b2, ui)?;
        let l = self.partition_of(ui);
        b2.iter()
            .copied()
            .filter(|&e| self.partition_of(e) == l && !b1.contains(&e))
            .min()
            .ok_or_else(|| Error::contract(format!("no exchange partner for element {ui} in part {l}")))
    }

    fn partition_view(&self) -> Option<&PartitionMatroid> {
        Some(self)
    }
}

type Predicate = dyn Fn(&[usize]) -> bool + Send + Sync;

/// A general matroid defined by a caller-supplied independence predicate.
///
/// The predicate must describe a matroid; nothing here verifies the axioms.
#[derive(Clone)]
pub struct OracleMatroid {
    n: usize,
    rank: usize,
    independent: Arc<Predicate>,
}

impl OracleMatroid {
    pub fn new(n: usize, independent: impl Fn(&[usize]) -> bool + Send + Sync + 'static) -> OracleMatroid {
        let independent: Arc<Predicate> = Arc::new(independent);
        let mut set = Vec::new();
        for u in 0..n {
            set.push(u);
            if !independent(&set) {
                set.pop();
            }
        }
        OracleMatroid { n, rank: set.len(), independent }
    }
}

impl fmt::Debug for OracleMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleMatroid").field("n", &self.n).field("rank", &self.rank).finish()
    }
}

impl Matroid for OracleMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().all(|&u| u < self.n) && (self.independent)(set)
    }
}

/// Matroid greedy: scan by non-increasing weight (ties to the smaller id) and keep every
/// element that stays independent. Returns a maximum-weight base, sorted ascending.
pub fn max_weight_base<W: PartialOrd + Copy>(m: &dyn Matroid, weights: &[W]) -> Vec<usize> {
    assert_eq!(weights.len(), m.ground_size(), "one weight per ground element");
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].partial_cmp(&weights[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let mut tracker = Tracker::new(m);
    let rank = m.rank();
    let mut base = Vec::with_capacity(rank);
    for u in order {
        if base.len() == rank {
            break;
        }
        if tracker.can_add(u) {
            tracker.add(u);
            base.push(u);
        }
    }
    base.sort_unstable();
    base
}
