use rand::Rng;
use rayon::prelude::*;

use super::{AdvMode, Instance, InstanceKind, REGEN_MAX_ATTEMPTS};
use crate::diffusion::{DiffusionModel, ReverseScratch};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// RR sets generated per parallel work unit.
const CHUNK: usize = 2048;

/// Per-thread RR-set generator bound to one instance.
pub struct RrGenerator<'a> {
    inst: &'a Instance,
    scratch: ReverseScratch,
    nodes: Vec<u32>,
    edges: Vec<u32>,
}

impl<'a> RrGenerator<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        RrGenerator { inst, scratch: inst.new_scratch(), nodes: Vec::new(), edges: Vec::new() }
    }

    fn reverse<R: Rng>(&mut self, root: usize, rng: &mut R) {
        self.nodes.clear();
        let g = self.inst.graph();
        match self.inst.model() {
            DiffusionModel::IC => self.scratch.reverse_ic(g, root, rng, &mut self.nodes),
            DiffusionModel::LT => {
                self.edges.clear();
                self.scratch.reverse_lt(g, root, rng, |_| false, &mut self.nodes, &mut self.edges);
            }
        }
    }

    /// Appends the RR set of `stream` to `out` (sorted, deduplicated).
    pub fn generate(&mut self, stream: RngStream, out: &mut Vec<u32>) {
        let mut rng = stream.rng();
        let start = out.len();
        let inst = self.inst;
        let nv = inst.graph().node_count();
        match inst.kind() {
            InstanceKind::IM => {
                let root = rng.gen_range(0..nv);
                self.reverse(root, &mut rng);
                out.extend_from_slice(&self.nodes);
            }
            InstanceKind::RM => {
                let root = rng.gen_range(0..nv);
                let t = inst.sample_campaign(&mut rng);
                self.reverse(root, &mut rng);
                let base = (t * nv) as u32;
                out.extend(self.nodes.iter().map(|&v| base + v));
            }
            InstanceKind::MRIM => {
                let root = rng.gen_range(0..nv);
                for t in 0..inst.ground().rounds() {
                    self.reverse(root, &mut rng);
                    let base = (t * nv) as u32;
                    out.extend(self.nodes.iter().map(|&v| base + v));
                }
            }
            InstanceKind::AdvIM => {
                let gs = inst.ground();
                let attempts = match inst.adv_mode() {
                    Some(AdvMode::Regenerate) => REGEN_MAX_ATTEMPTS,
                    _ => 1,
                };
                let mut hit = false;
                for _ in 0..attempts {
                    let root = gs.compact_node(rng.gen_range(0..gs.node_elements()));
                    self.nodes.clear();
                    self.edges.clear();
                    hit = self.scratch.reverse_lt(
                        inst.graph(),
                        root,
                        &mut rng,
                        |v| inst.in_a(v),
                        &mut self.nodes,
                        &mut self.edges,
                    );
                    if hit {
                        break;
                    }
                }
                if hit {
                    let nv_el = gs.node_elements() as u32;
                    out.extend(self.nodes.iter().filter_map(|&v| gs.node_element(v as usize)));
                    out.extend(self.edges.iter().map(|&e| nv_el + e));
                } else if attempts > 1 {
                    log::warn!(
                        "no reverse walk reached the seed set after {attempts} attempts; keeping an empty RR set"
                    );
                }
            }
        }
        out[start..].sort_unstable();
        let mut w = start;
        for r in start..out.len() {
            if w == start || out[r] != out[w - 1] {
                out[w] = out[r];
                w += 1;
            }
        }
        out.truncate(w);
    }
}

/// A bag of RR sets with an inverted index, produced from one seed.
///
/// Set `i` is always generated from stream `(seed, stream_offset + i)`, so a collection can
/// be grown incrementally and reproduced exactly regardless of thread count.
#[derive(Debug, Clone, PartialEq)]
pub struct RRCollection {
    ground_size: usize,
    seed: u64,
    stream_offset: u64,
    elems: Vec<u32>,
    offsets: Vec<usize>,
    inv: Vec<Vec<u32>>,
}

impl RRCollection {
    pub fn new(ground_size: usize, seed: u64, stream_offset: u64) -> Self {
        RRCollection {
            ground_size,
            seed,
            stream_offset,
            elems: Vec::new(),
            offsets: vec![0],
            inv: vec![Vec::new(); ground_size],
        }
    }

    /// A collection holding explicit sets (stream provenance zero). Sets are sorted and deduplicated.
    pub fn from_sets<I, S>(ground_size: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[usize]>,
    {
        let mut c = RRCollection::new(ground_size, 0, 0);
        for s in sets {
            let mut v: Vec<u32> = Vec::with_capacity(s.as_ref().len());
            for &e in s.as_ref() {
                if e >= ground_size {
                    return Err(Error::OutOfRange { index: e, size: ground_size });
                }
                v.push(e as u32);
            }
            v.sort_unstable();
            v.dedup();
            c.push(&v);
        }
        Ok(c)
    }

    pub(crate) fn push(&mut self, set: &[u32]) {
        let idx = self.len() as u32;
        for &e in set {
            self.inv[e as usize].push(idx);
        }
        self.elems.extend_from_slice(set);
        self.offsets.push(self.elems.len());
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_offset(&self) -> u64 {
        self.stream_offset
    }

    /// Number of RR sets (θ).
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn set(&self, i: usize) -> &[u32] {
        &self.elems[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn sets(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.len()).map(move |i| self.set(i))
    }

    /// Indices of the RR sets containing element `e`, ascending.
    #[inline]
    pub fn containing(&self, e: usize) -> &[u32] {
        &self.inv[e]
    }

    /// Total number of stored element occurrences.
    pub fn total_size(&self) -> usize {
        self.elems.len()
    }

    /// Number of RR sets intersecting `set`.
    pub fn coverage(&self, set: &[usize]) -> usize {
        let mut hit = vec![false; self.len()];
        let mut count = 0;
        for &e in set {
            for &r in &self.inv[e] {
                if !hit[r as usize] {
                    hit[r as usize] = true;
                    count += 1;
                }
            }
        }
        count
    }

    /// Number of nonempty RR sets.
    pub fn nonempty(&self) -> usize {
        (0..self.len()).filter(|&i| !self.set(i).is_empty()).count()
    }
}

/// Appends RR sets `coll.len()..target` generated from the collection's own streams.
///
/// Generation runs in parallel chunks; the result is identical to sequential generation.
pub fn grow_collection(inst: &Instance, coll: &mut RRCollection, target: usize) -> Result<()> {
    if coll.ground_size() != inst.ground().size() {
        return Err(Error::contract("collection and instance disagree on the ground-set size"));
    }
    let start = coll.len();
    if target <= start {
        return Ok(());
    }
    let base = RngStream::new(coll.seed, coll.stream_offset);
    let chunks: Vec<(usize, usize)> = (start..target).step_by(CHUNK).map(|s| (s, (s + CHUNK).min(target))).collect();
    let produced: Vec<(Vec<u32>, Vec<u32>)> = chunks
        .par_iter()
        .map_init(
            || RrGenerator::new(inst),
            |gen, &(lo, hi)| {
                let mut flat = Vec::new();
                let mut lens = Vec::with_capacity(hi - lo);
                for i in lo..hi {
                    let before = flat.len();
                    gen.generate(base.advance(i as u64), &mut flat);
                    lens.push((flat.len() - before) as u32);
                }
                (flat, lens)
            },
        )
        .collect();
    for (flat, lens) in produced {
        let mut at = 0;
        for len in lens {
            coll.push(&flat[at..at + len as usize]);
            at += len as usize;
        }
    }
    Ok(())
}
