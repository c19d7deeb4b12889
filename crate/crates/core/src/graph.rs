//! Directed social graphs with per-edge influence probabilities.
//!
//! Adjacency is stored twice in CSR form (forward and reverse) so that forward
//! diffusion and reverse sampling both walk contiguous memory. Every adjacency
//! entry keeps the id of the edge it came from; edge ids index [`Graph::edges`]
//! and double as the ground-set coordinates of blockable edges.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on the linear-threshold in-weight constraint.
pub const LT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub p: f64,
}

impl Edge {
    pub fn new(src: usize, dst: usize, p: f64) -> Self {
        Edge { src, dst, p }
    }
}

/// How edge probabilities are assigned when loading an edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weighting {
    /// Third column holds the probability; it is required.
    Explicit,
    /// Every edge into `j` gets `1 / in_degree(j)`, in-degree counted with multiplicity.
    InverseInDegree,
}

#[derive(Debug, Clone, Default)]
struct Csr {
    offsets: Vec<usize>,
    nbr: Vec<u32>,
    p: Vec<f64>,
    eid: Vec<u32>,
}

impl Csr {
    fn build(node_count: usize, edges: &[Edge], forward: bool) -> Csr {
        let key = |e: &Edge| if forward { e.src } else { e.dst };
        let other = |e: &Edge| if forward { e.dst } else { e.src };
        let mut offsets = vec![0usize; node_count + 1];
        for e in edges {
            offsets[key(e) + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let m = edges.len();
        let mut cursor = offsets.clone();
        let mut nbr = vec![0u32; m];
        let mut p = vec![0f64; m];
        let mut eid = vec![0u32; m];
        for (id, e) in edges.iter().enumerate() {
            let slot = cursor[key(e)];
            cursor[key(e)] += 1;
            nbr[slot] = other(e) as u32;
            p[slot] = e.p;
            eid[slot] = id as u32;
        }
        Csr { offsets, nbr, p, eid }
    }

    #[inline]
    fn range(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }
}

/// An immutable directed graph. Node ids are dense in `[0, node_count)`.
#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    labels: Vec<u64>,
    label_index: HashMap<u64, usize>,
    out_adj: Csr,
    in_adj: Csr,
}

impl Graph {
    /// Builds a graph over nodes `0..node_count` labelled by their own ids.
    pub fn from_edges(node_count: usize, edges: Vec<Edge>) -> Result<Graph> {
        Graph::with_labels((0..node_count as u64).collect(), edges)
    }

    /// Builds a graph whose dense node `i` corresponds to the input label `labels[i]`.
    ///
    /// Self-loops are dropped with a warning; parallel edges are kept.
    pub fn with_labels(labels: Vec<u64>, edges: Vec<Edge>) -> Result<Graph> {
        let node_count = labels.len();
        if node_count > u32::MAX as usize || edges.len() > u32::MAX as usize {
            return Err(Error::validation("graph exceeds 2^32 nodes or edges"));
        }
        let mut kept = Vec::with_capacity(edges.len());
        let mut loops = 0usize;
        for e in edges {
            if e.src >= node_count || e.dst >= node_count {
                return Err(Error::validation(format!(
                    "edge ({}, {}) references a node outside [0, {node_count})",
                    e.src, e.dst
                )));
            }
            if !(0.0..=1.0).contains(&e.p) {
                return Err(Error::validation(format!(
                    "edge ({}, {}) has probability {} outside [0, 1]",
                    e.src, e.dst, e.p
                )));
            }
            if e.src == e.dst {
                loops += 1;
                continue;
            }
            kept.push(e);
        }
        if loops > 0 {
            log::warn!("dropped {loops} self-loop(s)");
        }
        let label_index = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect::<HashMap<_, _>>();
        if label_index.len() != node_count {
            return Err(Error::validation("node labels are not unique"));
        }
        let out_adj = Csr::build(node_count, &kept, true);
        let in_adj = Csr::build(node_count, &kept, false);
        Ok(Graph { node_count, edges: kept, labels, label_index, out_adj, in_adj })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    /// Original (input file) label of every dense node id.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> u64 {
        self.labels[node]
    }

    /// Dense id for an input label, if the label occurs in the graph.
    pub fn node_of_label(&self, label: u64) -> Option<usize> {
        self.label_index.get(&label).copied()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj.range(v).len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj.range(v).len()
    }

    /// `(dst, p, edge_id)` for every edge leaving `v`.
    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64, usize)> + '_ {
        self.out_adj
            .range(v)
            .map(move |s| (self.out_adj.nbr[s] as usize, self.out_adj.p[s], self.out_adj.eid[s] as usize))
    }

    /// `(src, p, edge_id)` for every edge entering `v`.
    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64, usize)> + '_ {
        self.in_adj.range(v).map(move |s| (self.in_adj.nbr[s] as usize, self.in_adj.p[s], self.in_adj.eid[s] as usize))
    }

    /// Raw in-adjacency slices `(sources, probabilities, edge ids)` of `v`.
    #[inline]
    pub fn in_slices(&self, v: usize) -> (&[u32], &[f64], &[u32]) {
        let r = self.in_adj.range(v);
        (&self.in_adj.nbr[r.clone()], &self.in_adj.p[r.clone()], &self.in_adj.eid[r])
    }

    /// Raw out-adjacency slices `(targets, probabilities, edge ids)` of `v`.
    #[inline]
    pub fn out_slices(&self, v: usize) -> (&[u32], &[f64], &[u32]) {
        let r = self.out_adj.range(v);
        (&self.out_adj.nbr[r.clone()], &self.out_adj.p[r.clone()], &self.out_adj.eid[r])
    }

    pub fn in_weight_sum(&self, v: usize) -> f64 {
        self.in_adj.p[self.in_adj.range(v)].iter().sum()
    }

    /// Every edge `(u, v, p)` replaced by `(v, u, p)`. Edge ids are preserved.
    pub fn reverse(&self) -> Graph {
        let edges = self.edges.iter().map(|e| Edge::new(e.dst, e.src, e.p)).collect::<Vec<_>>();
        Graph {
            node_count: self.node_count,
            out_adj: Csr::build(self.node_count, &edges, true),
            in_adj: Csr::build(self.node_count, &edges, false),
            edges,
            labels: self.labels.clone(),
            label_index: self.label_index.clone(),
        }
    }

    /// Collapses parallel edges by summing their probabilities (first occurrence keeps its slot).
    pub fn merge_parallel_edges(&self) -> Result<Graph> {
        let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
        let mut merged: Vec<Edge> = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            match slot.get(&(e.src, e.dst)) {
                Some(&i) => merged[i].p += e.p,
                None => {
                    slot.insert((e.src, e.dst), merged.len());
                    merged.push(*e);
                }
            }
        }
        if merged.len() < self.edges.len() {
            log::warn!("merged {} parallel edge(s)", self.edges.len() - merged.len());
        }
        Graph::with_labels(self.labels.clone(), merged)
    }

    /// Checks the linear-threshold admissibility constraint `Σ_in p ≤ 1` on every node.
    pub fn check_lt(&self) -> Result<()> {
        for v in 0..self.node_count {
            let s = self.in_weight_sum(v);
            if s > 1.0 + LT_SUM_TOLERANCE {
                return Err(Error::validation(format!(
                    "node {} has incoming weight {s} > 1 (linear threshold requires <= 1)",
                    self.labels[v]
                )));
            }
        }
        Ok(())
    }
}

/// Writes `src dst p` lines with input labels; nodes without edges are not represented.
pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    for e in g.edges() {
        writeln!(w, "{} {} {}", g.label(e.src), g.label(e.dst), e.p)?;
    }
    w.flush()?;
    Ok(())
}

/// Loads a whitespace-separated edge list (`src dst [p]`, `#` comments).
pub fn load_edge_list(path: impl AsRef<Path>, weighting: Weighting) -> Result<Graph> {
    let file = File::open(path.as_ref())?;
    parse_edge_list(BufReader::new(file), weighting)
}

pub fn parse_edge_list<R: Read>(reader: BufReader<R>, weighting: Weighting) -> Result<Graph> {
    let mut labels: Vec<u64> = Vec::new();
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut intern = |label: u64, labels: &mut Vec<u64>| -> usize {
        *index.entry(label).or_insert_with(|| {
            labels.push(label);
            labels.len() - 1
        })
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `src dst [p]`, got {} field(s)", fields.len()),
            });
        }
        let parse_id = |s: &str| {
            s.parse::<u64>().map_err(|_| Error::Parse { line: lineno, msg: format!("invalid node id `{s}`") })
        };
        let src = parse_id(fields[0])?;
        let dst = parse_id(fields[1])?;
        let p = match (weighting, fields.get(2)) {
            (Weighting::Explicit, None) => {
                return Err(Error::Format {
                    line: lineno,
                    msg: "explicit weighting requires a probability column".into(),
                })
            }
            (Weighting::Explicit, Some(s)) => {
                let p = s
                    .parse::<f64>()
                    .map_err(|_| Error::Parse { line: lineno, msg: format!("invalid probability `{s}`") })?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Validation(format!("line {lineno}: probability {p} outside [0, 1]")));
                }
                p
            }
            (Weighting::InverseInDegree, _) => 0.0,
        };
        let s = intern(src, &mut labels);
        let d = intern(dst, &mut labels);
        edges.push(Edge::new(s, d, p));
    }

    if weighting == Weighting::InverseInDegree {
        let mut indeg = vec![0usize; labels.len()];
        for e in edges.iter().filter(|e| e.src != e.dst) {
            indeg[e.dst] += 1;
        }
        for e in edges.iter_mut().filter(|e| e.src != e.dst) {
            e.p = 1.0 / indeg[e.dst] as f64;
        }
    }
    Graph::with_labels(labels, edges)
}
