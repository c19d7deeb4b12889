use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use matroid_im::instances::RrFile;
use matroid_im::{Element, Error, GroundSet, Instance, InstanceKind};

use crate::CliError;

/// An element in natural coordinates, with nodes given by their input labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Decoded {
    NodeRound { node: u64, round: usize },
    Node { node: u64 },
    Edge { src: u64, dst: u64 },
}

/// Maps element ids to labelled natural coordinates and back.
pub struct Decoder {
    ground: GroundSet,
    labels: Vec<u64>,
    edges: Vec<(usize, usize)>,
    by_label: HashMap<u64, usize>,
}

impl Decoder {
    fn new(ground: GroundSet, labels: Vec<u64>, edges: Vec<(usize, usize)>) -> Decoder {
        let by_label = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        Decoder { ground, labels, edges, by_label }
    }

    pub fn from_file(file: &RrFile) -> Decoder {
        Decoder::new(file.ground(), file.header.node_labels.clone(), file.header.edges.clone())
    }

    pub fn from_instance(inst: &Instance) -> Decoder {
        let g = inst.graph();
        Decoder::new(inst.ground().clone(), g.labels().to_vec(), g.edges().iter().map(|e| (e.src, e.dst)).collect())
    }

    pub fn decode(&self, id: usize) -> Decoded {
        match self.ground.decode(id) {
            Element::Node(v) => Decoded::Node { node: self.labels[v] },
            Element::NodeRound(v, t) => Decoded::NodeRound { node: self.labels[v], round: t },
            Element::Edge(e) => {
                let (s, d) = self.edges[e];
                Decoded::Edge { src: self.labels[s], dst: self.labels[d] }
            }
        }
    }

    pub fn decode_all(&self, ids: &[usize]) -> Vec<Decoded> {
        ids.iter().map(|&i| self.decode(i)).collect()
    }

    /// Solution-file line: `v` (IM), `v t` (RM, MRIM), `n v` or `e u v` (AdvIM).
    pub fn line(&self, id: usize) -> String {
        match (self.ground.kind(), self.decode(id)) {
            (InstanceKind::AdvIM, Decoded::Node { node }) => format!("n {node}"),
            (_, Decoded::Node { node }) => node.to_string(),
            (_, Decoded::NodeRound { node, round }) => format!("{node} {round}"),
            (_, Decoded::Edge { src, dst }) => format!("e {src} {dst}"),
        }
    }

    pub fn write_solution(&self, path: &Path, ids: &[usize]) -> Result<(), CliError> {
        let mut w = BufWriter::new(File::create(path)?);
        for &i in ids {
            writeln!(w, "{}", self.line(i))?;
        }
        w.flush()?;
        Ok(())
    }

    fn node(&self, label: &str, line: usize) -> Result<usize, Error> {
        let l: u64 = label.parse().map_err(|_| Error::Parse { line, msg: format!("invalid node label `{label}`") })?;
        self.by_label.get(&l).copied().ok_or_else(|| Error::Validation(format!("line {line}: unknown node label {l}")))
    }

    fn parse_line(&self, fields: &[&str], line: usize) -> Result<Element, Error> {
        let bad = || Error::Parse { line, msg: format!("unexpected solution line `{}`", fields.join(" ")) };
        match (self.ground.kind(), fields) {
            (InstanceKind::IM, [v]) => Ok(Element::Node(self.node(v, line)?)),
            (InstanceKind::RM | InstanceKind::MRIM, [v, t]) => {
                let t: usize = t.parse().map_err(|_| bad())?;
                Ok(Element::NodeRound(self.node(v, line)?, t))
            }
            (InstanceKind::AdvIM, ["n", v]) => Ok(Element::Node(self.node(v, line)?)),
            (InstanceKind::AdvIM, ["e", u, v]) => {
                let (u, v) = (self.node(u, line)?, self.node(v, line)?);
                let e =
                    self.edges.iter().position(|&x| x == (u, v)).ok_or_else(|| {
                        Error::Validation(format!("line {line}: no edge {} -> {}", fields[1], fields[2]))
                    })?;
                Ok(Element::Edge(e))
            }
            _ => Err(bad()),
        }
    }

    /// Reads a solution file into sorted element ids, rejecting duplicates.
    pub fn read_solution(&self, path: &Path) -> Result<Vec<usize>, CliError> {
        let mut ids = Vec::new();
        for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = t.split_whitespace().collect();
            let e = self.parse_line(&fields, i + 1)?;
            ids.push(self.ground.encode(e)?);
        }
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("solution lists an element twice".into()).into());
        }
        Ok(ids)
    }
}
