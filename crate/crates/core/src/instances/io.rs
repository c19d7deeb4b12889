//! Binary RR-collection files.
//!
//! Layout: the magic `RRC1`, a little-endian `u32` header length, a JSON header, then
//! one record per RR set: `u32` length followed by that many `u32` element ids.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_matroid, GroundSet, Instance, InstanceParams, RRCollection};
use crate::diffusion::DiffusionModel;
use crate::error::{Error, Result};
use crate::matroid::PartitionMatroid;

const MAGIC: &[u8; 4] = b"RRC1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrHeader {
    pub params: InstanceParams,
    pub model: DiffusionModel,
    pub node_count: usize,
    pub edge_count: usize,
    pub ground_size: usize,
    pub kappa: f64,
    pub theta: usize,
    pub seed: u64,
    pub stream_offset: u64,
    /// Input label of every dense node id.
    pub node_labels: Vec<u64>,
    /// Dense `(src, dst)` of every edge; only filled when edges are ground elements.
    pub edges: Vec<(usize, usize)>,
}

/// An RR collection together with what is needed to select from it and decode the result.
#[derive(Debug, Clone, PartialEq)]
pub struct RrFile {
    pub header: RrHeader,
    pub collection: RRCollection,
}

impl RrFile {
    pub fn new(inst: &Instance, collection: RRCollection) -> RrFile {
        let g = inst.graph();
        let edges = match inst.params() {
            InstanceParams::AdvIM { .. } => g.edges().iter().map(|e| (e.src, e.dst)).collect(),
            _ => Vec::new(),
        };
        RrFile {
            header: RrHeader {
                params: inst.params().clone(),
                model: inst.model(),
                node_count: g.node_count(),
                edge_count: g.edge_count(),
                ground_size: collection.ground_size(),
                kappa: inst.kappa(),
                theta: collection.len(),
                seed: collection.seed(),
                stream_offset: collection.stream_offset(),
                node_labels: g.labels().to_vec(),
                edges,
            },
            collection,
        }
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet::new(&self.header.params, self.header.node_count, self.header.edge_count)
    }

    pub fn matroid(&self) -> Result<PartitionMatroid> {
        build_matroid(&self.header.params, &self.ground())
    }
}

pub fn write_collection(path: impl AsRef<Path>, file: &RrFile) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    let header = serde_json::to_vec(&file.header).map_err(|e| Error::Corrupt(e.to_string()))?;
    w.write_all(MAGIC)?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(&header)?;
    for set in file.collection.sets() {
        w.write_all(&(set.len() as u32).to_le_bytes())?;
        for &e in set {
            w.write_all(&e.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Corrupt("truncated file".into()),
        _ => Error::Io(e),
    })?;
    Ok(u32::from_le_bytes(b))
}

pub fn read_collection(path: impl AsRef<Path>) -> Result<RrFile> {
    let mut r = BufReader::new(File::open(path.as_ref())?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| Error::Corrupt("missing magic".into()))?;
    if &magic != MAGIC {
        return Err(Error::Corrupt("not an RR collection file".into()));
    }
    let hlen = read_u32(&mut r)? as usize;
    let mut hbytes = vec![0u8; hlen];
    r.read_exact(&mut hbytes).map_err(|_| Error::Corrupt("truncated header".into()))?;
    let header: RrHeader = serde_json::from_slice(&hbytes).map_err(|e| Error::Corrupt(e.to_string()))?;
    let mut coll = RRCollection::new(header.ground_size, header.seed, header.stream_offset);
    let mut set = Vec::new();
    for _ in 0..header.theta {
        let len = read_u32(&mut r)? as usize;
        set.clear();
        for _ in 0..len {
            let e = read_u32(&mut r)?;
            if e as usize >= header.ground_size {
                return Err(Error::Corrupt(format!("element {e} outside ground set of size {}", header.ground_size)));
            }
            set.push(e);
        }
        coll.push(&set);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Corrupt("trailing bytes after last RR set".into()));
    }
    Ok(RrFile { header, collection: coll })
}
