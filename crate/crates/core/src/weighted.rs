//! Adoption-weighted coverage: each chosen element `i` takes effect with probability `w_i`.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::instances::RRCollection;
use crate::matroid::Matroid;
use crate::scalar::Scalar;
use crate::selection::{amp_with, AmpOptions, QCache, SelectionResult, Weights};

pub type WQCache<S> = QCache<S, Weights<S>>;

/// Per-element adoption probabilities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<S>(Vec<S>);

impl<S: Scalar> WeightVector<S> {
    pub fn new(w: Vec<S>) -> Result<Self> {
        if let Some((i, v)) = w.iter().enumerate().find(|(_, v)| !(**v >= S::zero() && **v <= S::one())) {
            return Err(Error::Validation(format!("weight of element {i} is {v}, outside [0, 1]")));
        }
        Ok(WeightVector(w))
    }

    pub fn ones(n: usize) -> Self {
        WeightVector(vec![S::one(); n])
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<S> {
        self.0
    }

    /// Parses `element_id w` lines (`#` comments allowed); unlisted elements get weight 1.
    pub fn parse<R: BufRead>(reader: R, n: usize) -> Result<Self> {
        let mut w = vec![S::one(); n];
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: lineno + 1, msg };
            let mut it = t.split_whitespace();
            let (Some(id), Some(v), None) = (it.next(), it.next(), it.next()) else {
                return Err(bad("expected `element_id w`".into()));
            };
            let id: usize = id.parse().map_err(|_| bad(format!("invalid element id `{id}`")))?;
            let v: f64 = v.parse().map_err(|_| bad(format!("invalid weight `{v}`")))?;
            if id >= n {
                return Err(Error::OutOfRange { index: id, size: n });
            }
            w[id] = S::of(v);
        }
        WeightVector::new(w)
    }

    pub fn load(path: impl AsRef<Path>, n: usize) -> Result<Self> {
        WeightVector::parse(BufReader::new(File::open(path)?), n)
    }
}

/// `∂F^W/∂x[i] = w_i · Σ_{R∋i} Π_{j∈R, j≠i} (1 - w_j x[j])`.
pub fn weighted_derivative<S: Scalar>(coll: &RRCollection, cache: &WQCache<S>, i: usize) -> S {
    cache.derivative(coll, i)
}

/// Swaps the factor `1 - w_i·old` for `1 - w_i·new` in every RR set containing `i`.
pub fn weighted_q_update<S: Scalar>(coll: &RRCollection, cache: &mut WQCache<S>, i: usize, old: S, new: S) {
    cache.q_update(coll, i, old, new);
}

/// AMP maximizing the weighted coverage `Σ_R (1 - Π_{i∈S∩R} (1 - w_i))`.
pub fn amp_weighted<S: Scalar>(
    coll: &RRCollection,
    m: &dyn Matroid,
    eps_s: f64,
    w: &WeightVector<S>,
    opts: AmpOptions,
) -> Result<SelectionResult> {
    if w.0.len() != coll.ground_size() {
        return Err(Error::contract("one weight per ground element required"));
    }
    let mut res = amp_with(coll, m, eps_s, Weights(w.0.clone()), opts)?;
    res.algorithm = "amp-weighted".into();
    Ok(res)
}
