//! Influence maximization under general matroid constraints.
//!
//! RR-set sampling for several IM-GM instances (IM, revenue maximization, multi-round
//! IM, adversarial IM), continuous-greedy selection with deterministic swap rounding
//! (AMP), the greedy baselines, and the adaptive sampler that decides how many RR sets
//! are enough (RAMP).
//!
//! The selection math is generic over [`Scalar`]; the `*64` / `*32` aliases below fix
//! the precision.

pub mod bench;
pub mod diffusion;
pub mod error;
pub mod graph;
pub mod instances;
pub mod matroid;
pub mod oracle;
pub mod ramp;
pub mod rng;
pub mod scalar;
pub mod selection;
pub mod synth;
pub mod weighted;

pub use diffusion::{DiffusionModel, SpreadEstimate};
pub use error::{Error, Result};
pub use graph::{Edge, Graph, Weighting};
pub use instances::{
    grow_collection, make_instance, monte_carlo_objective, AdvMode, Element, GroundSet, Instance, InstanceKind,
    InstanceParams, RRCollection,
};
pub use matroid::{max_weight_base, Matroid, OracleMatroid, PartitionMatroid};
pub use ramp::{ramp, rm_a_simplified, RampConfig, RampReport};
pub use rng::RngStream;
pub use scalar::Scalar;
pub use selection::{amp, AmpOptions, FractionalSolution, QCache, SearchStrategy, SelectionResult};
pub use weighted::{amp_weighted, WQCache, WeightVector};

pub type QCache64 = selection::QCache64;
pub type QCache32 = selection::QCache32;
pub type FractionalSolution64 = FractionalSolution<f64>;
pub type FractionalSolution32 = FractionalSolution<f32>;
pub type WQCache64 = WQCache<f64>;
pub type WQCache32 = WQCache<f32>;
pub type WeightVector64 = WeightVector<f64>;
pub type WeightVector32 = WeightVector<f32>;
