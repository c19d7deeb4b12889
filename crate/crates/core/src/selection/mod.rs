//! Element selection on an RR collection: coverage, the multilinear extension and its
//! derivatives, AMP search and rounding, and the greedy baselines.

mod amp;
mod bound;
mod cache;
mod greedy;
mod lazy;

use serde::{Deserialize, Serialize};

pub use amp::{
    amp, amp_round, amp_search, amp_search_pm, amp_with, steps_for, AmpOptions, FractionalSolution, RoundOutcome,
    SearchStrategy,
};
pub use bound::tightened_upper_bound;
pub use cache::{Factors, QCache, QCache32, QCache64, Unit, Weights};
pub use greedy::{greedy, local_greedy, threshold_greedy};

use crate::instances::RRCollection;
use crate::scalar::Scalar;

/// Default threshold decay for [`threshold_greedy`].
pub const DEFAULT_XI: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub algorithm: String,
    pub epsilon: Option<f64>,
    /// Chosen element ids, ascending.
    pub chosen: Vec<usize>,
    /// `Λ(chosen)`.
    pub coverage: usize,
    /// Objective the algorithm optimised, evaluated at `chosen` (weighted coverage for the
    /// weighted variant, plain coverage otherwise).
    pub objective: f64,
    /// `F(x_t)` after each search round, starting with `F(x_0) = 0`.
    pub f_trace: Vec<f64>,
    /// Tightened upper bound after each search round, starting at `x_0`.
    pub bound_trace: Vec<f64>,
    pub rounding_swaps: usize,
    pub rounding_f_trace: Vec<f64>,
    pub wall_time_ms: f64,
}

/// Number of RR sets in `coll` that intersect `set`.
pub fn coverage(coll: &RRCollection, set: &[usize]) -> usize {
    coll.coverage(set)
}

/// `F(x) = Σ_R (1 - q_R)` from the cached residual products.
pub fn multilinear_f<S: Scalar, W: Factors<S>>(cache: &QCache<S, W>) -> S {
    cache.f_value()
}

/// Partial derivative `Σ_{R∋i} Π_{j∈R, j≠i} (1 - x[j])`.
pub fn partial_derivative<S: Scalar, W: Factors<S>>(coll: &RRCollection, cache: &QCache<S, W>, i: usize) -> S {
    cache.derivative(coll, i)
}

/// `Σ_R (1 - Π_{i∈S∩R} (1 - w_i))`: expected coverage when each chosen element is adopted
/// independently with probability `w_i`.
pub fn weighted_coverage<S: Scalar>(coll: &RRCollection, set: &[usize], w: &[S]) -> S {
    let mut miss = vec![S::one(); coll.len()];
    for &i in set {
        for &r in coll.containing(i) {
            miss[r as usize] *= S::one() - w[i];
        }
    }
    miss.into_iter().map(|m| S::one() - m).sum()
}
