use super::cache::{Factors, QCache};
use crate::instances::RRCollection;
use crate::matroid::{max_weight_base, Matroid};
use crate::scalar::Scalar;

/// `F(x) + max_{S∈I} Σ_{i∈S} Σ_{R∋i} q_R`, an upper bound on the optimal coverage for any `x`.
///
/// `f_current` is `F(x)` for the state held by `cache`.
pub fn tightened_upper_bound<S: Scalar, W: Factors<S>>(
    coll: &RRCollection,
    m: &dyn Matroid,
    cache: &QCache<S, W>,
    f_current: S,
) -> S {
    let weights: Vec<S> = (0..coll.ground_size()).map(|i| cache.residual_weight(coll, i)).collect();
    let base = max_weight_base(m, &weights);
    f_current + base.iter().map(|&i| weights[i]).sum::<S>()
}
