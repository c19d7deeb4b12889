//! Residual products `q_R` of a fractional solution, maintained incrementally.

use crate::instances::RRCollection;
use crate::scalar::Scalar;

/// Per-element factor of the residual product and the matching derivative scale.
///
/// The unweighted objective uses `1 - x`; the adoption-weighted one uses `1 - w_i x`.
pub trait Factors<S: Scalar>: Sync {
    fn factor(&self, i: usize, x: S) -> S;

    /// `-d factor / dx` for element `i`.
    fn scale(&self, i: usize) -> S;
}

/// Plain coverage: factor `1 - x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unit;

impl<S: Scalar> Factors<S> for Unit {
    #[inline(always)]
    fn factor(&self, _i: usize, x: S) -> S {
        S::one() - x
    }

    #[inline(always)]
    fn scale(&self, _i: usize) -> S {
        S::one()
    }
}

/// Adoption-weighted coverage: factor `1 - w_i x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights<S>(pub Vec<S>);

impl<S: Scalar> Factors<S> for Weights<S> {
    #[inline(always)]
    fn factor(&self, i: usize, x: S) -> S {
        S::one() - self.0[i] * x
    }

    #[inline(always)]
    fn scale(&self, i: usize) -> S {
        self.0[i]
    }
}

/// The fractional vector `x` with, per RR set, the product of its factors above
/// `TAU_ZERO` and a record of which members have a factor at or below it.
///
/// Zero factors are tracked as a count plus the sum of their element ids, which is
/// enough to recover the id when exactly one is present. That keeps the leave-one-out
/// derivative exact when a coordinate reaches 1.
#[derive(Debug, Clone)]
pub struct QCache<S, W = Unit> {
    x: Vec<S>,
    prod: Vec<S>,
    zero_count: Vec<u32>,
    zero_sum: Vec<u64>,
    factors: W,
    updates: u64,
}

pub type QCache64 = QCache<f64>;
pub type QCache32 = QCache<f32>;

impl<S: Scalar> QCache<S, Unit> {
    /// Cache for `x = 0` (every `q_R = 1`).
    pub fn new(coll: &RRCollection) -> Self {
        QCache::with_factors(coll, Unit)
    }
}

impl<S: Scalar, W: Factors<S>> QCache<S, W> {
    pub fn with_factors(coll: &RRCollection, factors: W) -> Self {
        QCache {
            x: vec![S::zero(); coll.ground_size()],
            prod: vec![S::one(); coll.len()],
            zero_count: vec![0; coll.len()],
            zero_sum: vec![0; coll.len()],
            factors,
            updates: 0,
        }
    }

    pub fn x(&self) -> &[S] {
        &self.x
    }

    pub fn factors(&self) -> &W {
        &self.factors
    }

    /// Number of coordinate updates applied so far; used to date lazy bounds.
    pub fn updates(&self) -> u64 {
        self.updates
    }

    /// `q_R` of RR set `r`.
    #[inline]
    pub fn q(&self, r: usize) -> S {
        if self.zero_count[r] == 0 {
            self.prod[r]
        } else {
            S::zero()
        }
    }

    /// Replaces factor `factor(i, old)` by `factor(i, new)` in every RR set containing `i`.
    ///
    /// Does not touch the stored coordinate; [`QCache::set`] is the usual entry point.
    pub fn q_update(&mut self, coll: &RRCollection, i: usize, old: S, new: S) {
        let fo = self.factors.factor(i, old);
        let fnew = self.factors.factor(i, new);
        let zo = fo <= S::TAU_ZERO;
        let zn = fnew <= S::TAU_ZERO;
        for &r in coll.containing(i) {
            let r = r as usize;
            if zo {
                self.zero_count[r] -= 1;
                self.zero_sum[r] -= i as u64;
            } else {
                self.prod[r] /= fo;
            }
            if zn {
                self.zero_count[r] += 1;
                self.zero_sum[r] += i as u64;
            } else {
                self.prod[r] *= fnew;
            }
        }
        self.updates += 1;
    }

    /// Sets `x[i] = value` and updates the affected residual products.
    pub fn set(&mut self, coll: &RRCollection, i: usize, value: S) {
        let old = self.x[i];
        self.q_update(coll, i, old, value);
        self.x[i] = value;
    }

    /// Adds `delta` to `x[i]`, clamping to `[0, 1]` to absorb rounding residue.
    pub fn add(&mut self, coll: &RRCollection, i: usize, delta: S) {
        let v = (self.x[i] + delta).max(S::zero()).min(S::one());
        self.set(coll, i, v);
    }

    /// Multilinear extension `F(x) = Σ_R (1 - q_R)`.
    pub fn f_value(&self) -> S {
        (0..self.prod.len()).map(|r| S::one() - self.q(r)).sum()
    }

    /// `∂F/∂x[i]`: the scale of `i` times `Σ_{R∋i} Π_{j∈R, j≠i} factor_j`.
    pub fn derivative(&self, coll: &RRCollection, i: usize) -> S {
        let fi = self.factors.factor(i, self.x[i]);
        let own_zero = fi <= S::TAU_ZERO;
        let mut sum = S::zero();
        for &r in coll.containing(i) {
            let r = r as usize;
            match self.zero_count[r] {
                0 => sum += self.prod[r] / fi,
                1 if own_zero && self.zero_sum[r] == i as u64 => sum += self.prod[r],
                _ => {}
            }
        }
        sum * self.factors.scale(i)
    }

    /// `Σ_{R∋i} q_R`: expected marginal coverage of `i` on top of a random set drawn from `x`.
    pub fn residual_weight(&self, coll: &RRCollection, i: usize) -> S {
        coll.containing(i).iter().map(|&r| self.q(r as usize)).sum()
    }

    /// Fresh product of factors for RR set `r`, ignoring the cache.
    pub fn fresh_q(&self, coll: &RRCollection, r: usize) -> S {
        coll.set(r).iter().fold(S::one(), |acc, &i| acc * self.factors.factor(i as usize, self.x[i as usize]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coll(n: usize, sets: &[&[usize]]) -> RRCollection {
        RRCollection::from_sets(n, sets.iter().copied()).unwrap()
    }

    #[test]
    fn f_examples() {
        let c = coll(2, &[&[0, 1]]);
        let mut q = QCache64::new(&c);
        assert_eq!(q.f_value(), 0.0);
        q.set(&c, 0, 0.5);
        q.set(&c, 1, 0.5);
        assert!((q.f_value() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let c = coll(2, &[&[0], &[0, 1]]);
        let mut q = QCache64::new(&c);
        assert_eq!(q.derivative(&c, 0), 2.0);
        q.set(&c, 0, 1.0);
        // Leave-one-out: set {0,1} still contributes (1 - x[1]) = 1 to element 0.
        assert_eq!(q.derivative(&c, 0), 2.0);
        assert_eq!(q.derivative(&c, 1), 0.0);
        assert_eq!(q.f_value(), 2.0);
    }

    #[test]
    fn update_to_one_zeroes_q() {
        let c = coll(3, &[&[0, 1], &[0, 2], &[1]]);
        let mut q = QCache64::new(&c);
        q.set(&c, 0, 1.0);
        assert_eq!(q.q(0), 0.0);
        assert_eq!(q.q(1), 0.0);
        assert_eq!(q.q(2), 1.0);
        let before: Vec<f64> = (0..3).map(|r| q.q(r)).collect();
        q.set(&c, 1, 0.0);
        assert_eq!(before, (0..3).map(|r| q.q(r)).collect::<Vec<_>>());
    }

    fn drift<S: Scalar>(tol: f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 12;
        let sets: Vec<Vec<usize>> = (0..40).map(|_| (0..n).filter(|_| rng.gen_bool(0.35)).collect()).collect();
        let c = RRCollection::from_sets(n, &sets).unwrap();
        let mut q = QCache::<S>::new(&c);
        for _ in 0..10_000 {
            let i = rng.gen_range(0..n);
            let v = match rng.gen_range(0..4) {
                0 => 1.0,
                1 => 0.0,
                _ => rng.gen::<f64>(),
            };
            q.set(&c, i, S::of(v));
        }
        for r in 0..c.len() {
            assert!((q.q(r).as_f64() - q.fresh_q(&c, r).as_f64()).abs() <= tol, "set {r}");
        }
    }

    #[test]
    fn drift_f64() {
        drift::<f64>(1e-8);
    }

    #[test]
    fn drift_f32() {
        drift::<f32>(1e-3);
    }

    #[test]
    fn weighted_reduces_to_unit() {
        let c = coll(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        let mut a = QCache64::new(&c);
        let mut b = QCache::with_factors(&c, Weights(vec![1.0; 3]));
        for (i, v) in [(0, 0.25), (1, 1.0), (2, 0.5)] {
            a.set(&c, i, v);
            b.set(&c, i, v);
        }
        for i in 0..3 {
            assert_eq!(a.derivative(&c, i), b.derivative(&c, i));
        }
        let z = QCache::with_factors(&c, Weights(vec![0.0; 3]));
        assert_eq!(z.derivative(&c, 1), 0.0);
    }
}
