//! Adaptive RR sampling: grow two independent collections until the selected set
//! provably reaches the target ratio, or the worst-case budget is spent.

use std::f64::consts::E;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{grow_collection, AdvMode, Instance, InstanceKind, InstanceParams, RRCollection};
use crate::selection::{amp, greedy, AmpOptions, SearchStrategy, SelectionResult};

/// First stream index of the second collection; far beyond any reachable sample count.
pub const R2_STREAM_OFFSET: u64 = 1 << 62;

const MAX_STEPS: u32 = 1_000_000;

/// `1 - (1 + ε_s)^(-1/ε_s)`, the AMP guarantee for `ε_s = 1/steps`.
pub fn amp_factor(steps: u32) -> f64 {
    let t = steps as f64;
    1.0 - (1.0 + 1.0 / t).powf(-t)
}

/// `1 - 1/e - ε/2`.
pub fn beta(eps: f64) -> f64 {
    1.0 - 1.0 / E - eps / 2.0
}

/// Largest `ε_s = 1/t` whose AMP guarantee reaches `1 - 1/e - ε/2`.
pub fn derive_eps_s(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0 - 1.0 / E) {
        return Err(Error::Config(format!("ε must lie in (0, 1 - 1/e), got {eps}")));
    }
    let target = beta(eps);
    (1..=MAX_STEPS)
        .find(|&t| amp_factor(t) >= target)
        .map(|t| 1.0 / t as f64)
        .ok_or_else(|| Error::Config(format!("no ε_s = 1/t with t ≤ {MAX_STEPS} reaches the target for ε = {eps}")))
}

/// Worst-case number of RR sets per collection.
pub fn theta_max_formula(kappa: f64, ln_bases: f64, eps: f64, delta: f64, sigma_l: f64) -> Result<u64> {
    let b = beta(eps);
    let l6 = (6.0 / delta).ln();
    let inner = b * l6.sqrt() + (b * (ln_bases + l6)).sqrt();
    to_count(8.0 * kappa * inner * inner / (eps * eps * sigma_l))
}

pub fn theta_max(inst: &Instance, eps: f64, delta: f64) -> Result<u64> {
    if inst.sigma_l_star() < 1.0 {
        return Err(Error::contract("σ^l(S*) must be at least 1"));
    }
    theta_max_formula(inst.theta_kappa(), inst.ln_num_bases(), eps, delta, inst.sigma_l_star())
}

fn to_count(v: f64) -> Result<u64> {
    // Keep 2θ and 4θ representable.
    if !v.is_finite() || v.ceil() >= (1u64 << 61) as f64 {
        return Err(Error::Config(format!("worst-case sample size {v:e} overflows")));
    }
    Ok(v.ceil().max(1.0) as u64)
}

/// High-probability upper bound on the optimum from an upper bound `lambda_u` on its coverage.
pub fn sigma_upper(lambda_u: f64, theta: u64, kappa: f64, p_f: f64) -> f64 {
    let l = -p_f.ln() / 2.0;
    let s = (lambda_u + l).sqrt() + l.sqrt();
    s * s * kappa / theta as f64
}

/// High-probability lower bound on the objective of a set with coverage `lambda`, clamped at 0.
pub fn sigma_lower(lambda: f64, theta: u64, kappa: f64, p_f: f64) -> f64 {
    let ln = p_f.ln();
    let d = (lambda - 2.0 * ln / 9.0).sqrt() - (-ln / 2.0).sqrt();
    if d <= 0.0 {
        return 0.0;
    }
    ((d * d + ln / 18.0) * kappa / theta as f64).max(0.0)
}

#[derive(Debug, Clone, Copy)]
pub struct RampConfig {
    pub eps: f64,
    pub delta: f64,
    /// Use the fractional-solution bound on the optimal coverage instead of `Λ(S)/β`.
    pub tighten_bound: bool,
    /// Must agree with the instance's own mode when the instance is AdvIM.
    pub adv_mode: AdvMode,
    pub search: SearchStrategy,
}

impl RampConfig {
    pub fn new(eps: f64, delta: f64) -> Self {
        RampConfig { eps, delta, tighten_bound: true, adv_mode: AdvMode::EmptyMiss, search: SearchStrategy::Auto }
    }

    fn check(&self, inst: &Instance, eps_max: f64) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < eps_max) {
            return Err(Error::Config(format!("ε must lie in (0, {eps_max:.4}), got {}", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("δ must lie in (0, 1), got {}", self.delta)));
        }
        if let Some(mode) = inst.adv_mode() {
            if mode != self.adv_mode {
                return Err(Error::Config("adv_mode differs from the instance's RR-generation mode".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampIteration {
    pub theta: u64,
    pub coverage_r1: usize,
    pub coverage_r2: usize,
    /// Upper bound on the optimal coverage in `R_1`.
    pub lambda_upper: f64,
    pub sigma_lower: f64,
    pub sigma_upper: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampReport {
    pub algorithm: String,
    pub eps: f64,
    pub delta: f64,
    pub eps_s: Option<f64>,
    pub theta_max: u64,
    pub i_max: u32,
    pub p_f: f64,
    pub target_ratio: f64,
    pub chosen: Vec<usize>,
    pub iterations: Vec<RampIteration>,
    /// `σ^l / σ^u` of the final iteration.
    pub ratio: f64,
    /// RR sets across both collections.
    pub total_rr_sets: u64,
    pub wall_time_ms: f64,
}

impl RampReport {
    pub fn iterations_used(&self) -> usize {
        self.iterations.len()
    }
}

struct Plan {
    algorithm: &'static str,
    theta_max: u64,
    i_max: u32,
    theta_1: u64,
    p_f: f64,
    target: f64,
    /// Jump to `θ_max` on the last iteration.
    fill_last: bool,
}

fn drive(
    inst: &Instance,
    plan: &Plan,
    seed: u64,
    eps: f64,
    delta: f64,
    eps_s: Option<f64>,
    mut select: impl FnMut(&RRCollection) -> Result<(SelectionResult, f64)>,
) -> Result<RampReport> {
    let start = Instant::now();
    let n = inst.ground().size();
    let kappa = inst.kappa();
    let mut r1 = RRCollection::new(n, seed, 0);
    let mut r2 = RRCollection::new(n, seed, R2_STREAM_OFFSET);
    let mut theta = plan.theta_1.min(plan.theta_max);
    let mut iterations = Vec::new();
    let mut chosen = Vec::new();
    for i in 1..=plan.i_max {
        if plan.fill_last && i == plan.i_max {
            theta = plan.theta_max;
        }
        grow_collection(inst, &mut r1, theta as usize)?;
        grow_collection(inst, &mut r2, theta as usize)?;
        let (res, lambda_u) = select(&r1)?;
        let cov2 = r2.coverage(&res.chosen);
        let su = sigma_upper(lambda_u, theta, kappa, plan.p_f);
        let sl = sigma_lower(cov2 as f64, theta, kappa, plan.p_f);
        let ratio = sl / su;
        log::debug!("{} iteration {i}: θ={theta} σl={sl:.4} σu={su:.4} ratio={ratio:.4}", plan.algorithm);
        iterations.push(RampIteration {
            theta,
            coverage_r1: res.coverage,
            coverage_r2: cov2,
            lambda_upper: lambda_u,
            sigma_lower: sl,
            sigma_upper: su,
            ratio,
        });
        chosen = res.chosen;
        if ratio >= plan.target {
            break;
        }
        theta = (theta * 2).min(plan.theta_max);
    }
    let last = iterations.last().expect("at least one iteration");
    Ok(RampReport {
        algorithm: plan.algorithm.into(),
        eps,
        delta,
        eps_s,
        theta_max: plan.theta_max,
        i_max: plan.i_max,
        p_f: plan.p_f,
        target_ratio: plan.target,
        chosen,
        ratio: last.ratio,
        total_rr_sets: (r1.len() + r2.len()) as u64,
        iterations,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Number of doubling rounds, `max(1, ⌈ln κ⌉)`.
pub fn ramp_i_max(kappa: f64) -> u32 {
    kappa.ln().ceil().max(1.0) as u32
}

/// Adaptive sampling around AMP, returning a `(1 - 1/e - ε)`-approximate set w.p. `1 - δ`.
pub fn ramp(inst: &Instance, cfg: &RampConfig, seed: u64) -> Result<RampReport> {
    cfg.check(inst, 1.0 - 1.0 / E)?;
    let eps_s = derive_eps_s(cfg.eps)?;
    let steps = (1.0 / eps_s).round() as u32;
    let theta_max = theta_max(inst, cfg.eps, cfg.delta)?;
    let i_max = ramp_i_max(inst.kappa());
    let theta_1 = theta_max.div_ceil(1u64 << i_max.min(62));
    let plan = Plan {
        algorithm: "ramp",
        theta_max,
        i_max,
        theta_1,
        p_f: cfg.delta / (3.0 * i_max as f64),
        target: 1.0 - 1.0 / E - cfg.eps,
        fill_last: true,
    };
    let opts = AmpOptions { search: cfg.search, track_bound: cfg.tighten_bound, trace_rounding: false };
    let b = beta(cfg.eps);
    let m = inst.matroid();
    drive(inst, &plan, seed, cfg.eps, cfg.delta, Some(eps_s), |r1| {
        let res = amp::<f64>(r1, m, eps_s, opts)?;
        let lambda_u = if cfg.tighten_bound {
            let f_last = *res.f_trace.last().expect("search ran");
            let best = res.bound_trace.iter().copied().fold(f64::INFINITY, f64::min);
            best.min(f_last / amp_factor(steps)).min(r1.len() as f64)
        } else {
            res.coverage as f64 / b
        };
        Ok((res, lambda_u))
    })
}

/// Worst-case sample size of the greedy-based RM baseline.
pub fn rm_a_theta_max(nodes: usize, rounds: usize, eps: f64, delta: f64) -> Result<u64> {
    let n = nodes as f64;
    let l16 = (16.0 / delta).ln();
    let inner = 0.5 * l16.sqrt() + (0.5 * (rounds as f64 * n + l16)).sqrt();
    to_count(2.0 * n / (eps * eps) * inner * inner)
}

/// The greedy-based `(1/2 - ε)` RM baseline: same doubling loop, coarser bounds.
pub fn rm_a_simplified(inst: &Instance, eps: f64, delta: f64, seed: u64) -> Result<RampReport> {
    let InstanceParams::RM { alpha, .. } = inst.params() else {
        return Err(Error::Unsupported(format!("RM-A needs an RM instance, got {:?}", inst.kind())));
    };
    debug_assert_eq!(inst.kind(), InstanceKind::RM);
    let t = alpha.len();
    let cfg = RampConfig::new(eps, delta);
    cfg.check(inst, 0.5)?;
    let theta_max = rm_a_theta_max(inst.graph().node_count(), t, eps, delta)?;
    let i_max = ((theta_max as f64).log2().ceil() as u32).max(1);
    let plan = Plan {
        algorithm: "rm-a-simplified",
        theta_max,
        i_max,
        theta_1: 1,
        p_f: delta / (4.0 * (t as f64 + 2.0) * i_max as f64),
        target: 0.5 - eps,
        fill_last: false,
    };
    let m = inst.matroid();
    drive(inst, &plan, seed, eps, delta, None, |r1| {
        let res = greedy(r1, m)?;
        let lambda_u = 2.0 * res.coverage as f64;
        Ok((res, lambda_u))
    })
}
