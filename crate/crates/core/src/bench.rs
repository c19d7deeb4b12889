//! Desk-scale sweeps: solution quality against the number of RR sets, and the sample
//! cost of adaptive sampling against the error tolerance.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{grow_collection, monte_carlo_objective, Instance, InstanceKind, RRCollection};
use crate::ramp::{ramp, rm_a_simplified, RampConfig};
use crate::rng::RngStream;
use crate::selection::{amp, greedy, local_greedy, threshold_greedy, AmpOptions, SearchStrategy, SelectionResult};

/// Element selection algorithm with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algo {
    Greedy,
    Local,
    Threshold { xi: f64 },
    Amp { eps_s: f64 },
    AmpPm { eps_s: f64 },
}

impl Algo {
    pub fn name(&self) -> String {
        match self {
            Algo::Greedy => "greedy".into(),
            Algo::Local => "local".into(),
            Algo::Threshold { xi } => format!("threshold(xi={xi})"),
            Algo::Amp { eps_s } => format!("amp(eps={eps_s})"),
            Algo::AmpPm { eps_s } => format!("amp-pm(eps={eps_s})"),
        }
    }

    pub fn run(&self, inst: &Instance, coll: &RRCollection) -> Result<SelectionResult> {
        let m = inst.matroid();
        match *self {
            Algo::Greedy => greedy(coll, m),
            Algo::Local => local_greedy(coll, m),
            Algo::Threshold { xi } => threshold_greedy(coll, m, xi),
            Algo::Amp { eps_s } => {
                amp::<f64>(coll, m, eps_s, AmpOptions { search: SearchStrategy::General, ..Default::default() })
            }
            Algo::AmpPm { eps_s } => {
                amp::<f64>(coll, m, eps_s, AmpOptions { search: SearchStrategy::Partition, ..Default::default() })
            }
        }
    }
}

impl FromStr for Algo {
    type Err = Error;

    /// `greedy`, `local`, `threshold[:xi]`, `amp[:eps]`, `amp-pm[:eps]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |default: f64| -> Result<f64> {
            arg.map_or(Ok(default), |a| a.parse().map_err(|_| Error::Config(format!("bad parameter in `{s}`"))))
        };
        match name {
            "greedy" => Ok(Algo::Greedy),
            "local" => Ok(Algo::Local),
            "threshold" => Ok(Algo::Threshold { xi: num(crate::selection::DEFAULT_XI)? }),
            "amp" => Ok(Algo::Amp { eps_s: num(0.5)? }),
            "amp-pm" => Ok(Algo::AmpPm { eps_s: num(0.5)? }),
            _ => Err(Error::Config(format!("unknown algorithm `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityRow {
    pub algorithm: String,
    pub theta: usize,
    pub seed: u64,
    pub selected: usize,
    pub coverage: usize,
    pub estimate: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub wall_time_ms: f64,
}

/// One row per `(algo, θ, seed)`, in that nesting order. `sims = 0` skips Monte Carlo.
pub fn run_quality_sweep(
    inst: &Instance,
    algos: &[Algo],
    thetas: &[usize],
    seeds: &[u64],
    sims: usize,
) -> Result<Vec<QualityRow>> {
    let cells: Vec<(usize, usize, u64)> = (0..algos.len())
        .flat_map(|a| thetas.iter().flat_map(move |&t| seeds.iter().map(move |&s| (a, t, s))))
        .collect();
    cells
        .par_iter()
        .map(|&(a, theta, seed)| {
            let mut coll = RRCollection::new(inst.ground().size(), seed, 0);
            grow_collection(inst, &mut coll, theta)?;
            let res = algos[a].run(inst, &coll)?;
            let (mc_mean, mc_stderr) = if sims > 0 {
                let est = monte_carlo_objective(inst, &res.chosen, sims, RngStream::new(seed, 1 << 62))?;
                (est.mean, est.stderr)
            } else {
                (f64::NAN, f64::NAN)
            };
            Ok(QualityRow {
                algorithm: algos[a].name(),
                theta,
                seed,
                selected: res.chosen.len(),
                coverage: res.coverage,
                estimate: inst.kappa() * res.coverage as f64 / theta.max(1) as f64,
                mc_mean,
                mc_stderr,
                wall_time_ms: res.wall_time_ms,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub method: String,
    pub eps: f64,
    pub seed: u64,
    pub rr_sets: u64,
    pub iterations: usize,
    pub ratio: f64,
    pub target_ratio: f64,
    pub wall_time_ms: f64,
}

/// RAMP for every `(ε, seed)`, plus RM-A-Simplified on RM instances where `ε < 1/2`.
pub fn run_scaling_sweep(inst: &Instance, eps_grid: &[f64], seeds: &[u64], delta: f64) -> Result<Vec<ScalingRow>> {
    let with_rma = inst.kind() == InstanceKind::RM;
    let mut cells = Vec::new();
    for &eps in eps_grid {
        for &seed in seeds {
            cells.push((false, eps, seed));
            if with_rma && eps < 0.5 {
                cells.push((true, eps, seed));
            }
        }
    }
    let mode = inst.adv_mode().unwrap_or_default();
    cells
        .par_iter()
        .map(|&(rma, eps, seed)| {
            let rep = if rma {
                rm_a_simplified(inst, eps, delta, seed)?
            } else {
                ramp(inst, &RampConfig { adv_mode: mode, ..RampConfig::new(eps, delta) }, seed)?
            };
            Ok(ScalingRow {
                method: rep.algorithm.clone(),
                eps,
                seed,
                rr_sets: rep.total_rr_sets,
                iterations: rep.iterations_used(),
                ratio: rep.ratio,
                target_ratio: rep.target_ratio,
                wall_time_ms: rep.wall_time_ms,
            })
        })
        .collect()
}

/// Writes rows as CSV with a header row.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algo_names_parse() {
        assert_eq!("amp-pm:0.25".parse::<Algo>().unwrap(), Algo::AmpPm { eps_s: 0.25 });
        assert_eq!("threshold".parse::<Algo>().unwrap(), Algo::Threshold { xi: 0.05 });
        assert!("amp:x".parse::<Algo>().is_err());
        assert!("celf".parse::<Algo>().is_err());
    }

    #[test]
    fn csv_has_header() {
        let rows = vec![ScalingRow {
            method: "ramp".into(),
            eps: 0.5,
            seed: 1,
            rr_sets: 10,
            iterations: 1,
            ratio: 0.4,
            target_ratio: 0.13,
            wall_time_ms: 1.0,
        }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("method,eps,seed,rr_sets,iterations,ratio,target_ratio,wall_time_ms\n"));
        assert_eq!(text.lines().count(), 2);
    }
}
