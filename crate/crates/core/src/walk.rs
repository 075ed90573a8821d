//! First-passage models of solving as a walk toward the solved state.
//!
//! A solver at distance `d` steps inward with probability `p_f` and
//! outward otherwise. The drift `μ = 2 p_f - 1` gives the boundary-free
//! expectation `r0 / μ`; the simulations add the reflecting wall at the
//! diameter and, for the 2-cube, the real neighbor structure.

use std::collections::BTreeMap;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::DistanceTable;
use crate::cube::POCKET_STATES;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::rng;

pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

/// Boundary-free expected hitting time `r0 / (2 p_f - 1)`.
///
/// Ignores the reflecting wall at the diameter, so it underestimates when
/// `p_f` is close to one half.
pub fn expected_fpt<T: Real>(r0: T, p_f: T) -> Result<T> {
    let half = T::lit(0.5);
    if !(p_f > half && p_f <= T::one()) {
        return Err(Error::InvalidParameter(format!("p_f = {p_f}: drift is non-positive, r0/(2p_f-1) undefined")));
    }
    Ok(r0 / (T::lit(2.0) * p_f - T::one()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct WalkParams<T> {
    pub p_f: T,
    pub r0: u32,
    /// Diameter G; the chain reflects there.
    pub diameter: u32,
    pub trials: usize,
    pub seed: u64,
}

impl<T: Real> WalkParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_f > T::zero() && self.p_f <= T::one()) {
            return Err(Error::InvalidParameter(format!("p_f = {} outside (0, 1]", self.p_f)));
        }
        if self.r0 > self.diameter {
            return Err(Error::InvalidParameter(format!(
                "start distance {} beyond diameter {}",
                self.r0, self.diameter
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be positive".into()));
        }
        Ok(())
    }
}

/// Hitting-time statistics. Truncated trials enter the mean and histogram
/// at the step cap, so the mean is a lower bound when `truncated > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct WalkOutcome<T> {
    pub trials: usize,
    pub mean_steps: T,
    pub std_steps: T,
    /// Steps → number of trials.
    pub histogram: BTreeMap<u64, u64>,
    pub truncated: usize,
    /// Mean starting distance over trials.
    pub mean_start: T,
}

impl<T: Real> WalkOutcome<T> {
    fn from_trials(trials: &[(u64, u32)], cap: u64) -> WalkOutcome<T> {
        let n = trials.len() as f64;
        let mean = trials.iter().map(|&(s, _)| s as f64).sum::<f64>() / n;
        let var = if trials.len() > 1 {
            trials.iter().map(|&(s, _)| (s as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let mut histogram = BTreeMap::new();
        for &(s, _) in trials {
            *histogram.entry(s).or_insert(0) += 1;
        }
        WalkOutcome {
            trials: trials.len(),
            mean_steps: T::lit(mean),
            std_steps: T::lit(var.sqrt()),
            histogram,
            truncated: trials.iter().filter(|&&(s, _)| s >= cap).count(),
            mean_start: T::lit(trials.iter().map(|&(_, d)| d as f64).sum::<f64>() / n),
        }
    }

    /// `steps,count` lines with header.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("steps,count\n");
        for (s, c) in &self.histogram {
            out.push_str(&format!("{s},{c}\n"));
        }
        out
    }

    /// JSON report; the histogram is embedded as CSV text.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "trials": self.trials,
            "mean_steps": self.mean_steps.as_f64(),
            "std_steps": self.std_steps.as_f64(),
            "truncated": self.truncated,
            "mean_start": self.mean_start.as_f64(),
            "histogram_csv": self.histogram_csv(),
        })
    }
}

/// Birth–death chain on `0..=G`: inward with probability `p_f`, forced
/// inward at `G`, absorbed at 0. Trial `i` draws from
/// `rng::split_seed(seed, i)`, so results do not depend on thread count.
pub fn simulate_chain<T: Real>(params: &WalkParams<T>, step_cap: u64) -> Result<WalkOutcome<T>> {
    params.validate()?;
    let p = params.p_f.as_f64();
    let g = params.diameter;
    let trials: Vec<(u64, u32)> = (0..params.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::sub_rng(params.seed, i);
            let mut d = params.r0;
            let mut steps = 0u64;
            while d > 0 && steps < step_cap {
                if d == g || p >= 1.0 || r.random::<f64>() < p {
                    d -= 1;
                } else {
                    d += 1;
                }
                steps += 1;
            }
            (steps, params.r0)
        })
        .collect();
    Ok(WalkOutcome::from_trials(&trials, step_cap))
}

/// Walk on the 2-cube Cayley graph from uniformly random starts.
///
/// With probability `p_f` the next state is drawn uniformly from strictly
/// closer neighbors; otherwise from neighbors at equal or larger distance,
/// falling back to all neighbors if there are none. Lateral moves thus
/// count as backward.
pub fn simulate_cayley_walk<T: Real>(
    p_f: T,
    trials: usize,
    seed: u64,
    table: &DistanceTable,
    step_cap: u64,
) -> Result<WalkOutcome<T>> {
    if !(p_f > T::zero() && p_f <= T::one()) {
        return Err(Error::InvalidParameter(format!("p_f = {p_f} outside (0, 1]")));
    }
    if table.len() != POCKET_STATES {
        return Err(Error::InvalidParameter("distance table is incomplete".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let p = p_f.as_f64();
    let results: Vec<(u64, u32)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::sub_rng(seed, i);
            let mut s = r.random_range(0..POCKET_STATES as u32);
            let start = table.distance(s) as u32;
            let mut steps = 0u64;
            let mut inward = [0u32; 9];
            let mut outward = [0u32; 9];
            while table.distance(s) > 0 && steps < step_cap {
                let d = table.distance(s);
                let nbrs = table.neighbors(s);
                let (mut ni, mut no) = (0, 0);
                for &t in &nbrs {
                    if table.distance(t) < d {
                        inward[ni] = t;
                        ni += 1;
                    } else {
                        outward[no] = t;
                        no += 1;
                    }
                }
                assert!(ni > 0, "state at distance {d} has no closer neighbor");
                let forward = p >= 1.0 || r.random::<f64>() < p;
                s = if forward {
                    inward[r.random_range(0..ni)]
                } else if no > 0 {
                    outward[r.random_range(0..no)]
                } else {
                    nbrs[r.random_range(0..nbrs.len())]
                };
                steps += 1;
            }
            (steps, start)
        })
        .collect();
    Ok(WalkOutcome::from_trials(&results, step_cap))
}
