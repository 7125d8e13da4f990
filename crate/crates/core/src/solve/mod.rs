//! Native solvers: exhaustive search, a greedy constructor and simulated
//! annealing on the compiled QUBO.

mod anneal;
mod brute;
mod greedy;
mod partial;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{trivial_makespan, Instance, Schedule};
use crate::qcbo::{build_qcbo, decode_qcbo_solution, default_penalty, to_qubo};
use crate::validate::{is_feasible, makespan, schedule_value};

pub use anneal::{anneal_qubo, AnnealOutcome, AnnealParams, Annealer, TracePoint};
pub use brute::brute_force;
pub use greedy::greedy_schedule;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub schedule: Option<Schedule>,
    /// Makespan of `schedule` when feasible, otherwise the trivial makespan.
    pub objective: u64,
    pub feasible: bool,
    pub proven_optimal: bool,
    /// Wall-clock seconds; excluded from equality by callers that compare
    /// runs.
    pub runtime: Duration,
    pub iterations: u64,
    pub seed: u64,
    /// Improvements of the incumbent as (seconds since start, objective).
    pub trace: Vec<(f64, u64)>,
}

impl SolveResult {
    /// Result without a usable schedule: trivial objective, not feasible.
    pub(crate) fn infeasible(instance: &Instance, runtime: Duration, iterations: u64, seed: u64) -> Self {
        Self {
            schedule: None,
            objective: trivial_makespan(instance),
            feasible: false,
            proven_optimal: false,
            runtime,
            iterations,
            seed,
            trace: Vec::new(),
        }
    }

    /// JSON form written by the `solve` command.
    pub fn to_json(&self, instance: &Instance) -> serde_json::Value {
        serde_json::json!({
            "schedule": self.schedule.as_ref().map(|s| schedule_value(instance, s)),
            "objective": self.objective,
            "feasible": self.feasible,
            "proven_optimal": self.proven_optimal,
            "runtime": self.runtime.as_secs_f64(),
            "iterations": self.iterations,
            "seed": self.seed,
            "trace": self.trace,
        })
    }

    /// Everything except the wall-clock fields, for determinism checks.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.schedule == other.schedule
            && self.objective == other.objective
            && self.feasible == other.feasible
            && self.proven_optimal == other.proven_optimal
            && self.iterations == other.iterations
            && self.seed == other.seed
            && self.trace.iter().map(|p| p.1).eq(other.trace.iter().map(|p| p.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Greedy,
    Anneal,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Greedy => "greedy",
            Method::Anneal => "anneal",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Method::Brute),
            "greedy" => Ok(Method::Greedy),
            "anneal" => Ok(Method::Anneal),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// Tuning for [`solve_instance_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Sweeps per annealing restart.
    pub sweeps: usize,
    /// Stop annealing after this many restarts even if budget remains.
    pub max_restarts: Option<usize>,
    /// QUBO penalty; defaults to `|T| + δ + 1`.
    pub penalty: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { sweeps: 1000, max_restarts: None, penalty: None }
    }
}

pub fn solve_instance(instance: &Instance, method: Method, budget: f64, seed: u64) -> Result<SolveResult> {
    solve_instance_with(instance, method, budget, seed, &SolveOptions::default())
}

/// Runs one method under a wall-clock budget in seconds.
///
/// The annealer builds the QCBO, compiles it at the configured penalty and
/// runs restarts until the budget (or `max_restarts`) is used up. A best bit
/// vector that does not decode, or decodes to a schedule the validator
/// rejects, yields an infeasible result with the trivial objective.
pub fn solve_instance_with(
    instance: &Instance,
    method: Method,
    budget: f64,
    seed: u64,
    options: &SolveOptions,
) -> Result<SolveResult> {
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::Config(format!("budget must be positive, got {budget}")));
    }
    match method {
        Method::Brute => Ok(SolveResult { seed, ..brute_force(instance, budget) }),
        Method::Greedy => Ok(SolveResult { seed, ..greedy_schedule(instance) }),
        Method::Anneal => anneal_instance(instance, budget, seed, options),
    }
}

fn anneal_instance(instance: &Instance, budget: f64, seed: u64, options: &SolveOptions) -> Result<SolveResult> {
    let clock = Instant::now();
    let deadline = clock + Duration::from_secs_f64(budget);
    let penalty = options.penalty.unwrap_or_else(|| default_penalty(instance));
    let qubo = to_qubo(&build_qcbo(instance)?, penalty)?;
    let params = AnnealParams::auto(&qubo, options.sweeps, 1, seed);
    let mut annealer = Annealer::new(&qubo, &params)?;
    let cap = options.max_restarts.unwrap_or(usize::MAX);
    while annealer.restarts_done() < cap && Instant::now() < deadline {
        annealer.restart(Some(deadline));
    }
    let outcome = annealer.finish();
    let iterations = outcome.trace.len() as u64;
    let trivial = trivial_makespan(instance);
    // Energies at or below |T| + δ come from feasible bit vectors; their
    // value bounds the decoded makespan from above.
    let limit = f64::from(instance.horizon()) + f64::from(instance.delta());
    let mut trace: Vec<(f64, u64)> = Vec::new();
    for p in &outcome.trace {
        let obj = if penalty >= limit + 1.0 && p.energy <= limit { p.energy as u64 } else { trivial };
        if trace.last().is_none_or(|&(_, best)| obj < best) {
            trace.push((p.seconds, obj));
        }
    }
    let runtime = clock.elapsed();
    let schedule = match decode_qcbo_solution(instance, &outcome.bits) {
        Ok(s) if is_feasible(instance, &s)? => s,
        _ => {
            let mut res = SolveResult::infeasible(instance, runtime, iterations, seed);
            res.trace = trace;
            return Ok(res);
        }
    };
    let objective = makespan(instance, &schedule);
    if trace.last().is_none_or(|&(_, best)| objective < best) {
        trace.push((runtime.as_secs_f64(), objective));
    }
    Ok(SolveResult {
        schedule: Some(schedule),
        objective,
        feasible: true,
        proven_optimal: false,
        runtime,
        iterations,
        seed,
        trace,
    })
}
