use std::time::{Duration, Instant};

use crate::model::{Entity, Instance, JobKind, Schedule, Time};

use super::greedy::greedy_schedule;
use super::partial::{Context, Placed};
use super::SolveResult;

/// Nodes between clock reads.
const CLOCK_EVERY: u64 = 1024;

/// Exact minimum makespan by depth-first search.
///
/// A1 pickups are fixed first, then tasks in stage order. Each task tries
/// starts in ascending order and AGV pairs in index order, where an AGV
/// index may exceed the largest one used so far by at most one (unused AGVs
/// are interchangeable). Partial schedules whose job-chain bound cannot beat
/// the incumbent are cut. The greedy schedule seeds the bound, and among
/// optimal schedules the first one reached in search order is returned.
///
/// If the search finishes within `budget` seconds the result is
/// `proven_optimal`; otherwise the incumbent is returned as is. When no
/// schedule fits the horizon the result is infeasible with the trivial
/// objective.
pub fn brute_force(instance: &Instance, budget: f64) -> SolveResult {
    let clock = Instant::now();
    let deadline = clock + Duration::from_secs_f64(budget.max(0.0));
    let ctx = Context::new(instance);
    let greedy = greedy_schedule(instance);
    let mut search = Search {
        ctx: &ctx,
        placed: Placed::new(instance, &ctx),
        ends: vec![None; ctx.sets.len()],
        job_bound: Vec::new(),
        max_agv: None,
        // Accept anything no worse than the greedy makespan; afterwards only
        // strict improvements.
        bound: if greedy.feasible { greedy.objective + 1 } else { u64::MAX },
        best: None,
        nodes: 0,
        deadline,
        timed_out: false,
        clock,
        trace: Vec::new(),
    };
    search.init_job_bounds();

    if ctx.sets.is_empty() && ctx.taus.is_empty() {
        search.best = Some(Schedule::default());
    } else if ctx.taus.iter().all(|&tau| tau <= ctx.horizon) {
        search.a1(0);
    }
    let runtime = clock.elapsed();
    let Some(schedule) = search.best else {
        return SolveResult::infeasible(instance, runtime, search.nodes, 0);
    };
    let objective = crate::validate::makespan(instance, &schedule);
    SolveResult {
        schedule: Some(schedule),
        objective,
        feasible: true,
        proven_optimal: !search.timed_out,
        runtime,
        iterations: search.nodes,
        seed: 0,
        trace: search.trace,
    }
}

struct Search<'a> {
    ctx: &'a Context,
    placed: Placed<'a>,
    ends: Vec<Option<Time>>,
    /// Lower bound on each job's final end; A-jobs first, then B-jobs.
    job_bound: Vec<Time>,
    max_agv: Option<usize>,
    bound: u64,
    best: Option<Schedule>,
    nodes: u64,
    deadline: Instant,
    timed_out: bool,
    clock: Instant,
    trace: Vec<(f64, u64)>,
}

impl Search<'_> {
    fn init_job_bounds(&mut self) {
        let ctx = self.ctx;
        let mut bounds = Vec::new();
        for (j, task) in ctx.sets.tasks.iter().enumerate() {
            // Heads of chains: A2 tasks and B1 tasks.
            if !matches!(task.predecessor, Some(Entity::Task(_))) {
                let est = ctx.earliest_start(j, &self.ends);
                bounds.push(ctx.chain_end(j, est + task.processing));
            }
        }
        self.job_bound = bounds;
    }

    /// Index into `job_bound` of the job containing task `j`.
    fn job_of(&self, j: usize) -> usize {
        let id = self.ctx.sets.tasks[j].id;
        match id.job {
            JobKind::A => id.index,
            JobKind::B => self.ctx.taus.len() + id.index,
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes % CLOCK_EVERY == 0 && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn agv_choices(&self, extra: Option<usize>) -> usize {
        let used = match (self.max_agv, extra) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        used.map_or(1, |m| m + 2).min(self.ctx.agvs)
    }

    fn a1(&mut self, a: usize) {
        if a == self.ctx.taus.len() {
            self.task(0);
            return;
        }
        let saved = self.max_agv;
        for k in 0..self.agv_choices(None) {
            if self.tick() {
                return;
            }
            let ev = self.ctx.a1_event(a, k);
            if !self.placed.fits(Entity::A1(a), &ev) {
                continue;
            }
            self.placed.push(Entity::A1(a), ev);
            self.max_agv = Some(saved.map_or(k, |m| m.max(k)));
            self.a1(a + 1);
            self.max_agv = saved;
            self.placed.pop();
        }
    }

    fn task(&mut self, depth: usize) {
        let ctx = self.ctx;
        if depth == ctx.order.len() {
            self.leaf();
            return;
        }
        let j = ctx.order[depth];
        let p = ctx.sets.tasks[j].processing;
        let delta = u64::from(ctx.delta);
        let job = self.job_of(j);
        let others = self
            .job_bound
            .iter()
            .enumerate()
            .filter(|&(b, _)| b != job)
            .map(|(_, &v)| v)
            .max()
            .unwrap_or(0);
        if u64::from(others) + delta >= self.bound {
            return;
        }
        let est = ctx.earliest_start(j, &self.ends);
        let saved_bound = self.job_bound[job];
        let saved_agv = self.max_agv;
        for start in est..=ctx.horizon {
            if start + p > ctx.horizon {
                break;
            }
            let chain = ctx.chain_end(j, start + p);
            if u64::from(chain.max(others)) + delta >= self.bound {
                break;
            }
            for k1 in 0..self.agv_choices(None) {
                for k2 in 0..self.agv_choices(Some(k1)) {
                    if self.tick() {
                        return;
                    }
                    let ev = ctx.task_event(j, start, k1, k2);
                    if !self.placed.fits(Entity::Task(j), &ev) {
                        continue;
                    }
                    self.placed.push(Entity::Task(j), ev);
                    self.ends[j] = Some(start + p);
                    self.job_bound[job] = chain;
                    self.max_agv = Some(saved_agv.map_or(k1.max(k2), |m| m.max(k1).max(k2)));
                    self.task(depth + 1);
                    self.max_agv = saved_agv;
                    self.job_bound[job] = saved_bound;
                    self.ends[j] = None;
                    self.placed.pop();
                    if self.timed_out {
                        return;
                    }
                    // The bound may have tightened below this start.
                    if u64::from(chain.max(others)) + delta >= self.bound {
                        return;
                    }
                }
            }
        }
    }

    fn leaf(&mut self) {
        let ctx = self.ctx;
        let last = ctx.sets.final_tasks().filter_map(|j| self.ends[j]).max().unwrap_or(0);
        let objective = if ctx.sets.is_empty() { 0 } else { u64::from(last) + u64::from(ctx.delta) };
        if objective < self.bound {
            self.bound = objective;
            self.best = Some(self.placed.schedule(ctx.sets.len(), ctx.taus.len()));
            self.trace.push((self.clock.elapsed().as_secs_f64(), objective));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate_schedule;

    #[test]
    fn single_a_job() {
        let inst = Instance::new(1, 1, 10, vec![[1, 1]], vec![]).unwrap();
        let res = brute_force(&inst, 10.0);
        assert!(res.feasible && res.proven_optimal);
        assert_eq!(res.objective, 5);
        assert!(validate_schedule(&inst, res.schedule.as_ref().unwrap()).unwrap().is_empty());
    }

    #[test]
    fn horizon_too_short() {
        let inst = Instance::new(1, 1, 3, vec![], vec![[1, 1, 1]]).unwrap();
        let res = brute_force(&inst, 10.0);
        assert!(!res.feasible && res.schedule.is_none());
        assert_eq!(res.objective, 9);
    }
}
