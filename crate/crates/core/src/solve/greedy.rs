use std::time::Instant;

use crate::model::{Entity, Instance};
use crate::validate::makespan;

use super::partial::{Context, Placed};
use super::SolveResult;

/// First-fit list scheduling.
///
/// A1 pickups take the lowest AGV that fits. Tasks are then placed in stage
/// order (B1; A2 and B2; B3; each in canonical order) at the earliest start,
/// with the first (delivery, pickup) AGV pair that passes every pairwise
/// rule against the tasks already placed. Fails, with the trivial objective,
/// when some task has no slot left in the horizon.
pub fn greedy_schedule(instance: &Instance) -> SolveResult {
    let clock = Instant::now();
    let ctx = Context::new(instance);
    let mut placed = Placed::new(instance, &ctx);
    let mut ends = vec![None; ctx.sets.len()];
    let mut checks = 0u64;

    for a in 0..ctx.taus.len() {
        let fit = (0..ctx.agvs).find(|&k| {
            checks += 1;
            placed.fits(Entity::A1(a), &ctx.a1_event(a, k))
        });
        match fit {
            Some(k) => placed.push(Entity::A1(a), ctx.a1_event(a, k)),
            None => return SolveResult::infeasible(instance, clock.elapsed(), checks, 0),
        }
    }
    for &j in &ctx.order {
        let p = ctx.sets.tasks[j].processing;
        let est = ctx.earliest_start(j, &ends);
        let mut slot = None;
        'search: for start in est..=ctx.horizon.saturating_sub(p) {
            for k1 in 0..ctx.agvs {
                for k2 in 0..ctx.agvs {
                    checks += 1;
                    let ev = ctx.task_event(j, start, k1, k2);
                    if placed.fits(Entity::Task(j), &ev) {
                        slot = Some(ev);
                        break 'search;
                    }
                }
            }
        }
        let Some(ev) = slot else {
            return SolveResult::infeasible(instance, clock.elapsed(), checks, 0);
        };
        ends[j] = Some(ev.end);
        placed.push(Entity::Task(j), ev);
    }

    let schedule = placed.schedule(ctx.sets.len(), ctx.taus.len());
    let objective = makespan(instance, &schedule);
    let runtime = clock.elapsed();
    SolveResult {
        schedule: Some(schedule),
        objective,
        feasible: true,
        proven_optimal: false,
        runtime,
        iterations: checks,
        seed: 0,
        trace: vec![(runtime.as_secs_f64(), objective)],
    }
}
