//! Partial schedules shared by the constructive solvers.

use crate::model::{a1_timetable, relation_set, Assignment, Entity, Instance, JobKind, Schedule, TaskSets, Time};
use crate::validate::{Event, Rules};

pub(crate) struct Context {
    pub sets: TaskSets,
    pub taus: Vec<Time>,
    pub delta: Time,
    pub horizon: Time,
    pub agvs: usize,
    /// Placement order: B1 tasks, then A2 and B2, then B3; ties in canonical
    /// order.
    pub order: Vec<usize>,
    /// Processing plus transport still needed after each task ends, up to
    /// the end of its job's final task.
    pub tail: Vec<Time>,
}

impl Context {
    pub fn new(instance: &Instance) -> Self {
        let sets = relation_set(instance);
        let taus = a1_timetable(instance).slots.iter().map(|s| s.tau).collect();
        let rank = |j: usize| {
            let id = sets.tasks[j].id;
            match id.job {
                JobKind::A => 2,
                JobKind::B => id.stage,
            }
        };
        let mut order: Vec<usize> = (0..sets.len()).collect();
        order.sort_by_key(|&j| (rank(j), j));
        let delta = instance.delta();
        let mut tail = vec![0; sets.len()];
        for j in (0..sets.len()).rev() {
            if let Some(s) = sets.tasks[j].successor {
                tail[j] = delta + sets.tasks[s].processing + tail[s];
            }
        }
        Self { sets, taus, delta, horizon: instance.horizon(), agvs: instance.num_agvs(), order, tail }
    }

    pub fn a1_event(&self, a: usize, pickup: usize) -> Event {
        Event { start: None, end: self.taus[a], delivery: None, pickup, machine: 0 }
    }

    pub fn task_event(&self, j: usize, start: Time, delivery: usize, pickup: usize) -> Event {
        let task = &self.sets.tasks[j];
        Event { start: Some(start), end: start + task.processing, delivery: Some(delivery), pickup, machine: task.machine }
    }

    /// Earliest start allowed by the predecessor, which must already be
    /// placed when it is a task.
    pub fn earliest_start(&self, j: usize, ends: &[Option<Time>]) -> Time {
        match self.sets.tasks[j].predecessor {
            Some(Entity::A1(a)) => self.taus[a] + self.delta,
            Some(Entity::Task(i)) => ends[i].expect("predecessor placed first") + self.delta,
            None => 1,
        }
    }

    /// Lower bound on the final end of the job containing `j` if `j` ends
    /// at `end`.
    pub fn chain_end(&self, j: usize, end: Time) -> Time {
        end + self.tail[j]
    }
}

/// Events placed so far with incremental pairwise checking.
pub(crate) struct Placed<'a> {
    pub rules: Rules<'a>,
    pub events: Vec<(Entity, Event)>,
    pub horizon: Time,
}

impl<'a> Placed<'a> {
    pub fn new(instance: &Instance, ctx: &'a Context) -> Self {
        Self { rules: Rules::new(instance, &ctx.sets), events: Vec::new(), horizon: ctx.horizon }
    }

    pub fn fits(&self, e: Entity, ev: &Event) -> bool {
        ev.end <= self.horizon && self.events.iter().all(|(u, eu)| !self.rules.conflicts(*u, eu, e, ev))
    }

    pub fn push(&mut self, e: Entity, ev: Event) {
        self.events.push((e, ev));
    }

    pub fn pop(&mut self) {
        self.events.pop();
    }

    /// Complete schedule from the placed events.
    pub fn schedule(&self, tasks: usize, a1: usize) -> Schedule {
        let mut out = Schedule {
            tasks: vec![Assignment { start: 0, delivery_agv: 0, pickup_agv: 0 }; tasks],
            a1_pickups: vec![0; a1],
        };
        for (e, ev) in &self.events {
            match *e {
                Entity::A1(a) => out.a1_pickups[a] = ev.pickup,
                Entity::Task(j) => {
                    out.tasks[j] = Assignment {
                        start: ev.start.expect("tasks have starts"),
                        delivery_agv: ev.delivery.expect("tasks have deliveries"),
                        pickup_agv: ev.pickup,
                    }
                }
            }
        }
        out
    }
}
