//! Schedule feasibility and makespan.
//!
//! The rules here restate the QCBO constraints directly over a [`Schedule`],
//! so a schedule is accepted exactly when its QCBO encoding violates nothing.
//! Intervals are half-open: two tasks may abut on a machine, and two starts
//! on the same AGV exactly `2δ` apart are legal.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    a1_timetable, relation_set, Entity, Instance, JobKind, Schedule, TaskId, TaskSets, Time,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Horizon,
    MachineOverlap,
    Precedence,
    AgvStartStart,
    AgvEndEnd,
    AgvStartEnd,
    AgvEndStart,
    HandoffMargin,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::Horizon,
        Rule::MachineOverlap,
        Rule::Precedence,
        Rule::AgvStartStart,
        Rule::AgvEndEnd,
        Rule::AgvStartEnd,
        Rule::AgvEndStart,
        Rule::HandoffMargin,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Rule::Horizon => "horizon",
            Rule::MachineOverlap => "machine_overlap",
            Rule::Precedence => "precedence",
            Rule::AgvStartStart => "agv_start_start",
            Rule::AgvEndEnd => "agv_end_end",
            Rule::AgvStartEnd => "agv_start_end",
            Rule::AgvEndStart => "agv_end_start",
            Rule::HandoffMargin => "handoff_margin",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub tasks: Vec<TaskId>,
    pub times: Vec<Time>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}

/// The transport events of one task as seen by the pairwise rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Event {
    /// `None` for A1 tasks, which are never delivered.
    pub start: Option<Time>,
    pub end: Time,
    pub delivery: Option<usize>,
    pub pickup: usize,
    /// 0 for A1 tasks.
    pub machine: u8,
}

/// Pairwise rule evaluation shared by the validator and the native solvers.
pub(crate) struct Rules<'a> {
    pub sets: &'a TaskSets,
    pub delta: i64,
}

impl<'a> Rules<'a> {
    pub fn new(instance: &Instance, sets: &'a TaskSets) -> Self {
        Self { sets, delta: i64::from(instance.delta()) }
    }

    fn related(&self, pred: Entity, succ: Entity) -> bool {
        match succ {
            Entity::Task(j) => self.sets.is_relation(pred, j),
            Entity::A1(_) => false,
        }
    }

    /// Visits every rule broken by the unordered pair `{u, v}`.
    pub fn check_pair(
        &self,
        u: Entity,
        eu: &Event,
        v: Entity,
        ev: &Event,
        sink: &mut impl FnMut(Rule, [Entity; 2], [Time; 2]),
    ) {
        let two = 2 * self.delta;
        if let (Some(su), Some(sv)) = (eu.start, ev.start) {
            if eu.machine == ev.machine && su < ev.end && sv < eu.end {
                sink(Rule::MachineOverlap, [u, v], [su, sv]);
            }
            if eu.delivery == ev.delivery && (i64::from(su) - i64::from(sv)).abs() < two {
                sink(Rule::AgvStartStart, [u, v], [su, sv]);
            }
        }
        if eu.pickup == ev.pickup && (i64::from(eu.end) - i64::from(ev.end)).abs() < two {
            sink(Rule::AgvEndEnd, [u, v], [eu.end, ev.end]);
        }
        self.directed(u, eu, v, ev, sink);
        self.directed(v, ev, u, eu, sink);
    }

    /// Rules between the end of `ender` and the start of `starter`.
    fn directed(
        &self,
        ender: Entity,
        ee: &Event,
        starter: Entity,
        es: &Event,
        sink: &mut impl FnMut(Rule, [Entity; 2], [Time; 2]),
    ) {
        let Some(start) = es.start else { return };
        let delivery = es.delivery.expect("started tasks have a delivery AGV");
        let gap = i64::from(start) - i64::from(ee.end);
        let two = 2 * self.delta;
        let related = self.related(ender, starter);
        let times = [ee.end, start];

        if related && gap < self.delta {
            sink(Rule::Precedence, [ender, starter], times);
        }
        // Start of `starter` followed by the end of `ender` within 2δ.
        if delivery == ee.pickup && (0..two).contains(&-gap) {
            sink(Rule::AgvStartEnd, [starter, ender], [start, ee.end]);
        }
        if ee.pickup == delivery {
            let margin = if related { self.delta } else { two };
            if (0..margin).contains(&gap) {
                sink(Rule::AgvEndStart, [ender, starter], times);
            }
        } else if related && gap < two {
            sink(Rule::HandoffMargin, [ender, starter], times);
        }
    }

    /// Whether the pair breaks any rule.
    pub fn conflicts(&self, u: Entity, eu: &Event, v: Entity, ev: &Event) -> bool {
        let mut hit = false;
        self.check_pair(u, eu, v, ev, &mut |_, _, _| hit = true);
        hit
    }
}

/// All events of a complete schedule, A1 tasks first.
pub(crate) fn events(
    instance: &Instance,
    sets: &TaskSets,
    schedule: &Schedule,
) -> Vec<(Entity, Event)> {
    let timetable = a1_timetable(instance);
    let mut out = Vec::with_capacity(sets.a1.len() + sets.len());
    for (a, &pickup) in schedule.a1_pickups.iter().enumerate() {
        let ev = Event { start: None, end: timetable.tau(a), delivery: None, pickup, machine: 0 };
        out.push((Entity::A1(a), ev));
    }
    for (j, (task, asg)) in sets.tasks.iter().zip(&schedule.tasks).enumerate() {
        let ev = Event {
            start: Some(asg.start),
            end: asg.start + task.processing,
            delivery: Some(asg.delivery_agv),
            pickup: asg.pickup_agv,
            machine: task.machine,
        };
        out.push((Entity::Task(j), ev));
    }
    out
}

pub(crate) fn entity_id(sets: &TaskSets, e: Entity) -> TaskId {
    match e {
        Entity::Task(j) => sets.tasks[j].id,
        Entity::A1(a) => sets.a1[a],
    }
}

/// Returns every rule violation of `schedule`; an empty list means feasible.
///
/// Fails with an input error when the schedule does not fit the instance's
/// shape (wrong task count, start outside the horizon, unknown AGV).
pub fn validate_schedule(instance: &Instance, schedule: &Schedule) -> Result<Vec<Violation>> {
    let sets = relation_set(instance);
    schedule.check_shape(instance, &sets)?;
    let rules = Rules::new(instance, &sets);
    let evs = events(instance, &sets, schedule);
    let mut out = Vec::new();

    for &(e, ev) in &evs {
        if ev.end > instance.horizon() {
            let id = entity_id(&sets, e);
            out.push(Violation {
                rule: Rule::Horizon,
                tasks: vec![id],
                times: vec![ev.end],
                detail: format!("{id} ends at {} after horizon {}", ev.end, instance.horizon()),
            });
        }
    }
    for (n, &(u, eu)) in evs.iter().enumerate() {
        for &(v, ev) in &evs[n + 1..] {
            rules.check_pair(u, &eu, v, &ev, &mut |rule, pair, times| {
                let ids = pair.map(|e| entity_id(&sets, e));
                out.push(Violation {
                    rule,
                    tasks: ids.to_vec(),
                    times: times.to_vec(),
                    detail: format!("{} at {} vs {} at {}", ids[0], times[0], ids[1], times[1]),
                });
            });
        }
    }
    Ok(out)
}

pub fn is_feasible(instance: &Instance, schedule: &Schedule) -> Result<bool> {
    validate_schedule(instance, schedule).map(|v| v.is_empty())
}

/// Latest end of an A2 or B3 task plus the final transport leg; 0 when the
/// instance has no jobs.
pub fn makespan(instance: &Instance, schedule: &Schedule) -> u64 {
    let sets = relation_set(instance);
    makespan_with(instance, &sets, schedule)
}

pub(crate) fn makespan_with(instance: &Instance, sets: &TaskSets, schedule: &Schedule) -> u64 {
    sets.final_tasks()
        .map(|j| u64::from(schedule.end(sets, j)))
        .max()
        .map_or(0, |end| end + u64::from(instance.delta()))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskEntry {
    job: JobKind,
    index: usize,
    stage: u8,
    start: Time,
    delivery_agv: usize,
    pickup_agv: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    tasks: Vec<TaskEntry>,
    a1_pickups: Vec<usize>,
}

/// Serializes a schedule as `{"tasks": [...], "a1_pickups": [...]}`, tasks in
/// canonical order.
pub fn write_schedule(instance: &Instance, schedule: &Schedule) -> String {
    let sets = relation_set(instance);
    serde_json::to_string_pretty(&schedule_doc(&sets, schedule)).expect("schedule serializes")
}

pub(crate) fn schedule_value(instance: &Instance, schedule: &Schedule) -> serde_json::Value {
    let sets = relation_set(instance);
    serde_json::to_value(schedule_doc(&sets, schedule)).expect("schedule serializes")
}

fn schedule_doc(sets: &TaskSets, schedule: &Schedule) -> ScheduleDoc {
    let tasks = sets
        .tasks
        .iter()
        .zip(&schedule.tasks)
        .map(|(t, a)| TaskEntry {
            job: t.id.job,
            index: t.id.index,
            stage: t.id.stage,
            start: a.start,
            delivery_agv: a.delivery_agv,
            pickup_agv: a.pickup_agv,
        })
        .collect();
    ScheduleDoc { tasks, a1_pickups: schedule.a1_pickups.clone() }
}

/// Parses a schedule document. Tasks may appear in any order but every task
/// of `J` must appear exactly once.
pub fn read_schedule(instance: &Instance, text: &str) -> Result<Schedule> {
    let doc: ScheduleDoc = serde_json::from_str(text)
        .map_err(|e| Error::Parse { field: "schedule".into(), message: e.to_string() })?;
    schedule_from_doc(instance, doc)
}

fn schedule_from_doc(instance: &Instance, doc: ScheduleDoc) -> Result<Schedule> {
    let sets = relation_set(instance);
    let mut slots = vec![None; sets.len()];
    for (n, e) in doc.tasks.iter().enumerate() {
        let id = TaskId::new(e.job, e.index, e.stage)
            .map_err(|err| Error::Parse { field: format!("tasks[{n}]"), message: err.to_string() })?;
        let j = sets.position(id).ok_or_else(|| Error::Parse {
            field: format!("tasks[{n}]"),
            message: format!("{id} is not a schedulable task of this instance"),
        })?;
        if slots[j].is_some() {
            return Err(Error::Parse { field: format!("tasks[{n}]"), message: format!("{id} listed twice") });
        }
        slots[j] = Some(crate::model::Assignment {
            start: e.start,
            delivery_agv: e.delivery_agv,
            pickup_agv: e.pickup_agv,
        });
    }
    let tasks = slots
        .into_iter()
        .enumerate()
        .map(|(j, s)| {
            s.ok_or_else(|| Error::Parse {
                field: "tasks".into(),
                message: format!("missing entry for {}", sets.tasks[j].id),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Schedule { tasks, a1_pickups: doc.a1_pickups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Assignment;

    fn asg(start: Time, d: usize, p: usize) -> Assignment {
        Assignment { start, delivery_agv: d, pickup_agv: p }
    }

    fn rules_of(v: &[Violation]) -> Vec<Rule> {
        let mut r: Vec<_> = v.iter().map(|v| v.rule).collect();
        r.sort();
        r.dedup();
        r
    }

    #[test]
    fn single_a_job_minimal_schedule() {
        // A1 on [1,2), pickup at 2; A2 delivered at τ + δ = 3, ends 4.
        let inst = Instance::new(1, 1, 10, vec![[1, 1]], vec![]).unwrap();
        let s = Schedule { tasks: vec![asg(3, 0, 0)], a1_pickups: vec![0] };
        assert!(validate_schedule(&inst, &s).unwrap().is_empty());
        assert_eq!(makespan(&inst, &s), 5);

        let early = Schedule { tasks: vec![asg(2, 0, 0)], a1_pickups: vec![0] };
        let v = validate_schedule(&inst, &early).unwrap();
        assert!(rules_of(&v).contains(&Rule::Precedence));
    }

    #[test]
    fn direct_transfer_needs_one_leg_on_same_agv() {
        let inst = Instance::new(2, 2, 40, vec![], vec![[3, 3, 3]]).unwrap();
        // B1 [1,4), B2 starts at 4 + δ = 6 on the AGV that picked B1 up.
        let same = Schedule { tasks: vec![asg(1, 0, 1), asg(6, 1, 0), asg(13, 1, 0)], a1_pickups: vec![] };
        assert_eq!(validate_schedule(&inst, &same).unwrap(), vec![]);

        let handoff = Schedule { tasks: vec![asg(1, 0, 1), asg(6, 0, 0), asg(13, 1, 0)], a1_pickups: vec![] };
        let v = validate_schedule(&inst, &handoff).unwrap();
        assert_eq!(rules_of(&v), vec![Rule::HandoffMargin]);
        assert_eq!(v[0].tasks, vec![TaskId { job: JobKind::B, index: 0, stage: 1 }, TaskId {
            job: JobKind::B,
            index: 0,
            stage: 2
        }]);
    }

    #[test]
    fn reports_every_violation() {
        let inst = Instance::new(1, 1, 20, vec![], vec![[2, 2, 2], [2, 2, 2]]).unwrap();
        // Both B-jobs stacked on identical times: overlaps and AGV clashes everywhere.
        let s = Schedule { tasks: vec![asg(1, 0, 0), asg(4, 0, 0), asg(7, 0, 0)].repeat(2), a1_pickups: vec![] };
        let v = validate_schedule(&inst, &s).unwrap();
        let r = rules_of(&v);
        for rule in [Rule::MachineOverlap, Rule::AgvStartStart, Rule::AgvEndEnd] {
            assert!(r.contains(&rule), "{rule} missing from {r:?}");
        }
        assert!(v.iter().filter(|v| v.rule == Rule::MachineOverlap).count() >= 3);
    }

    #[test]
    fn abutting_machine_tasks_and_exact_margins_are_legal() {
        let inst = Instance::new(1, 2, 30, vec![], vec![[2, 2, 2], [2, 2, 2]]).unwrap();
        // B0.1 [1,3) and B1.1 [3,5) abut on machine 1 with different AGVs.
        let s = Schedule {
            tasks: vec![
                asg(1, 0, 0),
                asg(4, 0, 0),
                asg(9, 0, 0),
                asg(3, 1, 1),
                asg(7, 1, 1),
                asg(12, 1, 1),
            ],
            a1_pickups: vec![],
        };
        assert_eq!(validate_schedule(&inst, &s).unwrap(), vec![]);
    }

    #[test]
    fn start_then_end_within_two_legs_is_rejected() {
        // AGV 0 delivers B0.1 at 3 and must pick A0.1 up at τ = 4.
        let inst = Instance::new(1, 2, 30, vec![[3, 1]], vec![[1, 1, 1]]).unwrap();
        let clash = Schedule {
            tasks: vec![asg(5, 0, 0), asg(3, 0, 1), asg(5, 1, 1), asg(7, 1, 1)],
            a1_pickups: vec![0],
        };
        let v = validate_schedule(&inst, &clash).unwrap();
        assert_eq!(rules_of(&v), vec![Rule::AgvStartEnd], "{v:?}");

        let mut ok = clash.clone();
        ok.tasks[1].start = 2;
        assert_eq!(validate_schedule(&inst, &ok).unwrap(), vec![]);
    }

    #[test]
    fn shape_errors_are_input_errors() {
        let inst = Instance::new(1, 1, 10, vec![[1, 1]], vec![]).unwrap();
        let s = Schedule { tasks: vec![asg(11, 0, 0)], a1_pickups: vec![0] };
        assert!(matches!(validate_schedule(&inst, &s), Err(Error::Input(_))));
        let s = Schedule { tasks: vec![asg(3, 1, 0)], a1_pickups: vec![0] };
        assert!(matches!(validate_schedule(&inst, &s), Err(Error::Input(_))));
        let s = Schedule { tasks: vec![], a1_pickups: vec![0] };
        assert!(matches!(validate_schedule(&inst, &s), Err(Error::Input(_))));
    }

    #[test]
    fn horizon_rule_fires_past_the_end() {
        let inst = Instance::new(1, 1, 4, vec![[1, 2]], vec![]).unwrap();
        let s = Schedule { tasks: vec![asg(3, 0, 0)], a1_pickups: vec![0] };
        let v = validate_schedule(&inst, &s).unwrap();
        assert_eq!(rules_of(&v), vec![Rule::Horizon]);
    }

    #[test]
    fn schedule_document_round_trip() {
        let inst = Instance::new(1, 2, 30, vec![[2, 2]], vec![[1, 2, 3]]).unwrap();
        let s = Schedule {
            tasks: vec![asg(4, 1, 0), asg(1, 0, 1), asg(3, 1, 0), asg(8, 0, 1)],
            a1_pickups: vec![1],
        };
        let text = write_schedule(&inst, &s);
        assert_eq!(read_schedule(&inst, &text).unwrap(), s);

        let missing = r#"{"tasks": [], "a1_pickups": [0]}"#;
        assert!(read_schedule(&inst, missing).is_err());
        let unknown = r#"{"tasks": [], "a1_pickups": [0], "x": 1}"#;
        assert!(read_schedule(&inst, unknown).is_err());
    }
}
