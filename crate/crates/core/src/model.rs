//! Problem domain: instances, task sets, the fixed machine-0 timetable and
//! schedules.
//!
//! Time is discrete. A task starting at `t` with processing time `p` is busy
//! during `t..t+p` (half-open) and *ends* at `t + p`, the first step at which
//! it is no longer processed. Every module shares this convention.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A discrete time step. The horizon is `1..=horizon`.
pub type Time = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum JobKind {
    A,
    B,
}

impl fmt::Display for JobKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JobKind::A => f.write_str("A"),
            JobKind::B => f.write_str("B"),
        }
    }
}

/// Identifies a single task: the `stage`-th task of job `index` of kind `job`.
///
/// A-jobs have stages 1..=2, B-jobs stages 1..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaskId {
    pub job: JobKind,
    pub index: usize,
    pub stage: u8,
}

impl TaskId {
    pub fn new(job: JobKind, index: usize, stage: u8) -> Result<Self> {
        let max = match job {
            JobKind::A => 2,
            JobKind::B => 3,
        };
        if stage == 0 || stage > max {
            return Err(Error::Input(format!("stage {stage} out of range for {job}-job")));
        }
        Ok(Self { job, index, stage })
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}.{}", self.job, self.index, self.stage)
    }
}

/// Problem parameters. Construct with [`Instance::new`], which enforces
/// positivity of every parameter. Whether a feasible schedule fits in the
/// horizon is left to the solvers and the validator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    delta: Time,
    num_agvs: usize,
    horizon: Time,
    a_jobs: Vec<[Time; 2]>,
    b_jobs: Vec<[Time; 3]>,
}

impl Instance {
    pub fn new(
        delta: Time,
        num_agvs: usize,
        horizon: Time,
        a_jobs: Vec<[Time; 2]>,
        b_jobs: Vec<[Time; 3]>,
    ) -> Result<Self> {
        let positive = |field: String, v: u64| {
            if v == 0 {
                Err(Error::Parse { field, message: "must be a positive integer".into() })
            } else {
                Ok(())
            }
        };
        positive("delta".into(), delta.into())?;
        positive("num_agvs".into(), num_agvs as u64)?;
        positive("horizon".into(), horizon.into())?;
        for (i, job) in a_jobs.iter().enumerate() {
            for (s, &p) in job.iter().enumerate() {
                positive(format!("a_jobs[{i}][{s}]"), p.into())?;
            }
        }
        for (i, job) in b_jobs.iter().enumerate() {
            for (s, &p) in job.iter().enumerate() {
                positive(format!("b_jobs[{i}][{s}]"), p.into())?;
            }
        }
        if a_jobs.is_empty() && b_jobs.is_empty() {
            return Err(Error::Parse { field: "a_jobs".into(), message: "an instance needs at least one job".into() });
        }
        Ok(Self { delta, num_agvs, horizon, a_jobs, b_jobs })
    }

    /// Travel time of one AGV leg.
    pub fn delta(&self) -> Time {
        self.delta
    }

    pub fn num_agvs(&self) -> usize {
        self.num_agvs
    }

    /// Number of time steps `|T|`.
    pub fn horizon(&self) -> Time {
        self.horizon
    }

    pub fn a_jobs(&self) -> &[[Time; 2]] {
        &self.a_jobs
    }

    pub fn b_jobs(&self) -> &[[Time; 3]] {
        &self.b_jobs
    }

    /// Copy of this instance with a different horizon.
    pub fn with_horizon(&self, horizon: Time) -> Result<Self> {
        Self::new(self.delta, self.num_agvs, horizon, self.a_jobs.clone(), self.b_jobs.clone())
    }

    /// Processing time of any task, including A1 tasks.
    pub fn processing_time(&self, task: TaskId) -> Time {
        match task.job {
            JobKind::A => self.a_jobs[task.index][task.stage as usize - 1],
            JobKind::B => self.b_jobs[task.index][task.stage as usize - 1],
        }
    }
}

/// A task that takes part in the AGV rules: either a schedulable task
/// (index into [`TaskSets::tasks`]) or a fixed first task of an A-job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entity {
    Task(usize),
    A1(usize),
}

/// Per-task data for a schedulable task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskInfo {
    pub id: TaskId,
    pub processing: Time,
    /// 1 or 2.
    pub machine: u8,
    pub predecessor: Option<Entity>,
    pub successor: Option<usize>,
}

impl TaskInfo {
    /// A2 and B3 tasks close their job; their pickup defines the makespan.
    pub fn is_final(&self) -> bool {
        self.successor.is_none()
    }
}

/// Partition of the tasks and the predecessor relation.
///
/// `tasks` lists the schedulable set `J` in canonical order: every A2 task by
/// job index, then for each B-job its stages 1, 2, 3. All `usize` task
/// references in this crate index into that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSets {
    pub tasks: Vec<TaskInfo>,
    /// Indices of `J1` (A2, B1, B3).
    pub machine1: Vec<usize>,
    /// Indices of `J2` (B2).
    pub machine2: Vec<usize>,
    /// The fixed A1 tasks, by A-job index.
    pub a1: Vec<TaskId>,
    /// Predecessor → successor pairs.
    pub relations: Vec<(Entity, usize)>,
}

impl TaskSets {
    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    /// Index of `id` in the canonical order, if it is a schedulable task.
    pub fn position(&self, id: TaskId) -> Option<usize> {
        self.tasks.iter().position(|t| t.id == id)
    }

    /// Tasks whose pickup closes a job (A2 and B3).
    pub fn final_tasks(&self) -> impl Iterator<Item = usize> + '_ {
        self.tasks.iter().enumerate().filter(|(_, t)| t.is_final()).map(|(j, _)| j)
    }

    /// Whether `(pred, succ)` is a direct predecessor pair.
    pub fn is_relation(&self, pred: Entity, succ: usize) -> bool {
        self.tasks[succ].predecessor == Some(pred)
    }
}

/// Builds `J`, `J1`, `J2`, `A1` and `R` for an instance.
pub fn relation_set(instance: &Instance) -> TaskSets {
    let mut tasks = Vec::new();
    let mut relations = Vec::new();
    for (i, job) in instance.a_jobs.iter().enumerate() {
        let j = tasks.len();
        tasks.push(TaskInfo {
            id: TaskId { job: JobKind::A, index: i, stage: 2 },
            processing: job[1],
            machine: 1,
            predecessor: Some(Entity::A1(i)),
            successor: None,
        });
        relations.push((Entity::A1(i), j));
    }
    for (i, job) in instance.b_jobs.iter().enumerate() {
        let first = tasks.len();
        for stage in 1..=3u8 {
            let j = first + stage as usize - 1;
            tasks.push(TaskInfo {
                id: TaskId { job: JobKind::B, index: i, stage },
                processing: job[stage as usize - 1],
                machine: if stage == 2 { 2 } else { 1 },
                predecessor: (stage > 1).then(|| Entity::Task(j - 1)),
                successor: (stage < 3).then_some(j + 1),
            });
            if stage > 1 {
                relations.push((Entity::Task(j - 1), j));
            }
        }
    }
    let machine1 = (0..tasks.len()).filter(|&j| tasks[j].machine == 1).collect();
    let machine2 = (0..tasks.len()).filter(|&j| tasks[j].machine == 2).collect();
    let a1 = (0..instance.a_jobs.len())
        .map(|i| TaskId { job: JobKind::A, index: i, stage: 1 })
        .collect();
    TaskSets { tasks, machine1, machine2, a1, relations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct A1Slot {
    pub start: Time,
    /// First step at which the task is no longer processed.
    pub tau: Time,
}

/// The machine-0 timetable: A1 tasks back to back from time 1, in job order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct A1Timetable {
    pub slots: Vec<A1Slot>,
}

impl A1Timetable {
    pub fn tau(&self, a: usize) -> Time {
        self.slots[a].tau
    }
}

pub fn a1_timetable(instance: &Instance) -> A1Timetable {
    let mut next = 1;
    let slots = instance
        .a_jobs
        .iter()
        .map(|job| {
            let slot = A1Slot { start: next, tau: next + job[0] };
            next = slot.tau;
            slot
        })
        .collect();
    A1Timetable { slots }
}

/// Makespan of running every job one after another: all processing times
/// plus three transports per A-job and six per B-job.
pub fn trivial_makespan(instance: &Instance) -> u64 {
    let processing: u64 = instance.a_jobs.iter().flatten().map(|&p| u64::from(p)).sum::<u64>()
        + instance.b_jobs.iter().flatten().map(|&p| u64::from(p)).sum::<u64>();
    let delta = u64::from(instance.delta);
    processing + instance.a_jobs.len() as u64 * 3 * delta + instance.b_jobs.len() as u64 * 6 * delta
}

/// Start time and AGVs of one schedulable task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub start: Time,
    pub delivery_agv: usize,
    pub pickup_agv: usize,
}

/// A complete decision: one [`Assignment`] per task of `J` (canonical order)
/// and the pickup AGV of every A1 task.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Schedule {
    pub tasks: Vec<Assignment>,
    pub a1_pickups: Vec<usize>,
}

impl Schedule {
    /// Checks that the schedule has the right shape for `instance`: one entry
    /// per task, starts within `1..=horizon`, AGV indices below `num_agvs`.
    /// Ends past the horizon are a feasibility matter, not a shape error.
    pub fn check_shape(&self, instance: &Instance, sets: &TaskSets) -> Result<()> {
        if self.tasks.len() != sets.len() {
            return Err(Error::Input(format!(
                "schedule has {} task entries, instance has {}",
                self.tasks.len(),
                sets.len()
            )));
        }
        if self.a1_pickups.len() != sets.a1.len() {
            return Err(Error::Input(format!(
                "schedule has {} A1 pickups, instance has {}",
                self.a1_pickups.len(),
                sets.a1.len()
            )));
        }
        let k = instance.num_agvs;
        for (task, a) in sets.tasks.iter().zip(&self.tasks) {
            if a.start < 1 || a.start > instance.horizon {
                return Err(Error::Input(format!(
                    "{}: start {} outside 1..={}",
                    task.id, a.start, instance.horizon
                )));
            }
            if a.delivery_agv >= k || a.pickup_agv >= k {
                return Err(Error::Input(format!("{}: AGV index out of range 0..{k}", task.id)));
            }
        }
        for (a, &agv) in self.a1_pickups.iter().enumerate() {
            if agv >= k {
                return Err(Error::Input(format!("A{a}.1: pickup AGV {agv} out of range 0..{k}")));
            }
        }
        Ok(())
    }

    pub fn end(&self, sets: &TaskSets, j: usize) -> Time {
        self.tasks[j].start + sets.tasks[j].processing
    }
}
