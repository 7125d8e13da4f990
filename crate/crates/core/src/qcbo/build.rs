use crate::error::Result;
use crate::model::{a1_timetable, relation_set, A1Timetable, Entity, Instance, TaskSets, Time};

use super::{Family, LinearForm, QcboModel};

/// Variable layout of the instance QCBO.
///
/// Blocks in order: `x[j,t,k]`, `y[j,t,k]` (task-major, then time, then AGV),
/// `z[a,k]`, `u[t]`. Times are 1-based, task indices follow the canonical
/// order of [`TaskSets`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QcboIndex {
    pub tasks: usize,
    pub horizon: usize,
    pub agvs: usize,
    pub a1: usize,
}

impl QcboIndex {
    pub fn new(instance: &Instance) -> Self {
        Self {
            tasks: instance.a_jobs().len() + 3 * instance.b_jobs().len(),
            horizon: instance.horizon() as usize,
            agvs: instance.num_agvs(),
            a1: instance.a_jobs().len(),
        }
    }

    fn block(&self) -> usize {
        self.tasks * self.horizon * self.agvs
    }

    pub fn x(&self, j: usize, t: Time, k: usize) -> usize {
        (j * self.horizon + t as usize - 1) * self.agvs + k
    }

    pub fn y(&self, j: usize, t: Time, k: usize) -> usize {
        self.block() + self.x(j, t, k)
    }

    pub fn z(&self, a: usize, k: usize) -> usize {
        2 * self.block() + a * self.agvs + k
    }

    pub fn u(&self, t: Time) -> usize {
        2 * self.block() + self.a1 * self.agvs + t as usize - 1
    }

    /// `2·|J|·|T|·|K| + |A1|·|K| + |T|`.
    pub fn num_vars(&self) -> usize {
        2 * self.block() + self.a1 * self.agvs + self.horizon
    }

    pub fn names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.num_vars());
        for prefix in ["x", "y"] {
            for j in 0..self.tasks {
                for t in 1..=self.horizon {
                    for k in 0..self.agvs {
                        names.push(format!("{prefix}_{j}_{t}_{k}"));
                    }
                }
            }
        }
        for a in 0..self.a1 {
            for k in 0..self.agvs {
                names.push(format!("z_{a}_{k}"));
            }
        }
        names.extend((1..=self.horizon).map(|t| format!("u_{t}")));
        names
    }
}

/// Helper answering "which binary encodes this event" with fixed-zero and
/// out-of-horizon variables mapped to `None`.
struct Vars<'a> {
    idx: QcboIndex,
    sets: &'a TaskSets,
    timetable: A1Timetable,
    delta: Time,
    horizon: Time,
}

impl Vars<'_> {
    /// First start time an A2 task may take, or 1.
    fn earliest_start(&self, j: usize) -> Time {
        match self.sets.tasks[j].predecessor {
            Some(Entity::A1(a)) => self.timetable.tau(a) + self.delta,
            _ => 1,
        }
    }

    fn start(&self, j: usize, t: i64, k: usize) -> Option<usize> {
        let t = self.clip(t)?;
        (t >= self.earliest_start(j)).then(|| self.idx.x(j, t, k))
    }

    /// End variable of an end entity: `e < |J|` is a task, otherwise the A1
    /// task `e − |J|`, which can only end at its τ.
    fn end(&self, e: usize, t: i64, k: usize) -> Option<usize> {
        let t = self.clip(t)?;
        if e < self.idx.tasks {
            (t > self.sets.tasks[e].processing).then(|| self.idx.y(e, t, k))
        } else {
            let a = e - self.idx.tasks;
            (self.timetable.tau(a) == t).then(|| self.idx.z(a, k))
        }
    }

    fn clip(&self, t: i64) -> Option<Time> {
        (1..=i64::from(self.horizon)).contains(&t).then_some(t as Time)
    }

    fn end_entities(&self) -> usize {
        self.idx.tasks + self.idx.a1
    }

    fn entity(&self, e: usize) -> Entity {
        if e < self.idx.tasks {
            Entity::Task(e)
        } else {
            Entity::A1(e - self.idx.tasks)
        }
    }
}

/// Builds the QCBO of an instance.
///
/// Early A2 starts (before `τ + δ`) and ends at or before the processing time
/// stay declared but are pinned to zero by single-variable linear rows, so
/// every bit vector of the declared length is meaningful. Pinned variables
/// take no part in quadratic rows.
pub fn build_qcbo(instance: &Instance) -> Result<QcboModel> {
    let sets = relation_set(instance);
    let idx = QcboIndex::new(instance);
    let v = &Vars {
        idx,
        sets: &sets,
        timetable: a1_timetable(instance),
        delta: instance.delta(),
        horizon: instance.horizon(),
    };
    let h = instance.horizon();
    let hi = i64::from(h);
    let d = i64::from(instance.delta());
    let agvs = 0..idx.agvs;
    let mut m = QcboModel::new(idx.names());

    m.set_objective(LinearForm::new((1..=h).map(|t| (idx.u(t), i64::from(t)))), d)?;

    // Linear rows.
    for a in 0..idx.a1 {
        m.add_linear(Family::PickupAssign, LinearForm::sum(agvs.clone().map(|k| idx.z(a, k))), 1)?;
    }
    for (j, task) in sets.tasks.iter().enumerate() {
        let all_t = || (1..=h).flat_map(|t| agvs.clone().map(move |k| (t, k)));
        m.add_linear(Family::StartAssign, LinearForm::sum(all_t().map(|(t, k)| idx.x(j, t, k))), 1)?;
        m.add_linear(Family::EndAssign, LinearForm::sum(all_t().map(|(t, k)| idx.y(j, t, k))), 1)?;
        let p = task.processing;
        for t in 1..=h.saturating_sub(p) {
            let form = LinearForm::new(
                agvs.clone()
                    .map(|k| (idx.x(j, t, k), 1))
                    .chain(agvs.clone().map(|k| (idx.y(j, t + p, k), -1))),
            );
            m.add_linear(Family::StartEndLink, form, 0)?;
        }
        for t in 1..v.earliest_start(j).min(h + 1) {
            for k in agvs.clone() {
                m.add_linear(Family::Precedence, LinearForm::sum([idx.x(j, t, k)]), 0)?;
            }
        }
        for t in 1..=p.min(h) {
            for k in agvs.clone() {
                m.add_linear(Family::StartEndLink, LinearForm::sum([idx.y(j, t, k)]), 0)?;
            }
        }
    }
    m.add_linear(Family::MakespanAssign, LinearForm::sum((1..=h).map(|t| idx.u(t))), 1)?;

    // Quadratic rows. Window partners at the same time as the row's own
    // variable are restricted to larger indices so each unordered pair is
    // emitted once.
    let push = |m: &mut QcboModel, family, left: Vec<usize>, right: Vec<usize>| -> Result<()> {
        if left.is_empty() || right.is_empty() {
            return Ok(());
        }
        m.add_quadratic(family, LinearForm::sum(left), LinearForm::sum(right))
    };

    // Precedence within B-jobs: the successor starting at t forbids the
    // predecessor ending at t − δ + 1 or later.
    for &(pred, j) in &sets.relations {
        let Entity::Task(i) = pred else { continue };
        for t in 1..=hi {
            let left = agvs.clone().filter_map(|k| v.start(j, t, k)).collect();
            let right = (t - d + 1..=hi)
                .flat_map(|s| agvs.clone().filter_map(move |k| v.end(i, s, k)))
                .collect();
            push(&mut m, Family::Precedence, left, right)?;
        }
    }

    for machine in [&sets.machine1, &sets.machine2] {
        for &j in machine {
            let p = i64::from(sets.tasks[j].processing);
            for t in 1..=hi {
                let left = agvs.clone().filter_map(|k| v.start(j, t, k)).collect();
                let mut right = Vec::new();
                for s in t..t + p {
                    for &i in machine.iter().filter(|&&i| i != j && (s > t || i > j)) {
                        right.extend(agvs.clone().filter_map(|k| v.start(i, s, k)));
                    }
                }
                push(&mut m, Family::Machine, left, right)?;
            }
        }
    }

    let n = idx.tasks;
    let ne = v.end_entities();
    for k in agvs.clone() {
        for t in 1..=hi {
            let window = t..t + 2 * d;
            for j in 0..n {
                let Some(own) = v.start(j, t, k) else { continue };
                let mut right = Vec::new();
                for s in window.clone() {
                    right.extend((0..n).filter(|&i| i != j && (s > t || i > j)).filter_map(|i| v.start(i, s, k)));
                }
                push(&mut m, Family::AgvStartStart, vec![own], right)?;

                let right = window
                    .clone()
                    .flat_map(|s| (0..ne).filter(|&e| e != j).filter_map(move |e| v.end(e, s, k)))
                    .collect();
                push(&mut m, Family::AgvStartEnd, vec![own], right)?;
            }
            for e in 0..ne {
                let Some(own) = v.end(e, t, k) else { continue };
                let mut right = Vec::new();
                for s in window.clone() {
                    right.extend((0..ne).filter(|&f| f != e && (s > t || f > e)).filter_map(|f| v.end(f, s, k)));
                }
                push(&mut m, Family::AgvEndEnd, vec![own], right)?;

                let pred = v.entity(e);
                let right = window
                    .clone()
                    .flat_map(|s| {
                        (0..n)
                            .filter(|&i| i != e && !sets.is_relation(pred, i))
                            .filter_map(move |i| v.start(i, s, k))
                    })
                    .collect();
                push(&mut m, Family::AgvEndStart, vec![own], right)?;
            }
        }
    }

    // Direct successors: same AGV needs one leg, different AGVs two.
    for &(pred, j) in &sets.relations {
        let e = match pred {
            Entity::Task(i) => i,
            Entity::A1(a) => n + a,
        };
        for k in agvs.clone() {
            for t in 1..=hi {
                let Some(own) = v.end(e, t, k) else { continue };
                let right = (t..t + d).filter_map(|s| v.start(j, s, k)).collect();
                push(&mut m, Family::SuccessorSameAgv, vec![own], right)?;
                let right = (t..t + 2 * d)
                    .flat_map(|s| agvs.clone().filter(|&l| l != k).filter_map(move |l| v.start(j, s, l)))
                    .collect();
                push(&mut m, Family::SuccessorDiffAgv, vec![own], right)?;
            }
        }
    }

    for j in sets.final_tasks() {
        for t in 2..=h {
            let left = agvs.clone().filter_map(|k| v.end(j, i64::from(t), k)).collect();
            let right = (1..t).map(|s| idx.u(s)).collect();
            push(&mut m, Family::MakespanCoupling, left, right)?;
        }
    }
    Ok(m)
}
