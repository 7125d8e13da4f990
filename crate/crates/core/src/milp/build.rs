use crate::error::Result;
use crate::model::{a1_timetable, relation_set, Entity, Instance, Time};

use super::{MilpModel, Sense, VarKind};

/// Variable layout of the instance MILP: `x[t,j,k1,k2]` time-major, then
/// `y[a,k]`, then `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MilpIndex {
    pub tasks: usize,
    pub horizon: usize,
    pub agvs: usize,
    pub a1: usize,
}

impl MilpIndex {
    pub fn new(instance: &Instance) -> Self {
        Self {
            tasks: instance.a_jobs().len() + 3 * instance.b_jobs().len(),
            horizon: instance.horizon() as usize,
            agvs: instance.num_agvs(),
            a1: instance.a_jobs().len(),
        }
    }

    pub fn x(&self, t: Time, j: usize, k1: usize, k2: usize) -> usize {
        (((t as usize - 1) * self.tasks + j) * self.agvs + k1) * self.agvs + k2
    }

    pub fn y(&self, a: usize, k: usize) -> usize {
        self.horizon * self.tasks * self.agvs * self.agvs + a * self.agvs + k
    }

    pub fn c(&self) -> usize {
        self.y(self.a1, 0)
    }

    /// `|T|·|J|·|K|² + |A1|·|K| + 1`.
    pub fn num_vars(&self) -> usize {
        self.c() + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MilpOptions {
    /// Adds `handoff_margin` rows (a direct successor delivered by another
    /// AGV than the one that picked up its predecessor starts at least `2δ`
    /// after that pickup) and `start_then_end` rows (no other pickup on the
    /// delivering AGV within `2δ` after a start). With both, the MILP
    /// accepts exactly the schedules the validator accepts, as long as every
    /// task ends within the horizon.
    pub strict_handoff: bool,
}

pub fn build_milp(instance: &Instance) -> Result<MilpModel> {
    build_milp_with(instance, MilpOptions::default())
}

/// Builds the time-indexed MILP. Summation windows are clipped to
/// `1..=|T|` at both ends and rows without terms are omitted.
pub fn build_milp_with(instance: &Instance, options: MilpOptions) -> Result<MilpModel> {
    let sets = relation_set(instance);
    let timetable = a1_timetable(instance);
    let idx = MilpIndex::new(instance);
    let h = instance.horizon() as i64;
    let d = i64::from(instance.delta());
    let n = idx.tasks;
    let agvs = idx.agvs;
    let p = |j: usize| i64::from(sets.tasks[j].processing);
    let tau = |a: usize| i64::from(timetable.tau(a));

    let mut m = MilpModel::new();
    for t in 1..=h {
        for j in 0..n {
            for k1 in 0..agvs {
                for k2 in 0..agvs {
                    m.add_var(format!("x_{t}_{j}_{k1}_{k2}"), VarKind::Binary)?;
                }
            }
        }
    }
    for a in 0..idx.a1 {
        for k in 0..agvs {
            m.add_var(format!("y_{a}_{k}"), VarKind::Binary)?;
        }
    }
    let c = m.add_var("c", VarKind::Continuous)?;
    m.set_objective(vec![(c, 1.0)], 0.0)?;

    // Clipped inclusive range of start times.
    let span = |lo: i64, hi: i64| lo.max(1)..=hi.min(h);
    let x = |t: i64, j: usize, k1: usize, k2: usize| idx.x(t as Time, j, k1, k2);
    // x over all AGV pairs, delivery fixed, or pickup fixed.
    let any = move |t: i64, j: usize| (0..agvs).flat_map(move |k1| (0..agvs).map(move |k2| x(t, j, k1, k2)));
    let by_delivery = move |t: i64, j: usize, k: usize| (0..agvs).map(move |k2| x(t, j, k, k2));
    let by_pickup = move |t: i64, j: usize, k: usize| (0..agvs).map(move |k1| x(t, j, k1, k));
    let ones = |vars: Vec<usize>| vars.into_iter().map(|v| (v, 1.0)).collect::<Vec<_>>();
    let at_most_one = |m: &mut MilpModel, family: &str, vars: Vec<usize>| -> Result<()> {
        if vars.is_empty() {
            return Ok(());
        }
        m.add_constraint(family, ones(vars), Sense::Le, 1.0)
    };

    for j in 0..n {
        let vars = (1..=h).flat_map(|t| any(t, j)).collect();
        m.add_constraint("assign_x", ones(vars), Sense::Eq, 1.0)?;
    }
    for a in 0..idx.a1 {
        let vars = (0..agvs).map(|k| idx.y(a, k)).collect();
        m.add_constraint("assign_y", ones(vars), Sense::Eq, 1.0)?;
    }

    for machine in [&sets.machine1, &sets.machine2] {
        for t in 1..=h {
            let vars = machine.iter().flat_map(|&j| span(t - p(j) + 1, t).flat_map(move |s| any(s, j))).collect();
            at_most_one(&mut m, "machine_cap", vars)?;
        }
    }

    for &(pred, j) in &sets.relations {
        let succ: Vec<_> = (1..=h).flat_map(|t| any(t, j).map(move |v| (v, -(t as f64)))).collect();
        match pred {
            Entity::Task(i) => {
                let mut terms: Vec<_> =
                    (1..=h).flat_map(|t| any(t, i).map(move |v| (v, (t + p(i) + d) as f64))).collect();
                terms.extend(succ);
                m.add_constraint("precedence", terms, Sense::Le, 0.0)?;
            }
            Entity::A1(a) => {
                m.add_constraint("precedence", succ, Sense::Le, -((tau(a) + d) as f64))?;
            }
        }
    }

    for t in 1..=h {
        for k in 0..agvs {
            let vars = (0..n).flat_map(|j| by_delivery(t, j, k)).collect();
            at_most_one(&mut m, "at_most_one_start", vars)?;
        }
    }

    for t in 1..=h {
        for k in 0..agvs {
            let vars = span(t - d + 1, t + d).flat_map(|s| (0..n).flat_map(move |j| by_delivery(s, j, k))).collect();
            at_most_one(&mut m, "start_window", vars)?;
        }
    }

    for t in 1..=h {
        for k in 0..agvs {
            let mut vars: Vec<usize> = (0..n)
                .flat_map(|j| span(t - p(j) - d + 1, t - p(j) + d).flat_map(move |s| by_pickup(s, j, k)))
                .collect();
            vars.extend((0..idx.a1).filter(|&a| (t - d + 1..=t + d).contains(&tau(a))).map(|a| idx.y(a, k)));
            at_most_one(&mut m, "end_window", vars)?;
        }
    }

    for t in 1..=h {
        for j in 0..n {
            for k in 0..agvs {
                let mut vars: Vec<usize> = (0..idx.a1)
                    .filter(|&a| !sets.is_relation(Entity::A1(a), j) && (t - 2 * d + 1..=t).contains(&tau(a)))
                    .map(|a| idx.y(a, k))
                    .collect();
                for i in (0..n).filter(|&i| i != j && !sets.is_relation(Entity::Task(i), j)) {
                    vars.extend(span(t - p(i) - 2 * d + 1, t - p(i)).flat_map(|s| by_pickup(s, i, k)));
                }
                vars.extend(by_delivery(t, j, k));
                at_most_one(&mut m, "start_end_window", vars)?;
            }
        }
    }

    for t in 1..=h {
        for k in 0..agvs {
            let mut vars: Vec<usize> =
                (0..n).filter(|&j| t - p(j) >= 1).flat_map(|j| by_pickup(t - p(j), j, k)).collect();
            vars.extend((0..n).flat_map(|j| by_delivery(t, j, k)));
            at_most_one(&mut m, "single_run", vars)?;
        }
    }

    for j in sets.final_tasks() {
        let mut terms: Vec<_> = (1..=h).flat_map(|t| any(t, j).map(move |v| (v, (t + p(j)) as f64))).collect();
        terms.push((c, -1.0));
        m.add_constraint("makespan", terms, Sense::Le, -(d as f64))?;
    }

    if options.strict_handoff {
        let others = move |s: i64, j: usize, k: usize| {
            (0..agvs).filter(move |&l| l != k).flat_map(move |l| by_delivery(s, j, l))
        };
        for &(pred, j) in &sets.relations {
            for k in 0..agvs {
                match pred {
                    Entity::A1(a) => {
                        let succ: Vec<usize> = span(tau(a), tau(a) + 2 * d - 1).flat_map(|s| others(s, j, k)).collect();
                        if !succ.is_empty() {
                            let mut vars = vec![idx.y(a, k)];
                            vars.extend(succ);
                            at_most_one(&mut m, "handoff_margin", vars)?;
                        }
                    }
                    Entity::Task(i) => {
                        for t in p(i) + 1..=h {
                            let succ: Vec<usize> = span(t, t + 2 * d - 1).flat_map(|s| others(s, j, k)).collect();
                            if !succ.is_empty() {
                                let mut vars: Vec<usize> = by_pickup(t - p(i), i, k).collect();
                                vars.extend(succ);
                                at_most_one(&mut m, "handoff_margin", vars)?;
                            }
                        }
                    }
                }
            }
        }
        for t in 1..=h {
            for j in 0..n {
                for k in 0..agvs {
                    let mut vars: Vec<usize> = by_delivery(t, j, k).collect();
                    for i in (0..n).filter(|&i| i != j) {
                        vars.extend(span(t - p(i), t + 2 * d - 1 - p(i)).flat_map(|s| by_pickup(s, i, k)));
                    }
                    vars.extend((0..idx.a1).filter(|&a| (t..t + 2 * d).contains(&tau(a))).map(|a| idx.y(a, k)));
                    at_most_one(&mut m, "start_then_end", vars)?;
                }
            }
        }
    }
    debug_assert_eq!(m.vars().len(), idx.num_vars());
    Ok(m)
}
