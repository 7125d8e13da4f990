use crate::error::{Error, Result};
use crate::model::{relation_set, Assignment, Instance, Schedule};
use crate::validate::makespan_with;

use super::{MilpAssignment, MilpIndex, TOLERANCE};

/// Assignment of a schedule: one `x` per task, one `y` per A1 task and
/// `c` equal to the makespan.
pub fn encode_schedule_milp(instance: &Instance, schedule: &Schedule) -> Result<MilpAssignment> {
    let sets = relation_set(instance);
    schedule.check_shape(instance, &sets).map_err(|e| Error::Encode(e.to_string()))?;
    let idx = MilpIndex::new(instance);
    let mut values = vec![0.0; idx.num_vars()];
    for (j, a) in schedule.tasks.iter().enumerate() {
        values[idx.x(a.start, j, a.delivery_agv, a.pickup_agv)] = 1.0;
    }
    for (a, &k) in schedule.a1_pickups.iter().enumerate() {
        values[idx.y(a, k)] = 1.0;
    }
    values[idx.c()] = makespan_with(instance, &sets, schedule) as f64;
    Ok(MilpAssignment(values))
}

/// Reads the schedule off the `x` and `y` one-hot groups. Binaries within
/// [`TOLERANCE`] of 0 or 1 are rounded; anything else is an input error.
/// Groups without exactly one set bit are reported together.
pub fn decode_milp_solution(instance: &Instance, assignment: &MilpAssignment) -> Result<Schedule> {
    let idx = MilpIndex::new(instance);
    let values = &assignment.0;
    if values.len() != idx.num_vars() {
        return Err(Error::Input(format!(
            "assignment has {} values, model has {} variables",
            values.len(),
            idx.num_vars()
        )));
    }
    let bit = |v: usize| -> Result<bool> {
        let x = values[v];
        if x.abs() <= TOLERANCE {
            Ok(false)
        } else if (x - 1.0).abs() <= TOLERANCE {
            Ok(true)
        } else {
            Err(Error::Input(format!("binary variable {v} has value {x}")))
        }
    };
    let sets = relation_set(instance);
    let h = instance.horizon();
    let k = idx.agvs;
    let mut bad = Vec::new();
    let mut tasks = Vec::with_capacity(sets.len());
    for (j, task) in sets.tasks.iter().enumerate() {
        let mut hits = Vec::new();
        for t in 1..=h {
            for k1 in 0..k {
                for k2 in 0..k {
                    if bit(idx.x(t, j, k1, k2))? {
                        hits.push(Assignment { start: t, delivery_agv: k1, pickup_agv: k2 });
                    }
                }
            }
        }
        match hits[..] {
            [one] => tasks.push(one),
            _ => bad.push(format!("x[{}]", task.id)),
        }
    }
    let mut a1_pickups = Vec::with_capacity(sets.a1.len());
    for (a, id) in sets.a1.iter().enumerate() {
        let mut hits = Vec::new();
        for kk in 0..k {
            if bit(idx.y(a, kk))? {
                hits.push(kk);
            }
        }
        match hits[..] {
            [one] => a1_pickups.push(one),
            _ => bad.push(format!("y[{id}]")),
        }
    }
    if !bad.is_empty() {
        return Err(Error::Decode { groups: bad });
    }
    Ok(Schedule { tasks, a1_pickups })
}
