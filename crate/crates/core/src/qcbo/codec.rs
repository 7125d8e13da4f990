use crate::error::{Error, Result};
use crate::model::{relation_set, Assignment, Instance, Schedule, Time};
use crate::validate::makespan_with;

use super::QcboIndex;

/// Bit vector of a schedule.
///
/// Sets `x` at (start, delivery AGV), `y` at (end, pickup AGV), one `z` per
/// A1 task and `u` at the latest end of an A2 or B3 task. Ends past the
/// horizon have no variable and are left unset, which the model reports as
/// an end-assignment violation.
pub fn encode_schedule_qcbo(instance: &Instance, schedule: &Schedule) -> Result<Vec<bool>> {
    let sets = relation_set(instance);
    schedule.check_shape(instance, &sets).map_err(|e| Error::Encode(e.to_string()))?;
    let idx = QcboIndex::new(instance);
    let h = instance.horizon();
    let mut bits = vec![false; idx.num_vars()];
    for (j, a) in schedule.tasks.iter().enumerate() {
        bits[idx.x(j, a.start, a.delivery_agv)] = true;
        let end = schedule.end(&sets, j);
        if end <= h {
            bits[idx.y(j, end, a.pickup_agv)] = true;
        }
    }
    for (a, &k) in schedule.a1_pickups.iter().enumerate() {
        bits[idx.z(a, k)] = true;
    }
    let last = makespan_with(instance, &sets, schedule).saturating_sub(instance.delta().into());
    if (1..=u64::from(h)).contains(&last) {
        bits[idx.u(last as Time)] = true;
    }
    Ok(bits)
}

/// Reads a schedule off the one-hot groups of `bits`.
///
/// Start and delivery AGV come from the `x` group, the pickup AGV from the
/// `y` group. Every group (`x`, `y` per task, `z` per A1 task, `u`) must
/// have exactly one set bit; otherwise the error lists each offending group.
pub fn decode_qcbo_solution(instance: &Instance, bits: &[bool]) -> Result<Schedule> {
    let idx = QcboIndex::new(instance);
    if bits.len() != idx.num_vars() {
        return Err(Error::Input(format!(
            "bit vector has length {}, model has {} binaries",
            bits.len(),
            idx.num_vars()
        )));
    }
    let sets = relation_set(instance);
    let h = instance.horizon();
    let mut bad = Vec::new();
    let one = |cells: &mut dyn Iterator<Item = (Time, usize, usize)>| {
        let set: Vec<_> = cells.filter(|&(_, _, v)| bits[v]).collect();
        (set.len() == 1).then(|| (set[0].0, set[0].1))
    };
    let mut tasks = Vec::with_capacity(sets.len());
    for (j, task) in sets.tasks.iter().enumerate() {
        let x = one(&mut (1..=h).flat_map(|t| (0..idx.agvs).map(move |k| (t, k, idx.x(j, t, k)))));
        let y = one(&mut (1..=h).flat_map(|t| (0..idx.agvs).map(move |k| (t, k, idx.y(j, t, k)))));
        if x.is_none() {
            bad.push(format!("x[{}]", task.id));
        }
        if y.is_none() {
            bad.push(format!("y[{}]", task.id));
        }
        if let (Some((start, delivery_agv)), Some((_, pickup_agv))) = (x, y) {
            tasks.push(Assignment { start, delivery_agv, pickup_agv });
        }
    }
    let mut a1_pickups = Vec::with_capacity(sets.a1.len());
    for (a, id) in sets.a1.iter().enumerate() {
        match one(&mut (0..idx.agvs).map(|k| (0, k, idx.z(a, k)))) {
            Some((_, k)) => a1_pickups.push(k),
            None => bad.push(format!("z[{id}]")),
        }
    }
    if one(&mut (1..=h).map(|t| (t, 0, idx.u(t)))).is_none() {
        bad.push("u".into());
    }
    if !bad.is_empty() {
        return Err(Error::Decode { groups: bad });
    }
    Ok(Schedule { tasks, a1_pickups })
}
