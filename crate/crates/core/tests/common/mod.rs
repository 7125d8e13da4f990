#![allow(dead_code)]

use agvsched::model::{relation_set, Assignment};
use agvsched::validate::{is_feasible, makespan};
use agvsched::{Instance, Schedule};

pub fn inst(delta: u32, agvs: usize, horizon: u32, a: &[[u32; 2]], b: &[[u32; 3]]) -> Instance {
    Instance::new(delta, agvs, horizon, a.to_vec(), b.to_vec()).unwrap()
}

/// Visits every schedule whose tasks all end within the horizon.
pub fn for_each_schedule(instance: &Instance, mut visit: impl FnMut(&Schedule)) {
    let sets = relation_set(instance);
    let k = instance.num_agvs();
    let h = instance.horizon();
    // Choices per task: (start, delivery, pickup).
    let choices: Vec<Vec<Assignment>> = sets
        .tasks
        .iter()
        .map(|t| {
            let mut v = Vec::new();
            for start in 1..=h {
                if start + t.processing > h {
                    break;
                }
                for d in 0..k {
                    for p in 0..k {
                        v.push(Assignment { start, delivery_agv: d, pickup_agv: p });
                    }
                }
            }
            v
        })
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return;
    }
    let n_a1 = sets.a1.len();
    let mut idx = vec![0usize; choices.len()];
    let mut pick = vec![0usize; n_a1];
    loop {
        let tasks = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        loop {
            let s = Schedule { tasks: Vec::clone(&tasks), a1_pickups: pick.clone() };
            visit(&s);
            if !odometer(&mut pick, |_| k) {
                break;
            }
        }
        if !odometer(&mut idx, |j| choices[j].len()) {
            return;
        }
    }
}

/// Advances a mixed-radix counter; false once it wraps to all zeros.
fn odometer(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for (j, d) in digits.iter_mut().enumerate() {
        *d += 1;
        if *d < radix(j) {
            return true;
        }
        *d = 0;
    }
    false
}

/// Minimum makespan over all enumerated feasible schedules.
pub fn naive_optimum(instance: &Instance) -> Option<u64> {
    let mut best = None;
    for_each_schedule(instance, |s| {
        if is_feasible(instance, s).unwrap() {
            let m = makespan(instance, s);
            if best.is_none_or(|b| m < b) {
                best = Some(m);
            }
        }
    });
    best
}
