//! Exhaustive agreement between the validator, the QCBO and the MILP on
//! instances small enough to enumerate every schedule.

mod common;

use std::collections::BTreeSet;

use agvsched::milp::{build_milp, build_milp_with, check_milp_feasibility, decode_milp_solution, encode_schedule_milp, MilpOptions};
use agvsched::qcbo::{build_qcbo, decode_qcbo_solution, encode_schedule_qcbo};
use agvsched::validate::{makespan, validate_schedule, Rule};
use agvsched::Instance;
use common::{for_each_schedule, inst};

#[derive(Default, Debug)]
struct Tally {
    schedules: usize,
    feasible: usize,
    /// Rules broken by MILP-feasible schedules the validator rejects.
    witness_rules: BTreeSet<Rule>,
    witnesses: usize,
}

fn check(instance: &Instance) -> Tally {
    let qcbo = build_qcbo(instance).unwrap();
    let milp = build_milp(instance).unwrap();
    let strict = build_milp_with(instance, MilpOptions { strict_handoff: true }).unwrap();
    let mut t = Tally::default();
    for_each_schedule(instance, |s| {
        t.schedules += 1;
        let violations = validate_schedule(instance, s).unwrap();
        let ok = violations.is_empty();

        let bits = encode_schedule_qcbo(instance, s).unwrap();
        let totals = qcbo.violation_count(&bits).unwrap();
        assert_eq!(ok, totals.is_feasible(), "{s:?}: {violations:?} vs {:?}", totals.violated());
        assert_eq!(decode_qcbo_solution(instance, &bits).unwrap(), *s);

        let x = encode_schedule_milp(instance, s).unwrap();
        let rows = check_milp_feasibility(&milp, &x).unwrap();
        let strict_rows = check_milp_feasibility(&strict, &x).unwrap();
        assert_eq!(decode_milp_solution(instance, &x).unwrap(), *s);
        assert_eq!(ok, strict_rows.is_empty(), "{s:?}: {violations:?} vs {strict_rows:?}");
        if ok {
            t.feasible += 1;
            assert!(rows.is_empty(), "{s:?}: {rows:?}");
            let m = makespan(instance, s) as i64;
            assert_eq!(qcbo.objective_value(&bits).unwrap(), m);
            assert_eq!(milp.objective_value(&x).unwrap().round() as i64, m);
        } else if rows.is_empty() {
            t.witnesses += 1;
            t.witness_rules.extend(violations.iter().map(|v| v.rule));
        }
    });
    t
}

#[test]
fn tiny_single_agv() {
    let t = check(&inst(1, 1, 14, &[[1, 1]], &[[1, 1, 1]]));
    assert!(t.feasible > 0 && t.schedules > t.feasible, "{t:?}");
    assert_eq!(t.witnesses, 0, "{t:?}");
}

#[test]
fn b_job_two_agvs() {
    let t = check(&inst(1, 2, 10, &[], &[[1, 1, 1]]));
    assert!(t.feasible > 0 && t.witnesses > 0, "{t:?}");
    assert_eq!(t.witness_rules, BTreeSet::from([Rule::HandoffMargin]), "{t:?}");
}

#[test]
fn two_a_jobs_two_agvs_wide_delta() {
    let t = check(&inst(2, 2, 16, &[[1, 2], [2, 1]], &[]));
    assert!(t.feasible > 0 && t.witnesses > 0, "{t:?}");
    assert_eq!(t.witness_rules, BTreeSet::from([Rule::HandoffMargin]), "{t:?}");
}

#[test]
fn a_and_b_longer_tasks() {
    let t = check(&inst(1, 1, 16, &[[2, 1]], &[[1, 2, 1]]));
    assert!(t.feasible > 0, "{t:?}");
    assert_eq!(t.witnesses, 0, "{t:?}");
}
