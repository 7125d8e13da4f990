//! Acceptance checks, one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use agvsched::bench::{geo_stats, primal_gap, render_report, run_experiment, Suite, GAP_HEADER, TTS_HEADER, WINS_HEADER};
use agvsched::instance_gen::{generate, write_instance, GenConfig, Span};
use agvsched::milp::{
    build_milp, check_milp_feasibility, encode_schedule_milp, export_lp, linearize_qcbo, MilpAssignment,
};
use agvsched::model::{relation_set, trivial_makespan, Assignment};
use agvsched::qcbo::{
    build_qcbo, default_penalty, encode_schedule_qcbo, qubo_energy, read_qubo, to_qubo, write_qubo, Family,
    LinearForm, QcboModel,
};
use agvsched::solve::{
    anneal_qubo, brute_force, greedy_schedule, solve_instance_with, AnnealParams, Method, SolveOptions,
};
use agvsched::validate::{makespan, validate_schedule, Rule};
use agvsched::{Instance, Schedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tiny() -> Instance {
    Instance::new(1, 1, 14, vec![[1, 1]], vec![[1, 1, 1]]).unwrap()
}

/// Every schedule of `instance` with all ends inside the horizon.
fn all_schedules(instance: &Instance, mut visit: impl FnMut(&Schedule) -> Result<(), String>) -> Result<usize, String> {
    let sets = relation_set(instance);
    let (h, k) = (instance.horizon(), instance.num_agvs());
    let choices: Vec<Vec<Assignment>> = sets
        .tasks
        .iter()
        .map(|t| {
            (1..=h.saturating_sub(t.processing))
                .flat_map(|start| {
                    (0..k).flat_map(move |d| (0..k).map(move |p| Assignment { start, delivery_agv: d, pickup_agv: p }))
                })
                .collect()
        })
        .collect();
    let pickups: Vec<Vec<usize>> = (0..k.pow(sets.a1.len() as u32))
        .map(|mut c| {
            (0..sets.a1.len())
                .map(|_| {
                    let v = c % k;
                    c /= k;
                    v
                })
                .collect()
        })
        .collect();
    let mut idx = vec![0usize; choices.len()];
    let mut count = 0;
    loop {
        for pick in &pickups {
            let s = Schedule { tasks: idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect(), a1_pickups: pick.clone() };
            visit(&s)?;
            count += 1;
        }
        let mut j = 0;
        loop {
            if j == idx.len() {
                return Ok(count);
            }
            idx[j] += 1;
            if idx[j] < choices[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

fn criterion_1() -> Outcome {
    let inst = tiny();
    let qcbo = build_qcbo(&inst).map_err(|e| e.to_string())?;
    let milp = build_milp(&inst).map_err(|e| e.to_string())?;
    let (mut feasible, mut witnesses) = (0, 0);
    let n = all_schedules(&inst, |s| {
        let violations = validate_schedule(&inst, s).map_err(|e| e.to_string())?;
        let bits = encode_schedule_qcbo(&inst, s).map_err(|e| e.to_string())?;
        let totals = qcbo.violation_count(&bits).map_err(|e| e.to_string())?;
        ensure(violations.is_empty() == totals.is_feasible(), || format!("validator and QCBO disagree on {s:?}"))?;
        let x = encode_schedule_milp(&inst, s).map_err(|e| e.to_string())?;
        let rows = check_milp_feasibility(&milp, &x).map_err(|e| e.to_string())?;
        if violations.is_empty() {
            feasible += 1;
            ensure(rows.is_empty(), || format!("feasible schedule breaks MILP rows: {s:?}"))?;
        } else if rows.is_empty() {
            witnesses += 1;
            ensure(violations.iter().all(|v| v.rule == Rule::HandoffMargin), || {
                format!("MILP accepts {s:?} which breaks {violations:?}")
            })?;
        }
        Ok(())
    })?;
    ensure(feasible > 0, || "no feasible schedule enumerated".into())?;
    Ok(format!("{n} schedules, {feasible} feasible, {witnesses} MILP-only witnesses"))
}

fn tiny_instances() -> Vec<Instance> {
    (0..20)
        .map(|seed| {
            let cfg = GenConfig {
                a_jobs: Span::new(0, 2),
                b_jobs: Span::new(0, 2),
                max_jobs: 2,
                num_agvs: Span::new(1, 2),
                ..GenConfig::with_seed(seed)
            };
            generate(&cfg).unwrap()
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let opts = SolveOptions { sweeps: 500, max_restarts: Some(250), penalty: None };
    let instances = tiny_instances();
    let mut matched = 0;
    for (n, inst) in instances.iter().enumerate() {
        let oracle = brute_force(inst, 60.0);
        ensure(oracle.proven_optimal, || format!("instance {n}: brute force not proven optimal"))?;
        let greedy = greedy_schedule(inst);
        ensure(greedy.objective >= oracle.objective, || format!("instance {n}: greedy below oracle"))?;
        let mut best = u64::MAX;
        for seed in 1..=10 {
            let r = solve_instance_with(inst, Method::Anneal, 10.0, seed, &opts).map_err(|e| e.to_string())?;
            ensure(r.objective >= oracle.objective, || format!("instance {n}: anneal below oracle"))?;
            best = best.min(r.objective);
        }
        if best == oracle.objective {
            matched += 1;
        }
    }
    let detail = format!("{} instances proven optimal, anneal matched {matched}", instances.len());
    ensure(matched * 10 >= instances.len() * 8, || format!("{detail}, below 80%"))?;
    Ok(detail)
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cases = [tiny(), Instance::new(1, 2, 30, vec![[2, 3]], vec![[3, 2, 2], [2, 2, 3]]).unwrap()];
    for inst in &cases {
        let model = build_qcbo(inst).map_err(|e| e.to_string())?;
        let p = default_penalty(inst);
        let qubo = to_qubo(&model, p).map_err(|e| e.to_string())?;
        for _ in 0..1000 {
            let bits: Vec<bool> = (0..model.num_vars()).map(|_| rng.gen()).collect();
            let expected = model.objective_value(&bits).unwrap() + p as i64 * model.violation_count(&bits).unwrap().total();
            let energy = qubo_energy(&qubo, &bits).unwrap();
            ensure(energy.fract() == 0.0 && energy as i64 == expected, || format!("energy {energy} != {expected}"))?;
        }
        let best = brute_force(inst, 60.0);
        let s = best.schedule.ok_or("no optimal schedule")?;
        let bits = encode_schedule_qcbo(inst, &s).map_err(|e| e.to_string())?;
        let energy = qubo_energy(&qubo, &bits).unwrap();
        ensure(energy == makespan(inst, &s) as f64, || format!("optimal energy {energy} is not the makespan"))?;
    }
    Ok("2000 random vectors exact, optimal energies equal makespans".into())
}

fn criterion_4() -> Outcome {
    let gap = primal_gap(66.0, 60.0).map_err(|e| e.to_string())?;
    ensure(gap == 10.0, || format!("gap(66, 60) = {gap}"))?;
    let (mean, _) = geo_stats(&[4.0, 0.25]).map_err(|e| e.to_string())?;
    ensure((mean - 1.0).abs() <= 1e-12, || format!("geometric mean {mean}"))?;
    for seed in 0..100 {
        let inst = generate(&GenConfig { delta: Span::new(1, 3), ..GenConfig::with_seed(seed) }).unwrap();
        let d = u64::from(inst.delta());
        let p: u64 = inst.a_jobs().iter().flatten().chain(inst.b_jobs().iter().flatten()).map(|&x| u64::from(x)).sum();
        let formula = p + 3 * d * inst.a_jobs().len() as u64 + 6 * d * inst.b_jobs().len() as u64;
        ensure(trivial_makespan(&inst) == formula, || format!("seed {seed}: trivial makespan mismatch"))?;
    }
    Ok("gap 10, geometric mean 1, 100 trivial makespans".into())
}

fn criterion_5() -> Outcome {
    let cfg = GenConfig { a_jobs: Span::new(1, 2), b_jobs: Span::new(1, 2), ..GenConfig::with_seed(17) };
    let run = || -> Result<Vec<String>, String> {
        let inst = generate(&cfg).map_err(|e| e.to_string())?;
        let qcbo = build_qcbo(&inst).map_err(|e| e.to_string())?;
        let qubo = to_qubo(&qcbo, default_penalty(&inst)).map_err(|e| e.to_string())?;
        let outcome = anneal_qubo(&qubo, &AnnealParams::auto(&qubo, 200, 2, 5)).map_err(|e| e.to_string())?;
        let trace: Vec<(usize, f64)> = outcome.trace.iter().map(|p| (p.sweep, p.energy)).collect();
        let mut records = Vec::new();
        let opts = SolveOptions { sweeps: 100, max_restarts: Some(1), penalty: None };
        for (model, method) in [("qcbo", Method::Anneal), ("schedule", Method::Greedy)] {
            for run in 1..=3u32 {
                let r = solve_instance_with(&inst, method, 30.0, u64::from(run), &opts).map_err(|e| e.to_string())?;
                records.push(serde_json::json!({
                    "instance": "i", "model": model, "method": method.label(), "multiplier": 1, "run": run,
                    "seed": run, "objective": r.objective, "feasible": r.feasible, "runtime": 0.5,
                    "trace": [[0.25, r.objective]], "qcbo_vars": qcbo.num_vars(),
                }));
            }
        }
        let records = records.into_iter().map(serde_json::from_value).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut report = Vec::new();
        for path in render_report(&records, None, dir.path()).map_err(|e| e.to_string())? {
            report.push(fs::read_to_string(path).map_err(|e| e.to_string())?);
        }
        Ok(vec![
            write_instance(&inst),
            export_lp(&build_milp(&inst).map_err(|e| e.to_string())?),
            format!("{qcbo:?}"),
            write_qubo(&qubo),
            format!("{:?} {} {trace:?}", outcome.bits, outcome.energy),
            report.join("\n"),
        ])
    };
    let (a, b) = (run()?, run()?);
    let names = ["generate", "build_milp/export_lp", "build_qcbo", "to_qubo", "anneal_qubo", "render_report"];
    for ((x, y), name) in a.iter().zip(&b).zip(names) {
        ensure(x == y, || format!("{name} differs between runs"))?;
    }
    Ok("6 artifacts identical".into())
}

fn criterion_6() -> Outcome {
    let inst = tiny();
    let model = build_milp(&inst).map_err(|e| e.to_string())?;
    let lp = lp_parser_rs::LpProblem::parse(&export_lp(&model)).map_err(|e| e.to_string())?;
    ensure(lp.constraint_count() == model.constraints().len() && lp.variable_count() == model.vars().len(), || {
        format!("parsed {} rows / {} vars", lp.constraint_count(), lp.variable_count())
    })?;
    let qubo = to_qubo(&build_qcbo(&inst).map_err(|e| e.to_string())?, default_penalty(&inst)).map_err(|e| e.to_string())?;
    let back = read_qubo(&write_qubo(&qubo)).map_err(|e| e.to_string())?;
    ensure(back == qubo, || "QUBO differs after round trip".into())?;
    Ok(format!("LP parsed ({} rows), QUBO with {} terms round-tripped", lp.constraint_count(), qubo.quadratic().len()))
}

fn criterion_7() -> Outcome {
    let mut q = QcboModel::new((0..10).map(|i| format!("b{i}")).collect());
    q.set_objective(LinearForm::new([(0, 1), (1, 2), (2, 3), (3, 4), (8, 1)]), 1).unwrap();
    q.add_linear(Family::StartAssign, LinearForm::sum(0..4), 1).unwrap();
    q.add_linear(Family::EndAssign, LinearForm::sum([4, 5]), 1).unwrap();
    q.add_quadratic(Family::Machine, LinearForm::sum([0, 1]), LinearForm::sum([4])).unwrap();
    q.add_quadratic(Family::AgvEndEnd, LinearForm::sum([2]), LinearForm::new([(5, 1), (6, 2)])).unwrap();
    q.add_quadratic(Family::Precedence, LinearForm::sum([7]), LinearForm::sum([7, 3])).unwrap();
    q.add_quadratic(Family::AgvStartStart, LinearForm::sum([8, 9]), LinearForm::sum([9])).unwrap();
    let m = linearize_qcbo(&q).map_err(|e| e.to_string())?;
    let n = q.num_vars();
    let aux: Vec<(usize, usize)> = m.vars()[n..]
        .iter()
        .map(|v| {
            let mut it = v.name.trim_start_matches("w_").split('_').map(|s| s.parse::<usize>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    let total = m.vars().len();
    let mut qcbo_feasible = BTreeSet::new();
    let mut milp_feasible = BTreeSet::new();
    for code in 0u32..(1 << total) {
        let bits: Vec<bool> = (0..total).map(|b| code >> b & 1 == 1).collect();
        let x = &bits[..n];
        let consistent = aux.iter().zip(&bits[n..]).all(|(&(i, j), &w)| w == (x[i] && x[j]));
        let values = MilpAssignment(bits.iter().map(|&b| f64::from(u8::from(b))).collect());
        if check_milp_feasibility(&m, &values).unwrap().is_empty() {
            ensure(consistent, || format!("inconsistent auxiliaries accepted: {bits:?}"))?;
            milp_feasible.insert(x.to_vec());
        }
        if consistent && q.violation_count(x).unwrap().is_feasible() {
            qcbo_feasible.insert(x.to_vec());
        }
    }
    ensure(!qcbo_feasible.is_empty() && qcbo_feasible == milp_feasible, || "feasible sets differ".into())?;
    Ok(format!("{n} binaries, {} auxiliaries, {} feasible points agree", total - n, qcbo_feasible.len()))
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut names = Vec::new();
    for seed in 0..3 {
        let cfg = GenConfig { a_jobs: Span::new(1, 2), b_jobs: Span::new(1, 2), num_agvs: Span::new(1, 3), ..GenConfig::with_seed(seed) };
        let name = format!("demo{seed}.json");
        fs::write(dir.path().join(&name), write_instance(&generate(&cfg).unwrap())).map_err(|e| e.to_string())?;
        names.push(name);
    }
    let suite = serde_json::json!({
        "instances": names,
        "arms": [{"model": "qcbo", "method": "anneal"}, {"model": "schedule", "method": "greedy"}],
        "base_budget_seconds": 5.0,
        "multipliers": [1, 2, 5],
        "seeds": [1, 2, 3, 4, 5],
        "anneal": {"sweeps": 1000, "max_restarts": 3},
    });
    let suite = Suite::from_json(&suite.to_string()).map_err(|e| e.to_string())?;
    let out = dir.path().join("run");
    let records = run_experiment(&suite, dir.path(), &out).map_err(|e| e.to_string())?;
    ensure(records.len() == 90, || format!("{} records", records.len()))?;
    let report = dir.path().join("report");
    render_report(&records, None, &report).map_err(|e| e.to_string())?;
    let read = |rel: &str| fs::read_to_string(report.join(rel)).map_err(|e| format!("{rel}: {e}"));
    for (file, header, rows) in
        [("tables/gap_stats.csv", GAP_HEADER, 30), ("tables/wins.csv", WINS_HEADER, 3), ("tables/tts_stats.csv", TTS_HEADER, 15)]
    {
        let text = read(file)?;
        ensure(text.lines().next() == Some(header), || format!("{file}: bad header"))?;
        ensure(text.lines().count() == rows + 1, || format!("{file}: {} rows", text.lines().count() - 1))?;
    }
    for m in [1, 2, 5] {
        let svg = read(&format!("figures/gap_{m}x.svg"))?;
        ensure(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"), || format!("gap_{m}x.svg malformed"))?;
    }
    Ok("90 records, 3 tables, 3 figures".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("cross-model equivalence", criterion_1),
        ("oracle optimality", criterion_2),
        ("penalty exactness", criterion_3),
        ("formula-level values", criterion_4),
        ("determinism", criterion_5),
        ("model exports", criterion_6),
        ("linearization", criterion_7),
        ("protocol shape", criterion_8),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = clock.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}; {secs:.1}s)", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail}; {secs:.1}s)", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
