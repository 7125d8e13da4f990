//! Suites end to end: records, resumption and reports.

use std::fs;
use std::path::Path;

use agvsched::bench::{
    read_records, render_report, run_experiment, Suite, GAP_HEADER, RECORDS_FILE, TTS_HEADER, WINS_HEADER,
};
use agvsched::instance_gen::{generate, write_instance, GenConfig, Span};
use agvsched::Error;

fn write_instances(dir: &Path, n: u64) -> Vec<String> {
    (0..n)
        .map(|seed| {
            let cfg = GenConfig { a_jobs: Span::new(1, 1), b_jobs: Span::new(1, 1), num_agvs: Span::new(1, 2), ..GenConfig::with_seed(seed) };
            let name = format!("inst{seed}.json");
            fs::write(dir.join(&name), write_instance(&generate(&cfg).unwrap())).unwrap();
            name
        })
        .collect()
}

fn suite(instances: Vec<String>) -> Suite {
    let json = serde_json::json!({
        "instances": instances,
        "arms": [{"model": "qcbo", "method": "anneal"}, {"model": "schedule", "method": "greedy"}],
        "base_budget_seconds": 5.0,
        "anneal": {"sweeps": 100, "max_restarts": 1},
    });
    Suite::from_json(&json.to_string()).unwrap()
}

#[test]
fn records_resume_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let s = suite(write_instances(dir.path(), 2));
    let out = dir.path().join("run");
    let first = run_experiment(&s, dir.path(), &out).unwrap();
    assert_eq!(first.len(), 2 * 2 * 3 * 5);
    let path = out.join(RECORDS_FILE);
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 60);

    // A rerun adds nothing.
    let again = run_experiment(&s, dir.path(), &out).unwrap();
    assert_eq!(again, first);

    // Interrupted run: keep a prefix and resume.
    let text = fs::read_to_string(&path).unwrap();
    let kept: String = text.lines().take(25).map(|l| format!("{l}\n")).collect();
    fs::write(&path, kept).unwrap();
    let resumed = run_experiment(&s, dir.path(), &out).unwrap();
    assert_eq!(resumed.len(), 60);
    for (a, b) in resumed.iter().zip(&first) {
        assert!(a.same_outcome(b), "{a:?} vs {b:?}");
    }
    assert_eq!(read_records(&path).unwrap().len(), 60);

    let report = dir.path().join("report");
    let files = render_report(&resumed, None, &report).unwrap();
    assert_eq!(files.len(), 6);
    let table = |name: &str| fs::read_to_string(report.join("tables").join(name)).unwrap();
    assert_eq!(table("gap_stats.csv").lines().next(), Some(GAP_HEADER));
    assert_eq!(table("wins.csv").lines().next(), Some(WINS_HEADER));
    assert_eq!(table("tts_stats.csv").lines().next(), Some(TTS_HEADER));
    // 2 arms x 3 multipliers x 5 ranks.
    assert_eq!(table("gap_stats.csv").lines().count(), 1 + 30);
    assert_eq!(table("wins.csv").lines().count(), 1 + 3);
    for m in [1, 2, 5] {
        let svg = fs::read_to_string(report.join("figures").join(format!("gap_{m}x.svg"))).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("qcbo+anneal") && svg.contains("schedule+greedy"));
    }
}

#[test]
fn missing_instance_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let mut names = write_instances(dir.path(), 1);
    names.push("absent.json".into());
    let out = dir.path().join("run");
    let err = run_experiment(&suite(names), dir.path(), &out).unwrap_err();
    assert!(matches!(err, Error::Suite(_)), "{err}");
    assert!(!out.join(RECORDS_FILE).exists());
}

#[test]
fn unsupported_arms_are_rejected() {
    let json = r#"{"instances":["a.json"],"arms":[{"model":"milp","method":"anneal"}],"base_budget_seconds":1}"#;
    assert!(matches!(Suite::from_json(json), Err(Error::Suite(_))));
    let json = r#"{"instances":["a.json"],"arms":[{"model":"qcbo","method":"anneal"}],"base_budget_seconds":1,"extra":0}"#;
    assert!(matches!(Suite::from_json(json), Err(Error::Suite(_))));
}
