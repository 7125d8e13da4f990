use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{mpsc, Mutex};
use std::thread;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance_gen::read_instance;
use crate::model::Instance;
use crate::qcbo::QcboIndex;
use crate::solve::{solve_instance_with, Method, SolveOptions};

/// Name of the records file inside a run directory.
pub const RECORDS_FILE: &str = "records.jsonl";

/// Which model a method works on. Greedy and brute force search schedules
/// directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Qcbo,
    Milp,
    Schedule,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Qcbo => "qcbo",
            ModelKind::Milp => "milp",
            ModelKind::Schedule => "schedule",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arm {
    pub model: ModelKind,
    pub method: Method,
}

impl Arm {
    fn check(&self) -> Result<()> {
        match (self.model, self.method) {
            (ModelKind::Qcbo, Method::Anneal) | (ModelKind::Schedule, Method::Greedy | Method::Brute) => Ok(()),
            _ => Err(Error::Suite(format!("no solver for arm {self}"))),
        }
    }
}

impl FromStr for Arm {
    type Err = Error;

    /// Parses `model+method`, e.g. `qcbo+anneal`.
    fn from_str(s: &str) -> Result<Self> {
        let (model, method) = s.split_once('+').ok_or_else(|| Error::Config(format!("arm `{s}` is not model+method")))?;
        let model = match model {
            "qcbo" => ModelKind::Qcbo,
            "milp" => ModelKind::Milp,
            "schedule" => ModelKind::Schedule,
            other => return Err(Error::Config(format!("unknown model `{other}`"))),
        };
        Ok(Arm { model, method: method.parse()? })
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.model.label(), self.method)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnealSettings {
    pub sweeps: usize,
    /// Restarts allowed at multiplier 1; scaled by the multiplier. `None`
    /// leaves only the time budget.
    pub max_restarts: Option<usize>,
}

impl Default for AnnealSettings {
    fn default() -> Self {
        Self { sweeps: 1000, max_restarts: None }
    }
}

fn default_multipliers() -> Vec<u32> {
    vec![1, 2, 5]
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3, 4, 5]
}

fn default_workers() -> usize {
    1
}

/// Benchmark suite configuration (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    /// Instance files, relative to the suite file's directory.
    pub instances: Vec<String>,
    pub arms: Vec<Arm>,
    pub base_budget_seconds: f64,
    #[serde(default = "default_multipliers")]
    pub multipliers: Vec<u32>,
    /// One seed per run; at most five runs.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub anneal: AnnealSettings,
    /// Arm whose best objective is the time-to-solution target; the first
    /// arm when absent.
    #[serde(default)]
    pub reference_arm: Option<Arm>,
}

impl Suite {
    pub fn from_json(text: &str) -> Result<Self> {
        let suite: Suite = serde_json::from_str(text).map_err(|e| Error::Suite(e.to_string()))?;
        suite.validate()?;
        Ok(suite)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Suite(m));
        if self.instances.is_empty() || self.arms.is_empty() {
            return fail("suite needs at least one instance and one arm".into());
        }
        for arm in &self.arms {
            arm.check()?;
        }
        if self.arms.iter().collect::<BTreeSet<_>>().len() != self.arms.len() {
            return fail("duplicate arm".into());
        }
        if !(self.base_budget_seconds.is_finite() && self.base_budget_seconds > 0.0) {
            return fail(format!("base budget must be positive, got {}", self.base_budget_seconds));
        }
        if self.multipliers.is_empty() || self.multipliers.contains(&0) {
            return fail("multipliers must be positive and nonempty".into());
        }
        if self.seeds.is_empty() || self.seeds.len() > 5 {
            return fail(format!("between 1 and 5 seeds required, got {}", self.seeds.len()));
        }
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        if let Some(r) = self.reference_arm {
            if !self.arms.contains(&r) {
                return fail(format!("reference arm {r} is not in the suite"));
            }
        }
        Ok(())
    }

    pub fn reference(&self) -> Arm {
        self.reference_arm.unwrap_or(self.arms[0])
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub instance: String,
    pub model: ModelKind,
    pub method: Method,
    pub multiplier: u32,
    /// 1-based.
    pub run: u32,
    pub seed: u64,
    pub objective: u64,
    pub feasible: bool,
    pub runtime: f64,
    /// Incumbent improvements as (seconds, objective).
    pub trace: Vec<(f64, u64)>,
    /// Binary count of the instance's QCBO, the size proxy for ordering.
    pub qcbo_vars: usize,
}

impl RunRecord {
    pub fn arm(&self) -> Arm {
        Arm { model: self.model, method: self.method }
    }

    fn key(&self) -> (String, Arm, u32, u32) {
        (self.instance.clone(), self.arm(), self.multiplier, self.run)
    }

    /// Equality ignoring wall-clock fields.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.key() == other.key()
            && self.seed == other.seed
            && self.objective == other.objective
            && self.feasible == other.feasible
            && self.qcbo_vars == other.qcbo_vars
            && self.trace.iter().map(|p| p.1).eq(other.trace.iter().map(|p| p.1))
    }
}

struct Job {
    instance: usize,
    arm: Arm,
    multiplier: u32,
    run: u32,
    seed: u64,
}

/// Runs every (instance, arm, multiplier, run) combination of `suite` not
/// yet present in `out/records.jsonl`, appending each record as it
/// completes, and returns all records in suite order.
///
/// Instances are read up front, so a missing file fails before any run.
/// `suite_dir` anchors relative instance paths.
pub fn run_experiment(suite: &Suite, suite_dir: &Path, out: &Path) -> Result<Vec<RunRecord>> {
    suite.validate()?;
    let instances: Vec<Instance> = suite
        .instances
        .iter()
        .map(|p| {
            let path = suite_dir.join(p);
            let text = fs::read_to_string(&path)
                .map_err(|e| Error::Suite(format!("cannot read instance {}: {e}", path.display())))?;
            read_instance(&text).map_err(|e| Error::Suite(format!("{}: {e}", path.display())))
        })
        .collect::<Result<_>>()?;

    fs::create_dir_all(out)?;
    let records_path = out.join(RECORDS_FILE);
    let mut done = if records_path.exists() { read_records(&records_path)? } else { Vec::new() };
    let have: BTreeSet<_> = done.iter().map(RunRecord::key).collect();

    let mut jobs = VecDeque::new();
    for (i, id) in suite.instances.iter().enumerate() {
        for &arm in &suite.arms {
            for &multiplier in &suite.multipliers {
                for (r, &seed) in suite.seeds.iter().enumerate() {
                    let run = r as u32 + 1;
                    if !have.contains(&(id.clone(), arm, multiplier, run)) {
                        jobs.push_back(Job { instance: i, arm, multiplier, run, seed });
                    }
                }
            }
        }
    }

    let mut file = OpenOptions::new().create(true).append(true).open(&records_path)?;
    let queue = Mutex::new(jobs);
    let (tx, rx) = mpsc::channel::<Result<RunRecord>>();
    let workers = suite.workers;
    let result: Result<()> = thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let queue = &queue;
            let instances = &instances;
            scope.spawn(move || loop {
                let job = queue.lock().expect("queue lock").pop_front();
                let Some(job) = job else { break };
                let rec = execute(suite, &instances[job.instance], &suite.instances[job.instance], &job);
                let failed = rec.is_err();
                if tx.send(rec).is_err() || failed {
                    break;
                }
            });
        }
        drop(tx);
        // Single appender.
        for rec in rx {
            let rec = rec?;
            writeln!(file, "{}", serde_json::to_string(&rec)?)?;
            file.flush()?;
            done.push(rec);
        }
        Ok(())
    });
    result?;

    let order = |r: &RunRecord| {
        let i = suite.instances.iter().position(|p| *p == r.instance).unwrap_or(usize::MAX);
        let a = suite.arms.iter().position(|&a| a == r.arm()).unwrap_or(usize::MAX);
        let m = suite.multipliers.iter().position(|&m| m == r.multiplier).unwrap_or(usize::MAX);
        (i, a, m, r.run)
    };
    done.retain(|r| order(r).0 != usize::MAX && order(r).1 != usize::MAX && order(r).2 != usize::MAX);
    done.sort_by_key(order);
    Ok(done)
}

fn execute(suite: &Suite, instance: &Instance, id: &str, job: &Job) -> Result<RunRecord> {
    let budget = suite.base_budget_seconds * f64::from(job.multiplier);
    let options = SolveOptions {
        sweeps: suite.anneal.sweeps,
        max_restarts: suite.anneal.max_restarts.map(|r| r * job.multiplier as usize),
        penalty: None,
    };
    let res = solve_instance_with(instance, job.arm.method, budget, job.seed, &options)?;
    Ok(RunRecord {
        instance: id.to_string(),
        model: job.arm.model,
        method: job.arm.method,
        multiplier: job.multiplier,
        run: job.run,
        seed: job.seed,
        objective: res.objective,
        feasible: res.feasible,
        runtime: res.runtime.as_secs_f64(),
        trace: res.trace,
        qcbo_vars: QcboIndex::new(instance).num_vars(),
    })
}

/// Reads a records file, one JSON object per line. Blank lines are skipped.
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let file = fs::File::open(path)?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Parse {
            field: format!("{}:{}", path.display(), n + 1),
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Path of the records file for a run directory (or the file itself).
pub fn records_path(dir_or_file: &Path) -> PathBuf {
    if dir_or_file.is_dir() {
        dir_or_file.join(RECORDS_FILE)
    } else {
        dir_or_file.to_path_buf()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_validation() {
        let ok = r#"{"instances":["a.json"],"arms":[{"model":"qcbo","method":"anneal"}],"base_budget_seconds":1}"#;
        let s = Suite::from_json(ok).unwrap();
        assert_eq!(s.multipliers, [1, 2, 5]);
        assert_eq!(s.seeds.len(), 5);
        assert_eq!(s.reference().to_string(), "qcbo+anneal");

        let bad_arm = ok.replace("anneal", "greedy");
        assert!(matches!(Suite::from_json(&bad_arm), Err(Error::Suite(_))));
        let bad_budget = ok.replace(":1}", ":0}");
        assert!(Suite::from_json(&bad_budget).is_err());
        let unknown = ok.replace("}", r#","extra":1}"#);
        assert!(Suite::from_json(&unknown).is_err());
    }

    #[test]
    fn missing_instance_fails_before_running() {
        let dir = std::env::temp_dir();
        let suite = Suite::from_json(
            r#"{"instances":["definitely-missing-instance.json"],"arms":[{"model":"schedule","method":"greedy"}],"base_budget_seconds":1}"#,
        )
        .unwrap();
        let out = dir.join("agvsched-missing-instance-test");
        let err = run_experiment(&suite, &dir, &out).unwrap_err();
        assert!(matches!(err, Error::Suite(_)));
        assert!(!out.join(RECORDS_FILE).exists());
    }
}
