use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use agvsched::bench::{read_records, records_path, render_report, run_experiment, Arm, Suite};
use agvsched::instance_gen::{generate, read_instance, write_instance, GenConfig, HorizonPolicy, Span};
use agvsched::milp::{build_milp_with, export_lp, MilpOptions};
use agvsched::qcbo::{build_qcbo, default_penalty, to_qubo, write_qubo};
use agvsched::solve::{solve_instance, Method};
use agvsched::validate::{read_schedule, validate_schedule};
use agvsched::Instance;

#[derive(Parser)]
#[command(name = "agvsched", version, about = "Job shop scheduling with AGV transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write seeded random instances to a directory.
    Generate(GenerateArgs),
    /// Export an optimization model.
    #[command(subcommand)]
    Build(BuildCommand),
    /// Check a schedule; exits 0 iff it is feasible.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Solve one instance and write the result as JSON.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "anneal")]
        method: Method,
        /// Wall-clock budget in seconds.
        #[arg(long, default_value_t = 10.0)]
        budget: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run benchmark suites and render reports.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Subcommand)]
enum BuildCommand {
    /// Time-indexed MILP in LP format.
    Milp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Add the rows that also forbid same-time handoffs between AGVs.
        #[arg(long)]
        strict_handoff: bool,
    },
    /// Penalized QUBO as JSON.
    Qubo {
        #[arg(long)]
        instance: PathBuf,
        /// Defaults to horizon + delta + 1.
        #[arg(long)]
        penalty: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    Run {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Report {
        /// Run directory or records file.
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Time-to-solution reference arm, e.g. `qcbo+anneal`.
        #[arg(long)]
        reference: Option<Arm>,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    count: u32,
    /// Fixed horizon; the trivial makespan is used when absent.
    #[arg(long)]
    horizon: Option<u32>,
    #[arg(long)]
    na_min: Option<u32>,
    #[arg(long)]
    na_max: Option<u32>,
    #[arg(long)]
    nb_min: Option<u32>,
    #[arg(long)]
    nb_max: Option<u32>,
    #[arg(long)]
    max_jobs: Option<u32>,
    #[arg(long)]
    agvs_min: Option<u32>,
    #[arg(long)]
    agvs_max: Option<u32>,
    #[arg(long)]
    delta_min: Option<u32>,
    #[arg(long)]
    delta_max: Option<u32>,
    #[arg(long)]
    a1_min: Option<u32>,
    #[arg(long)]
    a1_max: Option<u32>,
    #[arg(long)]
    a2_min: Option<u32>,
    #[arg(long)]
    a2_max: Option<u32>,
    #[arg(long)]
    b1_min: Option<u32>,
    #[arg(long)]
    b1_max: Option<u32>,
    #[arg(long)]
    b2_min: Option<u32>,
    #[arg(long)]
    b2_max: Option<u32>,
    #[arg(long)]
    b3_min: Option<u32>,
    #[arg(long)]
    b3_max: Option<u32>,
}

impl GenerateArgs {
    fn config(&self) -> GenConfig {
        let span = |s: Span, min: Option<u32>, max: Option<u32>| Span::new(min.unwrap_or(s.min), max.unwrap_or(s.max));
        let d = GenConfig::default();
        GenConfig {
            seed: self.seed,
            a_jobs: span(d.a_jobs, self.na_min, self.na_max),
            b_jobs: span(d.b_jobs, self.nb_min, self.nb_max),
            max_jobs: self.max_jobs.unwrap_or(d.max_jobs),
            num_agvs: span(d.num_agvs, self.agvs_min, self.agvs_max),
            delta: span(d.delta, self.delta_min, self.delta_max),
            a1: span(d.a1, self.a1_min, self.a1_max),
            a2: span(d.a2, self.a2_min, self.a2_max),
            b1: span(d.b1, self.b1_min, self.b1_max),
            b2: span(d.b2, self.b2_min, self.b2_max),
            b3: span(d.b3, self.b3_min, self.b3_max),
            horizon: self.horizon.map_or(HorizonPolicy::TrivialBound, HorizonPolicy::Fixed),
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate(args) => {
            let base = args.config();
            fs::create_dir_all(&args.out)?;
            for i in 0..args.count {
                let config = GenConfig { seed: base.seed.wrapping_add(u64::from(i)), ..base.clone() };
                let instance = generate(&config)?;
                let path = args.out.join(format!("instance_{:03}.json", i));
                write(&path, &write_instance(&instance))?;
                println!("{}", path.display());
            }
        }
        Command::Build(BuildCommand::Milp { instance, out, strict_handoff }) => {
            let inst = load_instance(&instance)?;
            let model = build_milp_with(&inst, MilpOptions { strict_handoff })?;
            write(&out, &export_lp(&model))?;
        }
        Command::Build(BuildCommand::Qubo { instance, penalty, out }) => {
            let inst = load_instance(&instance)?;
            let qubo = to_qubo(&build_qcbo(&inst)?, penalty.unwrap_or_else(|| default_penalty(&inst)))?;
            write(&out, &write_qubo(&qubo))?;
        }
        Command::Validate { instance, schedule } => {
            let inst = load_instance(&instance)?;
            let text = fs::read_to_string(&schedule).with_context(|| format!("reading {}", schedule.display()))?;
            let violations = validate_schedule(&inst, &read_schedule(&inst, &text)?)?;
            for v in &violations {
                println!("{v}");
            }
            if !violations.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
            println!("feasible");
        }
        Command::Solve { instance, method, budget, seed, out } => {
            let inst = load_instance(&instance)?;
            let result = solve_instance(&inst, method, budget, seed)?;
            let json = serde_json::to_string_pretty(&result.to_json(&inst))?;
            match out {
                Some(path) => write(&path, &json)?,
                None => println!("{json}"),
            }
            eprintln!("objective {} feasible {}", result.objective, result.feasible);
        }
        Command::Bench(BenchCommand::Run { suite, out }) => {
            let text = fs::read_to_string(&suite).with_context(|| format!("reading {}", suite.display()))?;
            let config = Suite::from_json(&text)?;
            let dir = suite.parent().unwrap_or(Path::new("."));
            let records = run_experiment(&config, dir, &out)?;
            println!("{} records in {}", records.len(), records_path(&out).display());
        }
        Command::Bench(BenchCommand::Report { records, out, reference }) => {
            let records = read_records(&records_path(&records))?;
            for path in render_report(&records, reference, &out)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
