use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use ptc_cli::{run_benchmark, run_solver, BenchConfig, ObjectiveArg, SolverKind};
use ptc_core::generator::{self, GeneratedInstance, PER_CLASS, PRESETS};
use ptc_core::ilp::DEFAULT_HORIZON_CAP;
use ptc_core::schedule::evaluation_report;
use ptc_core::{
    check_feasibility, export_ip3, generate, generate_set, GeneratorConfig, Instance, ObjectiveSpec,
    Schedule, SolveStatus, ThresholdClass,
};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "ptc", version, about = "Parallel machine scheduling with expiring qualifications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Instance file.
    #[arg(long, global = true)]
    instance: Option<PathBuf>,
    /// Instance directory.
    #[arg(long, global = true)]
    dir: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_objective)]
    objective: Option<ObjectiveArg>,
    /// Time limit in seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file or directory; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Md,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Beta {
    /// beta = 1
    Flow,
    /// beta = N * T
    Disq,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    Small,
    Medium,
    Large,
    /// Equal split over the three classes.
    Mixed,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the result as JSON.
    Solve {
        #[arg(long, default_value = "bnb", value_parser = parse_solver)]
        solver: SolverKind,
        /// Solution file used as initial incumbent (bnb only).
        #[arg(long)]
        warm_start: Option<PathBuf>,
    },
    /// Check a schedule against an instance and report its objective.
    Validate {
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Write random instances into the --out directory.
    Generate {
        #[arg(long, conflicts_with = "presets")]
        jobs: Option<usize>,
        #[arg(long)]
        machines: Option<usize>,
        #[arg(long)]
        families: Option<usize>,
        /// Every preset size configuration.
        #[arg(long)]
        presets: bool,
        #[arg(long, value_enum, default_value = "mixed")]
        class: ClassArg,
        /// Instances per threshold class.
        #[arg(long, default_value_t = PER_CLASS)]
        count: usize,
    },
    /// Write the time-indexed integer program in LP format.
    ExportLp {
        #[arg(long, value_enum, default_value = "disq")]
        beta: Beta,
        #[arg(long, default_value_t = DEFAULT_HORIZON_CAP)]
        horizon_cap: u32,
    },
    /// Run solvers over every instance of --dir and print indicator tables.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "bnb,sch,qch", value_parser = parse_solver)]
        solvers: Vec<SolverKind>,
        /// Also write per-instance records as CSV.
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse()
}

fn parse_objective(s: &str) -> Result<ObjectiveArg, String> {
    s.parse()
}

enum Failure {
    Usage(anyhow::Error),
    Infeasible(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let time_limit = match cli.time_limit {
        Some(t) if !(t > 0.0 && t.is_finite()) => return Err(usage(anyhow!("--time-limit must be positive"))),
        t => t.map(Duration::from_secs_f64),
    };
    match cli.command {
        Command::Solve { solver, warm_start } => {
            let inst = load_instance(cli.instance.as_deref())?;
            let spec = cli.objective.unwrap_or(ObjectiveArg::LexDisq).spec(&inst);
            let warm = match warm_start {
                Some(p) => Some(Schedule::from_json(&inst, &read(&p)?).map_err(usage)?),
                None => None,
            };
            let result = run_solver(&inst, solver, &spec, time_limit, warm).map_err(|e| usage(anyhow!("{e}")))?;
            emit(cli.out.as_deref(), &serde_json::to_string_pretty(&result.to_json(&inst)).context("json")?)?;
            if result.status == SolveStatus::Infeasible {
                return Err(Failure::Infeasible("proven infeasible".into()));
            }
            Ok(())
        }
        Command::Validate { schedule } => {
            let inst = load_instance(cli.instance.as_deref())?;
            let spec = cli.objective.unwrap_or(ObjectiveArg::LexDisq).spec(&inst);
            let sched = Schedule::from_json(&inst, &read(&schedule)?).map_err(usage)?;
            let report = evaluation_report(&inst, &sched, &spec);
            emit(cli.out.as_deref(), &serde_json::to_string_pretty(&report).context("json")?)?;
            let violations = check_feasibility(&inst, &sched);
            if !violations.is_empty() {
                return Err(Failure::Infeasible(format!("schedule infeasible: {} violations", violations.len())));
            }
            Ok(())
        }
        Command::Generate { jobs, machines, families, presets, class, count } => {
            let out = cli.out.ok_or_else(|| usage(anyhow!("generate needs --out <dir>")))?;
            let seed = cli.seed.unwrap_or(0);
            let sizes: Vec<(usize, usize, usize)> = if presets {
                PRESETS.to_vec()
            } else {
                match (jobs, machines, families) {
                    (Some(n), Some(m), Some(f)) => vec![(n, m, f)],
                    _ => return Err(usage(anyhow!("give --jobs, --machines and --families, or --presets"))),
                }
            };
            std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
            let mut written = 0;
            for (n, m, f) in sizes {
                for g in generate_sized(n, m, f, seed, class, count).map_err(usage)? {
                    let path = out.join(&g.file_name);
                    std::fs::write(&path, g.instance.to_json()).with_context(|| format!("cannot write {}", path.display()))?;
                    written += 1;
                }
            }
            eprintln!("wrote {written} instances to {}", out.display());
            Ok(())
        }
        Command::ExportLp { beta, horizon_cap } => {
            let inst = load_instance(cli.instance.as_deref())?;
            let spec = match beta {
                Beta::Flow => ObjectiveSpec::weighted_flow_priority(),
                Beta::Disq => ObjectiveSpec::weighted_disq_priority(&inst),
            };
            let lp = export_ip3(&inst, &spec, horizon_cap).map_err(usage)?;
            emit(cli.out.as_deref(), &lp)
        }
        Command::Bench { solvers, records, threads } => {
            let dir = cli.dir.ok_or_else(|| usage(anyhow!("bench needs --dir <dir>")))?;
            if !dir.is_dir() {
                return Err(usage(anyhow!("{} is not a directory", dir.display())));
            }
            let config = BenchConfig {
                solvers,
                objective: cli.objective.unwrap_or(ObjectiveArg::LexDisq),
                time_limit: time_limit.unwrap_or(Duration::from_secs(30)),
                threads,
            };
            let report = run_benchmark(&dir, &config).map_err(usage)?;
            if let Some(path) = records {
                std::fs::write(&path, report.records_csv()?).with_context(|| format!("cannot write {}", path.display()))?;
            }
            let text = match cli.format.unwrap_or(Format::Md) {
                Format::Md => report.to_markdown(),
                Format::Csv => report.to_csv()?,
                Format::Json => report.to_json()?,
            };
            emit(cli.out.as_deref(), &text)
        }
    }
}

fn generate_sized(
    n: usize,
    m: usize,
    f: usize,
    seed: u64,
    class: ClassArg,
    count: usize,
) -> anyhow::Result<Vec<GeneratedInstance>> {
    let class = match class {
        ClassArg::Mixed => return Ok(generate_set(n, m, f, seed, count)?),
        ClassArg::Small => ThresholdClass::Small,
        ClassArg::Medium => ThresholdClass::Medium,
        ClassArg::Large => ThresholdClass::Large,
    };
    (1..=count)
        .map(|k| {
            let config = GeneratorConfig {
                jobs: n,
                machines: m,
                families: f,
                class,
                seed: generator::derive_seed(seed, class, k),
            };
            Ok(GeneratedInstance { file_name: generator::file_name(&config, k), config, instance: generate(&config)? })
        })
        .collect()
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(anyhow!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: Option<&Path>) -> Result<Instance, Failure> {
    let Some(path) = path else {
        return Err(usage(anyhow!("missing --instance <file>")));
    };
    Instance::from_json(&read(path)?).map_err(|e| usage(anyhow!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{}", text.trim_end()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(anyhow::Error::from(e).into()),
                _ => {}
            }
        }
    }
    Ok(())
}
