use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use aiani_core::ai::AiParams;
use aiani_core::ani::{AniParams, FixMode};
use aiani_core::batch::{run_batch, run_solvers, BatchOptions, RunParams, SolverChoice, SCHEMA_VERSION};
use aiani_core::bpplib::{parse_instance, parse_solution, write_instance_units, write_solution_text};
use aiani_core::generator::{
    auto_scale, derive_ai, fixture_original, generate_ani, scale_instance, validate_original, GenParams,
};
use aiani_core::{verify_solution, Instance, Status};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

const EXIT_IO: u8 = 1;
const EXIT_INVALID: u8 = 4;

#[derive(Parser)]
#[command(name = "aiani", version, about = "Perfect-packing solvers for AI/ANI bin packing instances")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file.
    Solve(SolveArgs),
    /// Solve every instance under a directory and report CSV/JSON.
    Batch(BatchArgs),
    /// Generate ANI and/or AI instances from the shipped original.
    Generate(GenerateArgs),
    /// Check a solution file against an instance.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Print the eligibility report of an instance.
    Eligibility { instance: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Ai,
    Ani,
    Auto,
    Both,
}

impl From<Solver> for SolverChoice {
    fn from(s: Solver) -> Self {
        match s {
            Solver::Ai => SolverChoice::Ai,
            Solver::Ani => SolverChoice::Ani,
            Solver::Auto => SolverChoice::Auto,
            Solver::Both => SolverChoice::Both,
        }
    }
}

#[derive(Args)]
struct SolverFlags {
    #[arg(long, value_enum, default_value = "auto")]
    solver: Solver,
    #[arg(long, default_value_t = 15)]
    alpha: u64,
    #[arg(long, default_value_t = 3)]
    beta: u64,
    /// Accept identified triplets without the completion check.
    #[arg(long)]
    fast: bool,
    /// Merge a head with a mandatory partner when no triplet is fixed.
    #[arg(long)]
    merge: bool,
    #[arg(long, default_value_t = 5)]
    residual_cap: u64,
    /// Seconds per solver run.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Recorded in the stats output; the solvers are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverFlags {
    fn params(&self) -> Result<RunParams> {
        let time_limit = match self.time_limit {
            Some(s) if !(s.is_finite() && s >= 0.0) => bail!("--time-limit must be a nonnegative number"),
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(RunParams {
            ai: AiParams {
                alpha: self.alpha,
                beta: self.beta,
                time_limit,
            },
            ani: AniParams {
                alpha: self.alpha,
                beta: self.beta,
                residual_cap: self.residual_cap,
                mode: if self.fast { FixMode::Fast } else { FixMode::Checked },
                merge: self.merge,
                time_limit,
                ..AniParams::default()
            },
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    path: PathBuf,
    #[command(flatten)]
    flags: SolverFlags,
    /// Write run statistics as JSON.
    #[arg(long)]
    stats_out: Option<PathBuf>,
    /// Write the first optimal solution (JSON if the name ends in .json).
    #[arg(long)]
    solution_out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    dir: PathBuf,
    #[command(flatten)]
    flags: SolverFlags,
    /// Class from the first capture group on each file name.
    #[arg(long)]
    class_regex: Option<String>,
    #[arg(long)]
    jobs: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    csv_out: Option<PathBuf>,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenClass {
    Ani,
    Ai,
    Both,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "ani")]
    class: GenClass,
    #[arg(long, default_value_t = 0)]
    h: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Original instance file; defaults to the shipped one, scaled.
    #[arg(long)]
    original: Option<PathBuf>,
    /// Weight and capacity multiplier for the original.
    #[arg(long)]
    scale: Option<u64>,
    #[arg(long)]
    min_weight: Option<i64>,
    /// Allow heads lighter than W/2.
    #[arg(long)]
    no_enforce_large: bool,
    #[arg(long, default_value_t = 10_000)]
    max_retries: u64,
    /// Directory for `<name>.txt` and `<name>.log`; stdout when absent.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_IO)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::Batch(a) => batch(a),
        Command::Generate(a) => generate(a),
        Command::Verify { instance, solution } => verify(&instance, &solution),
        Command::Eligibility { instance } => eligibility(&instance),
    }
}

fn exit_code(s: Status) -> u8 {
    match s {
        Status::Optimal => 0,
        Status::Unsolved => 2,
        Status::Inapplicable => 3,
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst = parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance").to_string();
    Ok(inst.with_name(name))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn solve(a: SolveArgs) -> Result<u8> {
    let inst = read_instance(&a.path)?;
    let params = a.flags.params()?;
    let runs = run_solvers(&inst, a.flags.solver.into(), &params);
    for r in &runs {
        println!("[{}]", r.solver);
        println!("status: {:?}", r.outcome.status);
        match r.outcome.value() {
            Some(v) => println!("value: {v}"),
            None => println!("value: -"),
        }
        if let Some(c) = r.outcome.certificate {
            println!("certificate: {c:?}");
        }
        println!("time: {:.6}", r.time);
    }
    if let Some(p) = &a.stats_out {
        let stats = json!({
            "schema": SCHEMA_VERSION,
            "instance": inst.name(),
            "seed": a.flags.seed,
            "eligibility": inst.check_eligibility(),
            "runs": runs.iter().map(|r| json!({
                "solver": r.solver,
                "status": r.outcome.status,
                "value": r.outcome.value(),
                "certificate": r.outcome.certificate,
                "time": r.time,
                "ai_stats": r.ai_stats,
                "ani_stats": r.ani_stats,
            })).collect::<Vec<_>>(),
        });
        write(p, &serde_json::to_string_pretty(&stats)?)?;
    }
    if let Some(p) = &a.solution_out {
        if let Some(sol) = runs.iter().find_map(|r| r.outcome.solution.as_ref()) {
            let text = if p.extension().is_some_and(|e| e == "json") {
                serde_json::to_string_pretty(sol)?
            } else {
                write_solution_text(sol)
            };
            write(p, &text)?;
        }
    }
    let best = runs.iter().map(|r| r.outcome.status).min().unwrap_or(Status::Inapplicable);
    Ok(exit_code(best))
}

fn batch(a: BatchArgs) -> Result<u8> {
    if !a.dir.is_dir() {
        bail!("{} is not a directory", a.dir.display());
    }
    let class_regex = match &a.class_regex {
        Some(r) => Some(regex::Regex::new(r).context("compiling --class-regex")?),
        None => None,
    };
    let opts = BatchOptions {
        choice: Some(a.flags.solver.into()),
        params: a.flags.params()?,
        class_regex,
        jobs: a.jobs,
    };
    let report = run_batch(&a.dir, &opts);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let csv = report.to_csv();
    match &a.csv_out {
        Some(p) => write(p, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(p) = &a.json_out {
        write(p, &report.to_json())?;
    }
    Ok(0)
}

fn generate(a: GenerateArgs) -> Result<u8> {
    let params = GenParams {
        h: a.h,
        min_weight: a.min_weight,
        enforce_large: !a.no_enforce_large,
        seed: a.seed,
        max_retries: a.max_retries,
    };
    let orig = match &a.original {
        Some(p) => read_instance(p)?,
        None => fixture_original(),
    };
    let orig = scale_instance(&orig, a.scale.unwrap_or_else(|| if a.original.is_some() { 1 } else { auto_scale(a.h) }))?;
    let report = validate_original(&orig, 15, 3)?;
    if !report.passes(3) {
        bail!("original fails validation: {report:?}");
    }
    let (ani, log) = generate_ani(&orig, &params)?;
    let mut out: Vec<(Instance, String)> = Vec::new();
    if matches!(a.class, GenClass::Ani | GenClass::Both) {
        out.push((ani.clone(), log.to_text()));
    }
    if matches!(a.class, GenClass::Ai | GenClass::Both) {
        let (ai, split) = derive_ai(&ani, &orig, 3)?;
        let text = format!(
            "{}split {} = {} + {}\n",
            log.to_text(),
            split.weight,
            split.parts.0,
            split.parts.1
        );
        out.push((ai, text));
    }
    match &a.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (inst, log) in &out {
                let name = inst.name().unwrap_or("instance");
                write(&dir.join(format!("{name}.txt")), &write_instance_units(inst))?;
                write(&dir.join(format!("{name}.log")), log)?;
                println!("{}", dir.join(format!("{name}.txt")).display());
            }
        }
        None => {
            if out.len() > 1 {
                bail!("--class both needs --out-dir");
            }
            for (inst, log) in &out {
                print!("{}", write_instance_units(inst));
                eprint!("{log}");
            }
        }
    }
    Ok(0)
}

fn verify(instance: &Path, solution: &Path) -> Result<u8> {
    let inst = read_instance(instance)?;
    let text = std::fs::read_to_string(solution).with_context(|| format!("reading {}", solution.display()))?;
    let sol = parse_solution(&text).with_context(|| format!("parsing {}", solution.display()))?;
    let report = verify_solution(&inst, &sol);
    if report.is_valid() {
        println!("valid: {} bins{}", sol.value, if report.all_full { ", all full" } else { "" });
        Ok(0)
    } else {
        println!("invalid: {} violation(s)", report.violations.len());
        for v in &report.violations {
            println!("  {v}");
        }
        Ok(EXIT_INVALID)
    }
}

fn eligibility(path: &Path) -> Result<u8> {
    let inst = read_instance(path)?;
    let r = inst.check_eligibility();
    println!("capacity: {}", inst.capacity());
    println!("types: {}", inst.num_types());
    println!("units: {}", inst.total_units());
    println!("divisible: {}", r.divisible);
    match r.bins {
        Some(d) => println!("bins: {d}"),
        None => println!("bins: -"),
    }
    println!("large_count: {}", r.large_count);
    println!("large_distinct: {}", r.large_distinct);
    println!("eligible: {}", r.eligible);
    Ok(0)
}
