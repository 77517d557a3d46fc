//! Solver orchestration and directory benchmarking.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::ai::{practical_ai_solve, AiParams, AiStats};
use crate::ani::{ani_solve, AniParams, AniStats};
use crate::bpplib::parse_instance;
use crate::instance::Instance;
use crate::solution::{SolveOutcome, Status};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Ai,
    Ani,
    /// ANI pipeline first, AI search when it does not reach `Optimal`.
    Auto,
    Both,
}

impl SolverChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ai" => Some(Self::Ai),
            "ani" => Some(Self::Ani),
            "auto" => Some(Self::Auto),
            "both" => Some(Self::Both),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunParams {
    pub ai: AiParams,
    pub ani: AniParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverRun {
    /// `ai`, `ani` or `auto`.
    pub solver: String,
    pub outcome: SolveOutcome,
    pub ai_stats: Option<AiStats>,
    pub ani_stats: Option<AniStats>,
    /// Seconds.
    pub time: f64,
}

/// One run per requested solver; `Both` gives two independent runs.
pub fn run_solvers(inst: &Instance, choice: SolverChoice, params: &RunParams) -> Vec<SolverRun> {
    match choice {
        SolverChoice::Ai => vec![run_ai(inst, params)],
        SolverChoice::Ani => vec![run_ani(inst, params)],
        SolverChoice::Both => vec![run_ai(inst, params), run_ani(inst, params)],
        SolverChoice::Auto => {
            let start = Instant::now();
            let ani = run_ani(inst, params);
            let mut run = if ani.outcome.status == Status::Optimal {
                ani
            } else {
                let ai = run_ai(inst, params);
                // Inapplicable only when both say so.
                let outcome = if ai.outcome.status == Status::Inapplicable {
                    ani.outcome
                } else {
                    ai.outcome
                };
                SolverRun {
                    outcome,
                    ani_stats: ani.ani_stats,
                    ..ai
                }
            };
            run.solver = "auto".into();
            run.time = start.elapsed().as_secs_f64();
            vec![run]
        }
    }
}

fn run_ai(inst: &Instance, params: &RunParams) -> SolverRun {
    let start = Instant::now();
    let (outcome, stats) = practical_ai_solve(inst, &params.ai);
    SolverRun {
        solver: "ai".into(),
        outcome,
        ai_stats: Some(stats),
        ani_stats: None,
        time: start.elapsed().as_secs_f64(),
    }
}

fn run_ani(inst: &Instance, params: &RunParams) -> SolverRun {
    let start = Instant::now();
    let (outcome, stats) = ani_solve(inst, &params.ani);
    SolverRun {
        solver: "ani".into(),
        outcome,
        ai_stats: None,
        ani_stats: Some(stats),
        time: start.elapsed().as_secs_f64(),
    }
}

/// One CSV line. Instance rows have `count = 1`; aggregate rows average the
/// stats columns over the eligible instances of their class and the time
/// over all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub kind: String,
    pub class: String,
    pub name: String,
    pub solver: String,
    pub count: u64,
    pub eligible: u64,
    pub solved: u64,
    pub status: String,
    pub value: Option<u64>,
    pub time: f64,
    pub max_time: f64,
    pub rec_calls: f64,
    pub reach_base: u64,
    pub base_cases: f64,
    pub iterations: f64,
    pub fixed_triplets: f64,
    pub residual_size: f64,
    pub dp_ratio: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub schema: u32,
    pub rows: Vec<Row>,
    pub aggregates: Vec<Row>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct BatchOptions {
    pub choice: Option<SolverChoice>,
    pub params: RunParams,
    /// Class from the first capture group (or whole match) on the file name;
    /// otherwise the parent directory name.
    pub class_regex: Option<Regex>,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
}

/// Instance files under `dir`, sorted by path.
pub fn collect_files(dir: &Path) -> (Vec<PathBuf>, Vec<String>) {
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        match entry {
            Ok(e) if e.file_type().is_file() && is_instance_file(e.path()) => files.push(e.into_path()),
            Ok(_) => {}
            Err(err) => warnings.push(format!("skipping entry: {err}")),
        }
    }
    files.sort();
    (files, warnings)
}

/// `.txt`, `.bpp`, `.csp` or no extension.
pub fn is_instance_file(path: &Path) -> bool {
    match path.extension().and_then(|e| e.to_str()) {
        None => true,
        Some(e) => matches!(e.to_ascii_lowercase().as_str(), "txt" | "bpp" | "csp"),
    }
}

pub fn class_of(path: &Path, root: &Path, re: Option<&Regex>) -> String {
    let file = path.file_name().and_then(|s| s.to_str()).unwrap_or_default();
    if let Some(re) = re {
        return match re.captures(file) {
            Some(c) => c.get(1).or_else(|| c.get(0)).map_or("", |m| m.as_str()).to_string(),
            None => "unmatched".to_string(),
        };
    }
    let parent = path.parent().unwrap_or(root);
    parent
        .file_name()
        .or_else(|| root.file_name())
        .and_then(|s| s.to_str())
        .unwrap_or(".")
        .to_string()
}

pub fn run_batch(dir: &Path, opts: &BatchOptions) -> BatchReport {
    let (files, mut warnings) = collect_files(dir);
    let choice = opts.choice.unwrap_or(SolverChoice::Auto);
    let work = |path: &PathBuf| -> std::result::Result<Vec<Row>, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let inst = parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let class = class_of(path, dir, opts.class_regex.as_ref());
        let name = path
            .strip_prefix(dir)
            .unwrap_or(path)
            .to_string_lossy()
            .into_owned();
        let eligible = inst.check_eligibility().eligible;
        Ok(run_solvers(&inst, choice, &opts.params)
            .into_iter()
            .map(|r| instance_row(&class, &name, eligible, &r))
            .collect())
    };
    let results: Vec<_> = match opts.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| files.par_iter().map(work).collect()),
            Err(e) => {
                warnings.push(format!("thread pool: {e}; running serially"));
                files.iter().map(work).collect()
            }
        },
        None => files.par_iter().map(work).collect(),
    };
    let mut rows = Vec::new();
    for r in results {
        match r {
            Ok(mut rs) => rows.append(&mut rs),
            Err(w) => warnings.push(w),
        }
    }
    let aggregates = aggregate(&rows);
    BatchReport {
        schema: SCHEMA_VERSION,
        rows,
        aggregates,
        warnings,
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Optimal => "optimal",
        Status::Unsolved => "unsolved",
        Status::Inapplicable => "inapplicable",
    }
}

pub fn instance_row(class: &str, name: &str, eligible: bool, run: &SolverRun) -> Row {
    let ai = run.ai_stats.unwrap_or_default();
    let ani = run.ani_stats.unwrap_or_default();
    Row {
        kind: "instance".into(),
        class: class.into(),
        name: name.into(),
        solver: run.solver.clone(),
        count: 1,
        eligible: eligible as u64,
        solved: (run.outcome.status == Status::Optimal) as u64,
        status: status_str(run.outcome.status).into(),
        value: run.outcome.value(),
        time: run.time,
        max_time: run.time,
        rec_calls: ai.recursive_calls as f64,
        reach_base: (ai.base_cases_reached > 0) as u64,
        base_cases: ai.base_cases_reached as f64,
        iterations: ani.iterations as f64,
        fixed_triplets: ani.fixed_triplets as f64,
        residual_size: ani.residual_size as f64,
        dp_ratio: ani.dp_ratio,
    }
}

/// Per `(class, solver)` aggregates, in sorted order.
pub fn aggregate(rows: &[Row]) -> Vec<Row> {
    let mut groups: BTreeMap<(String, String), Vec<&Row>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.kind == "instance") {
        groups.entry((r.class.clone(), r.solver.clone())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((class, solver), rs)| {
            let eligible: Vec<&&Row> = rs.iter().filter(|r| r.eligible == 1).collect();
            let avg = |f: fn(&Row) -> f64| -> f64 {
                if eligible.is_empty() {
                    0.0
                } else {
                    eligible.iter().map(|r| f(r)).sum::<f64>() / eligible.len() as f64
                }
            };
            Row {
                kind: "aggregate".into(),
                class,
                name: String::new(),
                solver,
                count: rs.len() as u64,
                eligible: eligible.len() as u64,
                solved: rs.iter().map(|r| r.solved).sum(),
                status: String::new(),
                value: None,
                time: rs.iter().map(|r| r.time).sum::<f64>() / rs.len() as f64,
                max_time: rs.iter().map(|r| r.time).fold(0.0, f64::max),
                rec_calls: avg(|r| r.rec_calls),
                reach_base: eligible.iter().map(|r| r.reach_base).sum(),
                base_cases: avg(|r| r.base_cases),
                iterations: avg(|r| r.iterations),
                fixed_triplets: avg(|r| r.fixed_triplets),
                residual_size: avg(|r| r.residual_size),
                dp_ratio: avg(|r| r.dp_ratio),
            }
        })
        .collect()
}

impl BatchReport {
    /// Instance rows then aggregate rows under one header.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("write to memory");
        for r in self.rows.iter().chain(&self.aggregates) {
            w.serialize(r).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub const CSV_HEADER: [&str; 18] = [
    "kind",
    "class",
    "name",
    "solver",
    "count",
    "eligible",
    "solved",
    "status",
    "value",
    "time",
    "max_time",
    "rec_calls",
    "reach_base",
    "base_cases",
    "iterations",
    "fixed_triplets",
    "residual_size",
    "dp_ratio",
];

/// Reads rows back from `to_csv` output.
pub fn parse_csv(text: &str) -> Result<Vec<Row>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let r = BatchReport {
            schema: SCHEMA_VERSION,
            ..BatchReport::default()
        };
        assert_eq!(r.to_csv().lines().count(), 1);
        assert!(r.to_json().contains("\"schema\": 1"));
    }

    #[test]
    fn class_from_regex_or_parent() {
        let root = Path::new("/data");
        let p = Path::new("/data/ANI_201/ANI_201_3.txt");
        assert_eq!(class_of(p, root, None), "ANI_201");
        let re = Regex::new(r"^([A-Z]+)_").unwrap();
        assert_eq!(class_of(p, root, Some(&re)), "ANI");
        let re = Regex::new(r"\d+").unwrap();
        assert_eq!(class_of(p, root, Some(&re)), "201");
    }

    #[test]
    fn auto_falls_back() {
        let inst = Instance::normalize([(6, 1), (5, 1)], 10).unwrap();
        let runs = run_solvers(&inst, SolverChoice::Auto, &RunParams::default());
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].solver, "auto");
        assert_eq!(runs[0].outcome.status, Status::Inapplicable);
        let runs = run_solvers(&inst, SolverChoice::Both, &RunParams::default());
        assert_eq!(runs.iter().map(|r| r.solver.as_str()).collect::<Vec<_>>(), ["ai", "ani"]);
    }
}
