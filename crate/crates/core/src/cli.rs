//! The `mga` command-line tool.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::baselines::{enumerate_all, write_sequence_table};
use crate::config::{ConfigError, LoadedConfig};
use crate::legs::{evaluate_plan, PlanOutcome};
use crate::planner::coding::{format_vector, parse_vector, sequence_label};
use crate::planner::{decode, search, SearchConfig, SearchResult};
use crate::plot::render_svg;
use crate::problem::Problem;
use crate::report::{
    per_sequence_best, read_json, write_json, RunSummary, ScanRow, SearchReport, StatsRun,
    StatsSummary,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mga", version, about = "Planar MGA trajectory model and ant-colony plan search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Case-study config file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (or file for `plot`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_evals: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Schedule every trajectory of one plan.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated solution vector; defaults to the config's golden plan.
        #[arg(long)]
        solution: Option<String>,
    },
    /// Run one seeded search.
    Search {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Evaluate the whole canonical space.
    Enumerate {
        #[command(flatten)]
        common: Common,
    },
    /// Repeat the search over a grid of launch dates.
    ScanDates {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Render one trajectory as SVG.
    Plot {
        #[command(flatten)]
        common: Common,
        /// A `results.json` written by `search`.
        #[arg(long)]
        results: Option<PathBuf>,
        /// 0-based entry of the results file.
        #[arg(long, default_value_t = 0)]
        entry: usize,
        /// Solution vector to plot instead of a results entry.
        #[arg(long)]
        solution: Option<String>,
        /// Branch id such as `0.1.0`; defaults to the best branch.
        #[arg(long)]
        branch: Option<String>,
    },
    /// Success statistics over repeated seeded searches.
    Stats {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        reps: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Infeasible(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Normal output goes to `out`, diagnostics to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = e.print();
                return EXIT_USAGE;
            }
            // --help and --version
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Evaluate { common, solution } => cmd_evaluate(&common, solution.as_deref(), out),
        Command::Search { common, search } => cmd_search(&common, &search, out),
        Command::Enumerate { common } => cmd_enumerate(&common, out),
        Command::ScanDates {
            common,
            search,
            reps,
        } => cmd_scan_dates(&common, &search, reps, out),
        Command::Plot {
            common,
            results,
            entry,
            solution,
            branch,
        } => cmd_plot(&common, results.as_deref(), entry, solution.as_deref(), branch.as_deref(), out),
        Command::Stats {
            common,
            search,
            reps,
        } => cmd_stats(&common, &search, reps, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Infeasible(m)) => {
            eprintln!("{m}");
            EXIT_INFEASIBLE
        }
        Err(Failure::Io(m)) => {
            eprintln!("I/O error: {m}");
            EXIT_IO
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

fn out_dir(common: &Common, cfg: &LoadedConfig, default: &str) -> Result<PathBuf, Failure> {
    let dir = common
        .out
        .clone()
        .or_else(|| cfg.config.out.clone())
        .unwrap_or_else(|| PathBuf::from(default).join(&cfg.config.name));
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    Ok(dir)
}

fn search_config(cfg: &LoadedConfig, args: &SearchArgs) -> SearchConfig {
    let mut sc = cfg.config.search.clone();
    if let Some(seed) = args.seed {
        sc.seed = seed;
    }
    if let Some(m) = args.max_evals {
        sc.max_evals = m;
    }
    sc
}

fn parse_solution(problem: &Problem, text: &str) -> Result<Vec<u32>, Failure> {
    let s = parse_vector(text)
        .ok_or_else(|| Failure::Usage(format!("cannot parse solution vector `{text}`")))?;
    crate::planner::coding::validate(problem, &s).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(s)
}

/// Human-readable report of a plan evaluation.
pub fn format_evaluation(problem: &Problem, s: &[u32], outcome: &PlanOutcome) -> String {
    let mut t = String::new();
    let plan = decode(problem, s).expect("validated vector");
    let _ = writeln!(t, "plan {}  s = {}", sequence_label(problem, s), format_vector(s));
    for (i, (target, p)) in plan.targets.iter().zip(&plan.params).enumerate() {
        let _ = writeln!(
            t,
            "leg {}: -> {:<10} m_dsm = {:+.4} km/s  n_rev1 = {}  n_rev2 = {}  f_pa = {}  f_12 = {}",
            i + 1,
            problem.body_name(*target),
            p.m_dsm,
            p.n_rev1,
            p.n_rev2,
            u8::from(p.f_pa),
            u8::from(p.f_12)
        );
    }
    match outcome {
        PlanOutcome::Infeasible { l_u } => {
            let _ = writeln!(t, "infeasible at leg {l_u}");
        }
        PlanOutcome::Feasible { records, f_obj } => {
            let _ = writeln!(t, "{} trajectories", records.len());
            for r in records {
                let id: Vec<String> = r.path_id.iter().map(usize::to_string).collect();
                let _ = writeln!(
                    t,
                    "branch {}: v0 = {:.4} km/s  T = [{}] d  dv = [{}] km/s  v_inf = {:.4} km/s  T_total = {:.3} d  f_obj = {:.6}",
                    id.join("."),
                    r.v0,
                    join(&r.leg_times, 3),
                    join(&r.leg_dv, 4),
                    r.v_inf_arrival,
                    r.total_t,
                    r.f_obj
                );
            }
            let _ = writeln!(t, "f_obj = {f_obj:.6}");
        }
    }
    t
}

fn join(v: &[f64], prec: usize) -> String {
    v.iter()
        .map(|x| format!("{x:.prec$}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn cmd_evaluate(common: &Common, solution: Option<&str>, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = LoadedConfig::load(&common.config)?;
    let problem = cfg.problem()?;
    let s = match solution {
        Some(text) => parse_solution(&problem, text)?,
        None => {
            let g = cfg.config.golden.as_ref().ok_or_else(|| {
                Failure::Usage("no --solution given and the config has no golden plan".into())
            })?;
            crate::planner::coding::validate(&problem, &g.solution)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            g.solution.clone()
        }
    };
    let plan = decode(&problem, &s).map_err(|e| Failure::Usage(e.to_string()))?;
    let outcome = evaluate_plan(&problem, &plan);
    emit(out, &format_evaluation(&problem, &s, &outcome))?;
    if let Some(dir) = &common.out {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let path = dir.join("evaluation.json");
        write_json(&path, &outcome).map_err(|e| io_err(&path, e))?;
    }
    match outcome {
        PlanOutcome::Feasible { .. } => Ok(()),
        PlanOutcome::Infeasible { l_u } => Err(Failure::Infeasible(format!("plan infeasible at leg {l_u}"))),
    }
}

fn report_of(cfg: &LoadedConfig, problem: &Problem, seed: u64, res: &SearchResult) -> SearchReport {
    SearchReport {
        name: cfg.config.name.clone(),
        seed,
        t0: problem.spec.t0,
        stats: res.stats.clone(),
        per_sequence: per_sequence_best(&res.feasible),
        entries: res.feasible.clone(),
    }
}

fn cmd_search(common: &Common, args: &SearchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = LoadedConfig::load(&common.config)?;
    let problem = cfg.problem()?;
    let sc = search_config(&cfg, args);
    let dir = out_dir(common, &cfg, "results")?;
    let start = Instant::now();
    let res = search(&problem, &sc);
    let wall = start.elapsed().as_secs_f64();
    let report = report_of(&cfg, &problem, sc.seed, &res);

    let path = dir.join("results.json");
    write_json(&path, &report).map_err(|e| io_err(&path, e))?;
    let path = dir.join("sequences.csv");
    let f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
    write_sequence_table(&report.per_sequence, f).map_err(|e| io_err(&path, e))?;
    let summary = RunSummary {
        name: cfg.config.name.clone(),
        seed: sc.seed,
        n_eval: res.stats.n_eval,
        n_iter: res.stats.n_iter,
        n_feasible: res.stats.n_feasible,
        best_sequence: res.best().map(|b| b.sequence.clone()),
        best_f_obj: res.best().map(|b| b.f_obj),
        wall_time_s: wall,
    };
    let path = dir.join("summary.json");
    write_json(&path, &summary).map_err(|e| io_err(&path, e))?;

    let mut t = String::new();
    let _ = writeln!(
        t,
        "{}: seed {}  evaluations {}  iterations {}  feasible {}",
        cfg.config.name, sc.seed, res.stats.n_eval, res.stats.n_iter, res.stats.n_feasible
    );
    for row in &report.per_sequence {
        let _ = writeln!(
            t,
            "  {:<8} f_obj = {:.4}  v_inf = {:.4} km/s  dv = {:.3} km/s  T = {:.2} d  s = {}",
            row.sequence,
            row.f_obj,
            row.v_inf,
            row.total_dv,
            row.total_t,
            format_vector(&row.s)
        );
    }
    let _ = writeln!(t, "results written to {}", dir.display());
    emit(out, &t)?;
    if res.feasible.is_empty() {
        return Err(Failure::Infeasible("no feasible solution found".into()));
    }
    Ok(())
}

fn cmd_enumerate(common: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = LoadedConfig::load(&common.config)?;
    let problem = cfg.problem()?;
    let report = enumerate_all(&problem, cfg.enumeration_cap()).map_err(|e| Failure::Usage(e.to_string()))?;
    let dir = out_dir(common, &cfg, "enumeration")?;
    let path = dir.join("report.json");
    write_json(&path, &report).map_err(|e| io_err(&path, e))?;
    let path = dir.join("sequences.csv");
    let f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
    report.write_sequences_csv(f).map_err(|e| io_err(&path, e))?;
    let path = dir.join("outcomes.csv");
    let f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
    report
        .write_outcomes_csv(&problem, std::io::BufWriter::new(f))
        .map_err(|e| io_err(&path, e))?;

    let mut t = String::new();
    let _ = writeln!(
        t,
        "{}: raw {}  canonical {}  feasible {}  ({:.1} s)",
        cfg.config.name, report.raw_size, report.canonical_size, report.n_feasible, report.wall_time_s
    );
    for row in &report.per_sequence {
        let _ = writeln!(
            t,
            "  {:<8} f_obj = {:.4}  v_inf = {:.4} km/s  dv = {:.3} km/s  T = {:.2} d  s = {}",
            row.sequence,
            row.f_obj,
            row.v_inf,
            row.total_dv,
            row.total_t,
            format_vector(&row.s)
        );
    }
    emit(out, &t)?;
    if report.best.is_none() {
        return Err(Failure::Infeasible("no feasible solution in the space".into()));
    }
    Ok(())
}

/// Runs `reps` searches with seeds `seed, seed + 1, ...`.
pub fn campaign(problem: &Problem, sc: &SearchConfig, reps: usize) -> Vec<(u64, SearchResult)> {
    (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut c = sc.clone();
            c.seed = sc.seed + r;
            (c.seed, search(problem, &c))
        })
        .collect()
}

fn stats_run(seed: u64, res: &SearchResult) -> StatsRun {
    StatsRun {
        seed,
        n_eval: res.stats.n_eval,
        n_feasible: res.stats.n_feasible,
        best_sequence: res.best().map(|b| b.sequence.clone()),
        best_f_obj: res.best().map(|b| b.f_obj),
    }
}

fn cmd_stats(common: &Common, args: &SearchArgs, reps: Option<usize>, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = LoadedConfig::load(&common.config)?;
    let problem = cfg.problem()?;
    let sc = search_config(&cfg, args);
    let stats_cfg = cfg.config.stats.clone();
    let reps = reps.or(stats_cfg.as_ref().map(|s| s.reps)).unwrap_or(10);
    let threshold = stats_cfg.map(|s| s.success_threshold);
    let dir = out_dir(common, &cfg, "stats")?;
    let runs: Vec<StatsRun> = campaign(&problem, &sc, reps)
        .iter()
        .map(|(seed, res)| stats_run(*seed, res))
        .collect();
    let summary = StatsSummary::from_runs(&cfg.config.name, threshold, runs);
    let path = dir.join("stats.json");
    write_json(&path, &summary).map_err(|e| io_err(&path, e))?;
    let path = dir.join("runs.csv");
    write_runs_csv(&path, &summary.runs)?;

    let mut t = String::new();
    let _ = writeln!(
        t,
        "{}: {} runs  feasible {:.0}%  {}mean best {}  mean evaluations {:.1}",
        summary.name,
        summary.reps,
        100.0 * summary.feasible_rate,
        match (summary.success_threshold, summary.success_rate) {
            (Some(th), Some(rate)) => format!("below {th} {:.0}%  ", 100.0 * rate),
            _ => String::new(),
        },
        summary.mean_best.map_or("-".to_string(), |m| format!("{m:.4}")),
        summary.mean_evals
    );
    emit(out, &t)
}

fn write_runs_csv(path: &Path, runs: &[StatsRun]) -> Result<(), Failure> {
    let f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::Writer::from_writer(f);
    let res: Result<(), csv::Error> = (|| {
        w.write_record(["seed", "n_eval", "n_feasible", "best_sequence", "best_f_obj"])?;
        for r in runs {
            w.write_record([
                r.seed.to_string(),
                r.n_eval.to_string(),
                r.n_feasible.to_string(),
                r.best_sequence.clone().unwrap_or_default(),
                r.best_f_obj.map(|f| f.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })();
    res.map_err(|e| io_err(path, e))
}

/// Best solution over `reps` searches at each launch date.
pub fn scan_dates(cfg: &LoadedConfig, sc: &SearchConfig, dates: &[f64], reps: usize) -> Result<Vec<ScanRow>, ConfigError> {
    let mut rows = Vec::with_capacity(dates.len());
    for &t0 in dates {
        let problem = cfg.problem_at(t0)?;
        let results = campaign(&problem, sc, reps);
        let feasible_runs = results.iter().filter(|(_, r)| !r.feasible.is_empty()).count();
        let best = results
            .iter()
            .filter_map(|(_, r)| r.best())
            .min_by(|a, b| a.f_obj.total_cmp(&b.f_obj).then_with(|| a.s.cmp(&b.s)));
        rows.push(ScanRow {
            t0,
            sequence: best.map(|b| b.sequence.clone()),
            f_obj: best.map(|b| b.f_obj),
            s: best.map(|b| b.s.clone()),
            feasible_runs,
            runs: reps,
        });
    }
    Ok(rows)
}

fn cmd_scan_dates(common: &Common, args: &SearchArgs, reps: Option<usize>, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = LoadedConfig::load(&common.config)?;
    let scan = cfg
        .config
        .scan
        .clone()
        .ok_or_else(|| Failure::Usage("config has no scan section".into()))?;
    let dates = scan.dates()?;
    let sc = search_config(&cfg, args);
    let reps = reps.or(cfg.config.stats.as_ref().map(|s| s.reps)).unwrap_or(1);
    let rows = scan_dates(&cfg, &sc, &dates, reps)?;
    let dir = out_dir(common, &cfg, "scan")?;
    let path = dir.join("scan.json");
    write_json(&path, &rows).map_err(|e| io_err(&path, e))?;
    let path = dir.join("scan.csv");
    let f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
    let mut w = csv::Writer::from_writer(f);
    let res: Result<(), csv::Error> = (|| {
        w.write_record(["t0", "sequence", "f_obj", "s", "feasible_runs", "runs"])?;
        for r in &rows {
            w.write_record([
                r.t0.to_string(),
                r.sequence.clone().unwrap_or_else(|| "infeasible".into()),
                r.f_obj.map(|f| f.to_string()).unwrap_or_default(),
                r.s.as_deref().map(format_vector).unwrap_or_default(),
                r.feasible_runs.to_string(),
                r.runs.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })();
    res.map_err(|e| io_err(&path, e))?;

    let mut t = String::new();
    let _ = writeln!(t, "{:>10}  {:<10}  {:>8}", "t0", "sequence", "f_obj");
    for r in &rows {
        let _ = writeln!(
            t,
            "{:>10.1}  {:<10}  {:>8}",
            r.t0,
            r.sequence.as_deref().unwrap_or("infeasible"),
            r.f_obj.map_or("-".to_string(), |f| format!("{f:.4}"))
        );
    }
    emit(out, &t)?;
    if rows.iter().all(|r| r.sequence.is_none()) {
        return Err(Failure::Infeasible("no launch date produced a feasible solution".into()));
    }
    Ok(())
}

fn cmd_plot(
    common: &Common,
    results: Option<&Path>,
    entry: usize,
    solution: Option<&str>,
    branch: Option<&str>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let cfg = LoadedConfig::load(&common.config)?;
    let mut problem = cfg.problem()?;
    let (s, best_branch) = match (results, solution) {
        (Some(path), None) => {
            let report: SearchReport = read_json(path).map_err(|e| io_err(path, e))?;
            problem = cfg.problem_at(report.t0)?;
            let e = report
                .entries
                .get(entry)
                .ok_or_else(|| Failure::Usage(format!("results file has no entry {entry}")))?;
            (e.s.clone(), Some(e.record.path_id.clone()))
        }
        (None, Some(text)) => (parse_solution(&problem, text)?, None),
        _ => return Err(Failure::Usage("give exactly one of --results or --solution".into())),
    };
    let plan = decode(&problem, &s).map_err(|e| Failure::Usage(e.to_string()))?;
    let path_id = match branch {
        Some(b) => b
            .split('.')
            .map(|p| p.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Failure::Usage(format!("bad branch id `{b}`")))?,
        None => match best_branch {
            Some(p) => p,
            None => {
                let outcome = evaluate_plan(&problem, &plan);
                match outcome.best() {
                    Some(r) => r.path_id.clone(),
                    None => return Err(Failure::Infeasible("plan is infeasible".into())),
                }
            }
        },
    };
    let svg = render_svg(&problem, &plan, &path_id).map_err(|e| Failure::Usage(format!("branch {path_id:?}: {e}")))?;
    let path = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.svg", cfg.config.name)));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    fs::write(&path, svg).map_err(|e| io_err(&path, e))?;
    emit(out, &format!("plot written to {}\n", path.display()))
}
