//! Running decomposition and optimization campaigns.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use svgcore::baselines::{dg_decompose, rdg_decompose, BaselineConfig};
use svgcore::cc::{decc_optimize, OptimizerConfig};
use svgcore::grouping::{svg_decompose, Decomposition, SvgConfig};
use svgcore::metrics::{dis, rho_split};
use svgcore::problems::{build_problem, BenchmarkProblem, CountingObjective, Function};
use svgcore::Execution;

use crate::config::{CampaignConfig, Decomposer};
use crate::error::{CliError, CliResult};
use crate::rows::{read_rows, rows_to_string, sort_rows, Row, RowKey, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Decompose,
    Optimize,
}

impl Mode {
    fn file_stem(self) -> &'static str {
        match self {
            Mode::Decompose => "decompose",
            Mode::Optimize => "optimize",
        }
    }

    fn algorithm(self, d: Decomposer) -> String {
        match self {
            Mode::Decompose => d.name().to_string(),
            Mode::Optimize => format!("decc-{}", d.name()),
        }
    }
}

/// What a campaign run did.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSummary {
    pub path: PathBuf,
    /// Every row in the report, including ones from earlier runs.
    pub rows: Vec<Row>,
    /// Rows computed by this run.
    pub attempted: usize,
    pub failed: usize,
}

impl CampaignSummary {
    /// 0 when anything succeeded or nothing was left to do, 2 when every
    /// attempted row failed.
    pub fn exit_code(&self) -> i32 {
        if self.attempted > 0 && self.failed == self.attempted {
            2
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Task {
    function: u8,
    decomposer: Decomposer,
    seed: u64,
}

/// Decompose `obj` with the selected algorithm.
pub fn decompose_with<F: Function>(
    obj: &CountingObjective<F>,
    decomposer: Decomposer,
    seed: u64,
    epsilon: f64,
) -> svgcore::Result<Decomposition> {
    let baseline = BaselineConfig { epsilon, relative: true };
    match decomposer {
        Decomposer::Svg => svg_decompose(obj, &SvgConfig::seeded(seed)),
        Decomposer::Dg => dg_decompose(obj, &baseline),
        Decomposer::Rdg => rdg_decompose(obj, &baseline),
    }
}

fn score(row: &mut Row, problem: &BenchmarkProblem, d: &Decomposition, decomposer: Decomposer) -> svgcore::Result<()> {
    let (rho1, rho2) = rho_split(&problem.ground_truth(), d)?;
    row.rho1 = rho1;
    row.rho2 = rho2;
    row.fes = Some(d.fes_used);
    // Only SVG locates optima for its separable variables.
    row.dis = (decomposer == Decomposer::Svg).then(|| dis(d, problem));
    if d.exhausted {
        row.status = Status::Exhausted;
    }
    Ok(())
}

fn history_name(task: &Task, mode: Mode) -> String {
    format!("history/f{}-{}-s{}.csv", task.function, mode.algorithm(task.decomposer), task.seed)
}

/// One report row, plus the convergence history for optimization rows.
fn run_task(cfg: &CampaignConfig, mode: Mode, task: &Task, execution: Execution) -> (Row, Option<String>) {
    let start = Instant::now();
    let row = Row::new(task.function, &mode.algorithm(task.decomposer), task.seed, cfg.n, cfg.m);
    let result = (|| -> svgcore::Result<(Row, Option<String>)> {
        let mut row = row.clone();
        let problem = build_problem(task.function, cfg.n, cfg.m, task.seed)?;
        let obj = CountingObjective::new(&problem).with_budget(cfg.budget).with_execution(execution);
        let d = decompose_with(&obj, task.decomposer, task.seed, cfg.epsilon)?;
        score(&mut row, &problem, &d, task.decomposer)?;
        if mode == Mode::Decompose {
            return Ok((row, None));
        }
        let opt = OptimizerConfig {
            max_fes: cfg.budget,
            generations: cfg.generations,
            seed: task.seed,
            ..OptimizerConfig::default()
        };
        let out = decc_optimize(&obj, &d, &opt)?;
        row.fes = Some(out.total_fes(&d));
        row.best_f = Some(out.best_f);
        if d.exhausted {
            row.status = Status::Exhausted;
        }
        row.history = Some(history_name(task, mode));
        Ok((row, Some(out.history_csv())))
    })();
    let (mut row, history) = match result {
        Ok(done) => done,
        Err(e) => (row.failed(e), None),
    };
    if cfg.timing {
        row.wall_ms = Some(start.elapsed().as_millis() as u64);
    }
    (row, history)
}

#[cfg(feature = "parallel")]
fn execute<T: Sync, R: Send>(jobs: usize, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> CliResult<Vec<R>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn execute<T: Sync, R: Send>(_jobs: usize, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> CliResult<Vec<R>> {
    Ok(items.iter().map(f).collect())
}

fn write_atomically(path: &Path, contents: &str) -> CliResult<()> {
    let tmp = path.with_extension("partial");
    std::fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Run every (function, decomposer, seed) row not already in the report.
///
/// The report is rewritten whole, in canonical order, so a resumed campaign
/// ends byte-identical to one that ran uninterrupted.
pub fn run_campaign(cfg: &CampaignConfig, mode: Mode) -> CliResult<CampaignSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::io(&cfg.out_dir, e))?;
    let path = cfg.out_dir.join(format!("{}.{}", mode.file_stem(), cfg.format.extension()));
    let mut rows = if path.exists() { read_rows(&path, cfg.format)? } else { Vec::new() };
    let done: BTreeSet<RowKey> = rows.iter().map(Row::key).collect();

    let mut tasks = Vec::new();
    for &function in &cfg.functions {
        for &decomposer in &cfg.decomposers {
            for seed in cfg.effective_seeds() {
                let key = (function, mode.algorithm(decomposer), seed, cfg.n, cfg.m);
                if !done.contains(&key) && tasks.iter().all(|t: &Task| (t.function, t.decomposer, t.seed) != (function, decomposer, seed)) {
                    tasks.push(Task { function, decomposer, seed });
                }
            }
        }
    }

    // Rows run side by side, so each evaluates its own batches serially.
    let results = execute(cfg.jobs, &tasks, |t| run_task(cfg, mode, t, Execution::Sequential))?;
    let attempted = results.len();
    let failed = results.iter().filter(|(r, _)| !r.succeeded()).count();
    for (row, history) in results {
        if let (Some(name), Some(text)) = (&row.history, history) {
            let target = cfg.out_dir.join(name);
            if let Some(dir) = target.parent() {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            write_atomically(&target, &text)?;
        }
        rows.push(row);
    }
    sort_rows(&mut rows);
    write_atomically(&path, &rows_to_string(&rows, cfg.format))?;
    Ok(CampaignSummary { path, rows, attempted, failed })
}

pub fn run_decompose(cfg: &CampaignConfig) -> CliResult<CampaignSummary> {
    run_campaign(cfg, Mode::Decompose)
}

pub fn run_optimize(cfg: &CampaignConfig) -> CliResult<CampaignSummary> {
    run_campaign(cfg, Mode::Optimize)
}
