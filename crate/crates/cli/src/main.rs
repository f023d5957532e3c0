use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use astar_gcs::bench::{run_bench, BenchConfig};
use astar_gcs::conic::{ConicSolver, DEFAULT_ACCURACY};
use astar_gcs::error::Error;
use astar_gcs::gcs::{GcsGraph, HeuristicTable, VertexSet};
use astar_gcs::heuristics::{blend, h1_table, h2_expand_freeze, sinit_from_astar, DEFAULT_N_MAX};
use astar_gcs::instances::{
    gen_bars, gen_maze, gen_village, load_instance, random_singleton_instance,
    random_small_instance, save_instance, BarsParams, Instance, MazeParams, VillageParams,
};
use astar_gcs::oracle::{exact_opt, DEFAULT_CAP};
use astar_gcs::report::{render_svg, run_report, trace_csv, PlotOptions, ReportContext};
use astar_gcs::search::{run_astar_gcs, run_baseline, RunResult, SearchOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::time::Instant;

const VERSION: &str = env!("ASTAR_GCS_DESCRIBE");

#[derive(Parser)]
#[command(name = "astar-gcs", version = VERSION, about = "Shortest paths in graphs of convex sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance file.
    Generate {
        #[command(subcommand)]
        kind: GenKind,
        /// Output path.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Build a heuristic table for an instance.
    Heuristic(HeuristicArgs),
    /// Run A*-GCS or the full-relaxation baseline on an instance.
    Solve(SolveArgs),
    /// Exact optimum by path enumeration (small instances only).
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Sweep origins and weights over every instance in a directory.
    Bench(BenchArgs),
    /// Draw a 2-D instance, optionally with the path and cut-set from a report.
    Plot {
        instance: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Draw edges between set centroids.
        #[arg(long)]
        edges: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Maze {
        #[arg(long, default_value_t = 20)]
        rows: usize,
        #[arg(long, default_value_t = 20)]
        cols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Bars {
        #[arg(long, default_value_t = 20)]
        width: usize,
        #[arg(long, default_value_t = 20)]
        height: usize,
        #[arg(long, default_value_t = 30)]
        bars: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Village {
        #[arg(long, default_value_t = 6)]
        nx: usize,
        #[arg(long, default_value_t = 6)]
        ny: usize,
        #[arg(long, default_value_t = 3)]
        nz: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Small random instance for oracle checks.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use only singleton sets.
        #[arg(long)]
        singleton: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Clarabel,
    /// Slow first-order reference solver.
    Admm,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = Backend::Clarabel)]
    backend: Backend,
    #[arg(long, default_value_t = DEFAULT_ACCURACY)]
    accuracy: f64,
}

impl SolverArgs {
    fn solver(&self) -> Result<ConicSolver, CliError> {
        if !(self.accuracy > 0.0 && self.accuracy < 1.0) {
            return Err(CliError::Usage("--accuracy must lie in (0, 1)".into()));
        }
        let s = match self.backend {
            Backend::Clarabel => ConicSolver::clarabel(),
            Backend::Admm => ConicSolver::reference(),
        };
        Ok(s.with_accuracy(self.accuracy))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    H1,
    H2,
    Blend,
}

#[derive(Args)]
struct HeuristicArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::H2)]
    method: Method,
    #[arg(long = "nmax", default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
    /// Blend weight on h₂; only used with `--method blend`.
    #[arg(long, default_value_t = 1.0)]
    weight: f64,
    /// Reuse a saved h₂ table instead of rebuilding it.
    #[arg(long)]
    h2: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    AstarGcs,
    Baseline,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sinit {
    Source,
    Astar,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::AstarGcs)]
    algo: Algo,
    #[arg(long, value_enum, default_value_t = Sinit::Astar)]
    sinit: Sinit,
    /// Weight on h₂ in the blended heuristic.
    #[arg(long, default_value_t = 1.0)]
    weight: f64,
    /// Saved h₂ table; built on the fly when the weight is positive and none is given.
    #[arg(long)]
    heuristic: Option<PathBuf>,
    #[arg(long = "nmax", default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solve from this vertex instead of the instance's origin.
    #[arg(long)]
    origin: Option<usize>,
    /// JSON report path; printed to stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-iteration CSV trace.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance files (`*.json`).
    dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.25, 0.5, 0.75, 1.0])]
    weights: Vec<f64>,
    /// Sample this many origins per map instead of using the stored one.
    #[arg(long)]
    origins: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also run the full-relaxation baseline.
    #[arg(long)]
    baseline: bool,
    #[arg(long = "nmax", default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
    /// Per-run CSV; printed to stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Means per (map, algo, variant, weight).
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Load { path: PathBuf, source: Error },
    #[error(transparent)]
    Run(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Load {
                source: Error::NoPath { .. },
                ..
            }
            | CliError::Run(Error::NoPath { .. }) => 2,
            CliError::Usage(_) | CliError::Load { .. } | CliError::Io { .. } => 1,
            CliError::Run(
                Error::Input(_) | Error::TooLarge { .. } | Error::Parse(_) | Error::Io(_),
            ) => 1,
            CliError::Run(_) => 3,
        }
    }
}

fn load(path: &Path) -> Result<Instance, CliError> {
    load_instance(path).map_err(|source| CliError::Load {
        path: path.into(),
        source,
    })
}

fn load_table(path: &Path, graph: &GcsGraph) -> Result<HeuristicTable, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    let table = HeuristicTable::from_json_str(&text).map_err(|source| CliError::Load {
        path: path.into(),
        source,
    })?;
    if table.len() != graph.num_vertices() {
        return Err(CliError::Usage(format!(
            "{}: table has {} entries, instance has {} vertices",
            path.display(),
            table.len(),
            graph.num_vertices()
        )));
    }
    if table
        .destination()
        .is_some_and(|d| d != graph.destination())
    {
        return Err(CliError::Usage(format!(
            "{}: table was built for another destination",
            path.display()
        )));
    }
    Ok(table)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.into(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_weight(w: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&w) {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--weight must lie in [0, 1], got {w}"
        )))
    }
}

fn cmd_generate(kind: GenKind, output: Option<PathBuf>) -> Result<(), CliError> {
    let inst = match kind {
        GenKind::Maze { rows, cols, seed } => gen_maze(MazeParams::new(rows, cols, seed))?,
        GenKind::Bars {
            width,
            height,
            bars,
            seed,
        } => gen_bars(BarsParams::new(width, height, bars, seed))?,
        GenKind::Village { nx, ny, nz, seed } => gen_village(VillageParams::new(nx, ny, nz, seed))?,
        GenKind::Random {
            seed,
            singleton: false,
        } => random_small_instance(seed),
        GenKind::Random {
            seed,
            singleton: true,
        } => random_singleton_instance(seed),
    };
    match output {
        Some(p) => save_instance(&inst, &p).map_err(|source| CliError::Load { path: p, source }),
        None => emit(None, &astar_gcs::instances::to_json_string(&inst)),
    }
}

fn cmd_heuristic(args: HeuristicArgs) -> Result<(), CliError> {
    let graph = load(&args.instance)?.graph;
    let solver = args.solver.solver()?;
    let h2 = |graph: &GcsGraph| -> Result<HeuristicTable, CliError> {
        match &args.h2 {
            Some(p) => load_table(p, graph),
            None => Ok(h2_expand_freeze(&solver, graph, args.n_max)?),
        }
    };
    let table = match args.method {
        Method::H1 => h1_table(&graph)?,
        Method::H2 => h2(&graph)?,
        Method::Blend => {
            check_weight(args.weight)?;
            blend(&h1_table(&graph)?, &h2(&graph)?, args.weight)?
        }
    };
    emit(args.output.as_deref(), &table.to_json_string())
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    check_weight(args.weight)?;
    if args.max_iters == Some(0) {
        return Err(CliError::Usage("--max-iters must be at least 1".into()));
    }
    let mut graph = load(&args.instance)?.graph;
    if let Some(o) = args.origin {
        if o >= graph.num_vertices() {
            return Err(CliError::Usage(format!("--origin {o} is not a vertex")));
        }
        graph = graph.with_terminals(o, graph.destination())?;
    }
    let solver = args.solver.solver()?;
    let opts = SearchOptions {
        max_iters: args.max_iters,
        seed: args.seed,
        solver: solver.clone(),
        ..Default::default()
    };

    // Heuristic construction is timed apart from the solve.
    let mut heuristic_millis = 0.0;
    let (result, h, sinit): (RunResult, Option<HeuristicTable>, Option<&str>) = match args.algo {
        Algo::Baseline => (run_baseline(&graph, &opts)?, None, None),
        Algo::AstarGcs => {
            let built = Instant::now();
            let h1 = h1_table(&graph)?;
            let h = if args.weight > 0.0 {
                let h2 = match &args.heuristic {
                    Some(p) => load_table(p, &graph)?,
                    None => h2_expand_freeze(&solver, &graph, args.n_max)?,
                };
                blend(&h1, &h2, args.weight)?
            } else {
                blend(&h1, &HeuristicTable::zero(graph.num_vertices()), 0.0)?
            };
            heuristic_millis = built.elapsed().as_secs_f64() * 1e3;
            let start = Instant::now();
            let (s_init, label): (VertexSet, _) = match args.sinit {
                Sinit::Source => ([graph.origin()].into(), "source"),
                Sinit::Astar => (sinit_from_astar(&graph, &h)?, "astar"),
            };
            let sinit_millis = start.elapsed().as_secs_f64() * 1e3;
            let mut res = run_astar_gcs(&graph, &h, &s_init, &opts)?;
            res.millis += sinit_millis;
            (res, Some(h), Some(label))
        }
    };

    let ctx = ReportContext {
        version: VERSION.into(),
        algo: match args.algo {
            Algo::AstarGcs => "astar-gcs".into(),
            Algo::Baseline => "baseline".into(),
        },
        sinit: sinit.map(String::from),
        seed: args.seed,
        accuracy: solver.accuracy(),
        backend: solver.backend_name().into(),
    };
    let mut report = run_report(&result, h.as_ref(), &ctx);
    report["instance"] = json!(args.instance.display().to_string());
    report["origin"] = json!(graph.origin());
    report["destination"] = json!(graph.destination());
    report["heuristic_millis"] = json!(heuristic_millis);
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(args.report.as_deref(), &text)?;
    if let Some(p) = &args.trace {
        emit(Some(p), &trace_csv(&result))?;
    }
    eprintln!(
        "lb {:.6}  ub {}  gap {}  |S| {}  iters {}  {:?}  {:.1} ms",
        result.c_lb,
        result
            .upper_bound()
            .map_or("none".into(), |u| format!("{u:.6}")),
        result.gap().map_or("n/a".into(), |g| format!("{g:.4}%")),
        result.final_cut.len(),
        result.iterations,
        result.termination,
        result.millis
    );
    Ok(())
}

fn cmd_oracle(
    instance: &Path,
    cap: usize,
    output: Option<&Path>,
    solver: &SolverArgs,
) -> Result<(), CliError> {
    let graph = load(instance)?.graph;
    let (c_opt, sol) = exact_opt(
        &solver.solver()?,
        &graph,
        graph.origin(),
        graph.destination(),
        cap,
    )?;
    let mut text = serde_json::to_string_pretty(
        &json!({ "c_opt": c_opt, "path": sol.path, "points": sol.points }),
    )
    .unwrap();
    text.push('\n');
    emit(output, &text)
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    for &w in &args.weights {
        check_weight(w)?;
    }
    let io = |source| CliError::Io {
        path: args.dir.clone(),
        source,
    };
    let mut files: Vec<PathBuf> = fs::read_dir(&args.dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    files.retain(|p| p.extension().is_some_and(|e| e == "json"));
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "no *.json instances in {}",
            args.dir.display()
        )));
    }
    let mut maps = Vec::with_capacity(files.len());
    for f in &files {
        let name = f
            .file_stem()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        maps.push((name, load(f)?.graph));
    }
    let cfg = BenchConfig {
        weights: args.weights,
        origins: args.origins,
        seed: args.seed,
        jobs: args.jobs,
        baseline: args.baseline,
        n_max: args.n_max,
        solver: args.solver.solver()?,
    };
    let out = run_bench(&maps, &cfg)?;
    for (map, ms) in &out.h2_millis {
        eprintln!("h2 {map}: {:.1} ms", ms);
    }
    emit(args.output.as_deref(), &out.csv())?;
    if let Some(p) = &args.summary {
        emit(Some(p), &out.summary_csv())?;
    }
    Ok(())
}

fn cmd_plot(
    instance: &Path,
    report: Option<&Path>,
    edges: bool,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let graph = load(instance)?.graph;
    let mut points: Option<Vec<Vec<f64>>> = None;
    let mut cut: Option<VertexSet> = None;
    if let Some(p) = report {
        let text = fs::read_to_string(p).map_err(|source| CliError::Io {
            path: p.into(),
            source,
        })?;
        let v: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        points = serde_json::from_value(v["best_feasible"]["points"].clone()).ok();
        cut = serde_json::from_value(v["final_cut"].clone()).ok();
        if cut
            .as_ref()
            .is_some_and(|c| c.iter().any(|&u| u >= graph.num_vertices()))
        {
            return Err(CliError::Usage(format!(
                "{}: report does not belong to this instance",
                p.display()
            )));
        }
    }
    let svg = render_svg(
        &graph,
        &PlotOptions {
            path_points: points.as_deref(),
            cut: cut.as_ref(),
            edges,
        },
    )?;
    emit(output, &svg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { kind, output } => cmd_generate(kind, output),
        Command::Heuristic(a) => cmd_heuristic(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle {
            instance,
            cap,
            output,
            solver,
        } => cmd_oracle(&instance, cap, output.as_deref(), &solver),
        Command::Bench(a) => cmd_bench(a),
        Command::Plot {
            instance,
            report,
            edges,
            output,
        } => cmd_plot(&instance, report.as_deref(), edges, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
