//! Benchmark sweeps over maps, origins and heuristic weights.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use web_time::Instant;

use crate::conic::ConicSolver;
use crate::error::{Error, Result};
use crate::gcs::{GcsGraph, HeuristicTable};
use crate::heuristics::{blend, h1_table, h2_expand_freeze, sinit_from_astar, DEFAULT_N_MAX};
use crate::report::gap_cell;
use crate::search::{run_astar_gcs, run_baseline, RunResult, SearchOptions};

pub const BENCH_HEADER: &str = "map,algo,variant,weight,origin,S_size,iters,lb,ub,gap_pct,millis";

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub weights: Vec<f64>,
    /// Extra origins sampled per map. With `None` each map runs from its own
    /// origin only.
    pub origins: Option<usize>,
    pub seed: u64,
    pub jobs: usize,
    pub baseline: bool,
    pub n_max: usize,
    pub solver: ConicSolver,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            weights: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            origins: None,
            seed: 0,
            jobs: 1,
            baseline: false,
            n_max: DEFAULT_N_MAX,
            solver: ConicSolver::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub map: String,
    pub algo: &'static str,
    /// `first` (after the first iteration), `final`, or `full` for the baseline.
    pub variant: &'static str,
    pub weight: Option<f64>,
    pub origin: usize,
    pub s_size: usize,
    pub iters: usize,
    pub lb: f64,
    pub ub: Option<f64>,
    pub millis: f64,
}

impl BenchRow {
    pub fn gap(&self) -> String {
        gap_cell(self.ub, self.lb)
    }

    fn csv(&self) -> String {
        let weight = self.weight.map_or(String::new(), |w| format!("{w}"));
        let ub = self.ub.map_or(String::new(), |u| format!("{u:.9}"));
        format!(
            "{},{},{},{},{},{},{},{:.9},{},{},{:.3}",
            self.map,
            self.algo,
            self.variant,
            weight,
            self.origin,
            self.s_size,
            self.iters,
            self.lb,
            ub,
            self.gap(),
            self.millis
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchOutput {
    pub rows: Vec<BenchRow>,
    /// h₂ build time per map, reported apart from the runs.
    pub h2_millis: BTreeMap<String, f64>,
}

impl BenchOutput {
    pub fn csv(&self) -> String {
        let mut out = String::from(BENCH_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv());
            out.push('\n');
        }
        out
    }

    /// Mean `|S|`, time and gap per `(map, algo, variant, weight)`.
    pub fn summary_csv(&self) -> String {
        let mut groups: BTreeMap<(String, &str, &str, String), Vec<&BenchRow>> = BTreeMap::new();
        for r in &self.rows {
            let w = r.weight.map_or(String::new(), |w| format!("{w}"));
            groups
                .entry((r.map.clone(), r.algo, r.variant, w))
                .or_default()
                .push(r);
        }
        let mut out =
            String::from("map,algo,variant,weight,runs,mean_S_size,mean_millis,mean_gap_pct\n");
        for ((map, algo, variant, w), rows) in groups {
            let k = rows.len() as f64;
            let s = rows.iter().map(|r| r.s_size as f64).sum::<f64>() / k;
            let t = rows.iter().map(|r| r.millis).sum::<f64>() / k;
            let gaps: Vec<f64> = rows.iter().filter_map(|r| r.gap().parse().ok()).collect();
            let g = if gaps.is_empty() {
                "n/a".into()
            } else {
                format!("{:.6}", gaps.iter().sum::<f64>() / gaps.len() as f64)
            };
            let _ = writeln!(
                out,
                "{map},{algo},{variant},{w},{},{s:.2},{t:.3},{g}",
                rows.len()
            );
        }
        out
    }
}

struct Job<'a> {
    map: &'a str,
    graph: GcsGraph,
    /// `None` for a baseline run.
    heuristic: Option<(f64, &'a HeuristicTable)>,
    h1: HeuristicTable,
}

fn run_job(job: &Job, cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let opts = SearchOptions {
        seed: cfg.seed,
        solver: cfg.solver.clone(),
        ..Default::default()
    };
    let origin = job.graph.origin();
    let Some((w, h2)) = job.heuristic else {
        let res = run_baseline(&job.graph, &opts)?;
        return Ok(vec![BenchRow {
            map: job.map.to_string(),
            algo: "baseline",
            variant: "full",
            weight: None,
            origin,
            s_size: res.final_cut.len(),
            iters: res.iterations,
            lb: res.c_lb,
            ub: res.upper_bound(),
            millis: res.millis,
        }]);
    };
    let h = blend(&job.h1, h2, w)?;
    let start = Instant::now();
    let sinit = sinit_from_astar(&job.graph, &h)?;
    let sinit_millis = start.elapsed().as_secs_f64() * 1e3;
    let res: RunResult = run_astar_gcs(&job.graph, &h, &sinit, &opts)?;
    let first = &res.trace[0];
    let row = |variant, s_size, iters, lb, ub, millis| BenchRow {
        map: job.map.to_string(),
        algo: "astar-gcs",
        variant,
        weight: Some(w),
        origin,
        s_size,
        iters,
        lb,
        ub,
        millis,
    };
    Ok(vec![
        row(
            "first",
            first.s_size,
            res.iterations.min(1),
            first.c_lb,
            first.c_f,
            sinit_millis + first.millis,
        ),
        row(
            "final",
            res.final_cut.len(),
            res.iterations,
            res.c_lb,
            res.upper_bound(),
            sinit_millis + res.millis,
        ),
    ])
}

/// Picks `k` distinct origins among vertices with a path to the destination.
pub fn sample_origins(graph: &GcsGraph, k: usize, seed: u64) -> Vec<usize> {
    let reach = graph.reaching(graph.destination());
    let mut pool: Vec<usize> = (0..graph.num_vertices())
        .filter(|&v| reach[v] && v != graph.destination())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    pool.truncate(k);
    pool
}

/// Runs every `(map, origin, weight)` cell. Rows come back in a fixed order
/// whatever the number of worker threads.
pub fn run_bench(maps: &[(String, GcsGraph)], cfg: &BenchConfig) -> Result<BenchOutput> {
    if cfg.weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
        return Err(Error::input("weights must lie in [0, 1]"));
    }
    let mut output = BenchOutput::default();
    let mut h2_tables = Vec::with_capacity(maps.len());
    for (name, g) in maps {
        if cfg.weights.iter().any(|&w| w > 0.0) {
            let h2 = h2_expand_freeze(&cfg.solver, g, cfg.n_max)?;
            output
                .h2_millis
                .insert(name.clone(), h2.meta().build_millis);
            h2_tables.push(h2);
        } else {
            h2_tables.push(HeuristicTable::zero(g.num_vertices()));
        }
    }

    let mut jobs = Vec::new();
    for (m, (name, g)) in maps.iter().enumerate() {
        let origins = match cfg.origins {
            None => vec![g.origin()],
            Some(k) => sample_origins(
                g,
                k,
                cfg.seed ^ (m as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            ),
        };
        for o in origins {
            let graph = g.with_terminals(o, g.destination())?;
            let h1 = h1_table(&graph)?;
            for &w in &cfg.weights {
                jobs.push(Job {
                    map: name,
                    graph: graph.clone(),
                    heuristic: Some((w, &h2_tables[m])),
                    h1: h1.clone(),
                });
            }
            if cfg.baseline {
                jobs.push(Job {
                    map: name,
                    graph: graph.clone(),
                    heuristic: None,
                    h1: h1.clone(),
                });
            }
        }
    }

    let results: Vec<Mutex<Option<Result<Vec<BenchRow>>>>> =
        jobs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..cfg.jobs.max(1).min(jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                *results[i].lock().unwrap() = Some(run_job(job, cfg));
            });
        }
    });
    for slot in results {
        output
            .rows
            .extend(slot.into_inner().unwrap().expect("every job ran")?);
    }
    Ok(output)
}
