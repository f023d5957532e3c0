//! wasm-bindgen front end for the static demo page in `www/`.
//!
//! `Session` holds the state and is plain Rust so it can be tested natively;
//! `Demo` wraps it for JavaScript.

use astar_gcs::conic::ConicSolver;
use astar_gcs::error::Result;
use astar_gcs::gcs::{GcsGraph, HeuristicTable};
use astar_gcs::heuristics::{blend, h1_table, h2_expand_freeze, sinit_from_astar, DEFAULT_N_MAX};
use astar_gcs::instances::{gen_maze, MazeParams};
use astar_gcs::report::{render_svg, PlotOptions};
use astar_gcs::search::{run_astar_gcs, run_baseline, RunResult, SearchOptions};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

pub struct Session {
    graph: GcsGraph,
    h1: HeuristicTable,
    /// Built on the first solve with a positive weight.
    h2: Option<HeuristicTable>,
    h2_millis: f64,
    last: Option<RunResult>,
    seed: u64,
}

impl Session {
    pub fn maze(rows: usize, cols: usize, seed: u64) -> Result<Self> {
        let graph = gen_maze(MazeParams::new(rows, cols, seed))?.graph;
        let h1 = h1_table(&graph)?;
        Ok(Self {
            graph,
            h1,
            h2: None,
            h2_millis: 0.0,
            last: None,
            seed,
        })
    }

    pub fn graph(&self) -> &GcsGraph {
        &self.graph
    }

    fn heuristic(&mut self, weight: f64) -> Result<HeuristicTable> {
        if weight == 0.0 {
            return blend(
                &self.h1,
                &HeuristicTable::zero(self.graph.num_vertices()),
                0.0,
            );
        }
        if self.h2.is_none() {
            let h2 = h2_expand_freeze(&ConicSolver::default(), &self.graph, DEFAULT_N_MAX)?;
            self.h2_millis = h2.meta().build_millis;
            self.h2 = Some(h2);
        }
        blend(&self.h1, self.h2.as_ref().unwrap(), weight)
    }

    /// Runs A*-GCS and returns a summary of the run.
    pub fn solve(&mut self, weight: f64, sinit_astar: bool) -> Result<Value> {
        let h = self.heuristic(weight)?;
        let s_init = if sinit_astar {
            sinit_from_astar(&self.graph, &h)?
        } else {
            [self.graph.origin()].into()
        };
        let opts = SearchOptions {
            seed: self.seed,
            ..Default::default()
        };
        let res = run_astar_gcs(&self.graph, &h, &s_init, &opts)?;
        Ok(self.keep(res))
    }

    pub fn baseline(&mut self) -> Result<Value> {
        let opts = SearchOptions {
            seed: self.seed,
            ..Default::default()
        };
        let res = run_baseline(&self.graph, &opts)?;
        Ok(self.keep(res))
    }

    fn keep(&mut self, res: RunResult) -> Value {
        let summary = json!({
            "vertices": self.graph.num_vertices(),
            "lower_bound": res.c_lb,
            "upper_bound": res.upper_bound(),
            "gap_pct": res.gap().ok(),
            "cut_size": res.final_cut.len(),
            "iterations": res.iterations,
            "termination": res.termination,
            "millis": res.millis,
            "h2_millis": self.h2.as_ref().map(|_| self.h2_millis),
        });
        self.last = Some(res);
        summary
    }

    pub fn svg(&self, show_cut: bool, edges: bool) -> Result<String> {
        let last = self.last.as_ref();
        let points = last
            .and_then(|r| r.best_feasible.as_ref())
            .map(|f| f.points.as_slice());
        let cut = last.filter(|_| show_cut).map(|r| &r.final_cut);
        render_svg(
            &self.graph,
            &PlotOptions {
                path_points: points,
                cut,
                edges,
            },
        )
    }
}

fn js(e: astar_gcs::error::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Demo {
    inner: Session,
}

#[wasm_bindgen]
impl Demo {
    /// A new maze instance.
    #[wasm_bindgen(constructor)]
    pub fn new(rows: usize, cols: usize, seed: u32) -> Result<Demo, JsError> {
        Ok(Demo {
            inner: Session::maze(rows, cols, seed.into()).map_err(js)?,
        })
    }

    /// JSON summary of an A*-GCS run.
    pub fn solve(&mut self, weight: f64, sinit_astar: bool) -> Result<String, JsError> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(JsError::new("weight must lie in [0, 1]"));
        }
        self.inner
            .solve(weight, sinit_astar)
            .map(|v| v.to_string())
            .map_err(js)
    }

    /// JSON summary of the full-relaxation baseline.
    pub fn baseline(&mut self) -> Result<String, JsError> {
        self.inner.baseline().map(|v| v.to_string()).map_err(js)
    }

    pub fn svg(&self, show_cut: bool, edges: bool) -> Result<String, JsError> {
        self.inner.svg(show_cut, edges).map_err(js)
    }

    #[wasm_bindgen(getter)]
    pub fn vertices(&self) -> usize {
        self.inner.graph().num_vertices()
    }
}
