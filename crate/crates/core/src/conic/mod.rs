//! Second-order-cone programs and the backends that solve them.
//!
//! Every relaxation in the crate is emitted as a [`ConicProgram`] and handed
//! to a [`ConicSolver`], which wraps one [`ConicBackend`] and a target
//! accuracy. Two backends ship: [`ClarabelBackend`], an interior-point
//! method used by default, and [`AdmmBackend`], a small dense first-order
//! method meant for cross-checking tiny programs.

mod admm;
mod clarabel;
mod program;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use self::admm::AdmmBackend;
pub use self::clarabel::ClarabelBackend;
pub use self::program::{ConicProgram, LinearExpr, LinearRow, SocConstraint, Violation};

pub const DEFAULT_ACCURACY: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct ConicSolution {
    pub status: SolveStatus,
    /// `+∞` unless optimal.
    pub objective: f64,
    /// Present iff `status == Optimal`.
    pub primal: Option<Vec<f64>>,
    pub solve_millis: f64,
}

impl ConicSolution {
    pub fn optimal(objective: f64, primal: Vec<f64>, solve_millis: f64) -> Self {
        Self {
            status: SolveStatus::Optimal,
            objective,
            primal: Some(primal),
            solve_millis,
        }
    }

    pub fn failed(status: SolveStatus, solve_millis: f64) -> Self {
        debug_assert!(status != SolveStatus::Optimal);
        Self {
            status,
            objective: f64::INFINITY,
            primal: None,
            solve_millis,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// One required operation. Implementations must not keep mutable global
/// state: distinct programs may be solved concurrently.
pub trait ConicBackend: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn solve_conic(&self, program: &ConicProgram, accuracy: f64) -> ConicSolution;
}

/// A backend plus the accuracy every solve is requested at.
#[derive(Clone, Debug)]
pub struct ConicSolver {
    backend: Arc<dyn ConicBackend>,
    accuracy: f64,
}

impl ConicSolver {
    pub fn new(backend: Arc<dyn ConicBackend>, accuracy: f64) -> Self {
        Self { backend, accuracy }
    }

    pub fn clarabel() -> Self {
        Self::new(Arc::new(ClarabelBackend), DEFAULT_ACCURACY)
    }

    pub fn reference() -> Self {
        Self::new(Arc::new(AdmmBackend::default()), DEFAULT_ACCURACY)
    }

    pub fn with_accuracy(mut self, accuracy: f64) -> Self {
        self.accuracy = accuracy;
        self
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn backend_name(&self) -> &'static str {
        self.backend.name()
    }

    pub fn solve(&self, program: &ConicProgram) -> ConicSolution {
        self.backend.solve_conic(program, self.accuracy)
    }
}

impl Default for ConicSolver {
    fn default() -> Self {
        Self::clarabel()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// minimize t s.t. t ≥ ‖(x−1, y)‖, x = 0, y = 0
    fn distance_program() -> ConicProgram {
        let mut p = ConicProgram::new();
        let t = p.add_free();
        let x = p.add_free();
        let y = p.add_free();
        p.add_cost(t, 1.0);
        p.add_eq(vec![(x, 1.0)], 0.0);
        p.add_eq(vec![(y, 1.0)], 0.0);
        p.add_soc(
            t,
            vec![LinearExpr::new(vec![(x, 1.0)], -1.0), LinearExpr::var(y)],
        );
        p
    }

    fn free_norm_program() -> ConicProgram {
        let mut p = ConicProgram::new();
        let t = p.add_free();
        let x = p.add_free();
        p.add_cost(t, 1.0);
        p.add_soc(t, vec![LinearExpr::var(x)]);
        p
    }

    fn empty_program() -> ConicProgram {
        let mut p = ConicProgram::new();
        let x = p.add_var(0.0, 1.0);
        p.add_cost(x, 1.0);
        p.add_eq(vec![], 1.0);
        p
    }

    fn solvers() -> Vec<ConicSolver> {
        vec![ConicSolver::clarabel(), ConicSolver::reference()]
    }

    #[test]
    fn distance_to_offset_point() {
        for s in solvers() {
            let sol = s.solve(&distance_program());
            assert!(sol.is_optimal(), "{}", s.backend_name());
            assert!(
                (sol.objective - 1.0).abs() < 1e-6,
                "{}: {}",
                s.backend_name(),
                sol.objective
            );
        }
    }

    #[test]
    fn free_norm_is_zero() {
        for s in solvers() {
            let sol = s.solve(&free_norm_program());
            assert!(sol.is_optimal(), "{}", s.backend_name());
            assert!(
                sol.objective.abs() < 1e-6,
                "{}: {}",
                s.backend_name(),
                sol.objective
            );
        }
    }

    #[test]
    fn contradictory_equality_is_infeasible() {
        for s in solvers() {
            let sol = s.solve(&empty_program());
            assert_eq!(sol.status, SolveStatus::Infeasible, "{}", s.backend_name());
            assert!(sol.primal.is_none());
            assert_eq!(sol.objective, f64::INFINITY);
        }
    }

    #[test]
    fn optimal_points_recheck_within_ten_times_accuracy() {
        for s in solvers() {
            for p in [distance_program(), free_norm_program()] {
                let sol = s.solve(&p);
                let x = sol.primal.unwrap();
                assert!(p.violation(&x).max() <= 10.0 * s.accuracy());
            }
        }
    }

    #[test]
    fn resolve_is_reproducible() {
        for s in solvers() {
            let p = distance_program();
            let a = s.solve(&p).objective;
            let b = s.solve(&p).objective;
            assert!((a - b).abs() <= 1e-8);
        }
    }
}
