use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, SecondOrderConeT,
    SolverStatus, SupportedConeT, ZeroConeT,
};

use super::{ConicBackend, ConicProgram, ConicSolution, SolveStatus};

/// Interior-point backend over the Clarabel solver.
///
/// Rows are laid out as `A x + s = b` with `s` in, in order: the zero cone
/// (equalities), the nonnegative orthant (inequalities and finite bounds),
/// then one second-order cone per [`super::SocConstraint`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ClarabelBackend;

#[derive(Default)]
struct Triplets {
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    rhs: Vec<f64>,
}

impl Triplets {
    fn push_row(&mut self, terms: impl IntoIterator<Item = (usize, f64)>, rhs: f64) {
        let r = self.rhs.len();
        for (j, a) in terms {
            if a != 0.0 {
                self.rows.push(r);
                self.cols.push(j);
                self.vals.push(a);
            }
        }
        self.rhs.push(rhs);
    }
}

impl ConicBackend for ClarabelBackend {
    fn name(&self) -> &'static str {
        "clarabel"
    }

    fn solve_conic(&self, program: &ConicProgram, accuracy: f64) -> ConicSolution {
        let n = program.num_vars();
        let mut t = Triplets::default();
        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();

        for row in program.equalities() {
            t.push_row(row.terms.iter().copied(), row.rhs);
        }
        if !program.equalities().is_empty() {
            cones.push(ZeroConeT(program.equalities().len()));
        }

        let before = t.rhs.len();
        for row in program.inequalities() {
            t.push_row(row.terms.iter().copied(), row.rhs);
        }
        for j in 0..n {
            let (lo, hi) = (program.lower()[j], program.upper()[j]);
            if hi.is_finite() {
                t.push_row([(j, 1.0)], hi);
            }
            if lo.is_finite() {
                t.push_row([(j, -1.0)], -lo);
            }
        }
        if t.rhs.len() > before {
            cones.push(NonnegativeConeT(t.rhs.len() - before));
        }

        for cone in program.cones() {
            t.push_row([(cone.t, -1.0)], 0.0);
            for row in &cone.rows {
                t.push_row(row.terms.iter().map(|&(j, a)| (j, -a)), row.constant);
            }
            cones.push(SecondOrderConeT(1 + cone.rows.len()));
        }

        let m = t.rhs.len();
        let a = CscMatrix::new_from_triplets(m, n, t.rows, t.cols, t.vals);
        let p = CscMatrix::zeros((n, n));
        let settings = match DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(500)
            .tol_gap_abs(accuracy)
            .tol_gap_rel(accuracy)
            .tol_feas(accuracy)
            .build()
        {
            Ok(s) => s,
            Err(_) => return ConicSolution::failed(SolveStatus::NumericalFailure, 0.0),
        };
        let mut solver =
            match DefaultSolver::new(&p, program.objective(), &a, &t.rhs, &cones, settings) {
                Ok(s) => s,
                Err(_) => return ConicSolution::failed(SolveStatus::NumericalFailure, 0.0),
            };
        solver.solve();
        let sol = &solver.solution;
        let millis = sol.solve_time * 1e3;
        match sol.status {
            SolverStatus::Solved => {
                ConicSolution::optimal(program.objective_value(&sol.x), sol.x.clone(), millis)
            }
            SolverStatus::AlmostSolved if program.violation(&sol.x).max() <= 10.0 * accuracy => {
                ConicSolution::optimal(program.objective_value(&sol.x), sol.x.clone(), millis)
            }
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                ConicSolution::failed(SolveStatus::Infeasible, millis)
            }
            _ => ConicSolution::failed(SolveStatus::NumericalFailure, millis),
        }
    }
}
