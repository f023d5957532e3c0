use std::fmt;

use crate::error::{Error, Result};

/// Sparse affine expression `Σ coef·x[var] + constant`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinearExpr {
    pub fn new(terms: Vec<(usize, f64)>, constant: f64) -> Self {
        Self { terms, constant }
    }

    pub fn var(index: usize) -> Self {
        Self {
            terms: vec![(index, 1.0)],
            constant: 0.0,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum::<f64>() + self.constant
    }
}

/// `Σ terms = rhs` or `Σ terms ≤ rhs`, depending on where it is stored.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRow {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LinearRow {
    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

/// `x[t] ≥ ‖(rows[0](x), rows[1](x), …)‖₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct SocConstraint {
    pub t: usize,
    pub rows: Vec<LinearExpr>,
}

/// Largest violation of each constraint family at a given point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Violation {
    pub equality: f64,
    pub inequality: f64,
    pub bound: f64,
    pub cone: f64,
}

impl Violation {
    pub fn max(&self) -> f64 {
        self.equality
            .max(self.inequality)
            .max(self.bound)
            .max(self.cone)
    }
}

/// Linear objective, linear equalities and inequalities, variable bounds and
/// second-order cones. Minimization only.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConicProgram {
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    equalities: Vec<LinearRow>,
    inequalities: Vec<LinearRow>,
    cones: Vec<SocConstraint>,
}

impl ConicProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_var(&mut self, lower: f64, upper: f64) -> usize {
        self.objective.push(0.0);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_free(&mut self) -> usize {
        self.add_var(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_free_vec(&mut self, n: usize) -> Vec<usize> {
        (0..n).map(|_| self.add_free()).collect()
    }

    /// Adds `coef` to the objective coefficient of `var`.
    pub fn add_cost(&mut self, var: usize, coef: f64) {
        self.objective[var] += coef;
    }

    pub fn add_eq(&mut self, terms: Vec<(usize, f64)>, rhs: f64) {
        self.equalities.push(LinearRow { terms, rhs });
    }

    pub fn add_le(&mut self, terms: Vec<(usize, f64)>, rhs: f64) {
        self.inequalities.push(LinearRow { terms, rhs });
    }

    pub fn add_soc(&mut self, t: usize, rows: Vec<LinearExpr>) {
        self.cones.push(SocConstraint { t, rows });
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn equalities(&self) -> &[LinearRow] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[LinearRow] {
        &self.inequalities
    }

    pub fn cones(&self) -> &[SocConstraint] {
        &self.cones
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Checks every index against the variable count.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let check = |j: usize, what: &str| {
            if j >= n {
                Err(Error::input(format!(
                    "{what} references variable {j} but program has {n}"
                )))
            } else {
                Ok(())
            }
        };
        for row in self.equalities.iter().chain(&self.inequalities) {
            for &(j, _) in &row.terms {
                check(j, "linear row")?;
            }
        }
        for cone in &self.cones {
            check(cone.t, "cone epigraph")?;
            for row in &cone.rows {
                for &(j, _) in &row.terms {
                    check(j, "cone row")?;
                }
            }
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] {
                return Err(Error::input(format!("variable {j} has empty bounds")));
            }
        }
        Ok(())
    }

    /// Recomputes constraint residuals from scratch; trusts nothing the
    /// backend reported.
    pub fn violation(&self, x: &[f64]) -> Violation {
        let mut v = Violation::default();
        for row in &self.equalities {
            v.equality = v.equality.max((row.lhs(x) - row.rhs).abs());
        }
        for row in &self.inequalities {
            v.inequality = v.inequality.max(row.lhs(x) - row.rhs);
        }
        for j in 0..self.num_vars() {
            v.bound = v.bound.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for cone in &self.cones {
            let norm = cone
                .rows
                .iter()
                .map(|r| r.eval(x).powi(2))
                .sum::<f64>()
                .sqrt();
            v.cone = v.cone.max(norm - x[cone.t]);
        }
        v
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(usize, f64)]) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (k, (j, a)) in terms.iter().enumerate() {
        if k > 0 {
            write!(f, " ")?;
        }
        write!(f, "{a:+}*x{j}")?;
    }
    Ok(())
}

/// Plain-text dump for offline inspection.
impl fmt::Display for ConicProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.num_vars())?;
        write!(f, "minimize ")?;
        let terms: Vec<(usize, f64)> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, c)| (j, *c))
            .collect();
        write_terms(f, &terms)?;
        writeln!(f)?;
        for (j, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if lo.is_finite() || hi.is_finite() {
                writeln!(f, "bound x{j} in [{lo}, {hi}]")?;
            }
        }
        for row in &self.equalities {
            write!(f, "eq ")?;
            write_terms(f, &row.terms)?;
            writeln!(f, " = {}", row.rhs)?;
        }
        for row in &self.inequalities {
            write!(f, "le ")?;
            write_terms(f, &row.terms)?;
            writeln!(f, " <= {}", row.rhs)?;
        }
        for cone in &self.cones {
            write!(f, "soc x{} >= ||", cone.t)?;
            for (k, row) in cone.rows.iter().enumerate() {
                write!(f, "{}", if k == 0 { " " } else { " ; " })?;
                write_terms(f, &row.terms)?;
                if row.constant != 0.0 {
                    write!(f, " {:+}", row.constant)?;
                }
            }
            writeln!(f, " ||")?;
        }
        Ok(())
    }
}
