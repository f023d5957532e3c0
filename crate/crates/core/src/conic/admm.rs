use nalgebra::{DMatrix, DVector};
use web_time::Instant;

use super::{ConicBackend, ConicProgram, ConicSolution, SolveStatus};

/// Dense ADMM for `min cᵀx  s.t.  A x + s = b, s ∈ K` with over-relaxation
/// and residual-balanced step size.
///
/// Only suitable for programs with a few dozen variables: it factors
/// `σI + ρAᵀA` densely. It exists so conic results can be cross-checked
/// against a method that shares no code with the interior-point backend.
#[derive(Clone, Debug)]
pub struct AdmmBackend {
    pub max_iter: usize,
    pub rho: f64,
    pub sigma: f64,
    pub alpha: f64,
}

impl Default for AdmmBackend {
    fn default() -> Self {
        Self {
            max_iter: 200_000,
            rho: 0.1,
            sigma: 1e-6,
            alpha: 1.6,
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Block {
    Zero(usize, usize),
    Nonneg(usize, usize),
    Soc(usize, usize),
}

struct Dense {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
    blocks: Vec<Block>,
}

fn densify(program: &ConicProgram) -> Dense {
    let n = program.num_vars();
    let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    let mut blocks = Vec::new();

    let start = rows.len();
    for row in program.equalities() {
        rows.push((row.terms.clone(), row.rhs));
    }
    if rows.len() > start {
        blocks.push(Block::Zero(start, rows.len()));
    }
    let start = rows.len();
    for row in program.inequalities() {
        rows.push((row.terms.clone(), row.rhs));
    }
    for j in 0..n {
        if program.upper()[j].is_finite() {
            rows.push((vec![(j, 1.0)], program.upper()[j]));
        }
        if program.lower()[j].is_finite() {
            rows.push((vec![(j, -1.0)], -program.lower()[j]));
        }
    }
    if rows.len() > start {
        blocks.push(Block::Nonneg(start, rows.len()));
    }
    for cone in program.cones() {
        let start = rows.len();
        rows.push((vec![(cone.t, -1.0)], 0.0));
        for r in &cone.rows {
            rows.push((r.terms.iter().map(|&(j, a)| (j, -a)).collect(), r.constant));
        }
        blocks.push(Block::Soc(start, rows.len()));
    }

    let m = rows.len();
    let mut a = DMatrix::zeros(m, n);
    let mut b = DVector::zeros(m);
    for (i, (terms, rhs)) in rows.into_iter().enumerate() {
        for (j, v) in terms {
            a[(i, j)] += v;
        }
        b[i] = rhs;
    }
    let c = DVector::from_column_slice(program.objective());
    Dense { a, b, c, blocks }
}

fn project_soc(v: &mut [f64]) {
    let t = v[0];
    let norm = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= t {
        return;
    }
    if norm <= -t {
        v.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let scale = 0.5 * (t + norm);
    v[0] = scale;
    for x in &mut v[1..] {
        *x *= scale / norm;
    }
}

fn project(blocks: &[Block], s: &mut DVector<f64>) {
    for block in blocks {
        match *block {
            Block::Zero(lo, hi) => s.rows_mut(lo, hi - lo).fill(0.0),
            Block::Nonneg(lo, hi) => {
                for i in lo..hi {
                    s[i] = s[i].max(0.0);
                }
            }
            Block::Soc(lo, hi) => project_soc(&mut s.as_mut_slice()[lo..hi]),
        }
    }
}

/// Distance of `y` outside the dual cone (zero-cone duals are free; the
/// other cones are self-dual).
fn dual_cone_violation(blocks: &[Block], y: &DVector<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for block in blocks {
        match *block {
            Block::Zero(..) => {}
            Block::Nonneg(lo, hi) => {
                for i in lo..hi {
                    worst = worst.max(-y[i]);
                }
            }
            Block::Soc(lo, hi) => {
                let norm = y.rows(lo + 1, hi - lo - 1).norm();
                worst = worst.max(norm - y[lo]);
            }
        }
    }
    worst
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl ConicBackend for AdmmBackend {
    fn name(&self) -> &'static str {
        "admm-reference"
    }

    fn solve_conic(&self, program: &ConicProgram, accuracy: f64) -> ConicSolution {
        let started = Instant::now();
        let elapsed = || started.elapsed().as_secs_f64() * 1e3;
        let n = program.num_vars();
        let Dense { a, b, c, blocks } = densify(program);
        let m = b.len();
        let at = a.transpose();
        let ata = &at * &a;

        let mut rho = self.rho;
        let factor = |rho: f64| {
            let k = DMatrix::identity(n, n) * self.sigma + &ata * rho;
            k.cholesky()
        };
        let Some(mut chol) = factor(rho) else {
            return ConicSolution::failed(SolveStatus::NumericalFailure, elapsed());
        };

        let mut x = DVector::zeros(n);
        let mut s = DVector::zeros(m);
        let mut u = DVector::zeros(m);
        let eps_inf = accuracy.max(1e-9);

        for iter in 0..self.max_iter {
            let rhs = &x * self.sigma - &c - &at * ((&s - &b + &u) * rho);
            let x_new = chol.solve(&rhs);
            let ax = &a * &x_new;
            let ax_relaxed = &ax * self.alpha + (&b - &s) * (1.0 - self.alpha);
            let mut s_new = &b - &ax_relaxed - &u;
            project(&blocks, &mut s_new);
            let u_prev = u.clone();
            u += &ax_relaxed + &s_new - &b;
            x = x_new;
            s = s_new;

            if iter % 10 != 0 {
                continue;
            }

            let y = &u * rho;
            let aty = &at * &y;
            let r_prim = inf_norm(&(&ax + &s - &b));
            let r_dual = inf_norm(&(&c + &aty));
            let pobj = c.dot(&x);
            let dobj = -b.dot(&y);
            let scale_p = 1.0 + inf_norm(&ax).max(inf_norm(&s)).max(inf_norm(&b));
            let scale_d = 1.0 + inf_norm(&c).max(inf_norm(&aty));
            let gap_ok = (pobj - dobj).abs() <= accuracy * (1.0 + pobj.abs().max(dobj.abs()));
            if r_prim <= accuracy * scale_p && r_dual <= accuracy * scale_d && gap_ok {
                let primal: Vec<f64> = x.iter().copied().collect();
                return ConicSolution::optimal(program.objective_value(&primal), primal, elapsed());
            }

            // Farkas direction: Aᵀδy = 0, δy ∈ K*, bᵀδy < 0.
            let dy = (&u - &u_prev) * rho;
            let dy_norm = inf_norm(&dy);
            if dy_norm > 1e-12 {
                let dy = dy / dy_norm;
                if inf_norm(&(&at * &dy)) <= eps_inf
                    && b.dot(&dy) < -eps_inf
                    && dual_cone_violation(&blocks, &dy) <= eps_inf
                {
                    return ConicSolution::failed(SolveStatus::Infeasible, elapsed());
                }
            }

            if iter % 50 == 0 && iter > 0 {
                let ratio = ((r_prim / scale_p) / (r_dual / scale_d).max(1e-300)).sqrt();
                if !(0.2..=5.0).contains(&ratio) {
                    let new_rho = (rho * ratio).clamp(1e-6, 1e6);
                    u *= rho / new_rho;
                    rho = new_rho;
                    match factor(rho) {
                        Some(ch) => chol = ch,
                        None => {
                            return ConicSolution::failed(SolveStatus::NumericalFailure, elapsed())
                        }
                    }
                }
            }
        }
        ConicSolution::failed(SolveStatus::NumericalFailure, elapsed())
    }
}
