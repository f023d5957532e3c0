use rand::Rng;

use crate::conic::{ConicProgram, ConicSolver, LinearExpr};
use crate::error::{Error, Result};
use crate::perspective::{add_perspective, Scale};

pub const DEFAULT_TOL: f64 = 1e-6;

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `{x : A x ≤ b, lo ≤ x ≤ hi}`. The box is mandatory so the set is compact
/// by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl HPolytope {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let n = lo.len();
        if hi.len() != n {
            return Err(Error::input("hpolytope bbox corners differ in dimension"));
        }
        if a.len() != b.len() {
            return Err(Error::input(format!(
                "hpolytope has {} rows but {} offsets",
                a.len(),
                b.len()
            )));
        }
        if let Some(row) = a.iter().find(|r| r.len() != n) {
            return Err(Error::input(format!(
                "hpolytope row has width {}, expected {n}",
                row.len()
            )));
        }
        Ok(Self { a, b, lo, hi })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn offsets(&self) -> &[f64] {
        &self.b
    }

    pub fn bbox(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    /// Center of the largest inscribed ball.
    fn chebyshev_center(&self) -> Result<Vec<f64>> {
        let n = self.lo.len();
        let mut p = ConicProgram::new();
        let x = p.add_free_vec(n);
        let r = p.add_var(0.0, f64::INFINITY);
        p.add_cost(r, -1.0);
        for (row, &off) in self.a.iter().zip(&self.b) {
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut terms: Vec<(usize, f64)> = x.iter().zip(row).map(|(&j, &v)| (j, v)).collect();
            terms.push((r, norm));
            p.add_le(terms, off);
        }
        for k in 0..n {
            p.add_le(vec![(x[k], 1.0), (r, 1.0)], self.hi[k]);
            p.add_le(vec![(x[k], -1.0), (r, 1.0)], -self.lo[k]);
        }
        let sol = ConicSolver::clarabel().with_accuracy(1e-9).solve(&p);
        match sol.primal {
            Some(v) => Ok(x.iter().map(|&j| v[j]).collect()),
            None => Err(Error::invariant("hpolytope is empty")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetKind {
    Point,
    Segment,
    Box,
    HPolytope,
}

/// A compact convex region attached to a vertex.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexSet {
    Point { p: Vec<f64> },
    Segment { a: Vec<f64>, b: Vec<f64> },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    HPolytope(HPolytope),
}

impl ConvexSet {
    pub fn point(p: impl Into<Vec<f64>>) -> Self {
        ConvexSet::Point { p: p.into() }
    }

    pub fn segment(a: impl Into<Vec<f64>>, b: impl Into<Vec<f64>>) -> Self {
        ConvexSet::Segment {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn aabox(lo: impl Into<Vec<f64>>, hi: impl Into<Vec<f64>>) -> Self {
        ConvexSet::Box {
            lo: lo.into(),
            hi: hi.into(),
        }
    }

    pub fn kind(&self) -> SetKind {
        match self {
            ConvexSet::Point { .. } => SetKind::Point,
            ConvexSet::Segment { .. } => SetKind::Segment,
            ConvexSet::Box { .. } => SetKind::Box,
            ConvexSet::HPolytope(_) => SetKind::HPolytope,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Point { p } => p.len(),
            ConvexSet::Segment { a, .. } => a.len(),
            ConvexSet::Box { lo, .. } => lo.len(),
            ConvexSet::HPolytope(h) => h.lo.len(),
        }
    }

    /// Axis-aligned bounds of the set.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ConvexSet::Point { p } => (p.clone(), p.clone()),
            ConvexSet::Segment { a, b } => (
                a.iter().zip(b).map(|(x, y)| x.min(*y)).collect(),
                a.iter().zip(b).map(|(x, y)| x.max(*y)).collect(),
            ),
            ConvexSet::Box { lo, hi } => (lo.clone(), hi.clone()),
            ConvexSet::HPolytope(h) => (h.lo.clone(), h.hi.clone()),
        }
    }

    /// Checks finiteness, dimensions, ordering, and non-emptiness.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            ConvexSet::Point { p } => {
                if !finite(p) {
                    return Err(Error::invariant("point has non-finite coordinates"));
                }
            }
            ConvexSet::Segment { a, b } => {
                if a.len() != b.len() {
                    return Err(Error::invariant("segment endpoints differ in dimension"));
                }
                if !finite(a) || !finite(b) {
                    return Err(Error::invariant("segment has non-finite coordinates"));
                }
            }
            ConvexSet::Box { lo, hi } => {
                if lo.len() != hi.len() {
                    return Err(Error::invariant("box corners differ in dimension"));
                }
                if !finite(lo) || !finite(hi) {
                    return Err(Error::invariant("box has non-finite coordinates"));
                }
                if lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return Err(Error::invariant("box requires lo <= hi componentwise"));
                }
            }
            ConvexSet::HPolytope(h) => {
                if !finite(&h.lo)
                    || !finite(&h.hi)
                    || !finite(&h.b)
                    || !h.a.iter().all(|r| finite(r))
                {
                    return Err(Error::invariant("hpolytope has non-finite data"));
                }
                if h.lo.iter().zip(&h.hi).any(|(l, u)| l > u) {
                    return Err(Error::invariant("hpolytope bbox requires lo <= hi"));
                }
                h.chebyshev_center()?;
            }
        }
        if self.dim() == 0 {
            return Err(Error::invariant("zero-dimensional set"));
        }
        Ok(())
    }

    /// Midpoint for segments and boxes, the point itself for points, and the
    /// Chebyshev center for polytopes. Always a member of the set.
    pub fn centroid(&self) -> Result<Vec<f64>> {
        Ok(match self {
            ConvexSet::Point { p } => p.clone(),
            ConvexSet::Segment { a, b } | ConvexSet::Box { lo: a, hi: b } => {
                a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
            }
            ConvexSet::HPolytope(h) => h.chebyshev_center()?,
        })
    }

    /// How far `(z, λ)` is from the perspective cone of the set, measured
    /// in the same per-coordinate terms the membership test uses. Zero inside.
    pub fn perspective_violation(&self, z: &[f64], lambda: f64) -> f64 {
        if z.len() != self.dim() {
            return f64::INFINITY;
        }
        let box_gap = |lo: &[f64], hi: &[f64]| {
            z.iter()
                .zip(lo.iter().zip(hi))
                .map(|(zk, (l, h))| (lambda * l - zk).max(zk - lambda * h))
                .fold(0.0_f64, f64::max)
        };
        let gap = match self {
            ConvexSet::Point { p } => z
                .iter()
                .zip(p)
                .map(|(zk, pk)| (zk - lambda * pk).abs())
                .fold(0.0, f64::max),
            ConvexSet::Segment { a, b } => {
                let dir = sub(b, a);
                let len2 = dot(&dir, &dir);
                let offset: Vec<f64> = z.iter().zip(a).map(|(zk, ak)| zk - lambda * ak).collect();
                let sigma = if len2 > 0.0 {
                    (dot(&offset, &dir) / len2).clamp(0.0, lambda.max(0.0))
                } else {
                    0.0
                };
                offset
                    .iter()
                    .zip(&dir)
                    .map(|(o, d)| (o - sigma * d).abs())
                    .fold(0.0, f64::max)
            }
            ConvexSet::Box { lo, hi } => box_gap(lo, hi),
            ConvexSet::HPolytope(h) => {
                h.a.iter()
                    .zip(&h.b)
                    .map(|(row, off)| dot(row, z) - lambda * off)
                    .fold(box_gap(&h.lo, &h.hi), f64::max)
            }
        };
        gap.max(-lambda)
    }

    /// Whether `(z, λ)` lies in the closed perspective cone
    /// `{(x, λ) : λ ≥ 0, x ∈ λ·X}`, up to `tol`.
    pub fn perspective_contains(&self, z: &[f64], lambda: f64, tol: f64) -> bool {
        lambda >= -tol && self.perspective_violation(z, lambda) <= tol
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.perspective_contains(x, 1.0, tol)
    }

    /// Euclidean projection for the closed-form kinds. For polytopes the point
    /// is only clamped to the bounding box.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ConvexSet::Point { p } => p.clone(),
            ConvexSet::Segment { a, b } => closest_on_segment(x, a, b),
            ConvexSet::Box { lo, hi } => clamp(x, lo, hi),
            ConvexSet::HPolytope(h) => clamp(x, &h.lo, &h.hi),
        }
    }

    /// Draws a member of the set. Polytopes use rejection sampling in the
    /// bounding box and fall back to the Chebyshev center.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            ConvexSet::Point { p } => p.clone(),
            ConvexSet::Segment { a, b } => {
                let s: f64 = rng.gen();
                a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
            }
            ConvexSet::Box { lo, hi } => sample_box(rng, lo, hi),
            ConvexSet::HPolytope(h) => {
                for _ in 0..1000 {
                    let x = sample_box(rng, &h.lo, &h.hi);
                    if self.contains(&x, 0.0) {
                        return x;
                    }
                }
                h.chebyshev_center()
                    .expect("validated polytope is non-empty")
            }
        }
    }
}

fn sample_box<R: Rng + ?Sized>(rng: &mut R, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    lo.iter()
        .zip(hi)
        .map(|(l, h)| if h > l { rng.gen_range(*l..=*h) } else { *l })
        .collect()
}

fn clamp(x: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(lo.iter().zip(hi))
        .map(|(v, (l, h))| v.clamp(*l, *h))
        .collect()
}

fn closest_on_segment(x: &[f64], a: &[f64], b: &[f64]) -> Vec<f64> {
    let dir = sub(b, a);
    let len2 = dot(&dir, &dir);
    if len2 == 0.0 {
        return a.to_vec();
    }
    let s = (dot(&sub(x, a), &dir) / len2).clamp(0.0, 1.0);
    a.iter().zip(&dir).map(|(ak, dk)| ak + s * dk).collect()
}

/// `min ‖x − x′‖₂` over `x ∈ a`, `x′ ∈ b`.
pub fn set_distance(a: &ConvexSet, b: &ConvexSet) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::input(format!(
            "cannot measure distance between sets of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    use ConvexSet::*;
    Ok(match (a, b) {
        (Point { p }, other) | (other, Point { p }) if other.kind() != SetKind::HPolytope => {
            distance(p, &other.project(p))
        }
        (Box { lo: l1, hi: h1 }, Box { lo: l2, hi: h2 }) => {
            let gaps: Vec<f64> = (0..l1.len())
                .map(|k| (l2[k] - h1[k]).max(l1[k] - h2[k]).max(0.0))
                .collect();
            dot(&gaps, &gaps).sqrt()
        }
        _ => conic_distance(a, b)?,
    })
}

fn conic_distance(a: &ConvexSet, b: &ConvexSet) -> Result<f64> {
    let n = a.dim();
    let mut p = ConicProgram::new();
    let x = p.add_free_vec(n);
    let y = p.add_free_vec(n);
    let t = p.add_var(0.0, f64::INFINITY);
    p.add_cost(t, 1.0);
    add_perspective(&mut p, a, &x, Scale::One);
    add_perspective(&mut p, b, &y, Scale::One);
    let rows = (0..n)
        .map(|k| LinearExpr::new(vec![(x[k], 1.0), (y[k], -1.0)], 0.0))
        .collect();
    p.add_soc(t, rows);
    let sol = ConicSolver::clarabel().with_accuracy(1e-9).solve(&p);
    match sol.primal {
        Some(v) => Ok(distance(
            &x.iter().map(|&j| v[j]).collect::<Vec<_>>(),
            &y.iter().map(|&j| v[j]).collect::<Vec<_>>(),
        )
        .min(v[t].max(0.0))),
        None => Err(Error::Numerical(format!(
            "set distance solve ended {:?}",
            sol.status
        ))),
    }
}
