//! Linear rows encoding `(z, λ) ∈ cone(X)` for each set kind.

use crate::conic::ConicProgram;
use crate::gcs::ConvexSet;

/// The `λ` of a perspective constraint: a program variable, or the constant 1
/// (plain membership `z ∈ X`).
#[derive(Clone, Copy, Debug)]
pub(crate) enum Scale {
    Var(usize),
    One,
}

/// Accumulates `Σ terms + coef·λ (op) 0` and moves the constant part of `λ`
/// to the right-hand side.
fn with_scale(
    mut terms: Vec<(usize, f64)>,
    lambda_coef: f64,
    scale: Scale,
) -> (Vec<(usize, f64)>, f64) {
    match scale {
        Scale::Var(l) => {
            if lambda_coef != 0.0 {
                terms.push((l, lambda_coef));
            }
            (terms, 0.0)
        }
        Scale::One => (terms, -lambda_coef),
    }
}

fn add_box_rows(p: &mut ConicProgram, lo: &[f64], hi: &[f64], z: &[usize], scale: Scale) {
    for k in 0..z.len() {
        if lo[k] == hi[k] {
            let (t, r) = with_scale(vec![(z[k], 1.0)], -lo[k], scale);
            p.add_eq(t, r);
        } else {
            let (t, r) = with_scale(vec![(z[k], 1.0)], -hi[k], scale);
            p.add_le(t, r);
            let (t, r) = with_scale(vec![(z[k], -1.0)], lo[k], scale);
            p.add_le(t, r);
        }
    }
}

/// Emits the rows for `(z, λ) ∈ cone(set)`:
/// point `z = λp`; segment `z = λa + σ(b − a)` with `0 ≤ σ ≤ λ`;
/// box `λ·lo ≤ z ≤ λ·hi`; polytope `A z ≤ λb` plus its box.
///
/// Returns the auxiliary `σ` variable for segments.
pub(crate) fn add_perspective(
    p: &mut ConicProgram,
    set: &ConvexSet,
    z: &[usize],
    scale: Scale,
) -> Option<usize> {
    match set {
        ConvexSet::Point { p: pt } => {
            for k in 0..z.len() {
                let (t, r) = with_scale(vec![(z[k], 1.0)], -pt[k], scale);
                p.add_eq(t, r);
            }
            None
        }
        ConvexSet::Segment { a, b } => {
            let sigma = p.add_var(0.0, f64::INFINITY);
            for k in 0..z.len() {
                let (t, r) = with_scale(vec![(z[k], 1.0), (sigma, -(b[k] - a[k]))], -a[k], scale);
                p.add_eq(t, r);
            }
            let (t, r) = with_scale(vec![(sigma, 1.0)], -1.0, scale);
            p.add_le(t, r);
            Some(sigma)
        }
        ConvexSet::Box { lo, hi } => {
            add_box_rows(p, lo, hi, z, scale);
            None
        }
        ConvexSet::HPolytope(h) => {
            for (row, &off) in h.rows().iter().zip(h.offsets()) {
                let terms = z
                    .iter()
                    .zip(row)
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(&j, &v)| (j, v))
                    .collect();
                let (t, r) = with_scale(terms, -off, scale);
                p.add_le(t, r);
            }
            let (lo, hi) = h.bbox();
            add_box_rows(p, lo, hi, z, scale);
            None
        }
    }
}
