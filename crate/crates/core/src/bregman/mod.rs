//! Bregman divergences, regret from action families, and the identities
//! that tie them to convex generators.

mod actions;
mod coding;
mod generator;

pub use actions::{regret_from_actions, ActionFamily, OPTIMALITY_TOL};
pub use coding::{code_length_family, code_length_vectors, kraft_sum, MAX_CANDIDATES};
pub use generator::{builtin, AffineShift, Burg, Generator, Negentropy, Scaled, SquaredNorm, Tabulated};

use serde::Serialize;

use crate::error::{check_dim, Result};
use crate::simplex::{mixture, simplex_grid, MixtureWeights, ProbVec};

/// `D_F(p, q) = F(p) − F(q) − ⟨p − q, ∇F(q)⟩`, `+inf` where the limit
/// diverges.
pub fn bregman_divergence(generator: &dyn Generator, p: &ProbVec, q: &ProbVec) -> Result<f64> {
    check_dim(p.dim(), q.dim())?;
    generator.divergence(p.as_slice(), q.as_slice())
}

/// Both sides of `Σ tᵢ D(sᵢ, s̃) = Σ tᵢ D(sᵢ, ŝ) + D(ŝ, s̃)` with `ŝ` the
/// barycenter of the `sᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompensationGap {
    #[serde(with = "crate::json::extended")]
    pub lhs: f64,
    #[serde(with = "crate::json::extended")]
    pub rhs: f64,
    #[serde(with = "crate::json::extended")]
    pub residual: f64,
}

/// Compensation identity for an arbitrary regret function. Exact for
/// Bregman divergences; an inequality `lhs ≥ rhs` for general regrets.
pub fn compensation_gap_with<D>(
    regret: D,
    t: &MixtureWeights,
    states: &[ProbVec],
    reference: &ProbVec,
) -> Result<CompensationGap>
where
    D: Fn(&ProbVec, &ProbVec) -> Result<f64>,
{
    let barycenter = mixture(t, states)?;
    check_dim(barycenter.dim(), reference.dim())?;
    let mut lhs = 0.0;
    let mut rhs = regret(&barycenter, reference)?;
    for (&ti, s) in t.as_slice().iter().zip(states) {
        if ti == 0.0 {
            continue;
        }
        lhs += ti * regret(s, reference)?;
        rhs += ti * regret(s, &barycenter)?;
    }
    let residual = if lhs == rhs { 0.0 } else { lhs - rhs };
    Ok(CompensationGap { lhs, rhs, residual })
}

pub fn compensation_gap(
    generator: &dyn Generator,
    t: &MixtureWeights,
    states: &[ProbVec],
    reference: &ProbVec,
) -> Result<CompensationGap> {
    compensation_gap_with(|p, q| bregman_divergence(generator, p, q), t, states, reference)
}

pub const AFFINE_TOL: f64 = 1e-8;

/// Lattice resolution of the interior grid used by [`affine_equivalent`].
fn affine_grid(dim: usize) -> Vec<ProbVec> {
    let steps = 12.max(2 * dim);
    simplex_grid(dim, steps, true)
        .into_iter()
        .map(|w| ProbVec::new(w).expect("lattice points are on the simplex"))
        .collect()
}

/// Whether `F1 − F2` is affine on the simplex, judged on a deterministic
/// interior grid, and the two generators then give the same divergence on
/// every grid pair.
///
/// The affine interpolant is anchored at the interior points
/// `0.8·δᵢ + 0.2·uniform` so that generators that blow up at the vertices
/// are still comparable.
pub fn affine_equivalent(f1: &dyn Generator, f2: &dyn Generator, dim: usize) -> bool {
    if dim == 0 {
        return false;
    }
    let shift = 0.2 / dim as f64;
    let anchor_diff: Vec<f64> = (0..dim)
        .map(|i| {
            let mut r = vec![shift; dim];
            r[i] += 0.8;
            f1.value(&r) - f2.value(&r)
        })
        .collect();
    let grid = affine_grid(dim);

    for p in &grid {
        let interpolant: f64 = p
            .as_slice()
            .iter()
            .zip(&anchor_diff)
            .map(|(&x, &h)| (x - shift) / 0.8 * h)
            .sum();
        let diff = f1.value(p.as_slice()) - f2.value(p.as_slice());
        if !((diff - interpolant).abs() <= AFFINE_TOL) {
            return false;
        }
    }
    for p in &grid {
        for q in &grid {
            let d1 = bregman_divergence(f1, p, q);
            let d2 = bregman_divergence(f2, p, q);
            match (d1, d2) {
                (Ok(a), Ok(b)) if (a - b).abs() <= AFFINE_TOL || a == b => {}
                _ => return false,
            }
        }
    }
    true
}
