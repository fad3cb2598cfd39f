//! Randomized search for sufficiency violations.
//!
//! Every trial plants a pair that is sufficient by construction, so the
//! ground truth never depends on the divergence under test.

use rand::Rng;
use serde::Serialize;

use super::{
    invariance_gap, merge_split_pair, permutation_pair, uniformize_tail_pair_for, Divergence,
    KernelPair, SufficientFamily,
};
use crate::error::{Error, Result};
use crate::sample::{interior_point, permutation, trial_rng};
use crate::simplex::ProbVec;

/// Gaps above this count as violations.
pub const FAIL_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialGap {
    pub dim: usize,
    pub trial: usize,
    pub family: SufficientFamily,
    pub s1: ProbVec,
    pub s2: ProbVec,
    #[serde(with = "crate::json::extended")]
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub dim: usize,
    pub trial: usize,
    pub family: SufficientFamily,
    pub pair: KernelPair,
    #[serde(with = "crate::json::extended")]
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Passes,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficiencyReport {
    pub divergence: String,
    pub dims: Vec<usize>,
    pub trials_per_dim: usize,
    pub seed: u64,
    #[serde(with = "crate::json::extended")]
    pub max_gap: f64,
    pub verdict: Verdict,
    pub worst: Option<Witness>,
    pub trials: Vec<TrialGap>,
}

impl SufficiencyReport {
    pub fn passes(&self) -> bool {
        self.verdict == Verdict::Passes
    }
}

/// Random blocks over a shuffled alphabet, at least one with two letters.
fn random_blocks<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Vec<usize>> {
    let order = permutation(rng, dim);
    let count = rng.random_range(1..dim);
    let mut cuts: Vec<usize> = permutation(rng, dim - 1)
        .into_iter()
        .take(count - 1)
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    let mut blocks = Vec::with_capacity(count);
    let mut start = 0;
    for cut in cuts.into_iter().chain(std::iter::once(dim)) {
        blocks.push(order[start..cut].to_vec());
        start = cut;
    }
    blocks
}

/// `s₂` interior, `s₁` with fresh block masses and `s₂`'s conditionals.
fn planted_merge<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<KernelPair> {
    let s2 = interior_point(rng, dim);
    let blocks = random_blocks(rng, dim);
    let masses = interior_point(rng, blocks.len());
    let mut w1 = vec![0.0; dim];
    for (block, &m) in blocks.iter().zip(masses.as_slice()) {
        let m2: f64 = block.iter().map(|&i| s2[i]).sum();
        for &i in block {
            w1[i] = m * s2[i] / m2;
        }
    }
    merge_split_pair(&blocks, ProbVec::new(w1)?, s2)
}

fn planted_pair<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    family: SufficientFamily,
) -> Result<KernelPair> {
    match family {
        SufficientFamily::Identity => {
            KernelPair::identity(interior_point(rng, dim), interior_point(rng, dim))
        }
        SufficientFamily::Permutation => {
            let s1 = interior_point(rng, dim);
            let s2 = interior_point(rng, dim);
            permutation_pair(&permutation(rng, dim), s1, s2)
        }
        SufficientFamily::MergeSplit => planted_merge(rng, dim),
        SufficientFamily::UniformizeTail => {
            let q = interior_point(rng, dim);
            let keep = rng.random_range(0..dim);
            let alpha: f64 = rng.random_range(0.05..=1.0);
            let w: Vec<f64> = (0..dim)
                .map(|i| (1.0 - alpha) * q[i] + if i == keep { alpha } else { 0.0 })
                .collect();
            uniformize_tail_pair_for(ProbVec::new(w)?, q, keep)
        }
        SufficientFamily::Composite => {
            let merge = planted_merge(rng, dim)?;
            let (y1, y2) = merge.images()?;
            let perm = permutation_pair(&permutation(rng, dim), y1, y2)?;
            merge.then(&perm)
        }
    }
}

const ROTATION: [SufficientFamily; 4] = [
    SufficientFamily::MergeSplit,
    SufficientFamily::Permutation,
    SufficientFamily::UniformizeTail,
    SufficientFamily::Composite,
];

/// Evaluates `divergence` on `trials` planted sufficient pairs per
/// dimension. Families rotate through merge-split, permutation,
/// uniformize-tail and merge-then-permute. Deterministic given `seed`.
///
/// Dimensions must lie in `3..=8`: on two letters flattening the tail is the
/// identity and the harness cannot separate divergences.
pub fn classify_divergence(
    divergence: &Divergence,
    dims: &[usize],
    trials: usize,
    seed: u64,
) -> Result<SufficiencyReport> {
    if dims.is_empty() || dims.iter().any(|d| !(3..=8).contains(d)) {
        return Err(Error::InvalidArgument(format!("dimensions {dims:?} must lie in 3..=8")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }

    let mut entries = Vec::with_capacity(dims.len() * trials);
    let mut worst: Option<Witness> = None;
    for &dim in dims {
        for trial in 0..trials {
            let mut rng = trial_rng(seed, dim as u64, trial as u64);
            let family = ROTATION[trial % ROTATION.len()];
            let pair = planted_pair(&mut rng, dim, family)?;
            let mut gap = invariance_gap(divergence, &pair)?;
            if gap.is_nan() {
                gap = f64::INFINITY;
            }
            if worst.as_ref().is_none_or(|w| gap > w.gap) {
                worst = Some(Witness {
                    dim,
                    trial,
                    family,
                    pair: pair.clone(),
                    gap,
                });
            }
            let (s1, s2) = pair.states();
            entries.push(TrialGap {
                dim,
                trial,
                family,
                s1: s1.clone(),
                s2: s2.clone(),
                gap,
            });
        }
    }

    let max_gap = worst.as_ref().map_or(0.0, |w| w.gap);
    let verdict = if max_gap > FAIL_THRESHOLD {
        Verdict::Fails
    } else {
        Verdict::Passes
    };
    Ok(SufficiencyReport {
        divergence: divergence.name().to_string(),
        dims: dims.to_vec(),
        trials_per_dim: trials,
        seed,
        max_gap,
        verdict,
        worst,
        trials: entries,
    })
}
