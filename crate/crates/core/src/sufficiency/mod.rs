//! Sufficient kernel pairs and invariance of divergences under them.
//!
//! A kernel `Φ` is sufficient for the pair `(s₁, s₂)` when some recovery
//! kernel `Ψ` maps `Φsᵢ` back to `sᵢ`. All kernels here map the simplex of
//! a fixed dimension into itself.

mod divergence;
mod harness;
pub mod lp;

pub use divergence::Divergence;
pub use harness::{classify_divergence, SufficiencyReport, TrialGap, Verdict, Witness, FAIL_THRESHOLD};

use serde::Serialize;

use crate::bregman::Generator;
use crate::error::{check_dim, Error, Result};
use crate::simplex::{Kernel, ProbVec};
use lp::{phase_one, Phase1};

/// Tolerance on `‖ΨΦsᵢ − sᵢ‖∞` for a valid pair.
pub const PAIR_TOL: f64 = 1e-10;

/// Residual accepted from [`recovery_search`].
pub const RECOVERY_TOL: f64 = 1e-9;

/// Conditional distributions within a merged block must agree to this.
pub const RATIO_TOL: f64 = 1e-9;

/// How a sufficient pair was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SufficientFamily {
    Identity,
    Permutation,
    MergeSplit,
    UniformizeTail,
    Composite,
}

/// `(Φ, Ψ)` with `ΨΦsᵢ = sᵢ` for both states, checked on construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelPair {
    phi: Kernel,
    psi: Kernel,
    s1: ProbVec,
    s2: ProbVec,
}

impl KernelPair {
    pub fn new(phi: Kernel, psi: Kernel, s1: ProbVec, s2: ProbVec) -> Result<Self> {
        let dim = s1.dim();
        check_dim(dim, s2.dim())?;
        check_dim(dim, phi.dim())?;
        check_dim(dim, psi.dim())?;
        let pair = Self { phi, psi, s1, s2 };
        let residual = pair.recovery_residual()?;
        if residual > PAIR_TOL {
            return Err(Error::InvalidArgument(format!(
                "recovery kernel misses the states by {residual:e}"
            )));
        }
        Ok(pair)
    }

    pub fn identity(s1: ProbVec, s2: ProbVec) -> Result<Self> {
        let dim = s1.dim();
        Self::new(Kernel::identity(dim), Kernel::identity(dim), s1, s2)
    }

    pub fn phi(&self) -> &Kernel {
        &self.phi
    }

    pub fn psi(&self) -> &Kernel {
        &self.psi
    }

    pub fn states(&self) -> (&ProbVec, &ProbVec) {
        (&self.s1, &self.s2)
    }

    /// `(Φs₁, Φs₂)`.
    pub fn images(&self) -> Result<(ProbVec, ProbVec)> {
        Ok((self.phi.apply(&self.s1)?, self.phi.apply(&self.s2)?))
    }

    /// `max_i ‖ΨΦsᵢ − sᵢ‖∞`.
    pub fn recovery_residual(&self) -> Result<f64> {
        let (y1, y2) = self.images()?;
        let r1 = self.psi.apply(&y1)?.max_abs_diff(&self.s1);
        let r2 = self.psi.apply(&y2)?.max_abs_diff(&self.s2);
        Ok(r1.max(r2))
    }

    /// Applies `next` after `self`; `next` must be sufficient for the images
    /// `(Φs₁, Φs₂)`.
    pub fn then(&self, next: &KernelPair) -> Result<KernelPair> {
        let (y1, y2) = self.images()?;
        if y1.max_abs_diff(&next.s1) > PAIR_TOL || y2.max_abs_diff(&next.s2) > PAIR_TOL {
            return Err(Error::InvalidArgument(
                "second pair is not built on the images of the first".into(),
            ));
        }
        KernelPair::new(
            next.phi.compose(&self.phi)?,
            self.psi.compose(&next.psi)?,
            self.s1.clone(),
            self.s2.clone(),
        )
    }

    /// The idempotent kernel `ΨΦ` paired with the identity recovery. It
    /// fixes both states.
    pub fn round_trip(&self) -> Result<KernelPair> {
        KernelPair::new(
            self.psi.compose(&self.phi)?,
            Kernel::identity(self.s1.dim()),
            self.s1.clone(),
            self.s2.clone(),
        )
    }
}

pub fn permutation_pair(perm: &[usize], s1: ProbVec, s2: ProbVec) -> Result<KernelPair> {
    let mut inverse = vec![0; perm.len()];
    for (j, &i) in perm.iter().enumerate() {
        if i < perm.len() {
            inverse[i] = j;
        }
    }
    KernelPair::new(Kernel::permutation(perm)?, Kernel::permutation(&inverse)?, s1, s2)
}

fn validate_partition(blocks: &[Vec<usize>], dim: usize) -> Result<Vec<Vec<usize>>> {
    let mut seen = vec![false; dim];
    let mut sorted = Vec::with_capacity(blocks.len());
    for block in blocks {
        if block.is_empty() {
            return Err(Error::InvalidArgument("empty block in partition".into()));
        }
        let mut b = block.clone();
        b.sort_unstable();
        for &x in &b {
            if x >= dim || seen[x] {
                return Err(Error::InvalidArgument(format!(
                    "blocks do not partition {dim} letters"
                )));
            }
            seen[x] = true;
        }
        sorted.push(b);
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidArgument(format!("blocks do not cover {dim} letters")));
    }
    Ok(sorted)
}

/// Merges each block onto its smallest letter and splits it back with the
/// conditional distribution shared by both states.
///
/// Within a block the likelihood ratio `s₁ᵢ/s₂ᵢ` must be constant, i.e. the
/// two conditional distributions agree to [`RATIO_TOL`].
pub fn merge_split_pair(blocks: &[Vec<usize>], s1: ProbVec, s2: ProbVec) -> Result<KernelPair> {
    let dim = s1.dim();
    check_dim(dim, s2.dim())?;
    let blocks = validate_partition(blocks, dim)?;

    let mut phi_cols = vec![vec![0.0; dim]; dim];
    let mut psi_cols: Vec<Vec<f64>> = (0..dim)
        .map(|j| {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            e
        })
        .collect();

    for block in &blocks {
        let rep = block[0];
        let m1: f64 = block.iter().map(|&i| s1[i]).sum();
        let m2: f64 = block.iter().map(|&i| s2[i]).sum();
        if m1 > 0.0 && m2 > 0.0 {
            let disagree = block
                .iter()
                .any(|&i| (s1[i] / m1 - s2[i] / m2).abs() > RATIO_TOL);
            if disagree {
                return Err(Error::LikelihoodRatio { block: block.clone() });
            }
        }
        for &j in block {
            phi_cols[j][rep] = 1.0;
        }
        let (source, mass) = if m2 > 0.0 { (&s2, m2) } else { (&s1, m1) };
        if mass > 0.0 {
            let col = &mut psi_cols[rep];
            col[rep] = 0.0;
            for &i in block {
                col[i] = source[i] / mass;
            }
        }
    }
    KernelPair::new(
        Kernel::from_columns(phi_cols)?,
        Kernel::from_columns(psi_cols)?,
        s1,
        s2,
    )
}

/// `Φ` averages every letter except `keep`; `Ψ` redistributes the averaged
/// mass proportionally to `q` off `keep`. `None` when `q` has no mass off
/// `keep`.
fn uniformize_tail_kernels(q: &ProbVec, keep: usize) -> Result<Option<(Kernel, Kernel)>> {
    let dim = q.dim();
    if keep >= dim {
        return Err(Error::InvalidArgument(format!("letter {keep} outside alphabet of size {dim}")));
    }
    let tail: f64 = (0..dim).filter(|&j| j != keep).map(|j| q[j]).sum();
    if dim < 2 || tail <= 0.0 {
        return Ok(None);
    }
    let spread = 1.0 / (dim - 1) as f64;
    let mut phi_cols = Vec::with_capacity(dim);
    let mut psi_cols = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut phi_col = vec![0.0; dim];
        let mut psi_col = vec![0.0; dim];
        if j == keep {
            phi_col[keep] = 1.0;
            psi_col[keep] = 1.0;
        } else {
            for i in (0..dim).filter(|&i| i != keep) {
                phi_col[i] = spread;
                psi_col[i] = q[i] / tail;
            }
        }
        phi_cols.push(phi_col);
        psi_cols.push(psi_col);
    }
    Ok(Some((Kernel::from_columns(phi_cols)?, Kernel::from_columns(psi_cols)?)))
}

/// Sufficient pair for `(δ_keep, q)` that flattens the tail of `q`.
pub fn uniformize_tail_pair(q: ProbVec, keep: usize) -> Result<KernelPair> {
    let dirac = ProbVec::dirac(q.dim(), keep)?;
    uniformize_tail_pair_for(dirac, q, keep)
}

/// As [`uniformize_tail_pair`] for any `s1` whose conditional off `keep`
/// matches that of `q`, such as `α·δ_keep + (1 − α)·q`.
pub fn uniformize_tail_pair_for(s1: ProbVec, q: ProbVec, keep: usize) -> Result<KernelPair> {
    match uniformize_tail_kernels(&q, keep)? {
        Some((phi, psi)) => KernelPair::new(phi, psi, s1, q),
        None => KernelPair::identity(s1, q),
    }
}

/// Searches for a column-stochastic `Ψ` with `ΨΦsᵢ = sᵢ` by phase-one
/// linear programming over the entries of `Ψ`.
pub fn recovery_search(phi: &Kernel, s1: &ProbVec, s2: &ProbVec) -> Result<Option<Kernel>> {
    let dim = phi.dim();
    check_dim(dim, s1.dim())?;
    check_dim(dim, s2.dim())?;
    let y1 = phi.apply(s1)?;
    let y2 = phi.apply(s2)?;

    // Variable ψ[i][j] sits at column i·dim + j.
    let cols = dim * dim;
    let mut a = Vec::with_capacity(3 * dim * cols);
    let mut b = Vec::with_capacity(3 * dim);
    for j in 0..dim {
        let mut row = vec![0.0; cols];
        for i in 0..dim {
            row[i * dim + j] = 1.0;
        }
        a.extend(row);
        b.push(1.0);
    }
    for (y, s) in [(&y1, s1), (&y2, s2)] {
        for i in 0..dim {
            let mut row = vec![0.0; cols];
            for j in 0..dim {
                row[i * dim + j] = y[j];
            }
            a.extend(row);
            b.push(s[i]);
        }
    }

    let x = match phase_one(&a, &b, cols) {
        Phase1::Feasible(x) => x,
        Phase1::Infeasible(_) => return Ok(None),
    };
    let rows: Vec<Vec<f64>> = x.chunks(dim).map(<[f64]>::to_vec).collect();
    let psi = match Kernel::new(rows) {
        Ok(k) => k,
        Err(_) => return Ok(None),
    };
    let residual = psi.apply(&y1)?.max_abs_diff(s1).max(psi.apply(&y2)?.max_abs_diff(s2));
    Ok((residual <= RECOVERY_TOL).then_some(psi))
}

fn extended_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        (a - b).abs()
    }
}

/// `|D(Φs₁, Φs₂) − D(s₁, s₂)|`, zero when both sides are `+inf`.
pub fn invariance_gap(divergence: &Divergence, pair: &KernelPair) -> Result<f64> {
    let (y1, y2) = pair.images()?;
    Ok(extended_gap(divergence.eval(&y1, &y2), divergence.eval(&pair.s1, &pair.s2)))
}

/// `max_i |F(Φsᵢ) − F(sᵢ)|`.
pub fn f_invariance_gap(generator: &dyn Generator, pair: &KernelPair) -> Result<f64> {
    let (y1, y2) = pair.images()?;
    let g1 = extended_gap(generator.value(y1.as_slice()), generator.value(pair.s1.as_slice()));
    let g2 = extended_gap(generator.value(y2.as_slice()), generator.value(pair.s2.as_slice()));
    Ok(g1.max(g2))
}
