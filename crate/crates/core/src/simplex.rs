//! Probability vectors, stochastic kernels, and the basic information
//! quantities on the finite simplex.
//!
//! All logarithms are natural; divergences and entropies are in nats.
//! Kernels are column-stochastic and act on column vectors from the left:
//! `(K p)_i = Σ_j K[i][j] p_j`, so column `j` is the image of the Dirac
//! point `δ_j`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Largest deviation of the total mass from 1 that is silently normalized.
pub const NORMALIZE_TOL: f64 = 1e-9;

/// Negative entries above `-CLAMP_TOL` are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVec(Vec<f64>);

impl ProbVec {
    /// Validates and normalizes `weights`.
    ///
    /// Entries in `[-1e-12, 0)` are clamped to zero and a total mass within
    /// `1e-9` of one is rescaled to one; anything worse is rejected.
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidProbability("no entries".into()));
        }
        for (i, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() {
                return Err(Error::InvalidProbability(format!("entry {i} is not finite")));
            }
            if *w < -CLAMP_TOL {
                return Err(Error::InvalidProbability(format!("entry {i} is negative ({w})")));
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZE_TOL {
            return Err(Error::InvalidProbability(format!("entries sum to {total}")));
        }
        if total != 1.0 {
            weights.iter_mut().for_each(|w| *w /= total);
        }
        Ok(Self(weights))
    }

    pub fn dirac(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "letter {index} outside alphabet of size {dim}"
            )));
        }
        let mut w = vec![0.0; dim];
        w[index] = 1.0;
        Ok(Self(w))
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidProbability("no entries".into()));
        }
        Ok(Self(vec![1.0 / dim as f64; dim]))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// True when every coordinate is strictly positive.
    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&w| w > 0.0)
    }

    /// Largest coordinate-wise absolute difference.
    pub fn max_abs_diff(&self, other: &ProbVec) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Cyclic shift so that letter `start` becomes the first coordinate.
    pub fn rotate(&self, start: usize) -> ProbVec {
        let mut w = self.0.clone();
        w.rotate_left(start % self.dim());
        ProbVec(w)
    }
}

impl std::ops::Index<usize> for ProbVec {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for ProbVec {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbVec::new(v)
    }
}

impl From<ProbVec> for Vec<f64> {
    fn from(p: ProbVec) -> Self {
        p.0
    }
}

/// Convex combination weights over mixture components.
pub type MixtureWeights = ProbVec;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Barycenter `Σ tᵢ·sᵢ`.
pub fn mixture(t: &MixtureWeights, states: &[ProbVec]) -> Result<ProbVec> {
    check_dim(t.dim(), states.len())?;
    let dim = states[0].dim();
    let mut out = vec![0.0; dim];
    for (&ti, s) in t.as_slice().iter().zip(states) {
        check_dim(dim, s.dim())?;
        for (o, &w) in out.iter_mut().zip(s.as_slice()) {
            *o += ti * w;
        }
    }
    ProbVec::new(out)
}

/// A square column-stochastic matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Kernel {
    dim: usize,
    entries: Vec<f64>,
}

impl Kernel {
    /// Builds a kernel from row-major entries. Each column is validated and
    /// normalized with the same rules as [`ProbVec::new`].
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Empty("kernel"));
        }
        for row in &rows {
            check_dim(dim, row.len())?;
        }
        let columns = (0..dim)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        Self::from_columns(columns)
    }

    /// Builds a kernel whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let dim = columns.len();
        if dim == 0 {
            return Err(Error::Empty("kernel"));
        }
        let mut entries = vec![0.0; dim * dim];
        for (j, col) in columns.into_iter().enumerate() {
            check_dim(dim, col.len())?;
            let col = ProbVec::new(col).map_err(|e| Error::NotStochastic {
                column: j,
                reason: e.to_string(),
            })?;
            for (i, &w) in col.as_slice().iter().enumerate() {
                entries[i * dim + j] = w;
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self { dim, entries }
    }

    /// Deterministic relabelling sending letter `j` to letter `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let dim = perm.len();
        let mut seen = vec![false; dim];
        for &p in perm {
            if p >= dim || seen[p] {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let mut entries = vec![0.0; dim * dim];
        for (j, &i) in perm.iter().enumerate() {
            entries[i * dim + j] = 1.0;
        }
        Ok(Self { dim, entries })
    }

    /// Every column equal to `p`: maps every state to `p`.
    pub fn constant(p: &ProbVec) -> Self {
        let dim = p.dim();
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = p[i];
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.entry(i, col)).collect()
    }

    /// `self ∘ inner`: first apply `inner`, then `self`.
    pub fn compose(&self, inner: &Kernel) -> Result<Kernel> {
        check_dim(self.dim, inner.dim)?;
        let n = self.dim;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entry(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * inner.entry(k, j);
                }
            }
        }
        let columns = (0..n)
            .map(|j| (0..n).map(|i| entries[i * n + j]).collect())
            .collect();
        Kernel::from_columns(columns)
    }

    /// Pushes `p` through the kernel.
    pub fn apply(&self, p: &ProbVec) -> Result<ProbVec> {
        check_dim(self.dim, p.dim())?;
        let out = self
            .entries
            .chunks(self.dim)
            .map(|row| dot(row, p.as_slice()))
            .collect();
        ProbVec::new(out)
    }
}

impl TryFrom<Vec<Vec<f64>>> for Kernel {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Kernel::new(rows)
    }
}

impl From<Kernel> for Vec<Vec<f64>> {
    fn from(k: Kernel) -> Self {
        k.rows()
    }
}

pub fn apply_kernel(kernel: &Kernel, p: &ProbVec) -> Result<ProbVec> {
    kernel.apply(p)
}

/// Relative entropy `Σ pᵢ ln(pᵢ/qᵢ)` in nats, `+inf` on support mismatch.
pub fn kl_divergence(p: &ProbVec, q: &ProbVec) -> Result<f64> {
    check_dim(p.dim(), q.dim())?;
    let mut total = 0.0;
    for (&pi, &qi) in p.as_slice().iter().zip(q.as_slice()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += pi * (pi / qi).ln();
    }
    // Rounding can leave a tiny negative value when p ≈ q.
    Ok(total.max(0.0))
}

/// Shannon entropy in nats.
pub fn entropy(p: &ProbVec) -> f64 {
    -p.as_slice()
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| w * w.ln())
        .sum::<f64>()
}

/// All lattice points of the simplex with coordinates `kᵢ / steps`, in
/// lexicographic order of `(k₁, …, k_dim)`. With `interior` set, every
/// `kᵢ ≥ 1`.
pub fn simplex_grid(dim: usize, steps: usize, interior: bool) -> Vec<Vec<f64>> {
    fn rec(
        prefix: &mut Vec<usize>,
        remaining: usize,
        slots: usize,
        min: usize,
        steps: usize,
        out: &mut Vec<Vec<f64>>,
    ) {
        if slots == 1 {
            if remaining >= min {
                prefix.push(remaining);
                out.push(prefix.iter().map(|&k| k as f64 / steps as f64).collect());
                prefix.pop();
            }
            return;
        }
        let reserve = min * (slots - 1);
        if remaining < reserve {
            return;
        }
        for k in min..=remaining - reserve {
            prefix.push(k);
            rec(prefix, remaining - k, slots - 1, min, steps, out);
            prefix.pop();
        }
    }

    let mut out = Vec::new();
    if dim == 0 || steps == 0 {
        return out;
    }
    let min = usize::from(interior);
    rec(&mut Vec::with_capacity(dim), steps, dim, min, steps, &mut out);
    out
}
