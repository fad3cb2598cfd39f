//! Scoring rules: penalties `f(x, Q)` for announcing `Q` and observing `x`.
//!
//! Lower scores are better. A rule built from a convex generator `F` is
//! `f(x, Q) = D_F(δ_x, Q) + offset[x]`, and is proper: the expected score
//! under `P` is minimized at `Q = P`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bregman::{bregman_divergence, Burg, Generator, Negentropy, SquaredNorm};
use crate::error::{check_dim, Error, Result};
use crate::simplex::{dot, simplex_grid, ProbVec};

type ScoreFn = dyn Fn(usize, &ProbVec) -> Result<f64> + Send + Sync;

#[derive(Clone)]
enum RuleKind {
    Generator(Arc<dyn Generator>),
    Custom(Arc<ScoreFn>),
}

#[derive(Clone)]
pub struct ScoringRule {
    name: String,
    dim: usize,
    offset: Vec<f64>,
    kind: RuleKind,
}

impl fmt::Debug for ScoringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScoringRule")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("offset", &self.offset)
            .finish()
    }
}

impl ScoringRule {
    /// Logarithmic score `−ln Q(x)`.
    pub fn log(dim: usize) -> Self {
        Self::generator_rule(Arc::new(Negentropy), vec![0.0; dim], "log")
    }

    /// Brier score `Σᵢ (δ_x,ᵢ − Qᵢ)²`.
    pub fn brier(dim: usize) -> Self {
        Self::generator_rule(Arc::new(SquaredNorm), vec![0.0; dim], "brier")
    }

    /// Rule generated by Burg entropy; see [`rule_from_generator`] for how
    /// the infinite vertex values are absorbed.
    pub fn burg(dim: usize) -> Self {
        Self::generator_rule(Arc::new(Burg), vec![0.0; dim], "burg")
    }

    /// `−Q(x)`, which rewards overconfidence and is not proper.
    pub fn linear(dim: usize) -> Self {
        Self::custom("linear", dim, |x, q| Ok(-q[x]))
    }

    pub fn custom<F>(name: impl Into<String>, dim: usize, score: F) -> Self
    where
        F: Fn(usize, &ProbVec) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            dim,
            offset: vec![0.0; dim],
            kind: RuleKind::Custom(Arc::new(score)),
        }
    }

    fn generator_rule(generator: Arc<dyn Generator>, offset: Vec<f64>, name: &str) -> Self {
        Self {
            name: name.to_string(),
            dim: offset.len(),
            offset,
            kind: RuleKind::Generator(generator),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// `f(x, Q)`.
    pub fn score(&self, x: usize, q: &ProbVec) -> Result<f64> {
        check_dim(self.dim, q.dim())?;
        if x >= self.dim {
            return Err(Error::InvalidArgument(format!(
                "letter {x} outside alphabet of size {}",
                self.dim
            )));
        }
        let base = match &self.kind {
            RuleKind::Custom(f) => f(x, q)?,
            RuleKind::Generator(g) => generator_score(g.as_ref(), x, q)?,
        };
        Ok(base + self.offset[x])
    }
}

/// `D_F(δ_x, Q)`, or, when `F(δ_x)` is infinite, the same expression with
/// that `Q`-independent constant dropped.
fn generator_score(g: &dyn Generator, x: usize, q: &ProbVec) -> Result<f64> {
    let dirac = ProbVec::dirac(q.dim(), x)?;
    if g.value(dirac.as_slice()).is_finite() {
        return bregman_divergence(g, &dirac, q);
    }
    let grad = g.gradient(q.as_slice())?;
    let tangent = grad[x] - dot(&grad, q.as_slice());
    Ok(-g.value(q.as_slice()) - tangent)
}

/// Proper rule `f(x, Q) = D_F(δ_x, Q) + offset[x]`.
///
/// Generators that are infinite at the vertices (Burg) would give an
/// infinite score everywhere; their constant `F(δ_x)` is dropped, which
/// only shifts the offset and leaves the induced divergence unchanged.
pub fn rule_from_generator(generator: Arc<dyn Generator>, offset: Vec<f64>) -> Result<ScoringRule> {
    if !generator.is_smooth() {
        return Err(Error::NonSmooth(generator.name()));
    }
    if offset.is_empty() {
        return Err(Error::Empty("offset"));
    }
    let name = format!("from-generator:{}", generator.name());
    Ok(ScoringRule::generator_rule(generator, offset, &name))
}

/// `Σₓ P(x)·f(x, Q)`, skipping letters with `P(x) = 0`.
pub fn expected_score(rule: &ScoringRule, p: &ProbVec, q: &ProbVec) -> Result<f64> {
    check_dim(rule.dim(), p.dim())?;
    let mut total = 0.0;
    for (x, &px) in p.as_slice().iter().enumerate() {
        if px > 0.0 {
            total += px * rule.score(x, q)?;
        }
    }
    Ok(total)
}

/// `Σ P·f(·, Q) − Σ P·f(·, P)`; nonnegative for proper rules and
/// independent of the offset.
pub fn divergence_from_rule(rule: &ScoringRule, p: &ProbVec, q: &ProbVec) -> Result<f64> {
    Ok(expected_score(rule, p, q)? - expected_score(rule, p, p)?)
}

/// Grid step used when none is given: 0.01 up to three letters, 0.05 for
/// four or five, 0.1 beyond.
pub fn default_grid_step(dim: usize) -> f64 {
    match dim {
        0..=3 => 0.01,
        4..=5 => 0.05,
        _ => 0.1,
    }
}

/// A forecast `q` that beats the truth `p` under the rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropernessWitness {
    pub p: ProbVec,
    pub q: ProbVec,
    pub score_at_p: f64,
    pub score_at_q: f64,
}

/// Sweeps the interior lattice with spacing `grid_step`. For each lattice
/// point `P` (in lexicographic order) the lattice minimizer of
/// `Q ↦ Σ P·f(·, Q)` must lie within `grid_step` of `P` in max-norm, or
/// score no better than `P` itself. The first violation is returned.
pub fn properness_witness(
    rule: &ScoringRule,
    dim: usize,
    grid_step: f64,
) -> Result<Option<PropernessWitness>> {
    check_dim(rule.dim(), dim)?;
    if !(grid_step > 0.0 && grid_step < 0.5) {
        return Err(Error::InvalidArgument(format!("grid step {grid_step} outside (0, 0.5)")));
    }
    let steps = (1.0 / grid_step).round() as usize;
    let grid: Vec<ProbVec> = simplex_grid(dim, steps, true)
        .into_iter()
        .map(|w| ProbVec::new(w).expect("lattice points are on the simplex"))
        .collect();

    // Score table: row per forecast, column per letter.
    let table: Vec<Vec<f64>> = grid
        .iter()
        .map(|q| {
            (0..dim)
                .map(|x| match rule.score(x, q) {
                    Ok(s) if !s.is_nan() => s,
                    _ => f64::INFINITY,
                })
                .collect()
        })
        .collect();

    let spacing = 1.0 / steps as f64;
    for (pi, p) in grid.iter().enumerate() {
        let expected = |row: &Vec<f64>| -> f64 {
            p.as_slice()
                .iter()
                .zip(row)
                .map(|(&px, &s)| px * s)
                .sum()
        };
        let at_p = expected(&table[pi]);
        let mut best = (f64::INFINITY, pi);
        for (qi, row) in table.iter().enumerate() {
            let v = expected(row);
            if v < best.0 {
                best = (v, qi);
            }
        }
        let (best_val, qi) = best;
        let slack = 1e-12 * at_p.abs().max(1.0);
        if grid[qi].max_abs_diff(p) > spacing + 1e-12 && best_val < at_p - slack {
            return Ok(Some(PropernessWitness {
                p: p.clone(),
                q: grid[qi].clone(),
                score_at_p: at_p,
                score_at_q: best_val,
            }));
        }
    }
    Ok(None)
}

/// The strictly local rule `g(q) = f(1, (q, (1−q)/(ℓ−1), …))` read off a
/// generator-based rule.
#[derive(Debug, Clone)]
pub struct LocalRule {
    rule: ScoringRule,
}

impl LocalRule {
    pub fn dim(&self) -> usize {
        self.rule.dim()
    }

    /// `g(q)` for `q ∈ [0, 1]`; `g(0)` may be `+inf`.
    pub fn eval(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidArgument(format!("g is defined on [0, 1], got {q}")));
        }
        let dim = self.dim();
        let tail = (1.0 - q) / (dim - 1) as f64;
        let mut w = vec![tail; dim];
        w[0] = q;
        let point = ProbVec::new(w)?;
        match self.rule.score(0, &point) {
            Err(Error::BoundaryGradient { .. }) if q == 0.0 => Ok(f64::INFINITY),
            other => other,
        }
    }
}

pub fn extract_local_rule(generator: Arc<dyn Generator>, dim: usize) -> Result<LocalRule> {
    if dim < 2 {
        return Err(Error::InvalidArgument("local rules need at least two letters".into()));
    }
    let rule = rule_from_generator(generator, vec![0.0; dim])?;
    Ok(LocalRule { rule })
}

/// Largest `|f(x, Q) − g(Q(x))|` over the interior lattice with `steps`
/// subdivisions, with the point where it occurs.
pub fn locality_defect(
    generator: Arc<dyn Generator>,
    dim: usize,
    steps: usize,
) -> Result<(f64, Option<(usize, ProbVec)>)> {
    let local = extract_local_rule(generator, dim)?;
    let mut worst = (0.0, None);
    for w in simplex_grid(dim, steps, true) {
        let q = ProbVec::new(w)?;
        for x in 0..dim {
            let d = (local.rule.score(x, &q)? - local.eval(q[x])?).abs();
            if d > worst.0 {
                worst = (d, Some((x, q.clone())));
            }
        }
    }
    Ok(worst)
}
