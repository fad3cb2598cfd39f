//! Convex generators on the simplex.
//!
//! A generator is a convex function `F` whose Bregman divergence
//! `F(p) − F(q) − ⟨p − q, ∇F(q)⟩` is the regret of acting optimally for `q`
//! when the state is `p`. Separable generators override
//! [`Generator::divergence`] with a per-coordinate formula so that boundary
//! points get the limiting values instead of `inf − inf`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::simplex::dot;

pub trait Generator: fmt::Debug + Send + Sync {
    fn name(&self) -> String;

    fn value(&self, p: &[f64]) -> f64;

    /// Gradient at `q`, or [`Error::BoundaryGradient`] where it diverges.
    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>>;

    fn is_smooth(&self) -> bool {
        true
    }

    /// Bregman divergence `D_F(p, q)`; callers have checked dimensions.
    fn divergence(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        generic_divergence(self, p, q)
    }
}

pub(crate) fn generic_divergence<G: Generator + ?Sized>(g: &G, p: &[f64], q: &[f64]) -> Result<f64> {
    let grad = g.gradient(q)?;
    let fp = g.value(p);
    if fp == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let diff: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    Ok(fp - g.value(q) - dot(&diff, &grad))
}

fn boundary(generator: &str, index: usize) -> Error {
    Error::BoundaryGradient {
        generator: generator.to_string(),
        index,
    }
}

/// `Σ pᵢ ln pᵢ`, whose Bregman divergence is relative entropy.
#[derive(Debug, Clone, Copy, Default)]
pub struct Negentropy;

impl Generator for Negentropy {
    fn name(&self) -> String {
        "negentropy".into()
    }

    fn value(&self, p: &[f64]) -> f64 {
        p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum()
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        q.iter()
            .enumerate()
            .map(|(i, &x)| {
                if x > 0.0 {
                    Ok(x.ln() + 1.0)
                } else {
                    Err(boundary("negentropy", i))
                }
            })
            .collect()
    }

    fn divergence(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        // Per coordinate: p ln(p/q) − p + q, with the 0·ln 0 = 0 limits.
        let mut log_part = 0.0;
        let mut linear_part = 0.0;
        for (&a, &b) in p.iter().zip(q) {
            if a > 0.0 {
                if b == 0.0 {
                    return Ok(f64::INFINITY);
                }
                log_part += a * (a / b).ln();
            }
            linear_part += b - a;
        }
        Ok(log_part + linear_part)
    }
}

/// `Σ pᵢ²`; its divergence is squared Euclidean distance.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredNorm;

impl Generator for SquaredNorm {
    fn name(&self) -> String {
        "sqnorm".into()
    }

    fn value(&self, p: &[f64]) -> f64 {
        p.iter().map(|x| x * x).sum()
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        Ok(q.iter().map(|x| 2.0 * x).collect())
    }

    fn divergence(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        Ok(p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum())
    }
}

/// Burg entropy `−Σ ln pᵢ` (Itakura–Saito divergence).
#[derive(Debug, Clone, Copy, Default)]
pub struct Burg;

impl Generator for Burg {
    fn name(&self) -> String {
        "burg".into()
    }

    fn value(&self, p: &[f64]) -> f64 {
        if p.iter().any(|&x| x <= 0.0) {
            return f64::INFINITY;
        }
        -p.iter().map(|x| x.ln()).sum::<f64>()
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        q.iter()
            .enumerate()
            .map(|(i, &x)| if x > 0.0 { Ok(-1.0 / x) } else { Err(boundary("burg", i)) })
            .collect()
    }

    fn divergence(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (i, (&a, &b)) in p.iter().zip(q).enumerate() {
            if b > 0.0 {
                if a == 0.0 {
                    return Ok(f64::INFINITY);
                }
                total += a / b - (a / b).ln() - 1.0;
            } else if a > 0.0 {
                return Err(boundary("burg", i));
            }
        }
        Ok(total)
    }
}

/// Separable generator `Σ f(pᵢ)` with `f` given by linearly interpolated
/// knots on `[0, 1]`. Piecewise linear, hence not smooth.
#[derive(Debug, Clone)]
pub struct Tabulated {
    name: String,
    knots: Vec<(f64, f64)>,
}

impl Tabulated {
    /// Knots must cover `[0, 1]` and describe a convex function.
    pub fn new(name: impl Into<String>, mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidArgument("tabulated generator needs at least two knots".into()));
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidArgument("tabulated knots must be finite".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("duplicate knot abscissa".into()));
        }
        if knots[0].0 > 0.0 || knots[knots.len() - 1].0 < 1.0 {
            return Err(Error::InvalidArgument("knots must cover [0, 1]".into()));
        }
        let slopes: Vec<f64> = knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        if slopes.windows(2).any(|s| s[1] < s[0] - 1e-12) {
            return Err(Error::InvalidArgument("tabulated function is not convex".into()));
        }
        Ok(Self { name: name.into(), knots })
    }

    /// Knots keyed by the decimal text of `x`, as in `{"0": 0, "0.5": -0.25}`.
    pub fn from_map(name: impl Into<String>, map: &BTreeMap<String, f64>) -> Result<Self> {
        let knots = map
            .iter()
            .map(|(k, &v)| {
                k.trim()
                    .parse::<f64>()
                    .map(|x| (x, v))
                    .map_err(|_| Error::InvalidArgument(format!("knot `{k}` is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, knots)
    }

    fn segment(&self, x: f64) -> usize {
        // Right-hand segment at interior knots; the last segment at x = 1.
        let idx = self.knots.partition_point(|k| k.0 <= x);
        idx.clamp(1, self.knots.len() - 1) - 1
    }

    fn f(&self, x: f64) -> f64 {
        let s = self.segment(x);
        let (x0, y0) = self.knots[s];
        let (x1, y1) = self.knots[s + 1];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn slope(&self, x: f64) -> f64 {
        let s = self.segment(x);
        let (x0, y0) = self.knots[s];
        let (x1, y1) = self.knots[s + 1];
        (y1 - y0) / (x1 - x0)
    }
}

impl Generator for Tabulated {
    fn name(&self) -> String {
        format!("table:{}", self.name)
    }

    fn value(&self, p: &[f64]) -> f64 {
        p.iter().map(|&x| self.f(x)).sum()
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        Ok(q.iter().map(|&x| self.slope(x)).collect())
    }

    fn is_smooth(&self) -> bool {
        false
    }
}

/// `c·F` for `c > 0`.
#[derive(Debug, Clone)]
pub struct Scaled {
    pub factor: f64,
    pub inner: Arc<dyn Generator>,
}

impl Generator for Scaled {
    fn name(&self) -> String {
        format!("{}*{}", self.factor, self.inner.name())
    }

    fn value(&self, p: &[f64]) -> f64 {
        self.factor * self.inner.value(p)
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        Ok(self.inner.gradient(q)?.into_iter().map(|g| self.factor * g).collect())
    }

    fn is_smooth(&self) -> bool {
        self.inner.is_smooth()
    }

    fn divergence(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        Ok(self.factor * self.inner.divergence(p, q)?)
    }
}

/// `F(p) + ⟨linear, p⟩ + constant`.
#[derive(Debug, Clone)]
pub struct AffineShift {
    pub inner: Arc<dyn Generator>,
    pub linear: Vec<f64>,
    pub constant: f64,
}

impl Generator for AffineShift {
    fn name(&self) -> String {
        format!("{}+affine", self.inner.name())
    }

    fn value(&self, p: &[f64]) -> f64 {
        self.inner.value(p) + dot(&self.linear, p) + self.constant
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .inner
            .gradient(q)?
            .into_iter()
            .zip(&self.linear)
            .map(|(g, l)| g + l)
            .collect())
    }

    fn is_smooth(&self) -> bool {
        self.inner.is_smooth()
    }

    fn divergence(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        match self.gradient(q) {
            Ok(_) => generic_divergence(self, p, q),
            // The affine part has no boundary singularities.
            Err(_) => self.inner.divergence(p, q),
        }
    }
}

/// Built-in generators by CLI name: `negentropy`, `sqnorm`, `burg`.
pub fn builtin(name: &str) -> Result<Arc<dyn Generator>> {
    match name {
        "negentropy" => Ok(Arc::new(Negentropy)),
        "sqnorm" => Ok(Arc::new(SquaredNorm)),
        "burg" => Ok(Arc::new(Burg)),
        other => Err(Error::InvalidArgument(format!("unknown generator `{other}`"))),
    }
}
