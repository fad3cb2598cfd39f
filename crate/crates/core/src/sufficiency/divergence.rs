use std::fmt;
use std::sync::Arc;

use crate::bregman::{builtin, regret_from_actions, ActionFamily, Generator, Negentropy};
use crate::error::{Error, Result};
use crate::simplex::{kl_divergence, ProbVec};

type DivergenceFn = dyn Fn(&ProbVec, &ProbVec) -> f64 + Send + Sync;

/// A named divergence on probability vectors. Values are extended reals;
/// undefined boundary cases evaluate to `+inf`.
#[derive(Clone)]
pub struct Divergence {
    name: String,
    eval: Arc<DivergenceFn>,
}

impl fmt::Debug for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Divergence").field(&self.name).finish()
    }
}

impl Divergence {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&ProbVec, &ProbVec) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn kl() -> Self {
        Self::new("kl", |p, q| kl_divergence(p, q).unwrap_or(f64::NAN))
    }

    /// Bregman divergence of `generator`; boundary errors become `+inf`.
    pub fn bregman(generator: Arc<dyn Generator>) -> Self {
        let name = format!("bregman:{}", generator.name());
        Self::new(name, move |p, q| {
            match generator.divergence(p.as_slice(), q.as_slice()) {
                Ok(d) => d,
                Err(Error::BoundaryGradient { .. }) => f64::INFINITY,
                Err(_) => f64::NAN,
            }
        })
    }

    /// Regret of a finite action family.
    pub fn regret(family: ActionFamily) -> Self {
        Self::new("regret", move |p, q| regret_from_actions(&family, p, q).unwrap_or(f64::NAN))
    }

    pub fn scaled(factor: f64, inner: Divergence) -> Self {
        let name = format!("{factor}*{}", inner.name);
        Self::new(name, move |p, q| factor * inner.eval(p, q))
    }

    /// `kl`, `sqnorm`, `burg`, or `bregman:<generator>` for a built-in
    /// generator.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "kl" => Ok(Self::kl()),
            "sqnorm" | "burg" => Ok(Self::bregman(builtin(name)?)),
            other => match other.strip_prefix("bregman:") {
                Some("negentropy") => Ok(Self::bregman(Arc::new(Negentropy))),
                Some(g) => Ok(Self::bregman(builtin(g)?)),
                None => Err(Error::InvalidArgument(format!("unknown divergence `{other}`"))),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, p: &ProbVec, q: &ProbVec) -> f64 {
        (self.eval)(p, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bregman::SquaredNorm;

    fn pv(w: &[f64]) -> ProbVec {
        ProbVec::new(w.to_vec()).unwrap()
    }

    #[test]
    fn named_divergences() {
        let p = pv(&[1.0, 0.0]);
        let q = pv(&[0.5, 0.5]);
        assert_eq!(Divergence::by_name("sqnorm").unwrap().eval(&p, &q), 0.5);
        assert_eq!(Divergence::by_name("bregman:sqnorm").unwrap().name(), "bregman:sqnorm");
        assert!((Divergence::by_name("kl").unwrap().eval(&p, &q) - 2f64.ln()).abs() < 1e-15);
        assert!(Divergence::by_name("hellinger").is_err());
        assert!(Divergence::by_name("bregman:nope").is_err());
    }

    #[test]
    fn boundary_errors_become_infinite() {
        let burg = Divergence::by_name("burg").unwrap();
        assert_eq!(burg.eval(&pv(&[0.5, 0.5]), &pv(&[0.0, 1.0])), f64::INFINITY);
        let twice = Divergence::scaled(2.0, Divergence::bregman(Arc::new(SquaredNorm)));
        assert_eq!(twice.eval(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5])), 1.0);
    }
}
