//! Finite action families and the regret they induce.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::simplex::{dot, ProbVec};

/// Absolute slack for membership in the optimal set.
pub const OPTIMALITY_TOL: f64 = 1e-10;

/// Actions whose expected payoff at `s` is `⟨a, s⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionFamily {
    actions: Vec<Vec<f64>>,
}

impl ActionFamily {
    pub fn new(actions: Vec<Vec<f64>>) -> Result<Self> {
        let first = actions.first().ok_or(Error::Empty("action family"))?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::Empty("action vector"));
        }
        for a in &actions {
            check_dim(dim, a.len())?;
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("action payoffs must be finite".into()));
            }
        }
        Ok(Self { actions })
    }

    pub fn dim(&self) -> usize {
        self.actions[0].len()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[Vec<f64>] {
        &self.actions
    }

    /// `F(s) = max_a ⟨a, s⟩`.
    pub fn value(&self, s: &ProbVec) -> Result<f64> {
        check_dim(self.dim(), s.dim())?;
        Ok(self
            .actions
            .iter()
            .map(|a| dot(a, s.as_slice()))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Indices of the actions within [`OPTIMALITY_TOL`] of `F(s)`.
    pub fn optimal_set(&self, s: &ProbVec) -> Result<Vec<usize>> {
        let best = self.value(s)?;
        Ok(self
            .actions
            .iter()
            .enumerate()
            .filter(|(_, a)| dot(a, s.as_slice()) >= best - OPTIMALITY_TOL)
            .map(|(i, _)| i)
            .collect())
    }
}

/// Shortfall at `s1` of the best action among those optimal at `s2`.
///
/// For a finite family an asymptotically optimal sequence is eventually
/// optimal, so the supremum over such sequences is a maximum over the
/// optimal set at `s2`.
pub fn regret_from_actions(family: &ActionFamily, s1: &ProbVec, s2: &ProbVec) -> Result<f64> {
    check_dim(s1.dim(), s2.dim())?;
    let f1 = family.value(s1)?;
    let achieved = family
        .optimal_set(s2)?
        .into_iter()
        .map(|i| dot(&family.actions[i], s1.as_slice()))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((f1 - achieved).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(w: &[f64]) -> ProbVec {
        ProbVec::new(w.to_vec()).unwrap()
    }

    #[test]
    fn single_action_has_no_regret() {
        let fam = ActionFamily::new(vec![vec![0.3, -1.2, 2.0]]).unwrap();
        let r = regret_from_actions(&fam, &pv(&[0.1, 0.2, 0.7]), &pv(&[0.6, 0.3, 0.1])).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn two_action_enumeration() {
        let fam = ActionFamily::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s1 = pv(&[0.8, 0.2]);
        let s2 = pv(&[0.2, 0.8]);
        assert_abs_diff_eq!(fam.value(&s1).unwrap(), 0.8);
        assert_abs_diff_eq!(regret_from_actions(&fam, &s1, &s2).unwrap(), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn dominated_actions_are_never_chosen() {
        let fam = ActionFamily::new(vec![vec![0.0, 0.0], vec![-1.0, -0.5], vec![-0.2, -3.0]]).unwrap();
        for (a, b) in [(0.1, 0.9), (0.5, 0.5), (1.0, 0.0)] {
            let r = regret_from_actions(&fam, &pv(&[a, b]), &pv(&[b, a])).unwrap();
            assert_eq!(r, 0.0);
        }
    }

    #[test]
    fn ties_at_s2_resolve_in_favour_of_s1() {
        let fam = ActionFamily::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = regret_from_actions(&fam, &pv(&[0.9, 0.1]), &pv(&[0.5, 0.5])).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn rejects_bad_families() {
        assert!(matches!(ActionFamily::new(vec![]), Err(Error::Empty(_))));
        assert!(ActionFamily::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        let fam = ActionFamily::new(vec![vec![1.0, 0.0]]).unwrap();
        assert!(fam.value(&pv(&[0.2, 0.3, 0.5])).is_err());
    }
}
