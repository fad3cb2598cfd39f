//! Constant rebalanced portfolios on a discrete market.
//!
//! A market has `m` outcomes, each a vector of `k` price relatives, drawn
//! with probabilities `P`. The doubling rate of a portfolio `b` is
//! `W(b, P) = Σⱼ Pⱼ ln⟨xⱼ, b⟩`.

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::simplex::{dot, kl_divergence, ProbVec};

pub type Portfolio = ProbVec;

/// Iteration cap for [`solve_log_optimal`].
pub const MAX_ITERATIONS: usize = 100_000;

/// Weights above this count as held positions in the KKT check.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Market {
    relatives: Vec<Vec<f64>>,
    probs: ProbVec,
}

impl Market {
    /// `relatives[j]` is the price-relative vector of outcome `j`.
    pub fn new(relatives: Vec<Vec<f64>>, probs: ProbVec) -> Result<Self> {
        let first = relatives.first().ok_or(Error::Empty("market outcomes"))?;
        let k = first.len();
        if k == 0 {
            return Err(Error::InvalidMarket("outcome vectors need at least one stock".into()));
        }
        check_dim(relatives.len(), probs.dim())?;
        for (j, x) in relatives.iter().enumerate() {
            check_dim(k, x.len())?;
            if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidMarket(format!(
                    "outcome {j} has a negative or non-finite relative"
                )));
            }
            if x.iter().all(|&v| v == 0.0) {
                return Err(Error::InvalidMarket(format!("outcome {j} has no positive relative")));
            }
        }
        Ok(Self { relatives, probs })
    }

    pub fn outcomes(&self) -> usize {
        self.relatives.len()
    }

    pub fn stocks(&self) -> usize {
        self.relatives[0].len()
    }

    pub fn relatives(&self) -> &[Vec<f64>] {
        &self.relatives
    }

    pub fn probs(&self) -> &ProbVec {
        &self.probs
    }

    /// Same outcome vectors under a different distribution.
    pub fn with_probs(&self, probs: ProbVec) -> Result<Market> {
        check_dim(self.outcomes(), probs.dim())?;
        Ok(Market {
            relatives: self.relatives.clone(),
            probs,
        })
    }

    fn wealth_factors(&self, b: &Portfolio) -> Vec<f64> {
        self.relatives.iter().map(|x| dot(x, b.as_slice())).collect()
    }
}

/// `Σⱼ Pⱼ ln⟨xⱼ, b⟩`; `-inf` on ruin.
pub fn doubling_rate(b: &Portfolio, market: &Market) -> Result<f64> {
    check_dim(market.stocks(), b.dim())?;
    let mut rate = 0.0;
    for (&p, v) in market.probs.as_slice().iter().zip(market.wealth_factors(b)) {
        if p == 0.0 {
            continue;
        }
        if v <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        rate += p * v.ln();
    }
    Ok(rate)
}

/// `cᵢ = Σⱼ Pⱼ (xⱼ)ᵢ / ⟨xⱼ, b⟩`, the marginal return of stock `i`.
fn marginal_returns(b: &Portfolio, market: &Market) -> Result<Vec<f64>> {
    let mut c = vec![0.0; market.stocks()];
    for ((&p, x), v) in market
        .probs
        .as_slice()
        .iter()
        .zip(&market.relatives)
        .zip(market.wealth_factors(b))
    {
        if p == 0.0 {
            continue;
        }
        if v <= 0.0 {
            return Err(Error::InfiniteRate);
        }
        for (ci, &xi) in c.iter_mut().zip(x) {
            *ci += p * xi / v;
        }
    }
    Ok(c)
}

fn residual_from(b: &Portfolio, c: &[f64]) -> f64 {
    b.as_slice()
        .iter()
        .zip(c)
        .map(|(&bi, &ci)| {
            let violation = (ci - 1.0).max(0.0);
            if bi > SUPPORT_TOL {
                violation.max((ci - 1.0).abs())
            } else {
                violation
            }
        })
        .fold(0.0, f64::max)
}

/// Distance from the Kuhn–Tucker conditions: every `cᵢ ≤ 1`, with equality
/// on the support of `b`.
pub fn kkt_residual(b: &Portfolio, market: &Market) -> Result<f64> {
    check_dim(market.stocks(), b.dim())?;
    let c = marginal_returns(b, market)?;
    Ok(residual_from(b, &c))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogOptimal {
    pub portfolio: Portfolio,
    pub rate: f64,
    pub kkt_residual: f64,
    /// Updates performed, counting accepted Newton steps.
    pub iterations: usize,
    pub converged: bool,
}

/// Maximizes the doubling rate with the multiplicative update
/// `bᵢ ← bᵢ·cᵢ` from the uniform portfolio, stopping once the KKT residual
/// is at most `tol`. On hitting [`MAX_ITERATIONS`] the best iterate seen is
/// returned with `converged = false`.
///
/// Every [`POLISH_EVERY`] updates an active-set Newton step is attempted
/// from the current iterate and kept only if it lowers the KKT residual.
/// The update alone sheds a stock with `cᵢ` just below one at a rate of
/// `cᵢᵗ`, which can take far longer than the iteration cap.
pub fn solve_log_optimal(market: &Market, tol: f64) -> Result<LogOptimal> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let k = market.stocks();
    let mut b = ProbVec::uniform(k)?;
    let mut best: Option<(f64, Portfolio)> = None;
    let mut performed = 0;

    for iteration in 0..=MAX_ITERATIONS {
        let c = marginal_returns(&b, market)?;
        let residual = residual_from(&b, &c);
        performed = iteration;
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, b.clone()));
        }
        if residual <= tol || iteration == MAX_ITERATIONS {
            break;
        }
        if iteration % POLISH_EVERY == POLISH_EVERY - 1 {
            if let Some(polished) = polish(market, &b) {
                let pc = marginal_returns(&polished, market)?;
                if residual_from(&polished, &pc) < residual {
                    b = polished;
                    continue;
                }
            }
        }
        let next: Vec<f64> = b.as_slice().iter().zip(&c).map(|(bi, ci)| bi * ci).collect();
        let total: f64 = next.iter().sum();
        b = ProbVec::new(next.into_iter().map(|w| w / total).collect())?;
    }

    let (residual, portfolio) = best.expect("at least one iterate");
    Ok(LogOptimal {
        rate: doubling_rate(&portfolio, market)?,
        portfolio,
        kkt_residual: residual,
        iterations: performed,
        converged: residual <= tol,
    })
}

/// Multiplicative updates between Newton polish attempts.
pub const POLISH_EVERY: usize = 50;

const NEWTON_STEPS: usize = 100;

fn raw_rate(market: &Market, w: &[f64]) -> f64 {
    let mut rate = 0.0;
    for (&p, x) in market.probs.as_slice().iter().zip(&market.relatives) {
        if p == 0.0 {
            continue;
        }
        let v = dot(x, w);
        if v <= 0.0 {
            return f64::NEG_INFINITY;
        }
        rate += p * v.ln();
    }
    rate
}

/// Newton ascent restricted to `support` with the budget constraint
/// eliminated through a bordered system. A coordinate that the line search
/// drives to zero leaves the support. Returns `false` if no ascent step
/// can be taken.
fn newton_on_support(market: &Market, w: &mut [f64], support: &mut Vec<usize>) -> bool {
    for _ in 0..NEWTON_STEPS {
        let s = support.len();
        if s == 1 {
            w.iter_mut().for_each(|x| *x = 0.0);
            w[support[0]] = 1.0;
            return true;
        }
        let mut system = DMatrix::<f64>::zeros(s + 1, s + 1);
        let mut rhs = DVector::<f64>::zeros(s + 1);
        for (&p, x) in market.probs.as_slice().iter().zip(&market.relatives) {
            if p == 0.0 {
                continue;
            }
            let v = dot(x, w);
            for (a, &ia) in support.iter().enumerate() {
                rhs[a] += p * x[ia] / v;
                for (bb, &ib) in support.iter().enumerate() {
                    system[(a, bb)] += p * x[ia] * x[ib] / (v * v);
                }
            }
        }
        let ridge = 1e-12 * (0..s).map(|a| system[(a, a)]).fold(1.0, f64::max);
        for a in 0..s {
            system[(a, a)] += ridge;
            system[(a, s)] = 1.0;
            system[(s, a)] = 1.0;
        }
        let Some(sol) = system.lu().solve(&rhs) else {
            return false;
        };
        let d: Vec<f64> = sol.iter().take(s).copied().collect();
        let slope: f64 = d.iter().enumerate().map(|(a, da)| rhs[a] * da).sum();
        if !(slope > 1e-18) {
            return true;
        }

        let mut alpha_max = f64::INFINITY;
        let mut blocking = None;
        for (a, &ia) in support.iter().enumerate() {
            if d[a] < 0.0 && -w[ia] / d[a] < alpha_max {
                alpha_max = -w[ia] / d[a];
                blocking = Some(a);
            }
        }
        if alpha_max <= 0.0 {
            let a = blocking.expect("a zero step needs a blocking coordinate");
            w[support[a]] = 0.0;
            support.remove(a);
            continue;
        }

        let f0 = raw_rate(market, w);
        let mut alpha = alpha_max.min(1.0);
        let trial = |alpha: f64| -> Vec<f64> {
            let mut t = w.to_vec();
            for (a, &ia) in support.iter().enumerate() {
                t[ia] = (t[ia] + alpha * d[a]).max(0.0);
            }
            t
        };
        let mut next = trial(alpha);
        while raw_rate(market, &next) < f0 + 1e-4 * alpha * slope {
            alpha *= 0.5;
            if alpha < 1e-14 {
                return false;
            }
            next = trial(alpha);
        }
        w.copy_from_slice(&next);
        if alpha == alpha_max {
            let a = blocking.expect("finite step length has a blocking coordinate");
            w[support[a]] = 0.0;
            support.remove(a);
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
    }
    true
}

/// Primal active-set method seeded with the support of `b`: Newton on the
/// support, then admit the stock with the largest `cᵢ > 1`, until none is
/// left.
fn polish(market: &Market, b: &Portfolio) -> Option<Portfolio> {
    let k = market.stocks();
    let top = b.as_slice().iter().copied().fold(0.0, f64::max);
    let mut support: Vec<usize> = (0..k).filter(|&i| b[i] > 1e-8 * top).collect();
    let mut w: Vec<f64> = (0..k).map(|i| if support.contains(&i) { b[i] } else { 0.0 }).collect();
    if raw_rate(market, &w) == f64::NEG_INFINITY {
        support = (0..k).collect();
        w = b.as_slice().to_vec();
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);

    for _ in 0..2 * k + 10 {
        if !newton_on_support(market, &mut w, &mut support) {
            return None;
        }
        let trial = ProbVec::new(w.clone()).ok()?;
        let c = marginal_returns(&trial, market).ok()?;
        let entering = (0..k)
            .filter(|i| !support.contains(i))
            .max_by(|&i, &j| c[i].total_cmp(&c[j]))
            .filter(|&i| c[i] > 1.0);
        match entering {
            Some(i) => support.push(i),
            None => return Some(trial),
        }
    }
    None
}

fn solve_converged(market: &Market, tol: f64) -> Result<LogOptimal> {
    let sol = solve_log_optimal(market, tol)?;
    if !sol.converged {
        return Err(Error::NonConvergence {
            iterations: sol.iterations,
            residual: sol.kkt_residual,
        });
    }
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegretBound {
    pub regret: f64,
    #[serde(with = "crate::json::extended")]
    pub bound: f64,
    #[serde(with = "crate::json::extended")]
    pub gap: f64,
}

/// Loss in doubling rate from investing for `q` when outcomes follow the
/// market's `P`, against the bound `D(P‖Q)`.
pub fn regret_and_bound(market: &Market, q: &ProbVec, tol: f64) -> Result<RegretBound> {
    check_dim(market.outcomes(), q.dim())?;
    let for_p = solve_converged(market, tol)?;
    let for_q = solve_converged(&market.with_probs(q.clone())?, tol)?;
    let regret = for_p.rate - doubling_rate(&for_q.portfolio, market)?;
    let bound = kl_divergence(market.probs(), q)?;
    Ok(RegretBound {
        regret,
        bound,
        gap: bound - regret,
    })
}

/// One strictly positive coordinate per outcome, each on a different stock,
/// with as many outcomes as stocks.
pub fn is_horse_race(market: &Market) -> bool {
    let k = market.stocks();
    if market.outcomes() != k {
        return false;
    }
    let mut taken = vec![false; k];
    for x in &market.relatives {
        let mut positive = x.iter().enumerate().filter(|(_, &v)| v > 0.0);
        match (positive.next(), positive.next()) {
            (Some((i, _)), None) if !taken[i] => taken[i] = true,
            _ => return false,
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WealthPath {
    /// `ln Sₜ` after each of the `n` periods.
    #[serde(with = "crate::json::extended_seq")]
    pub log_wealth: Vec<f64>,
    /// `(1/n)·ln Sₙ`.
    #[serde(with = "crate::json::extended")]
    pub terminal_rate: f64,
}

/// Draws `n` i.i.d. outcomes from the market distribution and compounds
/// the wealth of `b`. Once wealth hits zero it stays at `ln 0 = -inf`.
pub fn simulate_wealth(market: &Market, b: &Portfolio, n: usize, seed: u64) -> Result<WealthPath> {
    check_dim(market.stocks(), b.dim())?;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one period".into()));
    }
    let log_factors: Vec<f64> = market.wealth_factors(b).into_iter().map(f64::ln).collect();
    let outcomes = WeightedIndex::new(market.probs.as_slice())
        .map_err(|e| Error::InvalidMarket(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut log_wealth = Vec::with_capacity(n);
    let mut current = 0.0;
    for _ in 0..n {
        current += log_factors[outcomes.sample(&mut rng)];
        log_wealth.push(current);
    }
    Ok(WealthPath {
        terminal_rate: current / n as f64,
        log_wealth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(w: &[f64]) -> ProbVec {
        ProbVec::new(w.to_vec()).unwrap()
    }

    fn horse_race(p: &[f64]) -> Market {
        Market::new(vec![vec![2.0, 0.0], vec![0.0, 2.0]], pv(p)).unwrap()
    }

    fn crossed() -> Market {
        Market::new(vec![vec![1.0, 2.0], vec![2.0, 1.0]], pv(&[0.5, 0.5])).unwrap()
    }

    #[test]
    fn market_validation() {
        assert!(Market::new(vec![], pv(&[1.0])).is_err());
        assert!(Market::new(vec![vec![1.0, -0.1]], pv(&[1.0])).is_err());
        assert!(Market::new(vec![vec![0.0, 0.0]], pv(&[1.0])).is_err());
        assert!(Market::new(vec![vec![1.0], vec![1.0, 2.0]], pv(&[0.5, 0.5])).is_err());
        assert!(Market::new(vec![vec![1.0]], pv(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn doubling_rate_examples() {
        let cash = Market::new(vec![vec![1.0]], pv(&[1.0])).unwrap();
        assert_eq!(doubling_rate(&pv(&[1.0]), &cash).unwrap(), 0.0);

        let race = horse_race(&[0.6, 0.4]);
        let w = doubling_rate(&pv(&[0.6, 0.4]), &race).unwrap();
        assert_abs_diff_eq!(w, 0.020_135_513_550_688_87, epsilon = 1e-15);

        assert_eq!(doubling_rate(&pv(&[0.0, 1.0]), &race).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(kkt_residual(&pv(&[0.0, 1.0]), &race), Err(Error::InfiniteRate)));
    }

    #[test]
    fn kkt_examples() {
        let race = horse_race(&[0.6, 0.4]);
        assert!(kkt_residual(&pv(&[0.6, 0.4]), &race).unwrap() <= 1e-12);
        assert_abs_diff_eq!(kkt_residual(&pv(&[0.5, 0.5]), &race).unwrap(), 0.2, epsilon = 1e-12);
        let single = Market::new(vec![vec![1.3], vec![0.8]], pv(&[0.5, 0.5])).unwrap();
        assert_eq!(kkt_residual(&pv(&[1.0]), &single).unwrap(), 0.0);
    }

    #[test]
    fn solver_examples() {
        let sol = solve_log_optimal(&horse_race(&[0.6, 0.4]), 1e-12).unwrap();
        assert!(sol.converged);
        assert_abs_diff_eq!(sol.portfolio.as_slice(), [0.6, 0.4].as_slice(), epsilon = 1e-12);

        let single = Market::new(vec![vec![1.3], vec![0.8]], pv(&[0.5, 0.5])).unwrap();
        assert_eq!(solve_log_optimal(&single, 1e-12).unwrap().portfolio, pv(&[1.0]));

        let sol = solve_log_optimal(&crossed(), 1e-10).unwrap();
        assert_abs_diff_eq!(sol.portfolio.as_slice(), [0.5, 0.5].as_slice(), epsilon = 1e-9);
        assert!(solve_log_optimal(&crossed(), 0.0).is_err());
    }

    #[test]
    fn corner_solution_converges() {
        let m = crossed().with_probs(pv(&[0.9, 0.1])).unwrap();
        let sol = solve_log_optimal(&m, 1e-9).unwrap();
        assert!(sol.converged);
        assert!(sol.portfolio[0] <= SUPPORT_TOL);
    }

    #[test]
    fn regret_examples() {
        let race = horse_race(&[0.6, 0.4]);
        let same = regret_and_bound(&race, &pv(&[0.6, 0.4]), 1e-12).unwrap();
        assert_abs_diff_eq!(same.regret, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(same.bound, 0.0, epsilon = 1e-12);

        let r = regret_and_bound(&race, &pv(&[0.5, 0.5]), 1e-12).unwrap();
        assert_abs_diff_eq!(r.regret, 0.020_135_513_550_688_87, epsilon = 1e-10);
        assert!(r.gap.abs() <= 1e-10);

        let r = regret_and_bound(&crossed(), &pv(&[0.9, 0.1]), 1e-10).unwrap();
        assert_abs_diff_eq!(r.regret, 0.058_891_517_828_191_73, epsilon = 1e-8);
        assert_abs_diff_eq!(r.bound, 0.510_825_623_765_990_7, epsilon = 1e-12);
        assert!(r.gap > 0.4);
    }

    #[test]
    fn horse_race_detection() {
        assert!(is_horse_race(&horse_race(&[0.5, 0.5])));
        assert!(!is_horse_race(&crossed()));
        let wide = Market::new(vec![vec![2.0, 0.0, 0.0]], pv(&[1.0])).unwrap();
        assert!(!is_horse_race(&wide));
        let permuted = Market::new(vec![vec![0.0, 3.0], vec![1.5, 0.0]], pv(&[0.5, 0.5])).unwrap();
        assert!(is_horse_race(&permuted));
        let same_stock = Market::new(vec![vec![3.0, 0.0], vec![1.5, 0.0]], pv(&[0.5, 0.5])).unwrap();
        assert!(!is_horse_race(&same_stock));
    }

    #[test]
    fn deterministic_market_growth() {
        let m = Market::new(vec![vec![1.04]], pv(&[1.0])).unwrap();
        for n in [1, 7, 250] {
            let path = simulate_wealth(&m, &pv(&[1.0]), n, 3).unwrap();
            assert_abs_diff_eq!(path.terminal_rate, 1.04f64.ln(), epsilon = 1e-14);
            assert_eq!(path.log_wealth.len(), n);
        }
    }

    #[test]
    fn ruin_is_absorbing() {
        let race = horse_race(&[0.5, 0.5]);
        let path = simulate_wealth(&race, &pv(&[1.0, 0.0]), 200, 1).unwrap();
        let first = path.log_wealth.iter().position(|w| w.is_infinite()).unwrap();
        assert!(path.log_wealth[first..].iter().all(|&w| w == f64::NEG_INFINITY));
        assert_eq!(path.terminal_rate, f64::NEG_INFINITY);
    }

    #[test]
    fn simulation_is_seeded() {
        let race = horse_race(&[0.6, 0.4]);
        let b = pv(&[0.6, 0.4]);
        let a = simulate_wealth(&race, &b, 1000, 42).unwrap();
        assert_eq!(a, simulate_wealth(&race, &b, 1000, 42).unwrap());
        assert_ne!(a, simulate_wealth(&race, &b, 1000, 43).unwrap());
        assert!(simulate_wealth(&race, &b, 0, 42).is_err());
    }
}
