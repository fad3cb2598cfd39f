//! Equilibrium states of a heat bath and the work extractable from a
//! non-equilibrium state. Energies in joules, temperatures in kelvin.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::simplex::{dot, entropy, kl_divergence, ProbVec};

/// Boltzmann's constant in J/K, to four significant figures.
pub const BOLTZMANN: f64 = 1.381e-23;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatBath {
    temperature: f64,
}

impl HeatBath {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "temperature must be positive, got {temperature} K"
            )));
        }
        Ok(Self { temperature })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// `k·T` in joules.
    pub fn kt(&self) -> f64 {
        BOLTZMANN * self.temperature
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct EnergyLevels(Vec<f64>);

impl EnergyLevels {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Empty("energy levels"));
        }
        if levels.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidArgument("energy levels must be finite".into()));
        }
        Ok(Self(levels))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// `pᵢ ∝ exp(−Eᵢ/kT)`, shifted by the ground-state energy before
/// exponentiating.
pub fn gibbs_state(levels: &EnergyLevels, bath: &HeatBath) -> ProbVec {
    let kt = bath.kt();
    let ground = levels.0.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = levels.0.iter().map(|e| (-(e - ground) / kt).exp()).collect();
    let total: f64 = w.iter().sum();
    ProbVec::new(w.into_iter().map(|x| x / total).collect())
        .expect("Boltzmann weights normalize onto the simplex")
}

/// `Ex = kT·D(s₁‖s₂)` in joules.
pub fn extractable_energy(s1: &ProbVec, s2: &ProbVec, bath: &HeatBath) -> Result<f64> {
    Ok(bath.kt() * kl_divergence(s1, s2)?)
}

/// Helmholtz free energy `⟨E, s⟩ − kT·H(s)`.
pub fn free_energy(s: &ProbVec, levels: &EnergyLevels, bath: &HeatBath) -> Result<f64> {
    check_dim(levels.dim(), s.dim())?;
    Ok(dot(levels.as_slice(), s.as_slice()) - bath.kt() * entropy(s))
}

/// `|kT·D(s‖g) − (F(s) − F(g))|` for the Gibbs state `g`, in joules.
pub fn free_energy_identity_gap(s: &ProbVec, levels: &EnergyLevels, bath: &HeatBath) -> Result<f64> {
    let g = gibbs_state(levels, bath);
    let work = extractable_energy(s, &g, bath)?;
    let drop = free_energy(s, levels, bath)? - free_energy(&g, levels, bath)?;
    Ok((work - drop).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(w: &[f64]) -> ProbVec {
        ProbVec::new(w.to_vec()).unwrap()
    }

    #[test]
    fn gibbs_examples() {
        let bath = HeatBath::new(300.0).unwrap();
        let flat = EnergyLevels::new(vec![2e-21; 3]).unwrap();
        assert_abs_diff_eq!(
            gibbs_state(&flat, &bath).as_slice(),
            ProbVec::uniform(3).unwrap().as_slice(),
            epsilon = 1e-15
        );

        let two = EnergyLevels::new(vec![0.0, bath.kt()]).unwrap();
        let g = gibbs_state(&two, &bath);
        assert_abs_diff_eq!(g[0], 0.731_058_578_630_004_9, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], 0.268_941_421_369_995_1, epsilon = 1e-15);

        let hot = HeatBath::new(1e12).unwrap();
        let levels = EnergyLevels::new(vec![0.0, 1e-21, 5e-21]).unwrap();
        assert!(gibbs_state(&levels, &hot).max_abs_diff(&ProbVec::uniform(3).unwrap()) < 1e-6);
    }

    #[test]
    fn gibbs_survives_extreme_ratios() {
        let bath = HeatBath::new(1.0).unwrap();
        let levels = EnergyLevels::new(vec![1e-15, 1e-15 + 1e-24, 2e-15]).unwrap();
        let g = gibbs_state(&levels, &bath);
        assert!(g[0] > 0.0 && g[1] > 0.0);
        assert_eq!(g[2], 0.0);
    }

    #[test]
    fn extractable_energy_examples() {
        let bath = HeatBath::new(300.0).unwrap();
        let s = pv(&[0.4, 0.6]);
        assert_eq!(extractable_energy(&s, &s, &bath).unwrap(), 0.0);
        assert_eq!(BOLTZMANN, 1.381e-23);

        let g = gibbs_state(&EnergyLevels::new(vec![0.0, bath.kt()]).unwrap(), &bath);
        let ex = extractable_energy(&pv(&[1.0, 0.0]), &g, &bath).unwrap();
        // 1.381e-23 · 300 · ln(1 + e⁻¹), evaluated to 30 digits.
        assert_abs_diff_eq!(ex, 1.297_843_171_387_997e-21, epsilon = 1e-25);
    }

    #[test]
    fn free_energy_identity_examples() {
        let bath = HeatBath::new(300.0).unwrap();
        let levels = EnergyLevels::new(vec![0.0, bath.kt()]).unwrap();
        let g = gibbs_state(&levels, &bath);
        assert!(free_energy_identity_gap(&g, &levels, &bath).unwrap() <= 1e-9 * bath.kt());
        assert!(free_energy_identity_gap(&pv(&[1.0, 0.0]), &levels, &bath).unwrap() <= 1e-9 * bath.kt());
        assert!(free_energy_identity_gap(&pv(&[0.5, 0.2, 0.3]), &levels, &bath).is_err());
    }

    #[test]
    fn bath_validation() {
        assert!(HeatBath::new(0.0).is_err());
        assert!(HeatBath::new(-3.0).is_err());
        assert!(HeatBath::new(f64::NAN).is_err());
        assert!(EnergyLevels::new(vec![]).is_err());
        assert!(EnergyLevels::new(vec![f64::INFINITY]).is_err());
    }
}
