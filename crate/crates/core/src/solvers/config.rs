use crate::error::{Error, Result};
use crate::model::EstimatePair;

/// `ρ = (27/8)‖x‖²`, the smallest penalty covered by the linear-rate result.
pub const THEOREM_RHO_RELATIVE: f64 = 27.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralVariant {
    /// Weights `y_k²`, normalized by `1/m`, squared norm `n Σy²/Σ‖a‖²`.
    Squared,
    /// Weights `y_k`, squared norm `Σy/Σ‖a‖²`.
    AsWritten,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitVariant {
    SpectralSquared,
    SpectralAsWritten,
    Given(EstimatePair),
}

impl InitVariant {
    pub fn spectral_variant(&self) -> Option<SpectralVariant> {
        match self {
            InitVariant::SpectralSquared => Some(SpectralVariant::Squared),
            InitVariant::SpectralAsWritten => Some(SpectralVariant::AsWritten),
            InitVariant::Given(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoPolicy {
    Absolute(f64),
    /// `ρ = c·‖x‖²`, with `‖x‖²` known or estimated from the magnitudes.
    RelativeToNormXSq(f64),
}

impl RhoPolicy {
    pub fn resolve(&self, norm_x_sq: f64) -> f64 {
        match *self {
            RhoPolicy::Absolute(rho) => rho,
            RhoPolicy::RelativeToNormXSq(c) => c * norm_x_sq,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub rho_policy: RhoPolicy,
    pub max_iter: usize,
    /// Stop when the full gradient norm falls below this.
    pub tol_grad: f64,
    /// Stop when the iterate change (and, for finite-sample runs, `‖z − w‖`)
    /// falls below this.
    pub tol_step: f64,
    pub init_variant: InitVariant,
    /// ADMM only: `false` pins the multiplier at zero, which turns ADMM into BCD.
    pub dual_update: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::for_signal_scale(1.0)
    }
}

impl SolverConfig {
    /// Defaults for a signal of norm `norm_x`: `tol_grad = 10⁻⁹‖x‖³`,
    /// `tol_step = 10⁻¹⁰‖x‖`, `max_iter = 10⁴`, `ρ = (27/8)‖x‖²`.
    pub fn for_signal_scale(norm_x: f64) -> Self {
        Self {
            rho_policy: RhoPolicy::RelativeToNormXSq(THEOREM_RHO_RELATIVE),
            max_iter: 10_000,
            tol_grad: 1e-9 * norm_x.powi(3),
            tol_step: 1e-10 * norm_x,
            init_variant: InitVariant::SpectralSquared,
            dual_update: true,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        match self.rho_policy {
            RhoPolicy::Absolute(r) | RhoPolicy::RelativeToNormXSq(r) if !positive(r) => {
                return Err(Error::InvalidConfig(format!("rho must be > 0, got {r}")));
            }
            _ => {}
        }
        if !positive(self.tol_grad) || !positive(self.tol_step) {
            return Err(Error::InvalidConfig("tolerances must be > 0".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
        }
        Ok(())
    }

    pub fn rho_for(&self, norm_x_sq: f64) -> Result<f64> {
        let rho = self.rho_policy.resolve(norm_x_sq);
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidConfig(format!("resolved rho must be > 0, got {rho}")));
        }
        Ok(rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_scale_with_signal() {
        let cfg = SolverConfig::for_signal_scale(2.0);
        assert_eq!(cfg.tol_grad, 8e-9);
        assert_eq!(cfg.tol_step, 2e-10);
        assert_eq!(cfg.rho_for(4.0).unwrap(), 13.5);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn validation_rejects_bad_values() {
        let bad = [
            SolverConfig { rho_policy: RhoPolicy::Absolute(0.0), ..Default::default() },
            SolverConfig { max_iter: 0, ..Default::default() },
            SolverConfig { tol_step: -1.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
    }
}
