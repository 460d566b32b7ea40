use crate::model::{grad_f_finite, EstimatePair, MeasurementEnsemble};
use crate::numerics::Vector;

/// Norms behind the critical-point test of the augmented Lagrangian:
/// a triple is critical iff `∂_z f = ∂_w f = 0`, `z = w` and `λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPointReport {
    pub grad_z_norm: f64,
    pub grad_w_norm: f64,
    pub primal_gap: f64,
    pub dual_norm: f64,
    pub tol: f64,
}

impl CriticalPointReport {
    pub fn is_critical(&self) -> bool {
        self.failing().is_empty()
    }

    /// Names of the conditions that exceed `tol`.
    pub fn failing(&self) -> Vec<&'static str> {
        [
            ("grad_z", self.grad_z_norm),
            ("grad_w", self.grad_w_norm),
            ("primal_gap", self.primal_gap),
            ("dual", self.dual_norm),
        ]
        .into_iter()
        .filter(|(_, v)| !(*v <= self.tol))
        .map(|(name, _)| name)
        .collect()
    }
}

pub fn check_critical_point(
    ens: &MeasurementEnsemble,
    p: &EstimatePair,
    dual: &Vector,
    tol: f64,
) -> CriticalPointReport {
    let (gz, gw) = grad_f_finite(ens, p);
    CriticalPointReport {
        grad_z_norm: gz.norm(),
        grad_w_norm: gw.norm(),
        primal_gap: p.primal_gap(),
        dual_norm: dual.norm(),
        tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GroundTruth;
    use crate::numerics::RandomStream;

    #[test]
    fn truth_with_zero_dual_is_critical() {
        let mut s = RandomStream::new(1, 0);
        let truth = GroundTruth::random(5, 1.0, 0.0, &mut s).unwrap();
        let ens = MeasurementEnsemble::generate(&truth, 50, &mut s).unwrap();
        let p = EstimatePair::replicated(truth.x().clone());
        assert!(check_critical_point(&ens, &p, &Vector::zeros(5), 1e-10).is_critical());

        let report = check_critical_point(&ens, &p, &Vector::from_element(5, 0.1), 1e-10);
        assert!(!report.is_critical());
        assert_eq!(report.failing(), vec!["dual"]);
    }
}
