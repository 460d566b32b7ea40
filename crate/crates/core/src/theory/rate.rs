use super::{Bound, CertificateReport, WorstTracker};
use crate::error::{Error, Result};
use crate::model::GroundTruth;
use crate::solvers::{IterateTrace, THEOREM_RHO_RELATIVE};

/// Constants of the linear rate for expected BCD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConstants {
    pub norm_x: f64,
    pub rho: f64,
    /// strong-convexity modulus `‖x‖²/3`
    pub sigma: f64,
    /// block Lipschitz constant `4‖x‖² + ρ`
    pub l_block: f64,
    /// per-sweep factor on the objective gap, `1 − σ/L`
    pub contraction: f64,
}

pub fn rate_constants(truth: &GroundTruth) -> Result<RateConstants> {
    let required = THEOREM_RHO_RELATIVE * truth.norm_x_sq();
    if truth.rho() < required {
        return Err(Error::RhoTooSmall { rho: truth.rho(), required });
    }
    let nx2 = truth.norm_x_sq();
    Ok(RateConstants {
        norm_x: truth.norm_x(),
        rho: truth.rho(),
        sigma: truth.sigma(),
        l_block: truth.l_block(),
        contraction: 1.0 - nx2 / (12.0 * nx2 + 3.0 * truth.rho()),
    })
}

impl RateConstants {
    /// `contraction^k · gap0`.
    pub fn objective_bound(&self, k: usize, gap0: f64) -> f64 {
        self.contraction.powi(k as i32) * gap0
    }

    /// Distance bound `contraction^{k/2} · √((2/σ)·gap0)`.
    pub fn distance_bound(&self, k: usize, gap0: f64) -> f64 {
        self.contraction.powf(k as f64 / 2.0) * (2.0 / self.sigma * gap0).sqrt()
    }

    /// The same bound with the prefactor `√(6/‖x‖·gap0)`, which differs from
    /// [`Self::distance_bound`] in the power of `‖x‖`; they agree at `‖x‖ = 1`.
    pub fn distance_bound_as_printed(&self, k: usize, gap0: f64) -> f64 {
        self.contraction.powf(k as f64 / 2.0) * (6.0 / self.norm_x * gap0).sqrt()
    }
}

/// Worst `g_k − g* − contraction^k (g_0 − g*)` over a trace.
pub fn check_rate_bound(trace: &IterateTrace, rc: &RateConstants, optimum: f64, slack: f64) -> CertificateReport {
    let mut tracker = WorstTracker::new(Bound::AtMost);
    if let Some(first) = trace.records.first() {
        let gap0 = first.objective - optimum;
        for r in &trace.records {
            let excess = (r.objective - optimum) - rc.objective_bound(r.iter, gap0);
            tracker.observe(excess, "iter", || vec![r.iter as f64]);
        }
    }
    tracker.finish("rate_bound", 0.0, slack)
}

/// Successive ratios `(g_{k+1} − g*)/(g_k − g*)` while `g_k − g* > floor`.
pub fn gap_ratios(trace: &IterateTrace, optimum: f64, floor: f64) -> Vec<f64> {
    trace
        .records
        .windows(2)
        .take_while(|w| w[0].objective - optimum > floor)
        .map(|w| (w[1].objective - optimum) / (w[0].objective - optimum))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EstimatePair;
    use crate::numerics::{RandomStream, Vector};
    use crate::solvers::{run_bcd_expected, SolverConfig};

    fn truth(norm: f64, rho: f64) -> GroundTruth {
        GroundTruth::new(Vector::from_vec(vec![norm, 0.0]), rho).unwrap()
    }

    #[test]
    fn theorem_regime_contraction() {
        let rc = rate_constants(&truth(1.0, 27.0 / 8.0)).unwrap();
        assert!((rc.contraction - 169.0 / 177.0).abs() < 1e-15);
        assert!((rc.contraction - 0.954802).abs() < 1e-6);
        assert!((rc.contraction - (1.0 - rc.sigma / rc.l_block)).abs() < 1e-15);
    }

    #[test]
    fn heavy_penalty_slows_the_rate() {
        let mut prev = 0.0;
        for rho in [3.375, 10.0, 1e3, 1e6, 1e12] {
            let c = rate_constants(&truth(1.0, rho)).unwrap().contraction;
            assert!(c > prev);
            prev = c;
        }
        assert!(1.0 - prev < 1e-12);
    }

    #[test]
    fn small_rho_is_rejected() {
        assert!(matches!(rate_constants(&truth(2.0, 13.0)), Err(Error::RhoTooSmall { .. })));
    }

    #[test]
    fn prefactors_agree_only_at_unit_norm() {
        let rc = rate_constants(&truth(1.0, 27.0 / 8.0)).unwrap();
        assert!((rc.distance_bound(3, 0.2) - rc.distance_bound_as_printed(3, 0.2)).abs() < 1e-15);
        let rc = rate_constants(&truth(2.0, 27.0 / 2.0)).unwrap();
        assert!(rc.distance_bound(0, 0.2) < rc.distance_bound_as_printed(0, 0.2));
    }

    #[test]
    fn expected_bcd_ratios_stay_below_contraction() {
        let mut s = RandomStream::new(30, 0);
        let t = GroundTruth::random(12, 1.0, 27.0 / 8.0, &mut s).unwrap();
        let rc = rate_constants(&t).unwrap();
        for _ in 0..10 {
            let start = EstimatePair::new(s.uniform_in_ball(t.x(), 0.125), s.uniform_in_ball(t.x(), 0.125)).unwrap();
            let res = run_bcd_expected(&t, &start, &SolverConfig::default()).unwrap();
            assert!(check_rate_bound(&res.trace, &rc, 0.0, 1e-10).passed());
            let ratios = gap_ratios(&res.trace, 0.0, 1e-12);
            assert!(!ratios.is_empty());
            for r in ratios {
                assert!(r <= rc.contraction + 1e-9, "{r}");
            }
        }
    }
}
