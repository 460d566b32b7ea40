use super::{Bound, CertificateReport, WorstTracker};
use crate::error::{Error, Result};
use crate::model::{assemble_hessian, EstimatePair, GroundTruth, BASIN_RADIUS};
use crate::numerics::{min_eigenvalue, RandomStream, DEFAULT_EIG_TOL};

/// Lower bound the appendix argument reaches for the half form `½hᵀ∇²g h`,
/// in units of `‖x‖²`.
pub const STRONG_CONVEXITY_PROOF_CONSTANT: f64 = 11.0 / 32.0;

/// Each block uniform in the ball of radius `‖x‖/8` around `x`.
pub fn sample_basin_point(truth: &GroundTruth, stream: &mut RandomStream) -> EstimatePair {
    let radius = BASIN_RADIUS * truth.norm_x();
    let z = stream.uniform_in_ball(truth.x(), radius);
    let w = stream.uniform_in_ball(truth.x(), radius);
    EstimatePair { z, w }
}

/// Smallest Hessian eigenvalue of `g` over sampled points of `N_x`, checked
/// against `‖x‖²/3`. Requires `ρ ≥ ‖x‖²`.
pub fn certify_strong_convexity(
    truth: &GroundTruth,
    samples: usize,
    stream: &mut RandomStream,
) -> Result<CertificateReport> {
    if truth.rho() < truth.norm_x_sq() {
        return Err(Error::Precondition(format!(
            "strong convexity needs rho >= |x|^2 = {}, got {}",
            truth.norm_x_sq(),
            truth.rho()
        )));
    }
    let mut tracker = WorstTracker::new(Bound::AtLeast);
    for _ in 0..samples {
        let p = sample_basin_point(truth, stream);
        let lowest = min_eigenvalue(&assemble_hessian(truth, &p), DEFAULT_EIG_TOL)?;
        tracker.observe(lowest, "min_eig", || p.stacked().as_slice().to_vec());
    }
    let nx2 = truth.norm_x_sq();
    let mut report = tracker.finish("strong_convexity", nx2 / 3.0, 1e-8 * nx2);
    report.notes = vec![
        ("half_form_min".into(), 0.5 * report.worst_value),
        ("proof_constant".into(), STRONG_CONVEXITY_PROOF_CONSTANT * nx2),
    ];
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hessian_quadratic_form;
    use crate::numerics::Vector;

    #[test]
    fn perpendicular_direction_at_truth() {
        let truth = GroundTruth::new(Vector::from_vec(vec![1.0, 0.0]), 1.0).unwrap();
        let p = EstimatePair::replicated(truth.x().clone());
        let h = EstimatePair::replicated(Vector::from_vec(vec![0.0, 1.0]));
        let v = hessian_quadratic_form(&truth, &p, &h);
        assert!((v - 4.0).abs() < 1e-14);
        assert!(v > truth.norm_x_sq() / 3.0);
    }

    #[test]
    fn certificate_passes_at_unit_scale() {
        let truth = GroundTruth::new(Vector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 1.0).unwrap();
        let mut s = RandomStream::new(3, 0);
        let r = certify_strong_convexity(&truth, 1000, &mut s).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.worst_value >= 1.0 / 3.0);
        assert!(r.note("half_form_min").unwrap() >= STRONG_CONVEXITY_PROOF_CONSTANT);
        assert_eq!(r.samples, 1000);
    }

    #[test]
    fn small_rho_is_rejected() {
        let truth = GroundTruth::new(Vector::from_vec(vec![1.0, 0.0]), 0.5).unwrap();
        let mut s = RandomStream::new(3, 0);
        assert!(matches!(certify_strong_convexity(&truth, 10, &mut s), Err(Error::Precondition(_))));
    }
}
