use super::convexity::sample_basin_point;
use super::{Bound, CertificateReport, WorstTracker};
use crate::model::{g_expected, grad_g_z, EstimatePair, GroundTruth};
use crate::numerics::{RandomStream, Vector};

/// Perturbation norms are log-uniform over this range, in units of `‖x‖`.
const PERTURBATION_RANGE: (f64, f64) = (1e-6, 10.0);

fn perturbation(n: usize, norm_x: f64, stream: &mut RandomStream) -> Vector {
    let (lo, hi) = PERTURBATION_RANGE;
    let log_r = lo.ln() + (hi.ln() - lo.ln()) * stream.uniform();
    stream.unit_vector(n) * (log_r.exp() * norm_x)
}

fn point_and_h(p: &EstimatePair, h: &Vector) -> Vec<f64> {
    p.stacked().iter().chain(h.iter()).copied().collect()
}

/// Worst ratio `‖∇_z g(z+h, w) − ∇_z g(z, w)‖ / ‖h‖` (and the `w` analog)
/// over sampled basin points and unrestricted perturbations, against
/// `4‖x‖² + ρ`.
pub fn certify_block_lipschitz(truth: &GroundTruth, samples: usize, stream: &mut RandomStream) -> CertificateReport {
    let n = truth.n();
    let mut tracker = WorstTracker::new(Bound::AtMost);
    for _ in 0..samples {
        let p = sample_basin_point(truth, stream);
        let hz = perturbation(n, truth.norm_x(), stream);
        let hw = perturbation(n, truth.norm_x(), stream);

        let dz = grad_g_z(truth, &(&p.z + &hz), &p.w) - grad_g_z(truth, &p.z, &p.w);
        tracker.observe(dz.norm() / hz.norm(), "z", || point_and_h(&p, &hz));
        let dw = grad_g_z(truth, &(&p.w + &hw), &p.z) - grad_g_z(truth, &p.w, &p.z);
        tracker.observe(dw.norm() / hw.norm(), "w", || point_and_h(&p, &hw));
    }
    tracker.finish("block_lipschitz", truth.l_block(), 1e-10)
}

/// Worst violation of `g(z+h, w) ≤ g + ∇_z gᵀh + (L/2)‖h‖²` and the `w`
/// analog. Values `≤ 0` mean the quadratic upper bound holds.
pub fn certify_descent_inequalities(
    truth: &GroundTruth,
    samples: usize,
    stream: &mut RandomStream,
) -> CertificateReport {
    let n = truth.n();
    let l = truth.l_block();
    let mut tracker = WorstTracker::new(Bound::AtMost);
    for _ in 0..samples {
        let p = sample_basin_point(truth, stream);
        let hz = perturbation(n, truth.norm_x(), stream);
        let hw = perturbation(n, truth.norm_x(), stream);
        let base = g_expected(truth, &p);

        let moved = EstimatePair { z: &p.z + &hz, w: p.w.clone() };
        let upper = base + grad_g_z(truth, &p.z, &p.w).dot(&hz) + 0.5 * l * hz.norm_squared();
        tracker.observe(g_expected(truth, &moved) - upper, "z", || point_and_h(&p, &hz));

        let moved = EstimatePair { z: p.z.clone(), w: &p.w + &hw };
        let upper = base + grad_g_z(truth, &p.w, &p.z).dot(&hw) + 0.5 * l * hw.norm_squared();
        tracker.observe(g_expected(truth, &moved) - upper, "w", || point_and_h(&p, &hw));
    }
    tracker.finish("descent_inequality", 0.0, 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_truth(rho: f64) -> GroundTruth {
        GroundTruth::new(Vector::from_vec(vec![0.6, 0.0, 0.8]), rho).unwrap()
    }

    #[test]
    fn bound_value_in_theorem_regime() {
        assert_eq!(unit_truth(27.0 / 8.0).l_block(), 7.375);
        // the exact modulus over the basin stays below the bound
        let worst = 3.0 * (9.0f64 / 8.0).powi(2) + 27.0 / 8.0;
        assert!((worst - (243.0 / 64.0 + 27.0 / 8.0)).abs() < 1e-15);
        assert!(worst <= 7.375);
    }

    #[test]
    fn ratio_along_x_at_truth_is_three_plus_rho() {
        let t = unit_truth(27.0 / 8.0);
        let h = t.x() * 1e-3;
        let d = grad_g_z(&t, &(t.x() + &h), t.x()) - grad_g_z(&t, t.x(), t.x());
        assert!((d.norm() / h.norm() - (3.0 + 27.0 / 8.0)).abs() < 1e-9);
    }

    #[test]
    fn gradient_step_decreases_enough() {
        let t = unit_truth(27.0 / 8.0);
        let mut s = RandomStream::new(4, 0);
        for _ in 0..100 {
            let p = sample_basin_point(&t, &mut s);
            let g = grad_g_z(&t, &p.z, &p.w);
            let moved = EstimatePair { z: &p.z - &g / t.l_block(), w: p.w.clone() };
            let drop = g_expected(&t, &p) - g_expected(&t, &moved);
            assert!(drop >= g.norm_squared() / (2.0 * t.l_block()) - 1e-14);
        }
    }

    #[test]
    fn certificates_pass_on_random_battery() {
        let t = unit_truth(27.0 / 8.0);
        let mut s = RandomStream::new(5, 0);
        let lip = certify_block_lipschitz(&t, 2000, &mut s);
        assert!(lip.passed(), "{lip:?}");
        assert_eq!(lip.samples, 4000);
        let desc = certify_descent_inequalities(&t, 2000, &mut s);
        assert!(desc.passed(), "{desc:?}");
        assert!(desc.worst_value <= 0.0);
    }

    #[test]
    fn zero_perturbation_is_an_equality() {
        let t = unit_truth(2.0);
        let p = EstimatePair::new(t.x() * 1.05, t.x() * 0.95).unwrap();
        let h = Vector::zeros(3);
        let upper = g_expected(&t, &p) + grad_g_z(&t, &p.z, &p.w).dot(&h);
        assert_eq!(g_expected(&t, &p), upper);
    }
}
