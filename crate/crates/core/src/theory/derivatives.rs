//! Central finite-difference checks of the analytic derivatives of `g`.

use super::{Bound, CertificateReport, WorstTracker};
use crate::model::{g_expected, grad_g, hessian_quadratic_form, EstimatePair, GroundTruth};
use crate::numerics::RandomStream;

pub const GRADIENT_REL_TOL: f64 = 1e-6;
pub const HESSIAN_REL_TOL: f64 = 1e-5;

/// Second differences divide by `t²`, so they use a wider step than the
/// gradient check to keep rounding below truncation error.
fn second_difference_step(norm_x: f64) -> f64 {
    1e-4 * norm_x.max(1.0)
}

fn shifted(p: &EstimatePair, h: &EstimatePair, t: f64) -> EstimatePair {
    EstimatePair { z: &p.z + &h.z * t, w: &p.w + &h.w * t }
}

/// Relative error `‖∇_fd − ∇g‖/‖∇g‖` of a coordinate-wise central difference.
pub fn gradient_fd_error(truth: &GroundTruth, p: &EstimatePair, step: f64) -> f64 {
    let (gz, gw) = grad_g(truth, p);
    let n = p.n();
    let mut err = 0.0;
    let mut norm = 0.0;
    for i in 0..2 * n {
        let mut plus = p.clone();
        let mut minus = p.clone();
        let (analytic, pv, mv) = if i < n {
            (gz[i], &mut plus.z[i], &mut minus.z[i])
        } else {
            (gw[i - n], &mut plus.w[i - n], &mut minus.w[i - n])
        };
        *pv += step;
        *mv -= step;
        let fd = (g_expected(truth, &plus) - g_expected(truth, &minus)) / (2.0 * step);
        err += (fd - analytic).powi(2);
        norm += analytic * analytic;
    }
    (err / norm.max(f64::MIN_POSITIVE)).sqrt()
}

/// Error of the second difference `(g(p+th) − 2g(p) + g(p−th))/t²` against
/// `hᵀ∇²g h`, relative to `max(|hᵀ∇²g h|, ‖x‖²‖h‖²)` so that directions of
/// near-zero curvature are measured on the natural scale of the form.
pub fn hessian_fd_error(truth: &GroundTruth, p: &EstimatePair, h: &EstimatePair, step: f64) -> f64 {
    let analytic = hessian_quadratic_form(truth, p, h);
    let fd = (g_expected(truth, &shifted(p, h, step)) - 2.0 * g_expected(truth, p)
        + g_expected(truth, &shifted(p, h, -step)))
        / (step * step);
    let scale = analytic.abs().max(truth.norm_x_sq() * (h.z.norm_squared() + h.w.norm_squared()));
    (fd - analytic).abs() / scale
}

/// Gradient and Hessian-form consistency at `samples` random points with
/// Gaussian blocks of scale `‖x‖`, along random unit directions.
pub fn certify_derivatives(
    truth: &GroundTruth,
    samples: usize,
    stream: &mut RandomStream,
) -> (CertificateReport, CertificateReport) {
    let n = truth.n();
    let norm_x = truth.norm_x();
    let scale = norm_x / (n as f64).sqrt();
    let grad_step = crate::model::finite_difference_step(norm_x);
    let hess_step = second_difference_step(norm_x);
    let mut grad = WorstTracker::new(Bound::AtMost);
    let mut hess = WorstTracker::new(Bound::AtMost);
    for _ in 0..samples {
        let p = EstimatePair { z: stream.gaussian_vector(n) * scale, w: stream.gaussian_vector(n) * scale };
        let dir = stream.unit_vector(2 * n);
        let h = EstimatePair { z: dir.rows(0, n).into_owned(), w: dir.rows(n, n).into_owned() };
        grad.observe(gradient_fd_error(truth, &p, grad_step), "grad", || p.stacked().as_slice().to_vec());
        hess.observe(hessian_fd_error(truth, &p, &h, hess_step), "hess", || {
            p.stacked().iter().chain(dir.iter()).copied().collect()
        });
    }
    (grad.finish("gradient_fd", GRADIENT_REL_TOL, 0.0), hess.finish("hessian_fd", HESSIAN_REL_TOL, 0.0))
}
