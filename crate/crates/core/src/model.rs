//! Problem instance: ground truth, Gaussian measurements, the split
//! objectives and their derivatives.
//!
//! Two objectives live here. The finite-sample one,
//!
//! ```text
//! f(z, w) = 1/(4m) Σ_k (y_k² − a_kᵀz · a_kᵀw)²,
//! ```
//!
//! and the closed-form expected objective with the coupling penalty,
//!
//! ```text
//! g(z, w) = 3/2‖x‖⁴ + (wᵀz)² + ½‖z‖²‖w‖² − 2 xᵀz·xᵀw − ‖x‖² wᵀz + ρ/2 ‖z − w‖².
//! ```
//!
//! Note the normalization: the polynomial part of `g` is `E[½(y² − aᵀz·aᵀw)²]`,
//! which is twice `E f`. Every closed-form update and certificate is written
//! against `g` as stated above.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, RandomStream, SymMat, Vector};

/// Above this many measurements `f` is accumulated with compensated summation.
pub const COMPENSATED_SUM_THRESHOLD: usize = 10_000;

/// Radius of the basin `N_x` as a fraction of `‖x‖`.
pub const BASIN_RADIUS: f64 = 1.0 / 8.0;

/// The hidden signal plus the constants derived from it and the penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    x: Vector,
    norm_x: f64,
    rho: f64,
}

impl GroundTruth {
    pub fn new(x: Vector, rho: f64) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidConfig("signal dimension must be at least 1".into()));
        }
        let norm_x = x.norm();
        if !(norm_x > 0.0) || !norm_x.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::ZeroSignal);
        }
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::InvalidConfig(format!("rho must be finite and >= 0, got {rho}")));
        }
        Ok(Self { x, norm_x, rho })
    }

    /// Signal drawn uniformly on the sphere of radius `norm_x`.
    pub fn random(n: usize, norm_x: f64, rho: f64, stream: &mut RandomStream) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("signal dimension must be at least 1".into()));
        }
        Self::new(stream.unit_vector(n) * norm_x, rho)
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.x.clone(), rho)
    }

    pub fn x(&self) -> &Vector {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn norm_x(&self) -> f64 {
        self.norm_x
    }

    pub fn norm_x_sq(&self) -> f64 {
        self.norm_x * self.norm_x
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Strong-convexity modulus `‖x‖²/3` on `N_x`.
    pub fn sigma(&self) -> f64 {
        self.norm_x_sq() / 3.0
    }

    /// Block Lipschitz constant `4‖x‖² + ρ` on `N_x`.
    pub fn l_block(&self) -> f64 {
        4.0 * self.norm_x_sq() + self.rho
    }

    /// Penalty relative to the signal energy, `C = ρ/‖x‖²`.
    pub fn rho_relative(&self) -> f64 {
        self.rho / self.norm_x_sq()
    }
}

/// Measurement vectors stored row-wise (`m × n`) and their magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEnsemble {
    a: DMatrix<f64>,
    y: Vector,
}

impl MeasurementEnsemble {
    pub fn new(a: DMatrix<f64>, y: Vector) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::InvalidConfig("ensemble needs m >= 1 and n >= 1".into()));
        }
        if y.len() != a.nrows() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), found: y.len() });
        }
        if y.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidConfig("magnitudes must be finite and nonnegative".into()));
        }
        Ok(Self { a, y })
    }

    /// Draws `m` i.i.d. standard Gaussian rows (row by row from `stream`)
    /// and records `y_k = |a_kᵀx|`.
    pub fn generate(truth: &GroundTruth, m: usize, stream: &mut RandomStream) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        let n = truth.n();
        let draws: Vec<f64> = (0..m * n).map(|_| stream.gaussian()).collect();
        let a = DMatrix::from_row_slice(m, n, &draws);
        let y = (&a * truth.x()).abs();
        Self::new(a, y)
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn y(&self) -> &Vector {
        &self.y
    }

    /// `(1/m) Σ y_k²`, an unbiased estimate of `‖x‖²`.
    pub fn norm_x_sq_estimate(&self) -> f64 {
        self.y.norm_squared() / self.m() as f64
    }

    /// `scale · Σ_k d_k a_k a_kᵀ + shift·I` for per-row weights `d`.
    pub(crate) fn weighted_gram(&self, weights: &Vector, scale: f64, shift: f64) -> SymMat {
        let mut scaled = self.a.clone();
        for (mut row, &d) in scaled.row_iter_mut().zip(weights.iter()) {
            row *= d * scale;
        }
        let mut gram = self.a.transpose() * scaled;
        let n = gram.nrows();
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (gram[(i, j)] + gram[(j, i)]);
                gram[(i, j)] = avg;
                gram[(j, i)] = avg;
            }
            gram[(i, i)] += shift;
        }
        SymMat::from_symmetric_unchecked(gram)
    }
}

/// The split iterate `(z, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatePair {
    pub z: Vector,
    pub w: Vector,
}

impl EstimatePair {
    pub fn new(z: Vector, w: Vector) -> Result<Self> {
        if z.len() != w.len() {
            return Err(Error::DimensionMismatch { expected: z.len(), found: w.len() });
        }
        Ok(Self { z, w })
    }

    /// Both blocks set to `v`.
    pub fn replicated(v: Vector) -> Self {
        Self { z: v.clone(), w: v }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn stacked(&self) -> Vector {
        let n = self.n();
        DVector::from_fn(2 * n, |i, _| if i < n { self.z[i] } else { self.w[i - n] })
    }

    pub fn primal_gap(&self) -> f64 {
        (&self.z - &self.w).norm()
    }

    /// `min(‖(z,w) − (x,x)‖, ‖(z,w) + (x,x)‖)`.
    pub fn distance_to(&self, x: &Vector) -> f64 {
        let plus = ((&self.z - x).norm_squared() + (&self.w - x).norm_squared()).sqrt();
        let minus = ((&self.z + x).norm_squared() + (&self.w + x).norm_squared()).sqrt();
        plus.min(minus)
    }

    pub fn is_finite(&self) -> bool {
        self.z.iter().chain(self.w.iter()).all(|v| v.is_finite())
    }
}

fn residuals(ens: &MeasurementEnsemble, p: &EstimatePair) -> (Vector, Vector, Vector) {
    let az = ens.a() * &p.z;
    let aw = ens.a() * &p.w;
    let r = DVector::from_fn(ens.m(), |k, _| ens.y()[k] * ens.y()[k] - az[k] * aw[k]);
    (az, aw, r)
}

fn mean_quarter_square(r: &Vector) -> f64 {
    let m = r.len();
    let sum = if m > COMPENSATED_SUM_THRESHOLD {
        compensated_sum(r.iter().map(|v| v * v))
    } else {
        r.iter().map(|v| v * v).sum()
    };
    sum / (4.0 * m as f64)
}

/// Finite-sample objective `f(z, w)`.
pub fn f_finite(ens: &MeasurementEnsemble, p: &EstimatePair) -> f64 {
    let (_, _, r) = residuals(ens, p);
    mean_quarter_square(&r)
}

/// The unsplit least-squares objective `1/(4m) Σ (y_k² − (a_kᵀz)²)²`.
pub fn unsplit_objective(ens: &MeasurementEnsemble, z: &Vector) -> f64 {
    let az = ens.a() * z;
    let r = DVector::from_fn(ens.m(), |k, _| ens.y()[k] * ens.y()[k] - az[k] * az[k]);
    mean_quarter_square(&r)
}

/// `(∂_z f, ∂_w f)`.
pub fn grad_f_finite(ens: &MeasurementEnsemble, p: &EstimatePair) -> (Vector, Vector) {
    let (az, aw, r) = residuals(ens, p);
    let scale = -1.0 / (2.0 * ens.m() as f64);
    let cz = r.component_mul(&aw) * scale;
    let cw = r.component_mul(&az) * scale;
    (ens.a().tr_mul(&cz), ens.a().tr_mul(&cw))
}

/// Expected objective `g(z, w)` including the penalty `ρ/2‖z − w‖²`.
pub fn g_expected(truth: &GroundTruth, p: &EstimatePair) -> f64 {
    let x = truth.x();
    let nx2 = truth.norm_x_sq();
    let wz = p.w.dot(&p.z);
    let xz = x.dot(&p.z);
    let xw = x.dot(&p.w);
    1.5 * nx2 * nx2 + wz * wz + 0.5 * p.z.norm_squared() * p.w.norm_squared() - 2.0 * xz * xw - nx2 * wz
        + 0.5 * truth.rho() * (&p.z - &p.w).norm_squared()
}

/// `∇_z g` at `(z, w)`.
pub fn grad_g_z(truth: &GroundTruth, z: &Vector, w: &Vector) -> Vector {
    let x = truth.x();
    let rho = truth.rho();
    w * (2.0 * w.dot(z)) + z * (w.norm_squared() + rho) - x * (2.0 * x.dot(w)) - w * (truth.norm_x_sq() + rho)
}

/// `(∇_z g, ∇_w g)`; the two blocks are mirror images under `z ↔ w`.
pub fn grad_g(truth: &GroundTruth, p: &EstimatePair) -> (Vector, Vector) {
    (grad_g_z(truth, &p.z, &p.w), grad_g_z(truth, &p.w, &p.z))
}

/// Second-order Taylor term `½ hᵀ∇²g h`, in the expanded form
///
/// ```text
/// (wᵀh_z + zᵀh_w)² + 2wᵀz·h_wᵀh_z + ½‖z‖²‖h_w‖² + ½‖w‖²‖h_z‖²
///   + 2 zᵀh_z·wᵀh_w − 2 xᵀh_z·xᵀh_w − ‖x‖² h_wᵀh_z + ρ/2 ‖h_z − h_w‖².
/// ```
pub fn half_hessian_form(truth: &GroundTruth, p: &EstimatePair, h: &EstimatePair) -> f64 {
    let (z, w) = (&p.z, &p.w);
    let (hz, hw) = (&h.z, &h.w);
    let x = truth.x();
    let lead = w.dot(hz) + z.dot(hw);
    let hzhw = hw.dot(hz);
    lead * lead
        + 2.0 * w.dot(z) * hzhw
        + 0.5 * z.norm_squared() * hw.norm_squared()
        + 0.5 * w.norm_squared() * hz.norm_squared()
        + 2.0 * z.dot(hz) * w.dot(hw)
        - 2.0 * x.dot(hz) * x.dot(hw)
        - truth.norm_x_sq() * hzhw
        + 0.5 * truth.rho() * (hz - hw).norm_squared()
}

/// `hᵀ ∇²g(z, w) h` for the stacked direction `h = (h_z, h_w)`.
pub fn hessian_quadratic_form(truth: &GroundTruth, p: &EstimatePair, h: &EstimatePair) -> f64 {
    2.0 * half_hessian_form(truth, p, h)
}

/// Dense `2n × 2n` Hessian of `g`, ordered `(z, w)`.
pub fn assemble_hessian(truth: &GroundTruth, p: &EstimatePair) -> SymMat {
    let n = p.n();
    let (z, w) = (&p.z, &p.w);
    let x = truth.x();
    let rho = truth.rho();
    let eye = DMatrix::<f64>::identity(n, n);

    let hzz = w * w.transpose() * 2.0 + &eye * (w.norm_squared() + rho);
    let hww = z * z.transpose() * 2.0 + &eye * (z.norm_squared() + rho);
    let hzw = (w * z.transpose() + z * w.transpose()) * 2.0 - x * x.transpose() * 2.0
        + &eye * (2.0 * w.dot(z) - truth.norm_x_sq() - rho);

    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(&hzz);
    h.view_mut((n, n), (n, n)).copy_from(&hww);
    h.view_mut((0, n), (n, n)).copy_from(&hzw);
    h.view_mut((n, 0), (n, n)).copy_from(&hzw.transpose());
    for i in 0..2 * n {
        for j in 0..i {
            let avg = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = avg;
            h[(j, i)] = avg;
        }
    }
    SymMat::from_symmetric_unchecked(h)
}

/// Membership in `N_x`: both blocks within `‖x‖/8` of `x` (inclusive).
pub fn in_basin(truth: &GroundTruth, p: &EstimatePair) -> bool {
    let radius = BASIN_RADIUS * truth.norm_x();
    (&p.z - truth.x()).norm() <= radius && (&p.w - truth.x()).norm() <= radius
}

/// Finite-difference step `10⁻⁵·max(1, ‖x‖)`; `g` is quartic, so the step
/// tracks the signal scale.
pub fn finite_difference_step(norm_x: f64) -> f64 {
    1e-5 * norm_x.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(c: &[f64]) -> Vector {
        Vector::from_column_slice(c)
    }

    fn instance(seed: u64, n: usize, m: usize) -> (GroundTruth, MeasurementEnsemble) {
        let mut s = RandomStream::new(seed, 0);
        let truth = GroundTruth::random(n, 1.3, 0.7, &mut s).unwrap();
        let ens = MeasurementEnsemble::generate(&truth, m, &mut s).unwrap();
        (truth, ens)
    }

    #[test]
    fn truth_constants() {
        let t = GroundTruth::new(v(&[3.0, 4.0]), 2.0).unwrap();
        assert_eq!(t.norm_x(), 5.0);
        assert_eq!(t.sigma(), 25.0 / 3.0);
        assert_eq!(t.l_block(), 102.0);
        assert_eq!(GroundTruth::new(v(&[0.0, 0.0]), 1.0).unwrap_err(), Error::ZeroSignal);
        assert!(GroundTruth::new(v(&[1.0]), -1.0).is_err());
    }

    #[test]
    fn ensemble_pick_off_and_validation() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 5.0, -1.0, 0.0]);
        let t = GroundTruth::new(v(&[1.0, 0.0]), 0.0).unwrap();
        let y = (&a * t.x()).abs();
        assert_eq!(y[0], 2.0);
        assert_eq!(y[1], 1.0);
        assert!(MeasurementEnsemble::new(a.clone(), v(&[1.0, -1.0])).is_err());
        assert!(MeasurementEnsemble::new(a, v(&[1.0])).is_err());
    }

    #[test]
    fn zero_measurements_for_forced_zero_signal() {
        let mut s = RandomStream::new(3, 0);
        let a = DMatrix::from_fn(5, 3, |_, _| s.gaussian());
        let y = (&a * Vector::zeros(3)).abs();
        assert!(y.iter().all(|&v| v == 0.0));
        assert!(MeasurementEnsemble::new(a, y).is_ok());
    }

    #[test]
    fn f_finite_hand_values() {
        let ens = MeasurementEnsemble::new(DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), v(&[2.0])).unwrap();
        let p = EstimatePair::new(v(&[1.0, 0.0]), v(&[3.0, 0.0])).unwrap();
        assert_relative_eq!(f_finite(&ens, &p), 0.25);

        let (truth, ens) = instance(1, 5, 40);
        let x = truth.x().clone();
        assert!(f_finite(&ens, &EstimatePair::replicated(x.clone())) < 1e-28);
        let flipped = EstimatePair::new(x.clone(), -x.clone()).unwrap();
        let expect = ens.y().iter().map(|y| y.powi(4)).sum::<f64>() / ens.m() as f64;
        assert_relative_eq!(f_finite(&ens, &flipped), expect, max_relative = 1e-13);
    }

    #[test]
    fn f_finite_compensated_path_agrees() {
        let (truth, ens) = instance(2, 3, COMPENSATED_SUM_THRESHOLD + 7);
        let mut s = RandomStream::new(2, 1);
        let p = EstimatePair::new(s.gaussian_vector(3), s.gaussian_vector(3)).unwrap();
        let (_, _, r) = residuals(&ens, &p);
        let naive = r.iter().map(|v| v * v).sum::<f64>() / (4.0 * ens.m() as f64);
        assert_relative_eq!(f_finite(&ens, &p), naive, max_relative = 1e-12);
        let _ = truth;
    }

    #[test]
    fn grad_f_vanishes_at_truth_and_is_symmetric_on_diagonal() {
        let (truth, ens) = instance(4, 6, 60);
        let (gz, gw) = grad_f_finite(&ens, &EstimatePair::replicated(truth.x().clone()));
        assert!(gz.norm() < 1e-12 && gw.norm() < 1e-12);

        let mut s = RandomStream::new(4, 9);
        let (gz, gw) = grad_f_finite(&ens, &EstimatePair::replicated(s.gaussian_vector(6)));
        assert_eq!(gz, gw);
    }

    #[test]
    fn grad_f_matches_central_differences() {
        let (_, ens) = instance(5, 4, 30);
        let mut s = RandomStream::new(5, 1);
        let p = EstimatePair::new(s.gaussian_vector(4), s.gaussian_vector(4)).unwrap();
        let (gz, gw) = grad_f_finite(&ens, &p);
        let analytic = EstimatePair::new(gz, gw).unwrap().stacked();
        let step = finite_difference_step(1.0);
        let base = p.stacked();
        let fd = DVector::from_fn(8, |i, _| {
            let mut plus = base.clone();
            let mut minus = base.clone();
            plus[i] += step;
            minus[i] -= step;
            let split = |s: &Vector| EstimatePair::new(s.rows(0, 4).into(), s.rows(4, 4).into()).unwrap();
            (f_finite(&ens, &split(&plus)) - f_finite(&ens, &split(&minus))) / (2.0 * step)
        });
        assert!((&fd - &analytic).norm() <= 1e-6 * analytic.norm());
    }

    #[test]
    fn g_expected_hand_values() {
        let x = v(&[1.0, 0.0]);
        let t = GroundTruth::new(x.clone(), 0.0).unwrap();
        assert_relative_eq!(g_expected(&t, &EstimatePair::replicated(x.clone())), 0.0, epsilon = 1e-15);
        assert_relative_eq!(g_expected(&t, &EstimatePair::replicated(Vector::zeros(2))), 1.5);
        assert_relative_eq!(g_expected(&t, &EstimatePair::replicated(&x * 0.5)), 0.84375, epsilon = 1e-15);

        let t = GroundTruth::new(v(&[0.3, -1.2, 2.0]), 1.7).unwrap();
        assert_relative_eq!(g_expected(&t, &EstimatePair::replicated(t.x().clone())), 0.0, epsilon = 1e-12);
        assert_relative_eq!(
            g_expected(&t, &EstimatePair::replicated(Vector::zeros(3))),
            1.5 * t.norm_x_sq().powi(2),
            max_relative = 1e-15
        );
    }

    #[test]
    fn grad_g_at_antipodal_pair() {
        // at (x, −x): ∇_z g = 2‖x‖²x + ‖x‖²x + 2‖x‖²x + ‖x‖²x + 2ρx = (6‖x‖² + 2ρ)x
        let t = GroundTruth::new(v(&[0.6, 0.8]), 0.5).unwrap();
        let x = t.x().clone();
        let (gz, gw) = grad_g(&t, &EstimatePair::new(x.clone(), -x.clone()).unwrap());
        let expect = &x * (6.0 * t.norm_x_sq() + 2.0 * t.rho());
        assert!((gz - &expect).norm() < 1e-14);
        assert!((gw + &expect).norm() < 1e-14);
    }

    #[test]
    fn hessian_form_hand_value_and_zero_direction() {
        // along (h, h), h ⊥ x: g(x + th, x + th) = 2t²‖x‖²‖h‖² + 1.5t⁴‖h‖⁴, second derivative 4‖x‖²
        for rho in [0.0, 1.0, 5.0] {
            let t = GroundTruth::new(v(&[2.0, 0.0, 0.0]), rho).unwrap();
            let p = EstimatePair::replicated(t.x().clone());
            let h = EstimatePair::replicated(v(&[0.0, 0.6, 0.8]));
            assert_relative_eq!(hessian_quadratic_form(&t, &p, &h), 4.0 * t.norm_x_sq(), epsilon = 1e-12);
            assert_relative_eq!(half_hessian_form(&t, &p, &h), 2.0 * t.norm_x_sq(), epsilon = 1e-12);
            let zero = EstimatePair::replicated(Vector::zeros(3));
            assert_eq!(hessian_quadratic_form(&t, &p, &zero), 0.0);
        }
    }

    #[test]
    fn scalar_hessian_by_hand() {
        // n = 1, x = z = w = 1, ρ = 1:
        // ∂²_zz g = 2w² + w² + ρ = 4, ∂²_ww g = 4, ∂²_zw g = 4wz + 2wz − 2x² − x² − ρ = 2
        let t = GroundTruth::new(v(&[1.0]), 1.0).unwrap();
        let h = assemble_hessian(&t, &EstimatePair::replicated(v(&[1.0])));
        let m = h.as_matrix();
        assert_relative_eq!(m[(0, 0)], 4.0);
        assert_relative_eq!(m[(1, 1)], 4.0);
        assert_relative_eq!(m[(0, 1)], 2.0);
        assert_relative_eq!(m[(1, 0)], 2.0);
    }

    #[test]
    fn basin_membership() {
        let t = GroundTruth::new(v(&[0.0, 2.0]), 1.0).unwrap();
        let x = t.x().clone();
        assert!(in_basin(&t, &EstimatePair::replicated(x.clone())));
        assert!(!in_basin(&t, &EstimatePair::new(&x * 1.2, x.clone()).unwrap()));
        // boundary is inclusive: ‖x‖/8 = 0.25 exactly
        let p = EstimatePair::new(x.clone() + v(&[0.25, 0.0]), x.clone()).unwrap();
        assert!(in_basin(&t, &p));
        assert!(!in_basin(&t, &EstimatePair::replicated(-x)));
    }

    #[test]
    fn distance_is_sign_invariant() {
        let x = v(&[1.0, -2.0]);
        assert_eq!(EstimatePair::replicated(-x.clone()).distance_to(&x), 0.0);
        assert_eq!(EstimatePair::replicated(x.clone()).distance_to(&x), 0.0);
    }
}
