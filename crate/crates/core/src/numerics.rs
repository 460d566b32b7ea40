//! Seeded sampling and the dense linear-algebra kernel.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;

pub const DEFAULT_EIG_TOL: f64 = 1e-12;
pub const DEFAULT_EIG_MAX_ITER: usize = 100_000;

/// Seed used for the start vector of power iterations.
const POWER_START_SEED: u64 = 0x005e_ed0f_9e11;

/// A reproducible Gaussian source.
///
/// Backed by ChaCha20 with the substream id mapped onto the cipher's stream
/// counter, so `(seed, substream_id)` pins the output sequence regardless of
/// which thread consumes it.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    substream_id: u64,
    rng: ChaCha20Rng,
}

impl RandomStream {
    pub fn new(seed: u64, substream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(substream_id);
        Self { seed, substream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream_id(&self) -> u64 {
        self.substream_id
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// `n` independent standard normal draws.
    pub fn gaussian_vector(&mut self, n: usize) -> Vector {
        DVector::from_fn(n, |_, _| self.gaussian())
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.rng.random_range(0..len)
    }

    /// Uniform direction on the unit sphere in `n` dimensions.
    pub fn unit_vector(&mut self, n: usize) -> Vector {
        loop {
            let g = self.gaussian_vector(n);
            let norm = g.norm();
            if norm > 0.0 {
                return g / norm;
            }
        }
    }

    /// Uniform point in the closed ball of `radius` around `center`.
    pub fn uniform_in_ball(&mut self, center: &Vector, radius: f64) -> Vector {
        let n = center.len();
        let dir = self.unit_vector(n);
        let r = radius * self.uniform().powf(1.0 / n as f64);
        center + dir * r
    }
}

/// Dense symmetric matrix; symmetry is enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat(DMatrix<f64>);

impl SymMat {
    /// Symmetrizes `m` as `(m + mᵀ)/2`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let t = m.transpose();
        Ok(Self((m + t) * 0.5))
    }

    /// Wraps a matrix the caller has built symmetric (entries mirrored exactly).
    pub(crate) fn from_symmetric_unchecked(m: DMatrix<f64>) -> Self {
        debug_assert_eq!(m, m.transpose());
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        &self.0 * v
    }

    pub fn quadratic_form(&self, v: &Vector) -> f64 {
        v.dot(&(&self.0 * v))
    }

    /// Lower bound on the spectrum from Gershgorin discs.
    fn gershgorin_lower(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| self.0[(i, j)].abs()).sum();
                self.0[(i, i)] - off
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solves `M z = b` for symmetric positive definite `M` by Cholesky.
pub fn spd_solve(m: &SymMat, b: &Vector) -> Result<Vector> {
    if b.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: b.len() });
    }
    let chol = Cholesky::new(m.0.clone()).ok_or(Error::NotPositiveDefinite)?;
    Ok(chol.solve(b))
}

/// Largest (algebraic) eigenvalue and a unit eigenvector by shifted power
/// iteration.
///
/// The shift makes `M + cI` positive semidefinite (Gershgorin bound), so the
/// dominant eigenpair of the shifted matrix is the top one of `M`. Stops once
/// `‖Mv − λv‖ ≤ tol·‖M‖_F`.
pub fn top_eigenpair(m: &SymMat, tol: f64, max_iter: usize) -> Result<(f64, Vector)> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let scale = m.frobenius_norm();
    let shift = (-m.gershgorin_lower()).max(0.0);
    let mut v = RandomStream::new(POWER_START_SEED, n as u64).unit_vector(n);

    for _ in 0..max_iter {
        let mv = m.mul_vec(&v);
        let lambda = v.dot(&mv);
        let residual = (&mv - &v * lambda).norm();
        if residual <= tol * scale {
            return Ok((lambda, v));
        }
        let next = mv + &v * shift;
        let norm = next.norm();
        if norm == 0.0 {
            break;
        }
        v = next / norm;
    }
    Err(Error::NoConvergence { max_iter })
}

/// Smallest eigenvalue of a symmetric matrix (full symmetric QR iteration).
pub fn min_eigenvalue(m: &SymMat, tol: f64) -> Result<f64> {
    let eig = SymmetricEigen::try_new(m.0.clone(), tol, DEFAULT_EIG_MAX_ITER)
        .ok_or(Error::NoConvergence { max_iter: DEFAULT_EIG_MAX_ITER })?;
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Neumaier-compensated summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}
