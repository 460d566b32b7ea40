//! Algebraic check that one expected-BCD block step cannot leave the basin.
//!
//! With `‖w‖ = β‖x‖`, `cos∠(w, x) = α` and `ρ = C‖x‖²`, the updated block
//! satisfies `2⟨z⁺, x⟩ − ‖z⁺‖² = h(α, β, C)·‖x‖²`, and staying within
//! `‖x‖/8` of `x` is `h ≥ 63/64`.

use super::{Bound, CertificateReport, WorstTracker};
use crate::error::{Error, Result};
use crate::model::GroundTruth;
use crate::numerics::{RandomStream, Vector};
use crate::solvers::{bcd_expected_step_z, THEOREM_RHO_RELATIVE};

/// `1 − (1/8)²`.
pub const BASIN_LEVEL: f64 = 63.0 / 64.0;
const BETA_MIN: f64 = 7.0 / 8.0;
const BETA_MAX: f64 = 9.0 / 8.0;
const MAX_GRID_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasinCoordinates {
    /// cosine between `w` and `x`
    pub alpha: f64,
    /// `‖w‖/‖x‖`
    pub beta: f64,
    /// `ρ/‖x‖²`
    pub c: f64,
}

impl BasinCoordinates {
    /// Smallest feasible cosine for a given norm ratio.
    pub fn alpha_lower(beta: f64) -> f64 {
        beta / 2.0 + 63.0 / (128.0 * beta)
    }

    pub fn is_feasible(&self) -> bool {
        (BETA_MIN..=BETA_MAX).contains(&self.beta)
            && self.alpha <= 1.0
            && 2.0 * self.alpha * self.beta - self.beta * self.beta >= BASIN_LEVEL * (1.0 - 1e-15)
    }
}

/// `h(α, β, C) = 2⟨z⁺, x⟩/‖x‖² − ‖z⁺‖²/‖x‖²`.
pub fn h_value(p: BasinCoordinates) -> f64 {
    let BasinCoordinates { alpha: a, beta: b, c } = p;
    let along = 1.0 + c + 2.0 * a * a;
    let wide = 3.0 * b * b + c;
    let narrow = b * b + c;
    let perp = 1.0 - a * a;
    let cross = 2.0 * along * a * b / wide + 4.0 * a * b * perp / narrow;
    let norm = b * b * along * along / (wide * wide) + 4.0 * a * a * b * b * perp / (narrow * narrow);
    cross - norm
}

fn rc_parts(a: f64, b: f64) -> (f64, f64) {
    let b2 = b * b;
    let num = 9.0 * a * b2 * b2 - 9.0 * a * b2 + b + 8.0 * a * a * b - 3.0 * b2 * b - 6.0 * a * a * b2 * b;
    let den = 3.0 * (a - b).powi(2) * (a + b) - (a * a - 1.0) * (3.0 * a - b);
    (num, den)
}

/// Penalty level above which `∂h/∂C ≤ 0`; `None` at the removable
/// singularity `α = β = 1`.
pub fn rc_bound(alpha: f64, beta: f64) -> Option<f64> {
    if alpha == 1.0 && beta == 1.0 {
        return None;
    }
    let (num, den) = rc_parts(alpha, beta);
    Some(num / den)
}

/// Feasible `(α, β)` grid: `β` steps from 7/8 to 9/8 (endpoint included);
/// for each `β`, `α` steps up from its lower bound and `α = 1` is appended.
pub fn feasible_grid(step: f64) -> Result<Vec<(f64, f64)>> {
    if !(step > 0.0 && step <= MAX_GRID_STEP) {
        return Err(Error::InvalidConfig(format!("grid step must lie in (0, {MAX_GRID_STEP}], got {step}")));
    }
    let n_beta = ((BETA_MAX - BETA_MIN) / step).round() as usize;
    let mut grid = Vec::new();
    for i in 0..=n_beta {
        let beta = if i == n_beta { BETA_MAX } else { BETA_MIN + i as f64 * step };
        let lower = BasinCoordinates::alpha_lower(beta).min(1.0);
        let mut j = 0usize;
        loop {
            let alpha = lower + j as f64 * step;
            if alpha >= 1.0 - 1e-12 {
                break;
            }
            grid.push((alpha, beta));
            j += 1;
        }
        grid.push((1.0, beta));
    }
    if grid.is_empty() {
        return Err(Error::InfeasibleRegion);
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoEscapeReport {
    /// `min h ≥ 63/64`
    pub h_min: CertificateReport,
    /// `max R_C ≤ 27/8`, singular point excluded
    pub rc_max: CertificateReport,
    pub grid_points: usize,
    /// Adjacent grid pairs (along `α`) where the numerator of `R_C` decreases.
    pub numerator_decreases: usize,
    /// Adjacent grid pairs (along `α`) where the denominator of `R_C` increases.
    pub denominator_increases: usize,
}

impl NoEscapeReport {
    pub fn passed(&self) -> bool {
        self.h_min.passed() && self.rc_max.passed()
    }
}

/// Evaluates `h(α, β, c)` and `R_C` on the feasible grid.
pub fn no_escape_certificate(c: f64, grid_step: f64) -> Result<NoEscapeReport> {
    if !(c >= THEOREM_RHO_RELATIVE) {
        return Err(Error::RhoTooSmall { rho: c, required: THEOREM_RHO_RELATIVE });
    }
    let grid = feasible_grid(grid_step)?;

    let mut h_tracker = WorstTracker::new(Bound::AtLeast);
    let mut rc_tracker = WorstTracker::new(Bound::AtMost);
    for &(alpha, beta) in &grid {
        let h = h_value(BasinCoordinates { alpha, beta, c });
        h_tracker.observe(h, "h", || vec![alpha, beta, c]);
        if let Some(r) = rc_bound(alpha, beta) {
            rc_tracker.observe(r, "rc", || vec![alpha, beta]);
        }
    }

    // grid rows share β and are ordered by increasing α
    let mut numerator_decreases = 0;
    let mut denominator_increases = 0;
    for pair in grid.windows(2) {
        let ((a0, b0), (a1, b1)) = (pair[0], pair[1]);
        if b0 != b1 {
            continue;
        }
        let (n0, d0) = rc_parts(a0, b0);
        let (n1, d1) = rc_parts(a1, b1);
        numerator_decreases += usize::from(n1 < n0);
        denominator_increases += usize::from(d1 > d0);
    }

    Ok(NoEscapeReport {
        h_min: h_tracker.finish("no_escape_h_min", BASIN_LEVEL, 1e-9),
        rc_max: rc_tracker.finish("no_escape_rc_max", THEOREM_RHO_RELATIVE, 1e-9),
        grid_points: grid.len(),
        numerator_decreases,
        denominator_increases,
    })
}

/// Cross-checks `h` against an actual block step.
///
/// For every grid point, builds `w` with the prescribed `(α, β)` around a
/// random `x` of norm `norm_x` in `n ≥ 2` dimensions, takes the exact
/// `z`-update and compares `2⟨z⁺, x⟩ − ‖z⁺‖²` with `h·‖x‖²`. Returns the
/// report of worst relative mismatches (threshold `1e-10`).
pub fn no_escape_geometric_check(
    c: f64,
    grid_step: f64,
    n: usize,
    norm_x: f64,
    stream: &mut RandomStream,
) -> Result<CertificateReport> {
    if n < 2 {
        return Err(Error::InvalidConfig("geometric check needs n >= 2".into()));
    }
    let grid = feasible_grid(grid_step)?;
    let truth = GroundTruth::random(n, norm_x, c * norm_x * norm_x, stream)?;
    let x_hat = truth.x() / norm_x;
    let u = {
        let g = stream.gaussian_vector(n);
        let v = &g - &x_hat * x_hat.dot(&g);
        v.normalize()
    };

    let mut tracker = WorstTracker::new(Bound::AtMost);
    for &(alpha, beta) in &grid {
        let sine = (1.0 - alpha * alpha).max(0.0).sqrt();
        let w: Vector = (&x_hat * alpha + &u * sine) * (beta * norm_x);
        let z = bcd_expected_step_z(&truth, &w, truth.rho());
        let geometric = 2.0 * z.dot(truth.x()) - z.norm_squared();
        let algebraic = h_value(BasinCoordinates { alpha, beta, c }) * truth.norm_x_sq();
        let rel = (geometric - algebraic).abs() / algebraic.abs().max(f64::MIN_POSITIVE);
        tracker.observe(rel, "rel_err", || vec![alpha, beta]);
    }
    Ok(tracker.finish("no_escape_geometric", 1e-10, 0.0))
}
