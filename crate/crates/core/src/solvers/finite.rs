//! ADMM and BCD on the finite-sample objective.
//!
//! For fixed `w`, `f` is quadratic in `z`, so each block update is the SPD
//! system obtained by zeroing the block gradient of the augmented Lagrangian
//! `L = f + ⟨λ, z − w⟩ + ρ/2‖z − w‖²`:
//!
//! ```text
//! [1/(2m) Σ (a_kᵀw)² a_k a_kᵀ + ρI] z = 1/(2m) Σ y_k² (a_kᵀw) a_k − λ + ρw
//! [1/(2m) Σ (a_kᵀz)² a_k a_kᵀ + ρI] w = 1/(2m) Σ y_k² (a_kᵀz) a_k + λ + ρz
//! ```

use super::config::SolverConfig;
use super::trace::{IterateTrace, SolveResult, SolveStatus, TraceRecord};
use crate::error::{Error, Result};
use crate::model::{f_finite, grad_f_finite, in_basin, EstimatePair, GroundTruth, MeasurementEnsemble};
use crate::numerics::{spd_solve, Vector};

/// `L(z, w, λ)` for penalty `rho`.
pub fn augmented_lagrangian(ens: &MeasurementEnsemble, p: &EstimatePair, dual: &Vector, rho: f64) -> f64 {
    let diff = &p.z - &p.w;
    f_finite(ens, p) + dual.dot(&diff) + 0.5 * rho * diff.norm_squared()
}

/// Minimizes `L` over one block with the other block fixed at `other`.
/// `sign` is `+1` for the `z` block and `−1` for the `w` block.
fn block_update(ens: &MeasurementEnsemble, other: &Vector, dual: &Vector, rho: f64, sign: f64) -> Result<Vector> {
    let a_other = ens.a() * other;
    let weights = a_other.component_mul(&a_other);
    let scale = 1.0 / (2.0 * ens.m() as f64);
    let op = ens.weighted_gram(&weights, scale, rho);
    let y2 = ens.y().component_mul(ens.y());
    let rhs = ens.a().tr_mul(&y2.component_mul(&a_other)) * scale - dual * sign + other * rho;
    spd_solve(&op, &rhs).map_err(|e| match e {
        // ρ > 0 makes the operator positive definite
        Error::NotPositiveDefinite => Error::Precondition("block operator lost definiteness; is rho > 0?".into()),
        other => other,
    })
}

fn primal_updates(ens: &MeasurementEnsemble, pair: &EstimatePair, dual: &Vector, rho: f64) -> Result<EstimatePair> {
    if pair.n() != ens.n() || dual.len() != ens.n() {
        return Err(Error::DimensionMismatch {
            expected: ens.n(),
            found: if pair.n() != ens.n() { pair.n() } else { dual.len() },
        });
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidConfig(format!("rho must be > 0, got {rho}")));
    }
    let z = block_update(ens, &pair.w, dual, rho, 1.0)?;
    let w = block_update(ens, &z, dual, rho, -1.0)?;
    Ok(EstimatePair { z, w })
}

/// One ADMM sweep: `z`-minimization, `w`-minimization, then
/// `λ ← λ + ρ(z⁺ − w⁺)`.
pub fn admm_finite_step(
    ens: &MeasurementEnsemble,
    pair: &EstimatePair,
    dual: &Vector,
    rho: f64,
) -> Result<(EstimatePair, Vector)> {
    let next = primal_updates(ens, pair, dual, rho)?;
    let dual_next = dual + (&next.z - &next.w) * rho;
    Ok((next, dual_next))
}

/// One BCD sweep on `f + ρ/2‖z − w‖²`, i.e. the ADMM sweep with `λ = 0`.
pub fn bcd_finite_step(ens: &MeasurementEnsemble, pair: &EstimatePair, rho: f64) -> Result<EstimatePair> {
    primal_updates(ens, pair, &Vector::zeros(ens.n()), rho)
}

fn record(
    ens: &MeasurementEnsemble,
    p: &EstimatePair,
    dual: &Vector,
    rho: f64,
    truth: Option<&GroundTruth>,
    iter: usize,
) -> TraceRecord {
    let (fz, fw) = grad_f_finite(ens, p);
    let diff = &p.z - &p.w;
    let coupling = dual + &diff * rho;
    let gz = fz + &coupling;
    let gw = fw - &coupling;
    TraceRecord {
        iter,
        objective: augmented_lagrangian(ens, p, dual, rho),
        grad_norm: (gz.norm_squared() + gw.norm_squared()).sqrt(),
        primal_gap: diff.norm(),
        dual_norm: dual.norm(),
        dist_to_truth: truth.map(|t| p.distance_to(t.x())),
        in_basin: truth.map(|t| in_basin(t, p)),
    }
}

fn run_finite(
    ens: &MeasurementEnsemble,
    start: &EstimatePair,
    cfg: &SolverConfig,
    truth: Option<&GroundTruth>,
    dual_update: bool,
) -> Result<SolveResult> {
    cfg.validate()?;
    if start.n() != ens.n() {
        return Err(Error::DimensionMismatch { expected: ens.n(), found: start.n() });
    }
    if !start.is_finite() {
        return Err(Error::InvalidConfig("start point must be finite".into()));
    }
    // the penalty never peeks at the truth
    let rho = cfg.rho_for(ens.norm_x_sq_estimate())?;

    let mut pair = start.clone();
    let mut dual = Vector::zeros(ens.n());
    let mut trace = IterateTrace::default();
    let first = record(ens, &pair, &dual, rho, truth, 0);
    let mut status = if first.grad_norm <= cfg.tol_grad && first.primal_gap <= cfg.tol_step {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIterReached
    };
    trace.push(first);

    if status != SolveStatus::Converged {
        for iter in 1..=cfg.max_iter {
            let next = primal_updates(ens, &pair, &dual, rho)?;
            if dual_update {
                dual += (&next.z - &next.w) * rho;
            }
            let step = ((&next.z - &pair.z).norm_squared() + (&next.w - &pair.w).norm_squared()).sqrt();
            pair = next;
            let rec = record(ens, &pair, &dual, rho, truth, iter);
            let done = rec.primal_gap.max(step) <= cfg.tol_step;
            trace.push(rec);
            if done {
                status = SolveStatus::Converged;
                break;
            }
        }
    }

    Ok(SolveResult { final_pair: pair, final_dual: dual, status, trace })
}

/// ADMM from `start` with `λ⁰ = 0`. Stops when `max(‖z − w‖, step) ≤ tol_step`.
///
/// `ρ` is resolved against the estimate `(1/m)Σy_k²` of `‖x‖²`; `truth`, when
/// given, only feeds the distance and basin columns of the trace.
/// `cfg.dual_update = false` suppresses the multiplier update.
pub fn run_admm_finite(
    ens: &MeasurementEnsemble,
    start: &EstimatePair,
    cfg: &SolverConfig,
    truth: Option<&GroundTruth>,
) -> Result<SolveResult> {
    run_finite(ens, start, cfg, truth, cfg.dual_update)
}

/// BCD on `f + ρ/2‖z − w‖²`: the ADMM driver with `λ` pinned at zero.
pub fn run_bcd_finite(
    ens: &MeasurementEnsemble,
    start: &EstimatePair,
    cfg: &SolverConfig,
    truth: Option<&GroundTruth>,
) -> Result<SolveResult> {
    run_finite(ens, start, cfg, truth, false)
}
