use log::warn;

use super::config::{InitVariant, SpectralVariant};
use crate::error::{Error, Result};
use crate::model::{EstimatePair, MeasurementEnsemble};
use crate::numerics::{top_eigenpair, Vector, DEFAULT_EIG_MAX_ITER, DEFAULT_EIG_TOL};

/// Spectral estimate of the signal (defined up to global sign).
///
/// Takes the top eigenvector of a magnitude-weighted second-moment matrix
/// and rescales it to an estimate of `‖x‖`. The eigenvector sign is made
/// canonical (largest-magnitude coordinate positive) so reruns agree.
pub fn spectral_init(ens: &MeasurementEnsemble, variant: SpectralVariant) -> Result<Vector> {
    let (m, n) = (ens.m(), ens.n());
    if m < n {
        warn!("spectral initialization with m = {m} < n = {n}; the estimate is unreliable");
    }
    let y = ens.y();
    let row_norms_sq: f64 = ens.a().row_iter().map(|r| r.norm_squared()).sum();

    let (weights, scale, norm_sq) = match variant {
        SpectralVariant::Squared => {
            let y2 = y.component_mul(y);
            let energy = y2.sum();
            (y2, 1.0 / m as f64, n as f64 * energy / row_norms_sq)
        }
        SpectralVariant::AsWritten => (y.clone(), 1.0, y.sum() / row_norms_sq),
    };
    let gram = ens.weighted_gram(&weights, scale, 0.0);
    let (_, mut v) = top_eigenpair(&gram, DEFAULT_EIG_TOL, DEFAULT_EIG_MAX_ITER)?;

    let pivot = v.iamax();
    if v[pivot] < 0.0 {
        v.neg_mut();
    }
    Ok(v * norm_sq.sqrt())
}

/// Starting pair for a finite-sample run.
pub fn initial_point(ens: &MeasurementEnsemble, init: &InitVariant) -> Result<EstimatePair> {
    match init {
        InitVariant::Given(pair) => {
            if pair.n() != ens.n() {
                return Err(Error::DimensionMismatch { expected: ens.n(), found: pair.n() });
            }
            Ok(pair.clone())
        }
        other => {
            let variant = other.spectral_variant().expect("spectral variant");
            Ok(EstimatePair::replicated(spectral_init(ens, variant)?))
        }
    }
}
