use crate::error::{Error, Result};
use crate::model::{EstimatePair, GroundTruth};
use crate::numerics::RandomStream;

pub const MIN_MC_SAMPLES: usize = 1000;

/// Monte Carlo estimate of `E[½(y² − aᵀz·aᵀw)²] + ρ/2‖z − w‖²` over
/// `a ~ N(0, I)`, `y = |aᵀx|`, with its standard error.
///
/// This is an independent oracle for [`crate::model::g_expected`].
pub fn mc_expected_objective(
    truth: &GroundTruth,
    p: &EstimatePair,
    samples: usize,
    stream: &mut RandomStream,
) -> Result<(f64, f64)> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {samples}"
        )));
    }
    if p.n() != truth.n() {
        return Err(Error::DimensionMismatch { expected: truth.n(), found: p.n() });
    }
    let x = truth.x();
    let n = truth.n();
    let mut a = vec![0.0; n];
    // Welford running mean and sum of squared deviations
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=samples {
        a.iter_mut().for_each(|v| *v = stream.gaussian());
        let (mut ax, mut az, mut aw) = (0.0, 0.0, 0.0);
        for i in 0..n {
            ax += a[i] * x[i];
            az += a[i] * p.z[i];
            aw += a[i] * p.w[i];
        }
        let r = ax * ax - az * aw;
        let v = 0.5 * r * r;
        let delta = v - mean;
        mean += delta / k as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (samples - 1) as f64;
    let penalty = 0.5 * truth.rho() * p.primal_gap().powi(2);
    Ok((mean + penalty, (var / samples as f64).sqrt()))
}
