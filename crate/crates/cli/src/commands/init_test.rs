use super::{for_trials, trials_or};
use crate::args::InitTestArgs;
use crate::output::{real, OutDir, Table};
use crate::{CliError, Outcome};
use prsplit_core::model::{MeasurementEnsemble, BASIN_RADIUS};
use prsplit_core::numerics::RandomStream;
use prsplit_core::solvers::{spectral_init, SpectralVariant};
use prsplit_core::GroundTruth;

/// `⌈c0 · n · ln n⌉`, at least 1.
pub fn default_measurements(n: usize, c0: f64) -> usize {
    ((c0 * n as f64 * (n as f64).ln()).ceil() as usize).max(1)
}

struct InitTrial {
    squared: f64,
    as_written: f64,
}

fn relative_distance(estimate: &prsplit_core::Vector, truth: &GroundTruth) -> f64 {
    let x = truth.x();
    (estimate - x).norm().min((estimate + x).norm()) / truth.norm_x()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

pub fn cmd_init_test(args: &InitTestArgs) -> Result<Outcome, CliError> {
    let out = OutDir::prepare(&args.common.out)?;
    let n = args.common.n.unwrap_or(64);
    if n == 0 {
        return Err(CliError::Usage("n must be >= 1".into()));
    }
    let explicit_m = args.common.m;
    let m = explicit_m.unwrap_or_else(|| default_measurements(n, args.c0));
    if m == 0 {
        return Err(CliError::Usage("m must be >= 1".into()));
    }
    let trials = trials_or(args.common.trials, 100)?;
    let (seed, norm_x) = (args.common.seed, args.common.norm_x);
    if m < n {
        log::warn!("m = {m} < n = {n}: outside the oversampled regime, results are informational");
    }

    let results = for_trials(trials, |t| {
        let mut stream = RandomStream::new(seed, t);
        let truth = GroundTruth::random(n, norm_x, 0.0, &mut stream)?;
        let ens = MeasurementEnsemble::generate(&truth, m, &mut stream)?;
        Ok(InitTrial {
            squared: relative_distance(&spectral_init(&ens, SpectralVariant::Squared)?, &truth),
            as_written: relative_distance(&spectral_init(&ens, SpectralVariant::AsWritten)?, &truth),
        })
    })?;

    let mut per_trial =
        Table::new(&["trial", "rel_dist_squared", "rel_dist_as_written", "in_basin_squared", "in_basin_as_written"]);
    for (t, r) in results.iter().enumerate() {
        per_trial.row(vec![
            t.to_string(),
            real(r.squared),
            real(r.as_written),
            (r.squared <= BASIN_RADIUS).to_string(),
            (r.as_written <= BASIN_RADIUS).to_string(),
        ]);
    }

    let mut summary = Table::new(&["variant", "n", "m", "c0", "trials", "success_fraction", "median_rel_dist"]);
    let c0 = if explicit_m.is_some() { String::new() } else { real(args.c0) };
    for (name, pick) in [("squared", 0), ("as-written", 1)] {
        let mut d: Vec<f64> = results.iter().map(|r| if pick == 0 { r.squared } else { r.as_written }).collect();
        let hits = d.iter().filter(|v| **v <= BASIN_RADIUS).count();
        let med = median(&mut d);
        summary.row(vec![
            name.to_string(),
            n.to_string(),
            m.to_string(),
            c0.clone(),
            trials.to_string(),
            real(hits as f64 / trials as f64),
            real(med),
        ]);
        log::info!("{name}: {hits}/{trials} in the basin, median relative distance {med:.3}");
    }
    out.write("init_test.csv", &per_trial.into_string())?;
    out.write("init_summary.csv", &summary.into_string())?;
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measurement_rule() {
        assert_eq!(default_measurements(64, 3.0), 799);
        assert_eq!(default_measurements(1, 3.0), 1);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
