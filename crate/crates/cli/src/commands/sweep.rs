use super::{for_trials, trials_or};
use crate::args::SweepArgs;
use crate::output::{opt_real, real, OutDir, Table};
use crate::runner::{run_trial, TrialOutcome, TrialSetup, CRITICAL_TOL};
use crate::{CliError, Outcome};
use prsplit_core::solvers::{RhoPolicy, THEOREM_RHO_RELATIVE};

const SWEEP_HEADER: [&str; 11] = [
    "rho_rel",
    "m_ratio",
    "m",
    "trial",
    "status",
    "iterations",
    "final_distance",
    "relative_distance",
    "empirical_rate",
    "theoretical_contraction",
    "basin_violations",
];

const SWEEP_SUMMARY_HEADER: [&str; 7] =
    ["rho_rel", "m_ratio", "m", "trials", "recovery_fraction", "mean_empirical_rate", "theoretical_contraction"];

pub fn cmd_sweep(args: &SweepArgs) -> Result<Outcome, CliError> {
    let out = OutDir::prepare(&args.common.out)?;
    let base = TrialSetup::from_args(&args.common, &args.run, 50)?;
    let trials = trials_or(args.common.trials, 1)?;
    if args.common.rho.is_some() && !args.sweep_rho_rel.is_empty() {
        return Err(CliError::Usage("--rho conflicts with --sweep-rho-rel".into()));
    }
    let rho_rels = if args.sweep_rho_rel.is_empty() {
        vec![args.common.rho_rel.unwrap_or(THEOREM_RHO_RELATIVE)]
    } else {
        args.sweep_rho_rel.clone()
    };
    let m_ratios =
        if args.sweep_m_ratio.is_empty() { vec![base.m as f64 / base.n as f64] } else { args.sweep_m_ratio.clone() };
    if m_ratios.iter().any(|r| !(*r > 0.0)) {
        return Err(CliError::Usage("m ratios must be positive".into()));
    }

    let mut points = Vec::new();
    for &rho_rel in &rho_rels {
        for &ratio in &m_ratios {
            let mut setup = base.clone();
            if args.common.rho.is_none() {
                setup.cfg.rho_policy = RhoPolicy::RelativeToNormXSq(rho_rel);
            }
            setup.m = (ratio * setup.n as f64).ceil() as usize;
            setup.cfg.validate()?;
            points.push((rho_rel, ratio, setup));
        }
    }

    let mut rows = Table::new(&SWEEP_HEADER);
    let mut summary = Table::new(&SWEEP_SUMMARY_HEADER);
    for (rho_rel, ratio, setup) in &points {
        log::info!("sweep point rho_rel = {rho_rel}, m/n = {ratio}");
        let outcomes: Vec<TrialOutcome> = for_trials(trials, |t| run_trial(setup, t))?;
        for o in &outcomes {
            rows.row(vec![
                real(*rho_rel),
                real(*ratio),
                setup.m.to_string(),
                o.trial.to_string(),
                o.result.status.as_str().to_string(),
                o.result.iterations().to_string(),
                real(o.final_distance()),
                real(o.relative_distance()),
                opt_real(o.empirical_rate),
                opt_real(o.rate.map(|r| r.contraction)),
                o.result.trace.basin_violations().to_string(),
            ]);
        }
        let recovered = outcomes.iter().filter(|o| o.relative_distance() <= CRITICAL_TOL).count();
        let rates: Vec<f64> = outcomes.iter().filter_map(|o| o.empirical_rate).collect();
        let mean_rate = (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64);
        summary.row(vec![
            real(*rho_rel),
            real(*ratio),
            setup.m.to_string(),
            trials.to_string(),
            real(recovered as f64 / trials as f64),
            opt_real(mean_rate),
            opt_real(outcomes.first().and_then(|o| o.rate).map(|r| r.contraction)),
        ]);
    }
    out.write("sweep.csv", &rows.into_string())?;
    out.write("sweep_summary.csv", &summary.into_string())?;
    Ok(Outcome::Success)
}
