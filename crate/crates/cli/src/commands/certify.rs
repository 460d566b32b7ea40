use prsplit_core::model::g_expected;
use prsplit_core::numerics::RandomStream;
use prsplit_core::solvers::run_bcd_expected;
use prsplit_core::theory::{
    certify_block_lipschitz, certify_derivatives, certify_descent_inequalities, certify_strong_convexity,
    check_rate_bound, gap_ratios, mc_expected_objective, no_escape_certificate, no_escape_geometric_check,
    rate_constants, sample_basin_point, Bound, CertificateReport, WorstTracker,
};
use prsplit_core::{EstimatePair, GroundTruth, SolverConfig};
use rayon::prelude::*;

use crate::args::CertifyArgs;
use crate::output::{real, OutDir, Table};
use crate::{CliError, Outcome};

/// Expected-BCD runs behind the rate rows.
const RATE_RUNS: u64 = 10;
/// Gap ratios are only formed while the gap exceeds this multiple of `‖x‖⁴`.
const RATIO_FLOOR: f64 = 1e-8;
/// Monte Carlo deviations beyond this many standard errors count as excursions.
const MC_SIGMAS: f64 = 4.0;

/// Distinct substreams keep every certificate reproducible on its own.
mod substream {
    pub const TRUTH: u64 = 0;
    pub const CONVEXITY: u64 = 1;
    pub const LIPSCHITZ: u64 = 2;
    pub const DESCENT: u64 = 3;
    pub const DERIVATIVES: u64 = 4;
    pub const GEOMETRY: u64 = 5;
    pub const RATE: u64 = 100;
    pub const MONTE_CARLO: u64 = 1000;
}

enum Row {
    Done(CertificateReport),
    Skipped { name: &'static str, threshold: f64, reason: String },
}

fn skipped(name: &'static str, threshold: f64, err: impl std::fmt::Display) -> Row {
    let reason = err.to_string();
    log::error!("{name} skipped: {reason}");
    Row::Skipped { name, threshold, reason }
}

fn rate_rows(truth: &GroundTruth, seed: u64, notes: &mut Vec<(String, String, f64)>) -> Vec<Row> {
    let rc = match rate_constants(truth) {
        Ok(rc) => rc,
        Err(e) => {
            let nx2 = truth.norm_x_sq();
            let formula = 1.0 - nx2 / (12.0 * nx2 + 3.0 * truth.rho());
            return vec![skipped("rate_bound", 0.0, &e), skipped("gap_ratio", formula, &e)];
        }
    };
    let cfg = SolverConfig {
        rho_policy: prsplit_core::RhoPolicy::Absolute(truth.rho()),
        ..SolverConfig::for_signal_scale(truth.norm_x())
    };
    let scale = truth.norm_x_sq() * truth.norm_x_sq();
    let mut bound = WorstTracker::new(Bound::AtMost);
    let mut ratios = WorstTracker::new(Bound::AtMost);
    for run in 0..RATE_RUNS {
        let mut stream = RandomStream::new(seed, substream::RATE + run);
        let start = sample_basin_point(truth, &mut stream);
        let res = match run_bcd_expected(truth, &start, &cfg) {
            Ok(r) => r,
            Err(e) => return vec![skipped("rate_bound", 0.0, &e), skipped("gap_ratio", rc.contraction, &e)],
        };
        let report = check_rate_bound(&res.trace, &rc, 0.0, 0.0);
        bound.observe(report.worst_value, "run", || vec![run as f64]);
        for (k, r) in gap_ratios(&res.trace, 0.0, RATIO_FLOOR * scale).into_iter().enumerate() {
            ratios.observe(r, "ratio", || vec![run as f64, k as f64]);
        }
    }
    notes.push(("rate_bound".into(), "contraction".into(), rc.contraction));
    notes.push(("rate_bound".into(), "sigma".into(), rc.sigma));
    notes.push(("rate_bound".into(), "l_block".into(), rc.l_block));
    notes.push(("rate_bound".into(), "distance_prefactor_proof".into(), rc.distance_bound(0, 1.0)));
    notes.push(("rate_bound".into(), "distance_prefactor_printed".into(), rc.distance_bound_as_printed(0, 1.0)));
    vec![
        Row::Done(bound.finish("rate_bound", 0.0, 1e-10 * scale.max(1.0))),
        Row::Done(ratios.finish("gap_ratio", rc.contraction, 1e-9)),
    ]
}

fn monte_carlo_row(truth: &GroundTruth, args: &CertifyArgs) -> Row {
    let n = truth.n();
    let scale = truth.norm_x() / (n as f64).sqrt();
    let results: Result<Vec<(f64, f64, f64)>, _> = (0..args.mc_points as u64)
        .into_par_iter()
        .map(|i| {
            let mut stream = RandomStream::new(args.common.seed, substream::MONTE_CARLO + i);
            let p = EstimatePair { z: stream.gaussian_vector(n) * scale, w: stream.gaussian_vector(n) * scale };
            let (mean, se) = mc_expected_objective(truth, &p, args.mc_samples, &mut stream)?;
            Ok::<_, prsplit_core::Error>((g_expected(truth, &p), mean, se))
        })
        .collect();
    let results = match results {
        Ok(r) => r,
        Err(e) => return skipped("mc_excursions", 1.0, e),
    };
    let excursions = results.iter().filter(|(g, mean, se)| (g - mean).abs() > MC_SIGMAS * se).count();
    let mut tracker = WorstTracker::new(Bound::AtMost);
    tracker.observe(excursions as f64, "excursions", Vec::new);
    let mut report = tracker.finish("mc_excursions", 1.0, 0.0);
    report.samples = results.len();
    Row::Done(report)
}

pub fn cmd_certify(args: &CertifyArgs) -> Result<Outcome, CliError> {
    let out = OutDir::prepare(&args.common.out)?;
    let n = args.common.n.unwrap_or(8);
    let norm_x = args.common.norm_x;
    if n == 0 || !(norm_x > 0.0) {
        return Err(CliError::Usage("n must be >= 1 and norm-x positive".into()));
    }
    let seed = args.common.seed;
    let truth = GroundTruth::random(n, norm_x, 0.0, &mut RandomStream::new(seed, substream::TRUTH))?;
    let rho = match (args.common.rho, args.common.rho_rel) {
        (Some(r), _) => r,
        (None, c) => c.unwrap_or(prsplit_core::solvers::THEOREM_RHO_RELATIVE) * truth.norm_x_sq(),
    };
    let truth = truth.with_rho(rho)?;
    let c = rho / truth.norm_x_sq();
    let stream = |id| RandomStream::new(seed, id);
    let mut notes: Vec<(String, String, f64)> = Vec::new();
    let mut rows = Vec::new();

    match certify_strong_convexity(&truth, args.samples, &mut stream(substream::CONVEXITY)) {
        Ok(r) => {
            for (k, v) in &r.notes {
                notes.push((r.name.clone(), k.clone(), *v));
            }
            rows.push(Row::Done(r));
        }
        Err(e) => rows.push(skipped("strong_convexity", truth.norm_x_sq() / 3.0, e)),
    }
    rows.push(Row::Done(certify_block_lipschitz(&truth, args.pair_samples, &mut stream(substream::LIPSCHITZ))));
    rows.push(Row::Done(certify_descent_inequalities(&truth, args.pair_samples, &mut stream(substream::DESCENT))));
    let (grad, hess) = certify_derivatives(&truth, args.fd_points, &mut stream(substream::DERIVATIVES));
    rows.push(Row::Done(grad));
    rows.push(Row::Done(hess));

    match no_escape_certificate(c, args.grid_step) {
        Ok(r) => {
            notes.push(("no_escape".into(), "rho_relative".into(), c));
            notes.push(("no_escape".into(), "grid_points".into(), r.grid_points as f64));
            notes.push(("no_escape".into(), "numerator_decreases".into(), r.numerator_decreases as f64));
            notes.push(("no_escape".into(), "denominator_increases".into(), r.denominator_increases as f64));
            rows.push(Row::Done(r.h_min));
            rows.push(Row::Done(r.rc_max));
            match no_escape_geometric_check(c, args.grid_step, n.max(2), norm_x, &mut stream(substream::GEOMETRY)) {
                Ok(g) => rows.push(Row::Done(g)),
                Err(e) => rows.push(skipped("no_escape_geometric", 1e-10, e)),
            }
        }
        Err(e) => {
            rows.push(skipped("no_escape_h_min", 63.0 / 64.0, &e));
            rows.push(skipped("no_escape_rc_max", 27.0 / 8.0, &e));
            rows.push(skipped("no_escape_geometric", 1e-10, &e));
        }
    }
    rows.extend(rate_rows(&truth, seed, &mut notes));
    rows.push(monte_carlo_row(&truth, args));

    let mut table = Table::new(&["name", "samples", "worst_value", "threshold", "margin", "pass"]);
    let mut witnesses = Table::new(&["name", "rank", "value", "label", "point"]);
    let mut all_pass = true;
    for row in &rows {
        match row {
            Row::Done(r) => {
                all_pass &= r.passed();
                if !r.passed() {
                    log::error!("{} failed: worst {} vs threshold {}", r.name, r.worst_value, r.threshold);
                }
                table.row(vec![
                    r.name.clone(),
                    r.samples.to_string(),
                    real(r.worst_value),
                    real(r.threshold),
                    real(r.margin()),
                    r.passed().to_string(),
                ]);
                for (rank, w) in r.witnesses.iter().enumerate() {
                    let point: Vec<String> = w.point.iter().map(|v| real(*v)).collect();
                    witnesses.row(vec![
                        r.name.clone(),
                        rank.to_string(),
                        real(w.value),
                        w.label.clone(),
                        point.join(";"),
                    ]);
                }
            }
            Row::Skipped { name, threshold, reason } => {
                all_pass = false;
                table.row(vec![
                    name.to_string(),
                    "0".into(),
                    String::new(),
                    real(*threshold),
                    String::new(),
                    "skipped".into(),
                ]);
                notes.push((name.to_string(), format!("skipped: {}", reason.replace(',', ";")), f64::NAN));
            }
        }
    }
    let mut note_table = Table::new(&["certificate", "key", "value"]);
    for (name, key, value) in notes {
        note_table.row(vec![name, key, real(value)]);
    }
    out.write("certificates.csv", &table.into_string())?;
    out.write("witnesses.csv", &witnesses.into_string())?;
    out.write("certificate_notes.csv", &note_table.into_string())?;
    Ok(if all_pass { Outcome::Success } else { Outcome::AssertionFailed })
}
