//! One seeded solver trial, shared by `solve` and `sweep`.

use prsplit_core::model::MeasurementEnsemble;
use prsplit_core::numerics::RandomStream;
use prsplit_core::solvers::{
    check_critical_point, initial_point, run_admm_finite, run_bcd_expected, run_bcd_finite, InitVariant, RhoPolicy,
    SolveResult, SolveStatus, SolverConfig, THEOREM_RHO_RELATIVE,
};
use prsplit_core::theory::{check_rate_bound, rate_constants, sample_basin_point, RateConstants};
use prsplit_core::{EstimatePair, GroundTruth};

use crate::args::{CommonArgs, InitKind, RunArgs, SolverKind, StartKind};
use crate::output::{opt_bool, opt_real, real, Table};
use crate::CliError;

/// Gaps below this fraction of the initial gap are treated as roundoff when
/// estimating the empirical rate.
pub const RATE_FLOOR_REL: f64 = 1e-10;
/// Tolerance of the critical-point check on converged finite-sample runs.
pub const CRITICAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub n: usize,
    pub m: usize,
    pub norm_x: f64,
    pub solver: SolverKind,
    pub start: StartKind,
    pub cfg: SolverConfig,
}

impl TrialSetup {
    pub fn from_args(common: &CommonArgs, run: &RunArgs, default_n: usize) -> Result<Self, CliError> {
        let n = common.n.unwrap_or(default_n);
        let m = common.m.unwrap_or(10 * n);
        if n == 0 || m == 0 {
            return Err(CliError::Usage("n and m must be >= 1".into()));
        }
        if !(common.norm_x > 0.0 && common.norm_x.is_finite()) {
            return Err(CliError::Usage("norm-x must be positive".into()));
        }
        let mut cfg = SolverConfig::for_signal_scale(common.norm_x);
        cfg.rho_policy = match (common.rho, common.rho_rel) {
            (Some(r), _) => RhoPolicy::Absolute(r),
            (None, Some(c)) => RhoPolicy::RelativeToNormXSq(c),
            (None, None) => RhoPolicy::RelativeToNormXSq(THEOREM_RHO_RELATIVE),
        };
        if let Some(k) = run.max_iter {
            cfg.max_iter = k;
        }
        if let Some(t) = run.tol_grad {
            cfg.tol_grad = t;
        }
        if let Some(t) = run.tol_step {
            cfg.tol_step = t;
        }
        cfg.init_variant = match run.init {
            InitKind::Squared => InitVariant::SpectralSquared,
            InitKind::AsWritten => InitVariant::SpectralAsWritten,
        };
        cfg.seed = common.seed;
        cfg.validate()?;
        Ok(Self { n, m, norm_x: common.norm_x, solver: run.solver, start: run.start, cfg })
    }

    fn resolved_start(&self) -> StartKind {
        match (self.start, self.solver) {
            (StartKind::Auto, SolverKind::BcdExpected) => StartKind::Basin,
            (StartKind::Auto, _) => StartKind::Spectral,
            (s, _) => s,
        }
    }

    fn needs_ensemble(&self) -> bool {
        self.solver.is_finite() || self.resolved_start() == StartKind::Spectral
    }
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub trial: u64,
    pub truth: GroundTruth,
    pub m: Option<usize>,
    pub rho: f64,
    pub result: SolveResult,
    pub rate: Option<RateConstants>,
    pub empirical_rate: Option<f64>,
    pub rate_bound_ok: Option<bool>,
    pub critical: Option<bool>,
}

impl TrialOutcome {
    pub fn final_distance(&self) -> f64 {
        self.result.final_pair.distance_to(self.truth.x())
    }

    pub fn relative_distance(&self) -> f64 {
        self.final_distance() / self.truth.norm_x()
    }
}

/// Draw order per trial: signal, ensemble (when needed), start point.
pub fn run_trial(setup: &TrialSetup, trial: u64) -> Result<TrialOutcome, CliError> {
    let mut stream = RandomStream::new(setup.cfg.seed, trial);
    let truth = GroundTruth::random(setup.n, setup.norm_x, 0.0, &mut stream)?;
    let ens =
        if setup.needs_ensemble() { Some(MeasurementEnsemble::generate(&truth, setup.m, &mut stream)?) } else { None };
    let start = match setup.resolved_start() {
        StartKind::Basin | StartKind::Auto => sample_basin_point(&truth, &mut stream),
        StartKind::Truth => EstimatePair::replicated(truth.x().clone()),
        StartKind::Spectral => {
            initial_point(ens.as_ref().expect("spectral start draws an ensemble"), &setup.cfg.init_variant)?
        }
    };

    let (result, rho) = match (setup.solver, ens.as_ref()) {
        (SolverKind::BcdExpected, _) => {
            (run_bcd_expected(&truth, &start, &setup.cfg)?, setup.cfg.rho_for(truth.norm_x_sq())?)
        }
        (SolverKind::BcdFinite, Some(e)) => {
            (run_bcd_finite(e, &start, &setup.cfg, Some(&truth))?, setup.cfg.rho_for(e.norm_x_sq_estimate())?)
        }
        (SolverKind::Admm, Some(e)) => {
            (run_admm_finite(e, &start, &setup.cfg, Some(&truth))?, setup.cfg.rho_for(e.norm_x_sq_estimate())?)
        }
        (_, None) => unreachable!("finite-sample solvers always draw an ensemble"),
    };

    let truth = truth.with_rho(rho)?;
    let rate = rate_constants(&truth).ok();
    let empirical_rate = result.trace.empirical_rate(0.0, RATE_FLOOR_REL);
    let rate_bound_ok = match (setup.solver, rate.as_ref()) {
        (SolverKind::BcdExpected, Some(rc)) => {
            Some(check_rate_bound(&result.trace, rc, 0.0, 1e-10 * truth.norm_x_sq().powi(2).max(1.0)).passed())
        }
        _ => None,
    };
    let critical = match (&ens, result.status) {
        (Some(e), SolveStatus::Converged) if setup.solver.is_finite() => {
            Some(check_critical_point(e, &result.final_pair, &result.final_dual, CRITICAL_TOL).is_critical())
        }
        _ => None,
    };
    Ok(TrialOutcome {
        trial,
        m: ens.as_ref().map(MeasurementEnsemble::m),
        truth,
        rho,
        result,
        rate,
        empirical_rate,
        rate_bound_ok,
        critical,
    })
}

pub const SUMMARY_HEADER: [&str; 19] = [
    "trial",
    "solver",
    "n",
    "m",
    "norm_x",
    "rho",
    "status",
    "iterations",
    "final_distance",
    "relative_distance",
    "final_objective",
    "final_grad_norm",
    "final_primal_gap",
    "final_dual_norm",
    "basin_violations",
    "empirical_rate",
    "theoretical_contraction",
    "rate_bound_ok",
    "critical",
];

pub fn summary_row(solver: SolverKind, o: &TrialOutcome) -> Vec<String> {
    let last = o.result.trace.last().expect("trace holds the start point");
    vec![
        o.trial.to_string(),
        solver.name().to_string(),
        o.truth.n().to_string(),
        o.m.map(|m| m.to_string()).unwrap_or_default(),
        real(o.truth.norm_x()),
        real(o.rho),
        o.result.status.as_str().to_string(),
        o.result.iterations().to_string(),
        real(o.final_distance()),
        real(o.relative_distance()),
        real(last.objective),
        real(last.grad_norm),
        real(last.primal_gap),
        real(last.dual_norm),
        o.result.trace.basin_violations().to_string(),
        opt_real(o.empirical_rate),
        opt_real(o.rate.map(|r| r.contraction)),
        opt_bool(o.rate_bound_ok),
        opt_bool(o.critical),
    ]
}

pub fn summary_table(solver: SolverKind, outcomes: &[TrialOutcome]) -> String {
    let mut t = Table::new(&SUMMARY_HEADER);
    for o in outcomes {
        t.row(summary_row(solver, o));
    }
    t.into_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{parse_with_config, Command};

    fn setup(argv: &[&str]) -> TrialSetup {
        let mut full = vec!["prsplit", "solve"];
        full.extend_from_slice(argv);
        let Command::Solve(a) = parse_with_config(full).unwrap().command else { panic!() };
        TrialSetup::from_args(&a.common, &a.run, 50).unwrap()
    }

    #[test]
    fn truth_start_takes_no_iterations() {
        let s = setup(&["--n", "6", "--start", "truth"]);
        let o = run_trial(&s, 0).unwrap();
        assert_eq!(o.result.iterations(), 0);
        assert_eq!(o.final_distance(), 0.0);
        assert_eq!(o.m, None);
    }

    #[test]
    fn expected_run_reports_rate() {
        let s = setup(&["--n", "10", "--seed", "7"]);
        let o = run_trial(&s, 3).unwrap();
        let rc = o.rate.unwrap();
        assert!((rc.contraction - 169.0 / 177.0).abs() < 1e-12);
        assert!(o.empirical_rate.unwrap() <= rc.contraction);
        assert_eq!(o.rate_bound_ok, Some(true));
        assert_eq!(summary_row(s.solver, &o).len(), SUMMARY_HEADER.len());
    }

    #[test]
    fn finite_run_checks_criticality() {
        let s = setup(&["--n", "8", "--m", "80", "--solver", "admm"]);
        let o = run_trial(&s, 0).unwrap();
        assert_eq!(o.m, Some(80));
        if o.result.status == SolveStatus::Converged {
            assert_eq!(o.critical, Some(true));
        }
    }

    #[test]
    fn invalid_settings_are_usage_errors() {
        let Command::Solve(a) = parse_with_config(["prsplit", "solve", "--n", "0"]).unwrap().command else { panic!() };
        assert!(TrialSetup::from_args(&a.common, &a.run, 50).is_err());
        let Command::Solve(a) = parse_with_config(["prsplit", "solve", "--tol-grad=-1"]).unwrap().command else {
            panic!()
        };
        assert!(TrialSetup::from_args(&a.common, &a.run, 50).is_err());
    }
}
