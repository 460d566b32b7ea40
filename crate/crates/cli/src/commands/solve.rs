use super::{for_trials, trials_or};
use crate::args::{SolveArgs, SolverKind};
use crate::output::{trace_csv, OutDir};
use crate::plot::distance_svg;
use crate::runner::{run_trial, summary_table, TrialOutcome, TrialSetup};
use crate::{CliError, Outcome};

pub fn cmd_solve(args: &SolveArgs) -> Result<Outcome, CliError> {
    let out = OutDir::prepare(&args.common.out)?;
    let setup = TrialSetup::from_args(&args.common, &args.run, 50)?;
    let trials = trials_or(args.common.trials, 1)?;
    log::info!("solve: {} trial(s) of {} at n = {}", trials, setup.solver.name(), setup.n);

    let outcomes = for_trials(trials, |t| run_trial(&setup, t))?;
    for o in &outcomes {
        out.write(&format!("trace_{}.csv", o.trial), &trace_csv(&o.result.trace))?;
        if args.run.plot {
            out.write(&format!("trace_{}.svg", o.trial), &plot(setup.solver, o))?;
        }
    }
    out.write("summary.csv", &summary_table(setup.solver, &outcomes))?;
    Ok(Outcome::Success)
}

fn plot(solver: SolverKind, o: &TrialOutcome) -> String {
    let observed: Vec<(usize, f64)> =
        o.result.trace.records.iter().filter_map(|r| r.dist_to_truth.map(|d| (r.iter, d))).collect();
    // the bound applies to the expected objective, whose optimum is 0
    let bound: Option<Vec<(usize, f64)>> = match (solver, o.rate) {
        (SolverKind::BcdExpected, Some(rc)) => {
            let gap0 = o.result.trace.records[0].objective;
            Some((0..=o.result.iterations()).map(|k| (k, rc.distance_bound(k, gap0))).collect())
        }
        _ => None,
    };
    let title = format!("{} trial {}: log10 distance to truth", solver.name(), o.trial);
    distance_svg(&title, &observed, bound.as_deref())
}
