mod certify;
mod init_test;
mod solve;
mod sweep;

pub use certify::cmd_certify;
pub use init_test::{cmd_init_test, default_measurements};
pub use solve::cmd_solve;
pub use sweep::cmd_sweep;

use rayon::prelude::*;

use crate::CliError;

/// Runs `f` for every trial in parallel and returns results in trial order.
pub(crate) fn for_trials<T, F>(trials: usize, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(u64) -> Result<T, CliError> + Sync + Send,
{
    (0..trials as u64).into_par_iter().map(f).collect()
}

pub(crate) fn trials_or(value: Option<usize>, default: usize) -> Result<usize, CliError> {
    match value.unwrap_or(default) {
        0 => Err(CliError::Usage("trials must be >= 1".into())),
        t => Ok(t),
    }
}
