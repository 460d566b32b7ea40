use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "prsplit", version, about = "Split phase retrieval experiments: solve, certify, init-test, sweep")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a solver over seeded trials and write traces plus a summary
    Solve(SolveArgs),
    /// Run the numerical certificate battery
    Certify(CertifyArgs),
    /// Measure how often spectral initialization lands in the basin
    InitTest(InitTestArgs),
    /// Grid of solver runs over penalty and oversampling ratios
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    BcdExpected,
    BcdFinite,
    Admm,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::BcdExpected => "bcd-expected",
            SolverKind::BcdFinite => "bcd-finite",
            SolverKind::Admm => "admm",
        }
    }

    pub fn is_finite(self) -> bool {
        self != SolverKind::BcdExpected
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitKind {
    Squared,
    AsWritten,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StartKind {
    /// basin for bcd-expected, spectral for the finite-sample solvers
    Auto,
    /// uniform in the basin around the truth
    Basin,
    Spectral,
    /// both blocks at the truth
    Truth,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Signal dimension
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of measurements
    #[arg(long)]
    pub m: Option<usize>,
    /// Master seed; trial t uses substream t
    #[arg(long, env = "PRSPLIT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Norm of the planted signal
    #[arg(long, default_value_t = 1.0)]
    pub norm_x: f64,
    /// Absolute penalty
    #[arg(long, conflicts_with = "rho_rel")]
    pub rho: Option<f64>,
    /// Penalty relative to the squared signal norm
    #[arg(long)]
    pub rho_rel: Option<f64>,
    /// Output directory; nothing is written outside it
    #[arg(long, default_value = "prsplit-out")]
    pub out: PathBuf,
    /// Flat key=value file; keys are flag names, command-line flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value_t = SolverKind::BcdExpected)]
    pub solver: SolverKind,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol_grad: Option<f64>,
    #[arg(long)]
    pub tol_step: Option<f64>,
    /// Spectral initialization variant
    #[arg(long, value_enum, default_value_t = InitKind::Squared)]
    pub init: InitKind,
    #[arg(long, value_enum, default_value_t = StartKind::Auto)]
    pub start: StartKind,
    /// Also write an SVG convergence plot per trial
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated penalties relative to the squared signal norm
    #[arg(long, value_delimiter = ',')]
    pub sweep_rho_rel: Vec<f64>,
    /// Comma-separated measurement ratios m/n
    #[arg(long, value_delimiter = ',')]
    pub sweep_m_ratio: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Basin points for the strong-convexity certificate
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// (point, perturbation) pairs for the Lipschitz and descent certificates
    #[arg(long, default_value_t = 10_000)]
    pub pair_samples: usize,
    /// Points for the finite-difference checks
    #[arg(long, default_value_t = 100)]
    pub fd_points: usize,
    /// Grid resolution of the no-escape certificate
    #[arg(long, default_value_t = 1e-3)]
    pub grid_step: f64,
    #[arg(long, default_value_t = 20)]
    pub mc_points: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub mc_samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct InitTestArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Oversampling constant: m = ceil(c0 · n · ln n) unless --m is given
    #[arg(long, default_value_t = 3.0)]
    pub c0: f64,
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Solve(a) => &a.common,
            Command::Certify(a) => &a.common,
            Command::InitTest(a) => &a.common,
            Command::Sweep(a) => &a.common,
        }
    }
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
        let key = k.trim().replace('_', "-");
        if key == "config" {
            return Err(CliError::Usage("config files cannot include other config files".into()));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn given_on_command_line(matches: &ArgMatches, key: &str) -> bool {
    let id = key.replace('-', "_");
    matches.try_get_raw(&id).ok().flatten().is_some() && matches.value_source(&id) == Some(ValueSource::CommandLine)
}

/// Parses `argv`, folding in `--config` entries for every flag that was not
/// given on the command line. Precedence: flag, config file, `PRSPLIT_SEED`,
/// built-in default.
pub fn parse_with_config<I, T>(argv: I) -> Result<Cli, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let matches = Cli::command().try_get_matches_from(&argv).map_err(CliError::Clap)?;
    let cli = Cli::from_arg_matches(&matches).map_err(CliError::Clap)?;
    let Some(path) = cli.command.common().config.clone() else {
        return Ok(cli);
    };
    let (_, sub) = matches.subcommand().expect("subcommand is required");
    let mut extended = argv.clone();
    for (key, value) in read_config(&path)? {
        if given_on_command_line(sub, &key) {
            continue;
        }
        if key == "plot" {
            match value.as_str() {
                "true" => extended.push("--plot".into()),
                "false" => {}
                other => return Err(CliError::Usage(format!("plot must be true or false, got {other}"))),
            }
            continue;
        }
        // `--key=value` keeps negative numbers from parsing as flags
        extended.push(format!("--{key}={value}").into());
    }
    let matches = Cli::command().try_get_matches_from(&extended).map_err(CliError::Clap)?;
    Cli::from_arg_matches(&matches).map_err(CliError::Clap)
}
