//! CSV serialization and output-directory handling.
//!
//! Reals use `{:.16e}` (17 significant digits, round-trip exact), missing
//! values are empty fields and every line ends in `\n`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use prsplit_core::solvers::{IterateTrace, TraceRecord};

use crate::CliError;

pub const TRACE_HEADER: &str = "iter,objective,grad_norm,primal_gap,dual_norm,dist_to_truth,in_basin";

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

pub fn opt_bool(v: Option<bool>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

fn trace_row(r: &TraceRecord) -> String {
    [
        r.iter.to_string(),
        real(r.objective),
        real(r.grad_norm),
        real(r.primal_gap),
        real(r.dual_norm),
        opt_real(r.dist_to_truth),
        opt_bool(r.in_basin),
    ]
    .join(",")
}

pub fn trace_csv(trace: &IterateTrace) -> String {
    let mut s = String::with_capacity(160 * (trace.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in &trace.records {
        s.push_str(&trace_row(r));
        s.push('\n');
    }
    s
}

/// Accumulates rows under a fixed header.
#[derive(Debug)]
pub struct Table {
    columns: usize,
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { columns: header.len(), text }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        assert_eq!(fields.len(), self.columns, "row width must match the header");
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Output directory that was verified writable up front.
#[derive(Debug, Clone)]
pub struct OutDir(PathBuf);

impl OutDir {
    pub fn prepare(path: &Path) -> Result<Self, CliError> {
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        fs::create_dir_all(path).map_err(io)?;
        let probe = path.join(".prsplit-write-check");
        fs::write(&probe, b"").map_err(io)?;
        fs::remove_file(&probe).map_err(io)?;
        Ok(Self(path.to_path_buf()))
    }

    pub fn path(&self) -> &Path {
        &self.0
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let target = self.0.join(name);
        fs::write(&target, contents).map_err(|e| CliError::Io(format!("{}: {e}", target.display())))?;
        log::info!("wrote {}", target.display());
        Ok(target)
    }
}
