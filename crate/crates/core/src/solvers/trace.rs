use crate::model::EstimatePair;
use crate::numerics::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    /// `g` for expected-objective runs, the augmented Lagrangian otherwise.
    pub objective: f64,
    pub grad_norm: f64,
    /// `‖z − w‖`
    pub primal_gap: f64,
    /// `‖λ‖`; zero whenever the multiplier is pinned.
    pub dual_norm: f64,
    /// Sign-resolved distance to `(x, x)` when the truth is known.
    pub dist_to_truth: Option<f64>,
    pub in_basin: Option<bool>,
}

/// One record per iterate, the starting point included.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterateTrace {
    pub records: Vec<TraceRecord>,
}

impl IterateTrace {
    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.objective)
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Records with `in_basin == Some(false)`.
    pub fn basin_violations(&self) -> usize {
        self.records.iter().filter(|r| r.in_basin == Some(false)).count()
    }

    /// Geometric-mean contraction of the objective gap `objective − optimum`
    /// over the iterations where the gap stays above `floor_rel` times its
    /// initial value. `None` when fewer than one such iteration exists.
    pub fn empirical_rate(&self, optimum: f64, floor_rel: f64) -> Option<f64> {
        let gap0 = self.records.first()?.objective - optimum;
        if !(gap0 > 0.0) {
            return None;
        }
        let floor = gap0 * floor_rel;
        let last = self.records.iter().enumerate().skip(1).take_while(|(_, r)| r.objective - optimum > floor).last()?;
        let (k, r) = last;
        Some(((r.objective - optimum) / gap0).powf(1.0 / k as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterReached,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterReached => "max_iter",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub final_pair: EstimatePair,
    pub final_dual: Vector,
    pub status: SolveStatus,
    pub trace: IterateTrace,
}

impl SolveResult {
    pub fn iterations(&self) -> usize {
        self.trace.iterations()
    }
}
