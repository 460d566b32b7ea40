//! Floating-point certificates for the local convergence argument.
//!
//! Each certificate samples (or grids) its domain, keeps the worst value it
//! sees together with up to [`MAX_WITNESSES`] worst inputs, and compares it
//! against a threshold with a declared slack.

mod convexity;
mod derivatives;
mod lipschitz;
mod monte_carlo;
mod no_escape;
mod rate;

pub use convexity::{certify_strong_convexity, sample_basin_point, STRONG_CONVEXITY_PROOF_CONSTANT};
pub use derivatives::{certify_derivatives, gradient_fd_error, hessian_fd_error, GRADIENT_REL_TOL, HESSIAN_REL_TOL};
pub use lipschitz::{certify_block_lipschitz, certify_descent_inequalities};
pub use monte_carlo::{mc_expected_objective, MIN_MC_SAMPLES};
pub use no_escape::{
    feasible_grid, h_value, no_escape_certificate, no_escape_geometric_check, rc_bound, BasinCoordinates,
    NoEscapeReport, BASIN_LEVEL,
};
pub use rate::{check_rate_bound, gap_ratios, rate_constants, RateConstants};

pub const MAX_WITNESSES: usize = 10;

/// Which side of the threshold passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// worst value must be `≥ threshold`
    AtLeast,
    /// worst value must be `≤ threshold`
    AtMost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub value: f64,
    pub label: String,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub name: String,
    pub samples: usize,
    pub worst_value: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub slack: f64,
    pub witnesses: Vec<Witness>,
    /// Extra reported quantities that are not asserted.
    pub notes: Vec<(String, f64)>,
}

impl CertificateReport {
    /// Signed distance to the threshold; `≥ 0` means the bound holds.
    pub fn margin(&self) -> f64 {
        match self.bound {
            Bound::AtLeast => self.worst_value - self.threshold,
            Bound::AtMost => self.threshold - self.worst_value,
        }
    }

    pub fn passed(&self) -> bool {
        self.margin() >= -self.slack
    }

    pub fn note(&self, key: &str) -> Option<f64> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// Running worst-case reduction. Ties keep the first-seen witness.
#[derive(Debug)]
pub struct WorstTracker {
    bound: Bound,
    samples: usize,
    witnesses: Vec<Witness>,
    worst: Option<f64>,
}

impl WorstTracker {
    pub fn new(bound: Bound) -> Self {
        Self { bound, samples: 0, witnesses: Vec::new(), worst: None }
    }

    fn worse(&self, a: f64, b: f64) -> bool {
        // NaN always counts as worst so it can never hide
        if a.is_nan() {
            return !b.is_nan();
        }
        match self.bound {
            Bound::AtLeast => a < b,
            Bound::AtMost => a > b,
        }
    }

    pub fn observe(&mut self, value: f64, label: &str, point: impl FnOnce() -> Vec<f64>) {
        self.samples += 1;
        if self.worst.is_none_or(|w| self.worse(value, w)) {
            self.worst = Some(value);
        }
        let pos = self.witnesses.iter().position(|w| self.worse(value, w.value)).unwrap_or(self.witnesses.len());
        if pos < MAX_WITNESSES {
            self.witnesses.insert(pos, Witness { value, label: label.to_string(), point: point() });
            self.witnesses.truncate(MAX_WITNESSES);
        }
    }

    pub fn finish(self, name: &str, threshold: f64, slack: f64) -> CertificateReport {
        CertificateReport {
            name: name.to_string(),
            samples: self.samples,
            worst_value: self.worst.unwrap_or(f64::NAN),
            threshold,
            bound: self.bound,
            slack,
            witnesses: self.witnesses,
            notes: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracker_keeps_worst_first_seen() {
        let mut t = WorstTracker::new(Bound::AtMost);
        for (i, v) in [1.0, 3.0, 3.0, 2.0].into_iter().enumerate() {
            t.observe(v, "s", || vec![i as f64]);
        }
        let r = t.finish("demo", 4.0, 0.0);
        assert_eq!(r.worst_value, 3.0);
        assert_eq!(r.witnesses[0].point, vec![1.0]);
        assert_eq!(r.witnesses.len(), 4);
        assert_eq!(r.margin(), 1.0);
        assert!(r.passed());
    }

    #[test]
    fn tracker_caps_witnesses_and_flags_nan() {
        let mut t = WorstTracker::new(Bound::AtLeast);
        for i in 0..25 {
            t.observe(i as f64, "s", Vec::new);
        }
        t.observe(f64::NAN, "bad", Vec::new);
        let r = t.finish("demo", 0.0, 0.0);
        assert_eq!(r.witnesses.len(), MAX_WITNESSES);
        assert!(r.worst_value.is_nan());
        assert!(!r.passed());
        assert_eq!(r.samples, 26);
    }

    #[test]
    fn slack_allows_small_violation() {
        let mut t = WorstTracker::new(Bound::AtLeast);
        t.observe(1.0 - 1e-12, "s", Vec::new);
        assert!(t.finish("demo", 1.0, 1e-10).passed());
    }
}
