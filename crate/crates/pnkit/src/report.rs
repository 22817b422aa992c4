use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const MAX_WITNESSES: usize = 3;

/// How `max_residual` is compared with `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Residual check: pass iff the largest residual is `≤ tolerance`.
    AtMost,
    /// Lower bound: `max_residual` holds the smallest observed value and the
    /// check passes iff it is `> tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub points_evaluated: usize,
    /// Points excluded by a check-specific filter (e.g. outside the smooth locus).
    pub points_skipped: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Chart coordinates of up to three failing points.
    pub witnesses: Vec<Vec<f64>>,
    pub notes: Vec<String>,
}

impl CheckResult {
    /// A check that did not run on this configuration; counts as passing.
    pub fn not_applicable(name: &str, why: &str) -> Self {
        Self {
            name: name.to_string(),
            points_evaluated: 0,
            points_skipped: 0,
            max_residual: 0.0,
            tolerance: 0.0,
            comparison: Comparison::AtMost,
            pass: true,
            witnesses: Vec::new(),
            notes: vec![why.to_string()],
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Outcome of a check at one point.
#[derive(Debug, Clone)]
pub enum Outcome {
    Value(f64),
    Skipped,
    Failed(String),
}

/// Folds per-point outcomes, in point order, into a [`CheckResult`]. Errors
/// count as failures; non-finite values do too.
#[derive(Debug, Clone)]
pub struct Tally {
    name: String,
    tolerance: f64,
    comparison: Comparison,
    evaluated: usize,
    skipped: usize,
    extreme: Option<f64>,
    failures: usize,
    errors: Vec<String>,
    witnesses: Vec<Vec<f64>>,
    notes: Vec<String>,
}

impl Tally {
    pub fn new(name: &str, tolerance: f64, comparison: Comparison) -> Self {
        Self {
            name: name.to_string(),
            tolerance,
            comparison,
            evaluated: 0,
            skipped: 0,
            extreme: None,
            failures: 0,
            errors: Vec::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn at_most(name: &str, tolerance: f64) -> Self {
        Self::new(name, tolerance, Comparison::AtMost)
    }

    pub fn at_least(name: &str, tolerance: f64) -> Self {
        Self::new(name, tolerance, Comparison::AtLeast)
    }

    fn witness(&mut self, coords: &[f64]) {
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(coords.to_vec());
        }
    }

    pub fn record(&mut self, coords: &[f64], outcome: Outcome) {
        match outcome {
            Outcome::Skipped => self.skipped += 1,
            Outcome::Failed(msg) => {
                self.evaluated += 1;
                if self.errors.len() < MAX_WITNESSES {
                    self.errors.push(msg);
                }
                self.witness(coords);
            }
            Outcome::Value(v) => {
                self.evaluated += 1;
                let ok = match self.comparison {
                    Comparison::AtMost => v <= self.tolerance,
                    Comparison::AtLeast => v > self.tolerance,
                };
                if !ok {
                    self.witness(coords);
                }
                if v.is_finite() {
                    self.extreme = Some(match (self.extreme, self.comparison) {
                        (None, _) => v,
                        (Some(e), Comparison::AtMost) => e.max(v),
                        (Some(e), Comparison::AtLeast) => e.min(v),
                    });
                }
            }
        }
    }

    pub fn value(&mut self, coords: &[f64], v: f64) {
        self.record(coords, Outcome::Value(v));
    }

    pub fn comparison(&self) -> Comparison {
        self.comparison
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn finish(self) -> CheckResult {
        let mut notes = self.notes;
        if !self.errors.is_empty() {
            notes.push(format!(
                "{} point(s) raised errors: {}",
                self.failures,
                self.errors.join("; ")
            ));
        }
        let pass = self.failures == 0 && (self.evaluated > 0 || self.skipped == 0);
        if self.evaluated == 0 && self.skipped > 0 {
            notes.push("every point was skipped".to_string());
        }
        CheckResult {
            name: self.name,
            points_evaluated: self.evaluated,
            points_skipped: self.skipped,
            max_residual: self.extreme.unwrap_or(0.0),
            tolerance: self.tolerance,
            comparison: self.comparison,
            pass,
            witnesses: self.witnesses,
            notes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEcho {
    pub c: f64,
    pub kappa: f64,
    pub pinned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: String,
    pub config: RunConfig,
    pub calibration: CalibrationEcho,
    pub results: Vec<CheckResult>,
    pub wall_time_seconds: f64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn result(&self, name: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.name == name)
    }

    /// The results array alone, serialised; identical for identical runs.
    pub fn results_json(&self) -> String {
        serde_json::to_string_pretty(&self.results).expect("results serialise")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_tracks_extremes_and_witnesses() {
        let mut t = Tally::at_most("x", 1e-3);
        t.value(&[0.0], 1e-4);
        t.record(&[1.0], Outcome::Skipped);
        t.value(&[2.0], 5e-3);
        let r = t.finish();
        assert_eq!((r.points_evaluated, r.points_skipped), (2, 1));
        assert_eq!(r.max_residual, 5e-3);
        assert!(!r.pass);
        assert_eq!(r.witnesses, vec![vec![2.0]]);

        let mut t = Tally::at_least("y", 1e-2);
        t.value(&[0.0], 3.0);
        t.value(&[1.0], 0.5);
        let r = t.finish();
        assert!(r.pass && r.max_residual == 0.5);
    }

    #[test]
    fn errors_fail_and_are_noted() {
        let mut t = Tally::at_most("z", 1.0);
        t.record(&[0.5], Outcome::Failed("boom".into()));
        let r = t.finish();
        assert!(!r.pass);
        assert!(r.notes[0].contains("boom"));
        assert_eq!(r.witnesses.len(), 1);
    }

    #[test]
    fn witnesses_are_capped() {
        let mut t = Tally::at_most("w", 0.0);
        for i in 0..10 {
            t.value(&[i as f64], 1.0);
        }
        assert_eq!(t.finish().witnesses.len(), MAX_WITNESSES);
    }
}
