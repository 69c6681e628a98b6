//! Verification harness: named checks that cross-validate the samplers
//! against the closed forms and emit structured [`TestReport`]s.
//!
//! Reports whose name ends in `_diagnostic` document the behaviour of a
//! printed formula under test rather than gate correctness; they are
//! excluded from [`all_binding_passed`] so an honest failure there does not
//! mask the health of the rest of the suite (the notes carry the measured
//! deviation).

pub mod checks;
pub mod samples;
pub mod suite;

use serde::{Deserialize, Serialize};

/// Outcome of one named verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    /// Stable check identifier.
    pub name: String,
    /// Measured statistic (sup distance, z-score, violation count, ...).
    pub statistic: f64,
    /// Pass threshold the statistic is compared against.
    pub threshold: f64,
    /// p-value when the check is a statistical test.
    pub p_value: Option<f64>,
    /// Monte Carlo sample count (0 for purely deterministic checks).
    pub n_samples: usize,
    /// Whether the check met its criterion.
    pub passed: bool,
    /// Human-readable context: parameters, measured values, caveats.
    pub notes: String,
}

impl TestReport {
    /// Diagnostic reports (name suffix `_diagnostic`) never gate the suite.
    pub fn is_binding(&self) -> bool {
        !self.name.ends_with("_diagnostic")
    }
}

/// Tolerances and statistical knobs shared by all checks.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Significance level below which a statistical test rejects.
    pub ks_significance: f64,
    /// Absolute tolerance for quadrature-based identities.
    pub quad_tol: f64,
    /// Absolute tolerance for exact (non-stochastic) identities.
    pub identity_tol: f64,
    /// Label permutations per energy test. The permutation p-value floor is
    /// `1 / (n_perm + 1)`, so at the default 200 the energy tests cannot
    /// reject at levels below ~5e-3 and act as coarse screens.
    pub n_perm: usize,
    /// Per-side cap on energy-test sample sizes (the test cost is quadratic
    /// in the pool; KS comparisons always use the full samples).
    pub energy_subsample: usize,
    /// Gibbs sweeps when sampling the interlacing polytope.
    pub gibbs_sweeps: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            ks_significance: 1e-3,
            quad_tol: 1e-6,
            identity_tol: 1e-12,
            n_perm: 200,
            energy_subsample: 2000,
            gibbs_sweeps: 100,
        }
    }
}

/// True when every binding (non-diagnostic) report passed.
pub fn all_binding_passed(reports: &[TestReport]) -> bool {
    reports.iter().filter(|r| r.is_binding()).all(|r| r.passed)
}

/// One `PASS`/`FAIL` line per report, diagnostic reports marked as such.
pub fn format_report_line(r: &TestReport) -> String {
    let verdict = if r.passed { "PASS" } else { "FAIL" };
    let kind = if r.is_binding() { "" } else { " (diagnostic)" };
    let p = match r.p_value {
        Some(p) => format!(" p={p:.3e}"),
        None => String::new(),
    };
    format!(
        "{verdict}{kind} {name}: stat={stat:.6e} thr={thr:.3e}{p} n={n}  {notes}",
        name = r.name,
        stat = r.statistic,
        thr = r.threshold,
        n = r.n_samples,
        notes = r.notes
    )
}
