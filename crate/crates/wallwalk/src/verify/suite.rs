//! Named verification targets and the dispatcher that runs them.
//!
//! Each target groups the checks that substantiate one claim about the
//! system; `all` runs the full battery in a fixed order. Targets are
//! addressable by the stable lowercase names used on the command line.

use super::checks;
use super::{TestReport, VerifyConfig};

/// A named group of verification checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Law of the rightmost particle against the top spectral part.
    Theorem1,
    /// Joint law of the configuration against the nested minors' tops.
    Theorem2,
    /// Single-step kernel laws, row normalizations, and spectral
    /// structure facts (pairing, interlacing, reference oracle).
    Lemmas,
    /// The dispersal identity: exact quadrature form, Monte Carlo from
    /// the origin, and the one-step form away from the origin.
    Intertwining,
    /// Interlacing-polytope volumes against the closed-form weight.
    Volume,
    /// Distribution formula for the rightmost particle.
    Cdf,
    /// Determinant and entry identities of the kernel building blocks.
    Identities,
    /// Bitwise equivalence of the one-pass and two-phase updates.
    Equivalence,
    /// Every target above, in declaration order.
    All,
}

impl Target {
    /// Every target, in the order `all` runs them (with `All` last).
    pub const EVERY: [Target; 9] = [
        Target::Theorem1,
        Target::Theorem2,
        Target::Lemmas,
        Target::Intertwining,
        Target::Volume,
        Target::Cdf,
        Target::Identities,
        Target::Equivalence,
        Target::All,
    ];

    /// Stable command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Target::Theorem1 => "theorem1",
            Target::Theorem2 => "theorem2",
            Target::Lemmas => "lemmas",
            Target::Intertwining => "intertwining",
            Target::Volume => "volume",
            Target::Cdf => "cdf",
            Target::Identities => "identities",
            Target::Equivalence => "equivalence",
            Target::All => "all",
        }
    }

    /// Parses a command-line name (case-insensitive).
    pub fn from_name(name: &str) -> Option<Target> {
        let lower = name.to_ascii_lowercase();
        Target::EVERY.into_iter().find(|t| t.name() == lower)
    }
}

/// Runs every check belonging to `target` at the battery's pinned
/// parameters and returns the reports in a deterministic order. The same
/// `(target, seed)` pair always produces the same reports.
pub fn run_target(target: Target, cfg: &VerifyConfig, seed: u64) -> Vec<TestReport> {
    use checks::IntertwiningMode as Mode;
    match target {
        Target::Theorem1 => {
            let mut v = checks::check_theorem1(3, 4, 200_000, cfg, seed);
            v.extend(checks::check_theorem1(1, 1, 100_000, cfg, seed));
            v.extend(checks::check_theorem1(1, 2, 100_000, cfg, seed));
            v
        }
        Target::Theorem2 => checks::check_theorem2(3, 3, 50_000, cfg, seed),
        Target::Lemmas => {
            let mut v = checks::check_lemma_kernels(100_000, cfg, seed);
            v.extend(checks::check_spectral_structure(cfg, seed));
            v
        }
        Target::Intertwining => {
            let quad = Mode::Quadrature { spreads: &[0.8, 2.2], grid: 20 };
            let origin = Mode::McFromOrigin { n_steps: 2, n_samples: 50_000 };
            let onestep = Mode::McOneStep { lambda: &[2.0, 1.0], n_samples: 30_000 };
            let mut v = checks::check_intertwining(2, quad, cfg, seed)
                .expect("pinned parameters are valid");
            v.extend(
                checks::check_intertwining(3, origin, cfg, seed)
                    .expect("pinned parameters are valid"),
            );
            v.extend(
                checks::check_intertwining(3, onestep, cfg, seed)
                    .expect("pinned parameters are valid"),
            );
            v
        }
        Target::Volume => checks::check_gt_volumes(cfg, seed),
        Target::Cdf => {
            let mut v = checks::check_cdf(1, 1, 100_000, cfg, seed)
                .expect("pinned parameters are valid");
            v.extend(
                checks::check_cdf(1, 2, 100_000, cfg, seed).expect("pinned parameters are valid"),
            );
            v.extend(
                checks::check_cdf(3, 2, 100_000, cfg, seed).expect("pinned parameters are valid"),
            );
            v
        }
        Target::Identities => checks::check_identities(cfg, seed),
        Target::Equivalence => checks::check_dynamics_equivalence(6, 50, 10_000, seed),
        Target::All => {
            let mut v = Vec::new();
            for t in Target::EVERY.into_iter().filter(|t| *t != Target::All) {
                v.extend(run_target(t, cfg, seed));
            }
            v
        }
    }
}
