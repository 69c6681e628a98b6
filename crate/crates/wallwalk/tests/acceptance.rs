//! Acceptance battery: one test per claim the library is built to
//! substantiate, each printing one line per underlying report (visible
//! under `--nocapture`) and a final verdict line. Statistical gates run at
//! a frozen seed so the battery is reproducible bit for bit.

use std::sync::OnceLock;
use std::time::Instant;

use wallwalk::verify::checks::{self, IntertwiningMode};
use wallwalk::verify::{all_binding_passed, format_report_line, TestReport, VerifyConfig};

const SEED: u64 = 0xACCE57;

fn cfg() -> VerifyConfig {
    VerifyConfig::default()
}

/// The scalar-kernel reports are shared by three criteria; compute once.
fn lemma_reports() -> &'static [TestReport] {
    static LEMMAS: OnceLock<Vec<TestReport>> = OnceLock::new();
    LEMMAS.get_or_init(|| checks::check_lemma_kernels(100_000, &cfg(), SEED))
}

/// The distribution-formula reports back both the oracle gates and the
/// printed-formula diagnostics; compute once.
fn cdf_reports() -> &'static [TestReport] {
    static CDF: OnceLock<Vec<TestReport>> = OnceLock::new();
    CDF.get_or_init(|| {
        let c = cfg();
        let mut v = checks::check_cdf(1, 1, 100_000, &c, SEED).expect("valid parameters");
        v.extend(checks::check_cdf(1, 2, 100_000, &c, SEED).expect("valid parameters"));
        v.extend(checks::check_cdf(3, 2, 100_000, &c, SEED).expect("valid parameters"));
        v
    })
}

fn subset(reports: &[TestReport], names: &[&str]) -> Vec<TestReport> {
    names
        .iter()
        .map(|n| {
            reports
                .iter()
                .find(|r| r.name == *n)
                .unwrap_or_else(|| panic!("report {n} missing"))
                .clone()
        })
        .collect()
}

fn print_and_assert(label: &str, reports: &[TestReport]) {
    for r in reports {
        println!("{}", format_report_line(r));
    }
    let ok = all_binding_passed(reports);
    println!("{} acceptance {label}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "acceptance {label} failed");
}

#[test]
fn c01_top_law_against_spectral_top() {
    let c = cfg();
    let t0 = Instant::now();
    let mut v = checks::check_theorem1(3, 4, 200_000, &c, SEED);
    let elapsed = t0.elapsed().as_secs_f64();
    println!("three-particle run took {elapsed:.1} s (budget 60 s)");
    assert!(elapsed < 60.0, "three-particle comparison took {elapsed:.1} s");
    v.extend(checks::check_theorem1(1, 1, 100_000, &c, SEED));
    v.extend(checks::check_theorem1(1, 2, 100_000, &c, SEED));
    print_and_assert("01: top law, three particles + analytic one-particle laws", &v);
}

#[test]
fn c02_configuration_against_minor_tops() {
    let v = checks::check_theorem2(3, 3, 50_000, &cfg(), SEED);
    print_and_assert("02: joint configuration law vs nested minor tops", &v);
}

#[test]
fn c03_scalar_step_kernels() {
    let v = subset(
        lemma_reports(),
        &[
            "reflected_walk_step_ks",
            "so2_eigenvalue_step_ks",
            "so2_first_step_exponential_ks",
            "floor_walk_step_ks_r0",
            "floor_walk_step_ks_r0p5",
            "floor_walk_step_ks_r1",
        ],
    );
    print_and_assert("03: one-step scalar kernel laws", &v);
}

#[test]
fn c04_two_particle_kernel() {
    let v = subset(
        lemma_reports(),
        &["config_kernel_origin_chi2", "config_kernel_row_integral"],
    );
    print_and_assert("04: two-particle kernel law and normalization", &v);
}

#[test]
fn c05_spectral_kernel_normalization() {
    let v = subset(
        lemma_reports(),
        &["spectral_kernel_row_integral_k2", "spectral_kernel_row_integral_k3"],
    );
    print_and_assert("05: spectral kernel row normalization", &v);
}

#[test]
fn c06_dispersal_identity() {
    let c = cfg();
    let quad = IntertwiningMode::Quadrature { spreads: &[0.8, 2.2], grid: 20 };
    let mut v = checks::check_intertwining(2, quad, &c, SEED).expect("valid parameters");
    let origin = IntertwiningMode::McFromOrigin { n_steps: 2, n_samples: 50_000 };
    v.extend(checks::check_intertwining(3, origin, &c, SEED).expect("valid parameters"));
    let onestep = IntertwiningMode::McOneStep { lambda: &[2.0, 1.0], n_samples: 30_000 };
    v.extend(checks::check_intertwining(3, onestep, &c, SEED).expect("valid parameters"));
    print_and_assert("06: dispersal identity (quadrature + Monte Carlo)", &v);
}

#[test]
fn c07_pattern_volumes() {
    let v = checks::check_gt_volumes(&cfg(), SEED);
    print_and_assert("07: interlacing-polytope volumes", &v);
}

#[test]
fn c08_spectral_structure() {
    let v = checks::check_spectral_structure(&cfg(), SEED);
    print_and_assert("08: spectral pairing, minor interlacing, reference oracle", &v);
}

#[test]
fn c09_update_equivalence() {
    let v = checks::check_dynamics_equivalence(6, 50, 10_000, SEED);
    print_and_assert("09: one-pass and two-phase updates bit-identical", &v);
}

#[test]
fn c10_exact_identities() {
    let v = checks::check_identities(&cfg(), SEED);
    print_and_assert("10: determinant and entry identities", &v);
}

#[test]
fn c11_distribution_formula() {
    let reports = cdf_reports();
    for r in reports {
        println!("{}", format_report_line(r));
    }
    // Binding gates: the analytic laws at one particle and the two-sample
    // comparison at three particles pin the true distribution.
    assert!(
        all_binding_passed(reports),
        "a binding distribution-formula gate failed"
    );
    // The printed two-step formula is documented to disagree with the
    // simulated law; the diagnostic must fail honestly with the measured
    // deviation in the documented band (peak about 0.184 near t = 1).
    let diag = reports
        .iter()
        .find(|r| r.name == "last_particle_cdf_k1_n2_printed_diagnostic")
        .expect("two-step printed diagnostic missing");
    assert!(
        !diag.passed,
        "the printed two-step formula unexpectedly matched the simulated law"
    );
    assert!(
        diag.statistic > 0.15 && diag.statistic < 0.22,
        "measured deviation {:.4} outside the documented band around 0.184",
        diag.statistic
    );
    assert!(!diag.notes.is_empty(), "diagnostic must carry the measured deviation");
    let diag3 = reports
        .iter()
        .find(|r| r.name == "last_particle_cdf_k3_n2_printed_diagnostic")
        .expect("three-particle printed diagnostic missing");
    println!(
        "three-particle printed formula: measured deviation {:.4} ({})",
        diag3.statistic,
        if diag3.passed { "matches the simulated law" } else { "differs from the simulated law" }
    );
    println!("PASS acceptance 11: distribution formula vs oracles (printed two-step form documented as failing)");
}
