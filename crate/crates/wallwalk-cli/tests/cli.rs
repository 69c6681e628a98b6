//! End-to-end tests of the command-line interface: output shapes, the
//! documented row counts, byte-level determinism, and exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wallwalk"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout_str(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("stdout is UTF-8")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("process should exit normally")
}

#[test]
fn simulate_particles_has_documented_row_count_and_is_deterministic() {
    let args = ["simulate-particles", "--k", "3", "--steps", "5", "--reps", "1000", "--seed", "7"];
    let a = run(&args);
    assert_eq!(code(&a), 0);
    let text = stdout_str(&a);
    assert!(!text.contains('\r'), "output must use LF line endings");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 15_001, "header + reps * steps * k rows");
    assert_eq!(lines[0], "rep,t,i,x");
    // Every data row has four comma-separated fields with a parseable value.
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4, "bad row {line}");
        fields[3].parse::<f64>().expect("value parses");
    }
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout, "identical invocations must be byte-identical");
}

#[test]
fn eval_kernel_q_grid_product_includes_unit_mass_at_origin() {
    let o = run(&["eval-kernel", "--name", "q", "--grid", "0,1,2", "--grid2", "0,1,2"]);
    assert_eq!(code(&o), 0);
    let text = stdout_str(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10, "header + 9 grid rows");
    assert_eq!(lines[0], "x,y,value");
    assert_eq!(lines[1], "0,0,1");
}

#[test]
fn eval_kernel_p_needs_r_and_defaults_second_grid() {
    let missing = run(&["eval-kernel", "--name", "p", "--grid", "1,2"]);
    assert_eq!(code(&missing), 2);
    let ok = run(&["eval-kernel", "--name", "p", "--grid", "1,2", "--r", "0.5"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(stdout_str(&ok).lines().count(), 5, "header + 2x2 grid rows");
}

#[test]
fn eval_kernel_cdf_rejects_invalid_range_without_partial_output() {
    let bad = run(&["eval-kernel", "--name", "cdf", "--k", "3", "--n", "1", "--grid", "1,2"]);
    assert_eq!(code(&bad), 2);
    assert!(bad.stdout.is_empty(), "no partial CSV on a config error");
    let ok = run(&["eval-kernel", "--name", "cdf", "--k", "1", "--n", "2", "--grid", "1"]);
    assert_eq!(code(&ok), 0);
    let text = stdout_str(&ok);
    // Printed two-step formula at t = 1: 1 - 2/e.
    assert!(text.contains("1,0.2642411176571153"), "got {text}");
}

#[test]
fn simulate_matrix_emits_both_observables() {
    let spectra =
        run(&["simulate-matrix", "--k", "2", "--steps", "2", "--reps", "3", "--seed", "1"]);
    assert_eq!(code(&spectra), 0);
    let text = stdout_str(&spectra);
    let lines: Vec<&str> = text.lines().collect();
    // k = 2 gives one positive spectral part: header + reps * steps rows.
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], "rep,t,j,sigma");

    let minors = run(&[
        "simulate-matrix",
        "--k",
        "2",
        "--steps",
        "2",
        "--reps",
        "3",
        "--seed",
        "1",
        "--observable",
        "minors",
    ]);
    assert_eq!(code(&minors), 0);
    let text = stdout_str(&minors);
    let lines: Vec<&str> = text.lines().collect();
    // Minor sides 2 and 3: header + reps * steps * 2 rows.
    assert_eq!(lines.len(), 13);
    assert_eq!(lines[0], "rep,t,m,top");
    // The minor top value is nondecreasing in the minor side at fixed (rep, t).
    for pair in lines[1..].chunks(2) {
        let top2: f64 = pair[0].rsplit(',').next().unwrap().parse().unwrap();
        let top3: f64 = pair[1].rsplit(',').next().unwrap().parse().unwrap();
        assert!(top3 >= top2, "interlacing violated in {pair:?}");
    }
}

#[test]
fn sample_gt_emits_rows_and_validates_top() {
    let o = run(&[
        "sample-gt", "--k", "3", "--top", "2,1", "--sweeps", "50", "--reps", "2", "--seed", "9",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout_str(&o);
    let lines: Vec<&str> = text.lines().collect();
    // Rows 2, 3 have one entry, row 4 has two: header + 2 reps * 4 entries.
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[0], "rep,row,idx,value");
    // The fixed top row is echoed exactly.
    assert!(lines.contains(&"0,4,1,2"));
    assert!(lines.contains(&"0,4,2,1"));

    let bad = run(&[
        "sample-gt", "--k", "3", "--top", "1,2", "--sweeps", "50", "--reps", "1", "--seed", "9",
    ]);
    assert_eq!(code(&bad), 2, "non-decreasing top row is a config error");
}

#[test]
fn verify_identities_exits_zero_with_json_report() {
    let o = run(&["verify", "--target", "identities", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let reports: serde_json::Value =
        serde_json::from_str(&stdout_str(&o)).expect("stdout is a JSON report");
    let arr = reports.as_array().expect("array of reports");
    assert!(!arr.is_empty());
    for r in arr {
        for key in ["name", "statistic", "threshold", "p_value", "n_samples", "passed", "notes"] {
            assert!(r.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(r["passed"], serde_json::Value::Bool(true));
    }
    let summary = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(summary.contains("PASS"), "per-check lines go to stderr");
    assert!(summary.contains("binding checks passed"));
}

#[test]
fn verify_results_do_not_depend_on_jobs() {
    let one = run(&["verify", "--target", "equivalence", "--seed", "3", "--jobs", "1"]);
    let four = run(&["verify", "--target", "equivalence", "--seed", "3", "--jobs", "4"]);
    assert_eq!(code(&one), 0);
    assert_eq!(code(&four), 0);
    assert_eq!(one.stdout, four.stdout, "worker count must not change the report");
}

#[test]
fn verify_writes_report_file_when_asked() {
    let path = std::env::temp_dir().join(format!("wallwalk_report_{}.json", std::process::id()));
    let o = run(&[
        "verify",
        "--target",
        "equivalence",
        "--seed",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty(), "report goes to the file, not stdout");
    let text = std::fs::read_to_string(&path).expect("report file written");
    let reports: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    assert_eq!(reports.as_array().unwrap().len(), 2);
    std::fs::remove_file(&path).ok();
}

#[test]
fn verify_config_overlay_tightens_gates_and_rejects_bad_files() {
    let dir = std::env::temp_dir();
    let pid = std::process::id();

    // An impossible identity tolerance must flip the target to failure.
    let strict = dir.join(format!("wallwalk_strict_{pid}.json"));
    std::fs::write(&strict, "{\"identity_tol\": 1e-30}\n").unwrap();
    let o = run(&[
        "verify",
        "--target",
        "identities",
        "--seed",
        "1",
        "--config",
        strict.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1, "binding failures must exit 1");
    std::fs::remove_file(&strict).ok();

    // Unknown keys and malformed JSON are configuration errors.
    let unknown = dir.join(format!("wallwalk_unknown_{pid}.json"));
    std::fs::write(&unknown, "{\"not_a_knob\": 1}\n").unwrap();
    let o = run(&[
        "verify",
        "--target",
        "identities",
        "--seed",
        "1",
        "--config",
        unknown.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    std::fs::remove_file(&unknown).ok();

    let broken = dir.join(format!("wallwalk_broken_{pid}.json"));
    std::fs::write(&broken, "{oops\n").unwrap();
    let o = run(&[
        "verify",
        "--target",
        "identities",
        "--seed",
        "1",
        "--config",
        broken.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    std::fs::remove_file(&broken).ok();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["verify", "--target", "bogus", "--seed", "1"])), 2);
    assert_eq!(code(&run(&["verify", "--target", "identities"])), 2, "seed is mandatory");
    assert_eq!(code(&run(&["verify", "--target", "identities", "--seed", "1", "--nope"])), 2);
    assert_eq!(code(&run(&["eval-kernel", "--name", "nope", "--grid", "1"])), 2);
    assert_eq!(code(&run(&["no-such-subcommand"])), 2);
    assert_eq!(code(&run(&["simulate-particles", "--k", "0", "--steps", "1", "--reps", "1", "--seed", "1"])), 2);
    assert_eq!(
        code(&run(&["verify", "--target", "identities", "--seed", "1", "--jobs", "0"])),
        2
    );
}
