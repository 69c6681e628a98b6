//! Command-line front end: reproducible simulation, kernel evaluation, and
//! verification runs emitting plot-ready CSV and JSON reports.
//!
//! All data goes to `--out` (or stdout) as CSV with a header row, `.`
//! decimal points, and LF line endings; `verify` writes its JSON report to
//! stdout (or `--out`) and one human-readable line per check to stderr.
//! Identical invocations produce byte-identical output, and `--jobs` never
//! changes results, only wall time.
//!
//! Exit codes: 0 when the run (and every binding check) succeeded, 1 when a
//! binding verification check failed, 2 on usage or configuration errors.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wallwalk::verify::suite::{run_target, Target};
use wallwalk::verify::{all_binding_passed, format_report_line, VerifyConfig};
use wallwalk::{dynamics, gtpattern, kernels, matrixmodel, NoiseStream};

#[derive(Parser)]
#[command(
    name = "wallwalk",
    version,
    about = "Wall-blocked pushing particles, their antisymmetric matrix counterpart, \
             exact transition kernels, and a verification suite"
)]
struct Cli {
    /// Worker threads for replicate-parallel runs (results do not depend
    /// on this, only wall time).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the particle system and emit per-step positions as CSV.
    SimulateParticles(SimulateParticlesArgs),
    /// Simulate the matrix sum and emit spectral observables as CSV.
    SimulateMatrix(SimulateMatrixArgs),
    /// Evaluate a closed-form kernel on a grid and emit CSV.
    EvalKernel(EvalKernelArgs),
    /// Sample interlaced patterns under a fixed top row and emit CSV.
    SampleGt(SampleGtArgs),
    /// Run named verification targets and emit a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateParticlesArgs {
    /// Number of particles.
    #[arg(long)]
    k: usize,
    /// Number of full steps per replicate.
    #[arg(long)]
    steps: usize,
    /// Number of independent replicates.
    #[arg(long)]
    reps: usize,
    /// Base seed; replicate r simulates from substream r.
    #[arg(long)]
    seed: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MatrixObservable {
    /// Ordered positive spectral parts of the full matrix at every step.
    Spectra,
    /// Top spectral part of every leading minor at every step.
    Minors,
}

#[derive(Args)]
struct SimulateMatrixArgs {
    /// Particle-count parameter; the matrix has side k + 1.
    #[arg(long)]
    k: usize,
    /// Number of increments per replicate.
    #[arg(long)]
    steps: usize,
    /// Number of independent replicates.
    #[arg(long)]
    reps: usize,
    /// Base seed; replicate r simulates from substream r.
    #[arg(long)]
    seed: u64,
    /// Which spectral observable to record.
    #[arg(long, value_enum, default_value_t = MatrixObservable::Spectra)]
    observable: MatrixObservable,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum KernelName {
    /// Bilateral-exponential density order 0 at grid points.
    Phi,
    /// Reflected one-step kernel q(x, y) on grid x grid2.
    Q,
    /// Floor one-step kernel p_r(x, y) on grid x grid2 (needs --r).
    P,
    /// Rightmost-particle distribution formula at grid times (needs --k, --n).
    Cdf,
}

#[derive(Args)]
struct EvalKernelArgs {
    /// Kernel to evaluate.
    #[arg(long, value_enum)]
    name: KernelName,
    /// First-argument grid, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<f64>,
    /// Second-argument grid (defaults to --grid) for the two-argument kernels.
    #[arg(long, value_delimiter = ',')]
    grid2: Option<Vec<f64>>,
    /// Floor parameter for the p kernel.
    #[arg(long)]
    r: Option<f64>,
    /// Particle count for the distribution formula.
    #[arg(long)]
    k: Option<usize>,
    /// Step count for the distribution formula.
    #[arg(long)]
    n: Option<usize>,
    /// Whether the distribution formula is normalized to total mass one.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    normalized: bool,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleGtArgs {
    /// Number of particles (the pattern has rows 2 ..= k + 1).
    #[arg(long)]
    k: usize,
    /// Strictly decreasing positive top row, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    top: Vec<f64>,
    /// Gibbs sweeps per sample.
    #[arg(long, default_value_t = 100)]
    sweeps: usize,
    /// Number of independent samples.
    #[arg(long)]
    reps: usize,
    /// Base seed; sample r draws from substream r.
    #[arg(long)]
    seed: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Verification target.
    #[arg(long, value_parser = parse_target)]
    target: Target,
    /// Seed for every statistical check (mandatory for reproducibility).
    #[arg(long)]
    seed: u64,
    /// JSON file overriding tolerance/significance defaults; unknown keys
    /// are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_target(s: &str) -> Result<Target, String> {
    Target::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = Target::EVERY.iter().map(|t| t.name()).collect();
        format!("unknown target '{s}' (expected one of: {})", names.join(", "))
    })
}

/// Partial overlay on [`VerifyConfig`]; absent keys keep their defaults.
#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigOverlay {
    ks_significance: Option<f64>,
    quad_tol: Option<f64>,
    identity_tol: Option<f64>,
    n_perm: Option<usize>,
    energy_subsample: Option<usize>,
    gibbs_sweeps: Option<usize>,
}

impl ConfigOverlay {
    fn apply(self, mut cfg: VerifyConfig) -> VerifyConfig {
        if let Some(v) = self.ks_significance {
            cfg.ks_significance = v;
        }
        if let Some(v) = self.quad_tol {
            cfg.quad_tol = v;
        }
        if let Some(v) = self.identity_tol {
            cfg.identity_tol = v;
        }
        if let Some(v) = self.n_perm {
            cfg.n_perm = v;
        }
        if let Some(v) = self.energy_subsample {
            cfg.energy_subsample = v;
        }
        if let Some(v) = self.gibbs_sweeps {
            cfg.gibbs_sweeps = v;
        }
        cfg
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: could not configure {jobs} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::SimulateParticles(a) => simulate_particles(&a),
        Command::SimulateMatrix(a) => simulate_matrix(&a),
        Command::EvalKernel(a) => eval_kernel(&a),
        Command::SampleGt(a) => sample_gt(&a),
        Command::Verify(a) => verify(&a),
    }
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>, String> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).map_err(|e| format!("cannot create {}: {e}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_err(e: io::Error) -> String {
    format!("write failed: {e}")
}

fn require_positive(name: &str, v: usize) -> Result<(), String> {
    if v == 0 {
        return Err(format!("--{name} must be at least 1"));
    }
    Ok(())
}

fn simulate_particles(a: &SimulateParticlesArgs) -> Result<ExitCode, String> {
    require_positive("k", a.k)?;
    require_positive("steps", a.steps)?;
    require_positive("reps", a.reps)?;
    let root = NoiseStream::new(a.seed, 0);
    let mut w = open_out(&a.out)?;
    writeln!(w, "rep,t,i,x").map_err(write_err)?;
    for rep in 0..a.reps {
        let states = dynamics::simulate(a.k, a.steps, &root.derive(rep as u64));
        for (t, state) in states.iter().enumerate().skip(1) {
            for (i, x) in state.positions().iter().enumerate() {
                writeln!(w, "{rep},{t},{},{x}", i + 1).map_err(write_err)?;
            }
        }
    }
    w.flush().map_err(write_err)?;
    Ok(ExitCode::SUCCESS)
}

fn simulate_matrix(a: &SimulateMatrixArgs) -> Result<ExitCode, String> {
    require_positive("k", a.k)?;
    require_positive("steps", a.steps)?;
    require_positive("reps", a.reps)?;
    let dim = a.k + 1;
    let root = NoiseStream::new(a.seed, 0);
    let mut w = open_out(&a.out)?;
    match a.observable {
        MatrixObservable::Spectra => writeln!(w, "rep,t,j,sigma").map_err(write_err)?,
        MatrixObservable::Minors => writeln!(w, "rep,t,m,top").map_err(write_err)?,
    }
    for rep in 0..a.reps {
        let mut s = root.derive(rep as u64);
        let mut acc = matrixmodel::AntisymMatrix::<f64>::zeros(dim);
        for t in 1..=a.steps {
            acc.add_assign(&matrixmodel::sample_increment(dim, &mut s));
            match a.observable {
                MatrixObservable::Spectra => {
                    let spec = acc.positive_eigenvalues().map_err(|e| e.to_string())?;
                    for (j, v) in spec.coords().iter().enumerate() {
                        writeln!(w, "{rep},{t},{},{v}", j + 1).map_err(write_err)?;
                    }
                }
                MatrixObservable::Minors => {
                    let tops = acc.minor_top_eigenvalues().map_err(|e| e.to_string())?;
                    for (m, v) in tops.iter().enumerate() {
                        writeln!(w, "{rep},{t},{},{v}", m + 2).map_err(write_err)?;
                    }
                }
            }
        }
    }
    w.flush().map_err(write_err)?;
    Ok(ExitCode::SUCCESS)
}

fn eval_kernel(a: &EvalKernelArgs) -> Result<ExitCode, String> {
    if a.grid.is_empty() {
        return Err("--grid must contain at least one point".to_string());
    }
    let grid2 = a.grid2.clone().unwrap_or_else(|| a.grid.clone());
    // Evaluate everything up front so a domain error emits no partial CSV.
    let (header, lines) = match a.name {
        KernelName::Phi => {
            let lines: Vec<String> =
                a.grid.iter().map(|&x| format!("{x},{}", kernels::phi(x))).collect();
            ("x,value", lines)
        }
        KernelName::Q => {
            let mut lines = Vec::new();
            for &x in &a.grid {
                for &y in &grid2 {
                    let v = kernels::q_kernel(x, y).map_err(|e| e.to_string())?;
                    lines.push(format!("{x},{y},{v}"));
                }
            }
            ("x,y,value", lines)
        }
        KernelName::P => {
            let r = a.r.ok_or("the p kernel needs --r")?;
            let mut lines = Vec::new();
            for &x in &a.grid {
                for &y in &grid2 {
                    let v = kernels::p_r_kernel(r, x, y).map_err(|e| e.to_string())?;
                    lines.push(format!("{x},{y},{v}"));
                }
            }
            ("x,y,value", lines)
        }
        KernelName::Cdf => {
            let k = a.k.ok_or("the distribution formula needs --k")?;
            let n = a.n.ok_or("the distribution formula needs --n")?;
            let mut lines = Vec::new();
            for &t in &a.grid {
                let v =
                    kernels::cdf_last_particle(k, n, t, a.normalized).map_err(|e| e.to_string())?;
                lines.push(format!("{t},{v}"));
            }
            ("t,value", lines)
        }
    };
    let mut w = open_out(&a.out)?;
    writeln!(w, "{header}").map_err(write_err)?;
    for line in lines {
        writeln!(w, "{line}").map_err(write_err)?;
    }
    w.flush().map_err(write_err)?;
    Ok(ExitCode::SUCCESS)
}

fn sample_gt(a: &SampleGtArgs) -> Result<ExitCode, String> {
    require_positive("k", a.k)?;
    require_positive("reps", a.reps)?;
    require_positive("sweeps", a.sweeps)?;
    let root = NoiseStream::new(a.seed, 0);
    let mut w = open_out(&a.out)?;
    writeln!(w, "rep,row,idx,value").map_err(write_err)?;
    for rep in 0..a.reps {
        let mut s = root.derive(rep as u64);
        let pattern =
            gtpattern::sample_l_kernel(a.k, &a.top, a.sweeps, &mut s).map_err(|e| e.to_string())?;
        for (ri, row) in pattern.rows().iter().enumerate() {
            for (ci, v) in row.iter().enumerate() {
                writeln!(w, "{rep},{},{},{v}", ri + 2, ci + 1).map_err(write_err)?;
            }
        }
    }
    w.flush().map_err(write_err)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(a: &VerifyArgs) -> Result<ExitCode, String> {
    let mut cfg = VerifyConfig::default();
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let overlay: ConfigOverlay =
            serde_json::from_str(&text).map_err(|e| format!("bad config JSON: {e}"))?;
        cfg = overlay.apply(cfg);
    }
    let reports = run_target(a.target, &cfg, a.seed);
    for r in &reports {
        eprintln!("{}", format_report_line(r));
    }
    let binding = reports.iter().filter(|r| r.is_binding()).count();
    let passed = reports.iter().filter(|r| r.is_binding() && r.passed).count();
    eprintln!("{passed}/{binding} binding checks passed ({} reports total)", reports.len());
    let json =
        serde_json::to_string_pretty(&reports).map_err(|e| format!("report serialization: {e}"))?;
    match &a.out {
        Some(p) => fs::write(p, format!("{json}\n"))
            .map_err(|e| format!("cannot write {}: {e}", p.display()))?,
        None => println!("{json}"),
    }
    Ok(if all_binding_passed(&reports) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
