use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::SolverConfig;
use super::report::{Format, RunReport};
use crate::dynamics::kernel::{self, Kernel, KernelSpec};
use crate::dynamics::{evolve, kernel_properties, EvolveOptions, Model, Trajectory};
use crate::entropy::{build_monitors, MonitorContext, Verdict};
use crate::error::{Error, Result};
use crate::experiments::{data_of, run_study, StudyKind, StudySpec};
use crate::spectral::Grid;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

/// Largest number of kernel samples written to CSV.
const KERNEL_CSV_ROWS: usize = 4097;

#[derive(Parser, Debug)]
#[command(name = "boussfrac", version, about = "Pseudospectral laboratory for the fractal-regularized Boussinesq system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve one initial datum and monitor it.
    Simulate(Common),
    /// eps -> 0 convergence study.
    ConvergeEps(Common),
    /// Bona-Smith mu_n = n^-5 Cauchy study.
    BonaSmith(Common),
    /// Entropy bound along mollified rough data.
    EntropyConstruct(Common),
    /// Weak-form residuals: manufactured solution and refinement.
    WeakResidual(Common),
    /// Continuity of the solution map.
    FlowContinuity(Common),
    /// Seeded trials of the harmonic-analysis estimates.
    VerifyEstimates(Common),
    /// Properties of the kernel of exp(-eps t g_lambda).
    Kernel(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override, repeatable: --set key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (BF_OUTPUT_DIR takes precedence).
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    /// Sobolev index.
    #[arg(long)]
    s: Option<String>,
    /// Grid size.
    #[arg(long)]
    n: Option<String>,
    /// Half-period L; accepts a `pi` suffix.
    #[arg(long = "half-length")]
    half_length: Option<String>,
    /// Final time T.
    #[arg(long = "t-final")]
    t_final: Option<String>,
    /// Time step, or `auto`.
    #[arg(long)]
    dt: Option<String>,
    /// Initial data generator.
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
    /// Trials per estimate.
    #[arg(long)]
    trials: Option<String>,
    /// Kernel time.
    #[arg(long)]
    t: Option<String>,
    #[arg(long, value_enum, default_value = "both")]
    format: Format,
}

/// Per-command defaults applied before the config file.
fn preset(name: &str) -> &'static [&'static str] {
    match name {
        "bona-smith" => &["L=8pi", "n=1024"],
        _ => &[],
    }
}

impl Common {
    fn config(&self, name: &str) -> Result<SolverConfig> {
        let mut c = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                let mut c = SolverConfig::default();
                c.apply(preset(name))?;
                for line in text.lines() {
                    let line = line.split('#').next().unwrap_or("").trim();
                    if !line.is_empty() {
                        c.apply(&[line])?;
                    }
                }
                c
            }
            None => {
                let mut c = SolverConfig::default();
                c.apply(preset(name))?;
                c
            }
        };
        c.apply(&self.set)?;
        let typed = [
            ("output", &self.out),
            ("seed", &self.seed),
            ("eps", &self.eps),
            ("lambda", &self.lambda),
            ("mu", &self.mu),
            ("s", &self.s),
            ("n", &self.n),
            ("L", &self.half_length),
            ("T", &self.t_final),
            ("dt", &self.dt),
            ("data", &self.data),
            ("amplitude", &self.amplitude),
            ("trials", &self.trials),
            ("t", &self.t),
        ];
        for (k, v) in typed {
            if let Some(v) = v {
                c.set(k, v)?;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

fn simulate(c: &SolverConfig) -> Result<RunReport> {
    let grid = Grid::new(c.half_length, c.n_modes)?;
    let state0 = data_of(c, c.data).build(&grid)?;
    let ctx = MonitorContext { params: c.params(), s: c.s };
    let mut monitors = build_monitors(&c.monitors, &ctx);
    let mut opts = EvolveOptions::new(c.t_final)
        .scheme(c.scheme)
        .sample_interval(c.sample_interval)
        .sobolev_index(c.s);
    if let Some(dt) = c.dt {
        opts = opts.dt(dt);
    }
    let traj: Trajectory = evolve(&state0, &Model::new(c.params()), &opts, &mut monitors)?;
    Ok(RunReport::from_trajectory("simulate", c, &traj))
}

fn kernel_report(c: &SolverConfig) -> Result<RunReport> {
    let spec = KernelSpec::new(c.lambda, c.eps, c.t)?;
    let rep = kernel_properties(&spec)?;
    let mut r = RunReport::new("kernel", c);
    r.verdicts.push(Verdict::check(
        "l1-norm",
        (rep.l1_norm - 1.0).abs(),
        kernel::L1_TOL,
        format!("| |K|_L1 - 1 |, |K|_L1 = {:.12}", rep.l1_norm),
    ));
    r.verdicts.push(Verdict::check(
        "dx-l1-scaling",
        (rep.dx_l1_scaled / rep.c1_expected - 1.0).abs(),
        kernel::C1_TOL,
        format!("|K_x|_L1 (eps t)^(1/lambda) = {:.9} against c1 = {:.9}", rep.dx_l1_scaled, rep.c1_expected),
    ));
    r.verdicts.push(Verdict::check(
        "self-similarity",
        rep.self_similarity_residual,
        kernel::IDENTITY_TOL,
        "max |K(t, x) - t^(-1/lambda) K(1, x t^(-1/lambda))|".into(),
    ));
    if let Some(e) = rep.closed_form_error {
        r.verdicts.push(Verdict::check("closed-form", e, kernel::IDENTITY_TOL, "max-abs gap to the closed form".into()));
    }
    let k = Kernel::auto(&spec)?;
    let stride = (k.grid.len() / (KERNEL_CSV_ROWS - 1)).max(1);
    r.columns = vec!["x".into(), "K".into(), "K_x".into()];
    r.rows = k
        .grid
        .nodes()
        .iter()
        .zip(k.values.iter().zip(&k.dx_values))
        .step_by(stride)
        .map(|(&x, (&v, &d))| vec![x, v, d])
        .collect();
    r.details = serde_json::to_value(&rep)?;
    r.info.insert("l1_norm".into(), rep.l1_norm);
    Ok(r.finish())
}

fn execute(command: &Command) -> Result<(RunReport, Format, String, SolverConfig)> {
    let (name, common) = match command {
        Command::Simulate(c) => ("simulate", c),
        Command::ConvergeEps(c) => ("converge-eps", c),
        Command::BonaSmith(c) => ("bona-smith", c),
        Command::EntropyConstruct(c) => ("entropy-construct", c),
        Command::WeakResidual(c) => ("weak-residual", c),
        Command::FlowContinuity(c) => ("flow-continuity", c),
        Command::VerifyEstimates(c) => ("verify-estimates", c),
        Command::Kernel(c) => ("kernel", c),
    };
    let cfg = common.config(name)?;
    let study = |kind| -> Result<RunReport> {
        let spec = StudySpec { kind, config: cfg.clone() };
        Ok(RunReport::from_study(&cfg, run_study(&spec)?))
    };
    let report = match command {
        Command::Simulate(_) => simulate(&cfg)?,
        Command::ConvergeEps(_) => study(StudyKind::EpsConvergence)?,
        Command::BonaSmith(_) => study(StudyKind::BonaSmith)?,
        Command::EntropyConstruct(_) => study(StudyKind::EntropyConstruction)?,
        Command::WeakResidual(_) => study(StudyKind::WeakResidual)?,
        Command::FlowContinuity(_) => study(StudyKind::FlowContinuity)?,
        Command::VerifyEstimates(_) => study(StudyKind::EstimateFuzz)?,
        Command::Kernel(_) => kernel_report(&cfg)?,
    };
    Ok((report, common.format, name.to_string(), cfg))
}

/// Exit status of a finished report.
pub fn exit_code(report: &RunReport) -> i32 {
    if report.pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

/// Parses `argv` (program name first), runs, writes artifacts and returns
/// the exit code: 0 all verdicts pass, 2 some verdict fails, 1 usage,
/// configuration or i/o error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok((report, format, name, cfg)) => {
            for v in &report.verdicts {
                println!(
                    "{} {} value={:e} tol={:e}",
                    if v.pass { "PASS" } else { "FAIL" },
                    v.monitor,
                    v.value,
                    v.tolerance
                );
            }
            for w in &report.warnings {
                println!("WARN {w}");
            }
            let root = cfg.output_root();
            match report.write(&root, &name, format) {
                Ok(paths) => {
                    for p in paths {
                        println!("wrote {}", p.display());
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            }
            exit_code(&report)
        }
        Err(Error::Counterexample { estimate, detail }) => {
            println!("FAIL {estimate}: counterexample {detail}");
            EXIT_FAIL
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
