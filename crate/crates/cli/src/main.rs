use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nucmeasure_cli::problem::SolverChoice;
use nucmeasure_cli::{emit_curve_plot_data, run, Config, Kind, ProblemFile};

const EXIT_FAILED_CHECK: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_GUARD: u8 = 3;

#[derive(Parser)]
#[command(name = "nucmeasure", version)]
#[command(about = "Operator norms, nuclear norms and weak non-compactness measures for finite labeled matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified bracket for the operator norm ‖T‖_{q→p}
    Norm(Opts),
    /// Certified bracket for the nuclear norm with representation and dual witness
    Nuclear(Opts),
    /// Budgeted ℓ¹ (or weighted L¹) tail formula
    MeasureL1(Opts),
    /// Budgeted c₀ formula
    MeasureC0(Opts),
    /// Budgeted min–max of nuclear residuals over truncation pairs
    MeasureNuclear(Opts),
    /// Nuclear measure in atomic coordinates of a von Neumann predual
    MeasureVn(Opts),
    /// Central partition of atoms for a generator set
    Partition(Opts),
    /// Measure values for budgets 0..=k_max
    Curve(Opts),
    /// Run the bundled U, {T_n} and B examples and report each assertion
    VerifyPaperExample(Opts),
}

impl Command {
    fn split(self) -> (Kind, Opts) {
        match self {
            Command::Norm(o) => (Kind::Norm, o),
            Command::Nuclear(o) => (Kind::Nuclear, o),
            Command::MeasureL1(o) => (Kind::MeasureL1, o),
            Command::MeasureC0(o) => (Kind::MeasureC0, o),
            Command::MeasureNuclear(o) => (Kind::MeasureNuclear, o),
            Command::MeasureVn(o) => (Kind::MeasureVn, o),
            Command::Partition(o) => (Kind::Partition, o),
            Command::Curve(o) => (Kind::Curve, o),
            Command::VerifyPaperExample(o) => (Kind::VerifyPaperExample, o),
        }
    }
}

#[derive(Args)]
struct Opts {
    /// Problem file (JSON). Optional for verify-paper-example only.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Report file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Row budget k
    #[arg(long)]
    budget_c: Option<usize>,
    /// Column budget l
    #[arg(long)]
    budget_d: Option<usize>,
    #[arg(long, value_enum)]
    solver: Option<SolverChoice>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Rank-one term budget for nuclear representations
    #[arg(long)]
    max_terms: Option<usize>,
    /// Plot data for the curve kind: `budget upper [lower]` per line
    #[arg(long)]
    curve_out: Option<PathBuf>,
}

impl Opts {
    fn apply(&self, cfg: &mut Config) {
        if let Some(v) = self.budget_c {
            cfg.budget_c = Some(v);
        }
        if let Some(v) = self.budget_d {
            cfg.budget_d = Some(v);
        }
        if let Some(v) = self.solver {
            cfg.solver = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.max_terms {
            cfg.max_terms = Some(v);
        }
    }
}

fn load(kind: Kind, opts: &Opts) -> Result<ProblemFile> {
    let mut problem = match &opts.input {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ProblemFile::parse(&text)?
        }
        None if kind == Kind::VerifyPaperExample => {
            ProblemFile { kind, payload: serde_json::Value::Null, config: Config::default() }
        }
        None => bail!("--input is required"),
    };
    if problem.kind != kind {
        bail!("problem file has kind {:?}, subcommand expects {kind:?}", problem.kind);
    }
    if opts.curve_out.is_some() && kind != Kind::Curve {
        bail!("--curve-out applies to the curve subcommand only");
    }
    opts.apply(&mut problem.config);
    Ok(problem)
}

fn guard_tripped(err: &anyhow::Error) -> bool {
    err.chain().any(|e| matches!(e.downcast_ref::<nucmeasure::Error>(), Some(nucmeasure::Error::EnumerationLimit { .. })))
}

fn main() -> ExitCode {
    let (kind, opts) = Cli::parse().command.split();
    let problem = match load(kind, &opts) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let (report, curve) = match run(&problem) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(if guard_tripped(&e) { EXIT_GUARD } else { EXIT_INPUT });
        }
    };
    if let Err(e) = write_outputs(&report, curve.as_ref(), &opts) {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    if nucmeasure_cli::run::verified(&report) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED_CHECK)
    }
}

fn write_outputs(
    report: &nucmeasure_cli::Report,
    curve: Option<&nucmeasure::measures::ResidualCurve>,
    opts: &Opts,
) -> Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    match &opts.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(curve)) = (&opts.curve_out, curve) {
        fs::write(path, emit_curve_plot_data(curve)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
