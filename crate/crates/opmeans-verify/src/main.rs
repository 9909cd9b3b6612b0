//! `opmeans` — command-line driver for randomized verification campaigns,
//! counterexample searches, and one-off evaluations of matrix means and
//! (anti-)norm functionals.
//!
//! Exit codes: 0 when everything behaved as expected (designed negative
//! controls failing counts as expected), 1 when a property failed
//! unexpectedly or an internal error occurred, 2 on configuration errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use opmeans_core::antinorm::{evaluate_antinorm, evaluate_norm, AntiNormSpec, NormSpec};
use opmeans_core::HermitianMatrix;
use opmeans_verify::meanspec::{MultiMeanSpec, PairMeanSpec};
use opmeans_verify::registry::all_ids;
use opmeans_verify::search::{search_counterexample, SearchSpace, WITNESS_THRESHOLD};
use opmeans_verify::{run_campaign, unexpected_cases, CampaignConfig, CampaignReport, VerifyError};

#[derive(Parser)]
#[command(
    name = "opmeans",
    version,
    about = "Randomized verification of matrix-mean and anti-norm inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run randomized verification campaigns over registered properties.
    Verify(VerifyArgs),
    /// Search for counterexamples to an open hypothesis.
    Search(SearchArgs),
    /// Evaluate a two-matrix or multivariable mean on explicit inputs.
    Eval(EvalArgs),
    /// Evaluate an anti-norm or norm functional on an explicit input.
    Antinorm(AntinormArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated property ids, or "all".
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    props: Vec<String>,
    /// Fix the matrix dimension (default: cycle through 2,3,4,6).
    #[arg(long)]
    dim: Option<usize>,
    /// Trials per property.
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// Master seed; per-property streams are derived from it.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Margin tolerance: a trial fails when its margin drops below -tol.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Write the full JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write a per-property CSV summary here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads for running properties (does not affect results).
    #[arg(long, default_value_t = 1)]
    parallel: usize,
}

#[derive(Args)]
struct SearchArgs {
    /// One of: conj-1.7, gm-le-lm, thm-4.7-sigma-p.
    #[arg(long)]
    hypothesis: String,
    /// Number of candidate evaluations.
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the JSON search report here (it is always printed to stdout).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Mean specification, e.g. "mean:geo", "mean:bp:p=0.5",
    /// "mean:geodesic:atoms=(0,0.25),(0.5,0.5),(1,0.25)",
    /// "mmean:karcher:w=0.2,0.3,0.5", "mmean:logarithmic:S=2000".
    #[arg(long)]
    mean: String,
    /// First operand (two-matrix means), as a JSON matrix file.
    #[arg(long = "A")]
    a: Option<PathBuf>,
    /// Second operand (two-matrix means), as a JSON matrix file.
    #[arg(long = "B")]
    b: Option<PathBuf>,
    /// Operand files for multivariable means ("mmean:...").
    #[arg(long, num_args = 1..)]
    matrices: Vec<PathBuf>,
    /// Seed for Monte Carlo means ("mmean:logarithmic").
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AntinormArgs {
    /// Functional specification, e.g. "anorm:kyfan:k=2", "anorm:schatten:p=0.5",
    /// "anorm:derived:norm=kyfan:k=2,p=1", "anorm:dual:of=norm:trace",
    /// "norm:schatten:p=2".
    #[arg(long)]
    spec: String,
    /// Input matrix, as a JSON matrix file.
    #[arg(long = "A")]
    a: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Search(args) => cmd_search(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Antinorm(args) => cmd_antinorm(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                VerifyError::Config(_) | VerifyError::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, VerifyError> {
    let props = if args.props.iter().any(|p| p == "all") {
        all_ids()
    } else {
        args.props.clone()
    };
    let cfg = CampaignConfig {
        props,
        dim: args.dim,
        trials: args.trials,
        seed: args.seed,
        tol: args.tol,
        parallelism: args.parallel.max(1),
    };
    let report = run_campaign(&cfg)?;
    print_campaign(&report);

    if let Some(path) = &args.report {
        fs::write(path, report.to_json())?;
    }
    if let Some(path) = &args.csv {
        fs::write(path, report.to_csv())?;
    }

    let unexpected = unexpected_cases(&report);
    if unexpected.is_empty() {
        println!("campaign ok: {} properties behaved as expected", report.cases.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("campaign FAILED: unexpected outcome for {}", unexpected.join(", "));
        Ok(ExitCode::from(1))
    }
}

fn print_campaign(report: &CampaignReport) {
    for case in &report.cases {
        let status = match (case.negative_control, case.failures > 0) {
            (false, false) => "pass ",
            (false, true) => "FAIL ",
            (true, true) => "xfail",
            (true, false) => "UNEXP",
        };
        let mut line = format!(
            "[{status}] {:<24} trials={:<5} failures={:<5} worst_margin={:+.3e}",
            case.id, case.trials, case.failures, case.worst_margin
        );
        if let Some(rate) = case.acceptance_rate {
            line.push_str(&format!(" acceptance={rate:.2}"));
        }
        if case.negative_control {
            line.push_str(" (negative control)");
        }
        println!("{line}");
    }
}

fn cmd_search(args: SearchArgs) -> Result<ExitCode, VerifyError> {
    let outcome = search_counterexample(
        &args.hypothesis,
        args.budget,
        args.seed,
        SearchSpace::Full,
    )?;
    match &outcome.witness {
        Some(w) => eprintln!(
            "verified counterexample found: margin {:.6e} (threshold {:.1e})",
            w.margin, WITNESS_THRESHOLD
        ),
        None => eprintln!(
            "no counterexample found within budget {} (this is not a proof)",
            outcome.budget
        ),
    }
    let json = outcome.to_json();
    println!("{json}");
    if let Some(path) = &args.report {
        fs::write(path, json)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn read_matrix(path: &PathBuf) -> Result<HermitianMatrix, VerifyError> {
    let text = fs::read_to_string(path)
        .map_err(|e| VerifyError::Config(format!("cannot read {}: {e}", path.display())))?;
    HermitianMatrix::from_json(&text)
        .map_err(|e| VerifyError::Config(format!("bad matrix in {}: {e}", path.display())))
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode, VerifyError> {
    if args.mean.starts_with("mmean:") {
        let spec: MultiMeanSpec = args.mean.parse()?;
        if args.matrices.is_empty() {
            return Err(VerifyError::Config(
                "multivariable means need --matrices <file>...".into(),
            ));
        }
        let mats: Vec<HermitianMatrix> = args
            .matrices
            .iter()
            .map(read_matrix)
            .collect::<Result<_, _>>()?;
        let result = spec.eval(&mats, args.seed)?;
        let out = serde_json::json!({
            "mean": args.mean,
            "operands": mats.len(),
            "result": serde_json::to_value(&result)?,
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        let spec: PairMeanSpec = args.mean.parse()?;
        let (a, b) = match (&args.a, &args.b) {
            (Some(a), Some(b)) => (read_matrix(a)?, read_matrix(b)?),
            _ => {
                return Err(VerifyError::Config(
                    "two-matrix means need --A <file> and --B <file>".into(),
                ))
            }
        };
        let (result, eps) = spec.eval(&a, &b)?;
        let out = serde_json::json!({
            "mean": args.mean,
            "result": serde_json::to_value(&result)?,
            "integration_eps": eps,
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_antinorm(args: AntinormArgs) -> Result<ExitCode, VerifyError> {
    let a = read_matrix(&args.a)?;
    let value = if args.spec.starts_with("norm:") {
        let spec: NormSpec = args
            .spec
            .parse()
            .map_err(|e| VerifyError::Config(format!("{e}")))?;
        evaluate_norm(&spec, &a)?
    } else {
        let spec: AntiNormSpec = args
            .spec
            .parse()
            .map_err(|e| VerifyError::Config(format!("{e}")))?;
        evaluate_antinorm(&spec, &a)?
    };
    let out = serde_json::json!({ "spec": args.spec, "value": value });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}
