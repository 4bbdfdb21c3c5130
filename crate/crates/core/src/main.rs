use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use lp_tikhonov::experiments::suites::{oracle_compare, run_inequality_suites};
use lp_tikhonov::experiments::{render_report, run_sweep, ReportFormat, SweepConfig};
use lp_tikhonov::model::{gen_truth, DiagonalOperator, ProblemRecord, RegProblem, TruthKind};
use lp_tikhonov::rng::derive_seed;
use lp_tikhonov::tikhonov::{alpha_apriori, post_process, solve, RegConfig, RegSolution, SolverSettings};
use lp_tikhonov::{Error, Result, SpaceParams, TruncatedSequence};

#[derive(Parser)]
#[command(name = "lp-tikhonov", version, about = "Sparsity-promoting Tikhonov regularization lab")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a δ-sweep described by a JSON config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve a single instance, generated or loaded from a problem file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the randomized inequality suites.
    Check {
        #[arg(long, default_value_t = 10_000)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the exact solver with the brute-force oracle.
    OracleCompare {
        #[arg(long, default_value_t = 500)]
        coords: usize,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Generated single instance.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceSpec {
    params: SpaceParams,
    truth_kind: TruthKind,
    n: usize,
    delta: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_margin")]
    decay_margin: f64,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    post_process: bool,
    #[serde(default)]
    solver: SolverSettings,
}

fn default_margin() -> f64 {
    0.2
}

/// A stored problem plus solve options.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StoredSpec {
    problem: ProblemRecord,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    post_process: bool,
    #[serde(default)]
    solver: SolverSettings,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SolveSpec {
    Stored(StoredSpec),
    Instance(InstanceSpec),
}

#[derive(Serialize)]
struct SolveOutput {
    problem: ProblemRecord,
    alpha: f64,
    solution: RegSolution,
    post_processed: Option<TruncatedSequence>,
    err_tau: f64,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn cmd_sweep(config: &Path, out: Option<&Path>, format: Format, seed: Option<u64>) -> Result<()> {
    let mut sweep: SweepConfig = read_json(config)?;
    if let Some(seed) = seed {
        sweep.seed = seed;
    }
    let started = Instant::now();
    let report = run_sweep(&sweep)?;
    eprintln!(
        "sweep: {} noise levels x {} trials at n={} in {:.2}s",
        report.rows.len(),
        sweep.trials_per_delta,
        report.metadata.n,
        started.elapsed().as_secs_f64()
    );
    let format = match format {
        Format::Csv => ReportFormat::Csv,
        Format::Json => ReportFormat::Json,
    };
    write_output(out, &render_report(&report, format)?)
}

fn cmd_solve(config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<()> {
    let (problem, params, alpha, post, solver) = match read_json::<SolveSpec>(config)? {
        SolveSpec::Stored(spec) => {
            let (problem, params) = spec.problem.into_problem()?;
            (problem, params, spec.alpha, spec.post_process, spec.solver)
        }
        SolveSpec::Instance(spec) => {
            let seed = seed.unwrap_or(spec.seed);
            let truth = gen_truth(spec.truth_kind, spec.n, &spec.params, spec.decay_margin, derive_seed(seed, &[1]))?;
            let op = DiagonalOperator::random(spec.n, spec.params.a, derive_seed(seed, &[2]))?;
            let problem = RegProblem::generate(op, truth, spec.delta, derive_seed(seed, &[3]))?;
            (problem, spec.params, spec.alpha, spec.post_process, spec.solver)
        }
    };
    let alpha = match alpha {
        Some(alpha) => alpha,
        None => alpha_apriori(problem.delta, &params)?,
    };
    let config = RegConfig::new(params, alpha, solver)?;
    let solution = solve(&problem, &config)?;
    let post_processed = if post {
        Some(post_process(&solution.u_reg, problem.delta, &params)?)
    } else {
        None
    };
    let err_tau = solution.u_reg.sub(&problem.u_dagger)?.norm(params.tau)?;
    let output = SolveOutput {
        problem: problem.to_record(&params),
        alpha,
        solution,
        post_processed,
        err_tau,
    };
    write_output(out, &json_text(&output)?)
}

fn cmd_check(cases: usize, seed: u64, out: Option<&Path>) -> Result<bool> {
    let outcomes = run_inequality_suites(cases, seed)?;
    for o in &outcomes {
        eprintln!(
            "{} {:<14} cases={} failures={} worst_ratio={:.6e}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.cases,
            o.failures,
            o.worst_ratio
        );
    }
    write_output(out, &json_text(&outcomes)?)?;
    Ok(outcomes.iter().all(|o| o.passed))
}

fn cmd_oracle(coords: usize, instances: usize, seed: u64, out: Option<&Path>) -> Result<bool> {
    let cmp = oracle_compare(coords, instances, seed)?;
    for c in &cmp.coordinates {
        eprintln!(
            "p={:<4} sigma={} cases={} failures={} worst_excess={:.3e}",
            c.p, c.sigma, c.cases, c.failures, c.worst_excess
        );
    }
    eprintln!(
        "instances={} failures={} worst_rel_gap={:.3e}",
        cmp.instances, cmp.instance_failures, cmp.worst_instance_rel_gap
    );
    write_output(out, &json_text(&cmp)?)?;
    Ok(cmp.passed)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sweep {
            config,
            out,
            format,
            seed,
        } => cmd_sweep(&config, out.as_deref(), format, seed).map(|_| true),
        Command::Solve { config, out, seed } => cmd_solve(&config, out.as_deref(), seed).map(|_| true),
        Command::Check { cases, seed, out } => cmd_check(cases, seed, out.as_deref()),
        Command::OracleCompare {
            coords,
            instances,
            seed,
            out,
        } => cmd_oracle(coords, instances, seed, out.as_deref()),
    }
}

fn error_object(err: &Error) -> serde_json::Value {
    serde_json::json!({
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
            "coordinate": err.coordinate(),
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            let err = Error::InvalidInput(format!("cannot configure {threads} threads: {e}"));
            eprintln!("{}", error_object(&err));
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("{}", error_object(&err));
            ExitCode::from(2)
        }
    }
}
