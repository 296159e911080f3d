//! nepkit: contour-integral nonlinear eigensolver toolkit.
//!
//! Exit codes: 0 success, 1 usage/input error, 2 numerical
//! non-convergence (partial outputs are still written where they exist).

mod output;
mod problem;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use nepkit_core::bifurcation::{
    bifurcation_sensitivity, detect_bifurcation, BifurcationError, ParametricNep, PathPoint,
};
use nepkit_core::companion;
use nepkit_core::contour::CircularContour;
use nepkit_core::linalg::{svd_extremes, C64};
use nepkit_core::operator::{NepOperator, ScalarFunction, Term};
use nepkit_core::perturbation::{self, PerturbationError, PerturbationSpec};
use nepkit_core::refine::{self, RefineConfig, RefineError, RefineResult};
use nepkit_core::solver::{self, SolveError, SolveReport, SolverConfig};

use output::{csv, fmt, write_atomic, Manifest};
use problem::{parse_problem, ParsedProblem};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, malformed problem files, preconditions violated: exit 1.
    Usage(String),
    /// The computation ran but did not converge or broke down: exit 2.
    Numeric(String),
}

#[derive(Parser)]
#[command(
    name = "nepkit",
    version,
    about = "Nonlinear eigenvalue toolkit: contour solve, refinement, perturbation bounds, parameter continuation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find all eigenvalues inside a circular contour
    Solve(SolveArgs),
    /// Companion-linearization ground truth for polynomial/rational problems
    Oracle(OracleArgs),
    /// Empirical first-order perturbation bound at an eigenvalue
    Perturb(PerturbArgs),
    /// Track an eigenvalue along the problem parameter and locate bifurcations
    Bifurcate(BifurcateArgs),
    /// Iterate a single eigenvalue to convergence from a seed
    Refine(RefineArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Contour center as RE,IM
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    center: String,
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value_t = 32)]
    n_initial: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Re-verify every eigenpair against the sigma_min residual gate
    #[arg(long)]
    residual_audit: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Eigenvalue estimate as RE,IM
    #[arg(long, allow_hyphen_values = true)]
    lambda0: String,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Defaults to NEPKIT_SEED from the environment, then 42
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct BifurcateArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Parameter grid as START:END:POINTS
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Eigenvalue seed at the first grid point, as RE,IM
    #[arg(long, allow_hyphen_values = true)]
    lambda0: String,
    /// Overlay perturbation size for sensitivity estimates
    #[arg(long)]
    delta_epsilon: Option<f64>,
    /// Monomial power of the overlay perturbation epsilon*lambda^p*I
    #[arg(long, default_value_t = 1)]
    delta_power: u32,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RefineArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Starting point as RE,IM
    #[arg(long, allow_hyphen_values = true)]
    lambda0: String,
    #[arg(long, value_parser = ["newton", "variational"])]
    method: String,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() {
    let code = match Cli::try_parse() {
        Ok(cli) => match run(cli) {
            Ok(()) => 0,
            Err(CliError::Usage(msg)) => {
                eprintln!("error: {msg}");
                1
            }
            Err(CliError::Numeric(msg)) => {
                eprintln!("error: {msg}");
                2
            }
        },
        Err(e) => {
            let help = !e.use_stderr();
            let _ = e.print();
            if help {
                0
            } else {
                1
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Perturb(a) => cmd_perturb(a),
        Command::Bifurcate(a) => cmd_bifurcate(a),
        Command::Refine(a) => cmd_refine(a),
    }
}

fn parse_complex(text: &str, what: &str) -> Result<C64, CliError> {
    let bad = || CliError::Usage(format!("{what} must be RE or RE,IM, got {text:?}"));
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(C64::new(re.trim().parse().map_err(|_| bad())?, 0.0)),
        [re, im] => Ok(C64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("grid must be START:END:POINTS, got {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    if steps < 2 {
        return Err(CliError::Usage("grid needs at least 2 points".into()));
    }
    if a == b || !a.is_finite() || !b.is_finite() {
        return Err(CliError::Usage("grid endpoints must be distinct and finite".into()));
    }
    Ok((0..steps)
        .map(|k| a + (b - a) * k as f64 / (steps - 1) as f64)
        .collect())
}

fn fixed_problem(path: &PathBuf) -> Result<NepOperator, CliError> {
    match parse_problem(path)? {
        ParsedProblem::Fixed(op) => Ok(op),
        ParsedProblem::Parametric(_) => Err(CliError::Usage(
            "this command takes a fixed problem; bifurcate handles parametric files".into(),
        )),
    }
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("NEPKIT_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(42)
}

// ── solve ────────────────────────────────────────────────────────────────────

fn write_solve_outputs(
    args: &SolveArgs,
    cfg: &SolverConfig,
    report: &SolveReport,
) -> Result<(), CliError> {
    let clusters = solver::cluster(&report.eigenvalues, cfg.cluster_radius * args.radius);
    let cluster_id = |lambda: C64| {
        clusters
            .iter()
            .position(|c| c.members.contains(&lambda))
            .expect("every eigenvalue belongs to a cluster")
    };
    let rows: Vec<Vec<String>> = report
        .eigenvalues
        .iter()
        .zip(&report.residuals)
        .map(|(&e, &r)| vec![fmt(e.re), fmt(e.im), fmt(r), cluster_id(e).to_string()])
        .collect();
    write_atomic(
        &args.out,
        "eigenvalues.csv",
        &csv(&["re", "im", "residual", "cluster_id"], &rows),
    )?;
    let contour_rows: Vec<Vec<String>> = report
        .contour_history
        .iter()
        .map(|c| vec![fmt(c.center.re), fmt(c.center.im), fmt(c.radius)])
        .collect();
    write_atomic(
        &args.out,
        "contours.csv",
        &csv(&["center_re", "center_im", "radius"], &contour_rows),
    )?;
    Manifest {
        command: "solve",
        config: serde_json::json!({
            "center": args.center,
            "radius": args.radius,
            "n_initial": args.n_initial,
            "tol": args.tol,
            "residual_audit": args.residual_audit,
        }),
        seed: None,
        input: args.problem.clone(),
        outputs: vec!["eigenvalues.csv", "contours.csv"],
    }
    .write(&args.out)
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    if !(args.radius.is_finite() && args.radius > 0.0) {
        return Err(CliError::Usage("radius must be positive".into()));
    }
    let op = fixed_problem(&args.problem)?;
    let center = parse_complex(&args.center, "center")?;
    let contour = CircularContour::new(center, args.radius);
    let cfg = SolverConfig {
        n_initial: args.n_initial,
        tol: args.tol,
        ..SolverConfig::default()
    };
    let report = match solver::solve(&op, contour, &cfg) {
        Ok(r) => r,
        Err(SolveError::NotConverged { report }) => {
            write_solve_outputs(&args, &cfg, &report)?;
            return Err(CliError::Numeric(format!(
                "solver did not converge after {} outer iterations; partial output written",
                report.outer_iterations
            )));
        }
        Err(e @ SolveError::InvalidContour { .. }) => {
            return Err(CliError::Usage(e.to_string()))
        }
        Err(e) => return Err(CliError::Numeric(e.to_string())),
    };
    write_solve_outputs(&args, &cfg, &report)?;
    if args.residual_audit {
        for (&e, x) in report.eigenvalues.iter().zip(&report.eigenvectors) {
            let t = op
                .evaluate(e)
                .map_err(|err| CliError::Numeric(err.to_string()))?;
            let s = svd_extremes(&t).map_err(|err| CliError::Numeric(err.to_string()))?;
            let _ = x;
            if s.sigma_min > 1e-8 * s.sigma_max {
                return Err(CliError::Numeric(format!(
                    "residual audit failed at {e}: sigma_min {:.3e} > 1e-8 * {:.3e}",
                    s.sigma_min, s.sigma_max
                )));
            }
        }
        println!("residual audit passed for {} eigenpairs", report.eigenvalues.len());
    }
    println!(
        "found {} eigenvalues in {} outer iterations (winding {:?})",
        report.eigenvalues.len(),
        report.outer_iterations,
        report.winding
    );
    Ok(())
}

// ── oracle ───────────────────────────────────────────────────────────────────

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let op = fixed_problem(&args.problem)?;
    let mut roots = match companion::oracle_eigenvalues(&op, None) {
        Ok(r) => r,
        Err(companion::CompanionError::Unsupported(_)) => {
            return Err(CliError::Usage(
                "no closed-form oracle; use --residual-audit".into(),
            ))
        }
        Err(e) => return Err(CliError::Numeric(e.to_string())),
    };
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let rows: Vec<Vec<String>> = roots.iter().map(|r| vec![fmt(r.re), fmt(r.im)]).collect();
    write_atomic(&args.out, "oracle_eigenvalues.csv", &csv(&["re", "im"], &rows))?;
    Manifest {
        command: "oracle",
        config: serde_json::json!({}),
        seed: None,
        input: args.problem.clone(),
        outputs: vec!["oracle_eigenvalues.csv"],
    }
    .write(&args.out)?;
    println!("{} oracle eigenvalues", roots.len());
    Ok(())
}

// ── perturb ──────────────────────────────────────────────────────────────────

fn cmd_perturb(args: PerturbArgs) -> Result<(), CliError> {
    let op = fixed_problem(&args.problem)?;
    let lambda0 = parse_complex(&args.lambda0, "lambda0")?;
    let seed = resolve_seed(args.seed);
    let spec = PerturbationSpec {
        epsilon: args.epsilon,
        seed,
        trials: args.trials,
        ..PerturbationSpec::default()
    };
    let report = match perturbation::perturb_experiment(&op, lambda0, &spec, &RefineConfig::default())
    {
        Ok(r) => r,
        Err(e @ PerturbationError::NotAnEigenvalue { .. }) => {
            return Err(CliError::Usage(e.to_string()))
        }
        Err(PerturbationError::Domain(e)) => return Err(CliError::Usage(e.to_string())),
        Err(e) => return Err(CliError::Numeric(e.to_string())),
    };
    let rows: Vec<Vec<String>> = report
        .samples
        .iter()
        .enumerate()
        .map(|(k, s)| {
            vec![
                k.to_string(),
                fmt(s.delta_norm),
                fmt(s.delta_norm / report.sigma_min_deriv),
                fmt(s.actual_shift),
                s.satisfied.to_string(),
            ]
        })
        .collect();
    write_atomic(
        &args.out,
        "bound_vs_actual.csv",
        &csv(&["trial", "delta_norm", "bound", "actual", "satisfied"], &rows),
    )?;
    Manifest {
        command: "perturb",
        config: serde_json::json!({
            "lambda0": args.lambda0,
            "epsilon": args.epsilon,
            "trials": args.trials,
        }),
        seed: Some(seed),
        input: args.problem.clone(),
        outputs: vec!["bound_vs_actual.csv"],
    }
    .write(&args.out)?;
    println!(
        "rate {:.4} over {} trials; sigma_min {:.6e} kappa {:.6e} bound {:.6e}",
        report.satisfaction_rate(),
        report.samples.len(),
        report.sigma_min_deriv,
        report.kappa,
        report.absolute_bound
    );
    Ok(())
}

// ── bifurcate ────────────────────────────────────────────────────────────────

fn write_path_csv(out: &PathBuf, path: &[PathPoint]) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = path
        .iter()
        .map(|p| {
            vec![
                fmt(p.mu),
                fmt(p.lambda.re),
                fmt(p.lambda.im),
                fmt(p.det_deriv.norm()),
                fmt(p.residual),
            ]
        })
        .collect();
    write_atomic(
        out,
        "path.csv",
        &csv(&["mu", "lambda_re", "lambda_im", "det_deriv_abs", "residual"], &rows),
    )
}

fn overlay_family(dim: usize, epsilon: f64, power: u32) -> ParametricNep {
    ParametricNep::new(dim, move |_| {
        let base = nepkit_core::linalg::CMatrix::zeros(dim, dim);
        let coeff = nepkit_core::linalg::CMatrix::identity(dim).scale(C64::new(epsilon, 0.0));
        NepOperator::new(
            base,
            vec![Term { coeff, func: ScalarFunction::Monomial { power } }],
        )
        .expect("overlay family is well-formed")
    })
}

fn cmd_bifurcate(args: BifurcateArgs) -> Result<(), CliError> {
    let fam = match parse_problem(&args.problem)? {
        ParsedProblem::Parametric(f) => f,
        ParsedProblem::Fixed(_) => {
            return Err(CliError::Usage(
                "parametric problem block required; add a \"parameter\" entry".into(),
            ))
        }
    };
    let grid = parse_grid(&args.grid)?;
    let seed = parse_complex(&args.lambda0, "lambda0")?;
    let cfg = RefineConfig::default();
    let manifest = |outputs: Vec<&'static str>| Manifest {
        command: "bifurcate",
        config: serde_json::json!({
            "grid": args.grid,
            "lambda0": args.lambda0,
            "delta_epsilon": args.delta_epsilon,
            "delta_power": args.delta_power,
        }),
        seed: None,
        input: args.problem.clone(),
        outputs,
    };
    let report = match detect_bifurcation(&fam, &grid, seed, &cfg) {
        Ok(r) => r,
        Err(BifurcationError::PathBroken { index, path }) => {
            write_path_csv(&args.out, &path)?;
            manifest(vec!["path.csv"]).write(&args.out)?;
            return Err(CliError::Numeric(format!(
                "eigenvalue path broke at grid index {index}; partial path written"
            )));
        }
        Err(e) => return Err(CliError::Numeric(e.to_string())),
    };
    write_path_csv(&args.out, &report.path)?;
    let (Some(mu_c), Some(lambda_c)) = (report.critical_mu, report.critical_lambda) else {
        manifest(vec!["path.csv"]).write(&args.out)?;
        println!("no bifurcation on the grid");
        return Ok(());
    };
    let sensitivity = match args.delta_epsilon {
        Some(eps) => {
            let delta = overlay_family(fam.dim(), eps, args.delta_power);
            match bifurcation_sensitivity(&fam, &delta, &grid, seed, mu_c, lambda_c, &cfg) {
                Ok(pair) => Some(pair),
                Err(e) => {
                    eprintln!("warning: sensitivity estimators unavailable: {e}");
                    None
                }
            }
        }
        None => None,
    };
    let (closed, fd) = match sensitivity {
        Some((c, f)) => (fmt(c), fmt(f)),
        None => (String::new(), String::new()),
    };
    let row = vec![vec![fmt(mu_c), fmt(lambda_c.re), fmt(lambda_c.im), closed, fd]];
    write_atomic(
        &args.out,
        "bifurcation.csv",
        &csv(
            &[
                "critical_mu",
                "critical_lambda_re",
                "critical_lambda_im",
                "delta_alpha_closed",
                "delta_alpha_fd",
            ],
            &row,
        ),
    )?;
    manifest(vec!["path.csv", "bifurcation.csv"]).write(&args.out)?;
    println!("critical_mu {:.6e}", mu_c);
    Ok(())
}

// ── refine ───────────────────────────────────────────────────────────────────

fn write_convergence_csv(out: &PathBuf, res: &RefineResult) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = res
        .history
        .iter()
        .enumerate()
        .map(|(k, &(lam, s))| {
            vec![
                k.to_string(),
                fmt(lam.re),
                fmt(lam.im),
                fmt((lam - res.lambda).norm()),
                fmt(s),
            ]
        })
        .collect();
    write_atomic(
        out,
        "convergence.csv",
        &csv(
            &["iteration", "lambda_re", "lambda_im", "error_proxy", "residual"],
            &rows,
        ),
    )
}

fn cmd_refine(args: RefineArgs) -> Result<(), CliError> {
    let op = fixed_problem(&args.problem)?;
    let lambda0 = parse_complex(&args.lambda0, "lambda0")?;
    let cfg = RefineConfig { tol: args.tol, ..RefineConfig::default() };
    let outcome = match args.method.as_str() {
        "newton" => refine::newton_det(&op, lambda0, &cfg),
        _ => refine::variational_solve(&op, lambda0, &cfg),
    };
    let manifest = || Manifest {
        command: "refine",
        config: serde_json::json!({
            "lambda0": args.lambda0,
            "method": args.method,
            "tol": args.tol,
        }),
        seed: None,
        input: args.problem.clone(),
        outputs: vec!["convergence.csv"],
    };
    match outcome {
        Ok(res) => {
            write_convergence_csv(&args.out, &res)?;
            manifest().write(&args.out)?;
            if res.converged {
                println!(
                    "converged to {:.16e},{:.16e} in {} iterations (residual {:.3e})",
                    res.lambda.re, res.lambda.im, res.iterations, res.residual
                );
                Ok(())
            } else {
                Err(CliError::Numeric(format!(
                    "iteration stalled at residual {:.3e}",
                    res.residual
                )))
            }
        }
        Err(RefineError::NotConverged { result }) => {
            write_convergence_csv(&args.out, &result)?;
            manifest().write(&args.out)?;
            Err(CliError::Numeric(format!(
                "no convergence in {} iterations; history written",
                result.iterations
            )))
        }
        Err(RefineError::Domain(e)) => Err(CliError::Usage(e.to_string())),
        Err(e) => Err(CliError::Numeric(e.to_string())),
    }
}
