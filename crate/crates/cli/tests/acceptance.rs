//! Acceptance gate for the workspace: runs every contract the toolkit
//! ships with and prints one pass/fail line per criterion. Built without
//! the libtest harness so the lines always reach stdout; exits nonzero
//! if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nepkit_core::bifurcation::{
    bifurcation_sensitivity, detect_bifurcation, eigen_path, ParametricNep,
};
use nepkit_core::companion::oracle_eigenvalues;
use nepkit_core::contour::{count_eigenvalues_inside, discretize, CircularContour};
use nepkit_core::gallery;
use nepkit_core::linalg::{svd_extremes, CMatrix, C64};
use nepkit_core::operator::{NepOperator, ScalarFunction, Term};
use nepkit_core::perturbation::{
    bauer_fike_bound, condition_number, convergence_under_noise, perturb_experiment,
    PerturbationSpec, PerturbationStructure,
};
use nepkit_core::refine::{newton_det, variational_solve, RefineConfig};
use nepkit_core::solver::{solve, SolveError, SolverConfig};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Symmetric Hausdorff-style distance; errors on count mismatch.
fn set_distance(got: &[C64], want: &[C64]) -> Result<f64, String> {
    if got.len() != want.len() {
        return Err(format!(
            "count mismatch: solver {}, oracle {}",
            got.len(),
            want.len()
        ));
    }
    let mut worst = 0.0f64;
    for w in want {
        let d = got.iter().map(|g| (*g - *w).norm()).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    for g in got {
        let d = want.iter().map(|w| (*g - *w).norm()).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Winding on the given contour, doubling nodes until the phase guard
/// accepts the discretization.
fn stable_winding(op: &NepOperator, disk: CircularContour) -> Result<i64, String> {
    for n in [64usize, 128, 256, 512, 1024, 2048] {
        if let Ok(w) = count_eigenvalues_inside(op, &discretize(disk, n)) {
            return Ok(w);
        }
    }
    Err("winding did not stabilize by 2048 nodes".into())
}

/// Boundary-clean radius: steps outward until no oracle modulus grazes it.
fn clean_radius(moduli: &[f64], start: f64) -> f64 {
    let mut radius = start;
    while moduli.iter().any(|m| (m - radius).abs() < 1e-3) {
        radius += 3.1e-3;
    }
    radius
}

fn criterion_1_polynomial_oracle_equivalence() -> Result<(), String> {
    let op = gallery::example_quadratic();
    let disk = CircularContour::new(c(0.0, 0.0), 2.0);
    let oracle =
        oracle_eigenvalues(&op, Some(&disk)).map_err(|e| format!("oracle failed: {e}"))?;
    ensure(oracle.len() == 4, format!("oracle count {}", oracle.len()))?;

    let t0 = Instant::now();
    let report = solve(&op, disk, &SolverConfig::default())
        .map_err(|e| format!("solve failed: {e}"))?;
    let wall = t0.elapsed();
    ensure(report.converged, "solve did not converge")?;
    let dist = set_distance(&report.eigenvalues, &oracle)?;
    ensure(dist <= 1e-8, format!("oracle distance {dist:.3e} > 1e-8"))?;
    ensure(
        wall < Duration::from_secs(1),
        format!("solve took {wall:.2?}"),
    )?;

    for seed in 0..50u64 {
        let op = gallery::random_quadratic(3, 2000 + seed);
        let all = match oracle_eigenvalues(&op, None) {
            Ok(v) => v,
            Err(_) => continue, // degenerate random leading block
        };
        let moduli: Vec<f64> = all.iter().map(|e| e.norm()).collect();
        let radius = clean_radius(&moduli, 1.1);
        let disk = CircularContour::new(c(0.0, 0.0), radius);
        let want: Vec<C64> = all.into_iter().filter(|e| e.norm() < radius).collect();
        let rep = solve(&op, disk, &SolverConfig::default())
            .map_err(|e| format!("seed {seed}: solve failed: {e}"))?;
        ensure(rep.converged, format!("seed {seed}: not converged"))?;
        let d = set_distance(&rep.eigenvalues, &want).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(d <= 1e-7, format!("seed {seed}: distance {d:.3e} > 1e-7"))?;
    }
    Ok(())
}

fn criterion_2_winding_consistency() -> Result<(), String> {
    let named: Vec<(NepOperator, CircularContour, String)> = vec![
        (
            gallery::example_quadratic(),
            CircularContour::new(c(0.0, 0.0), 2.0),
            "quadratic".into(),
        ),
        (
            gallery::example_rational(),
            CircularContour::new(c(2.0, 0.0), 0.45),
            "rational right of pole".into(),
        ),
        (
            gallery::example_rational(),
            CircularContour::new(c(1.05, 0.0), 0.3),
            "rational left of pole".into(),
        ),
    ];
    for (op, disk, label) in &named {
        let report =
            solve(op, *disk, &SolverConfig::default()).map_err(|e| format!("{label}: {e}"))?;
        ensure(report.converged, format!("{label}: not converged"))?;
        let w = stable_winding(op, *disk).map_err(|e| format!("{label}: {e}"))?;
        ensure(
            report.eigenvalues.len() as i64 == w,
            format!("{label}: found {} but winding {w}", report.eigenvalues.len()),
        )?;
    }

    let mut converged_runs = 0;
    for seed in 0..10u64 {
        let op = gallery::random_quadratic(3, 4000 + seed);
        let radius = match oracle_eigenvalues(&op, None) {
            Ok(all) => {
                let moduli: Vec<f64> = all.iter().map(|e| e.norm()).collect();
                clean_radius(&moduli, 1.1)
            }
            Err(_) => 1.1,
        };
        let disk = CircularContour::new(c(0.0, 0.0), radius);
        let report = match solve(&op, disk, &SolverConfig::default()) {
            Ok(r) if r.converged => r,
            _ => continue, // the contract binds converged runs only
        };
        converged_runs += 1;
        let w = stable_winding(&op, disk).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(
            report.eigenvalues.len() as i64 == w,
            format!("seed {seed}: found {} but winding {w}", report.eigenvalues.len()),
        )?;
    }
    ensure(
        converged_runs >= 8,
        format!("only {converged_runs}/10 random runs converged"),
    )
}

fn audited_solve(
    op: &NepOperator,
    disk: CircularContour,
    expected: usize,
    label: &str,
) -> Result<(), String> {
    let t0 = Instant::now();
    let report =
        solve(op, disk, &SolverConfig::default()).map_err(|e| format!("{label}: {e}"))?;
    let wall = t0.elapsed();
    ensure(
        wall < Duration::from_secs(5),
        format!("{label}: took {wall:.2?}"),
    )?;
    ensure(report.converged, format!("{label}: not converged"))?;
    ensure(
        report.eigenvalues.len() == expected,
        format!("{label}: found {}, expected {expected}", report.eigenvalues.len()),
    )?;
    for lam in &report.eigenvalues {
        let t = op.evaluate(*lam).map_err(|e| format!("{label}: {e}"))?;
        let s = svd_extremes(&t).map_err(|e| format!("{label}: {e}"))?;
        ensure(
            s.sigma_min <= 1e-8 * s.sigma_max,
            format!(
                "{label}: σ_min/σ_max = {:.3e} at λ = {lam}",
                s.sigma_min / s.sigma_max
            ),
        )?;
    }
    let w = stable_winding(op, disk).map_err(|e| format!("{label}: {e}"))?;
    ensure(
        report.eigenvalues.len() as i64 == w,
        format!("{label}: count {} vs winding {w}", report.eigenvalues.len()),
    )
}

fn criterion_3_transcendental_residual_audit() -> Result<(), String> {
    audited_solve(
        &gallery::example_exponential(),
        CircularContour::new(c(0.0, 0.0), 3.0),
        2,
        "exponential",
    )?;
    audited_solve(
        &gallery::example_logarithmic(),
        CircularContour::new(c(3.0, 0.0), 1.5),
        1,
        "logarithmic",
    )
}

fn criterion_4_empirical_shift_bound() -> Result<(), String> {
    let op = gallery::example_quadratic();
    let disk = CircularContour::new(c(0.0, 0.0), 2.0);
    let evs = oracle_eigenvalues(&op, Some(&disk)).map_err(|e| e.to_string())?;
    for &lam in &evs {
        let spec = PerturbationSpec {
            epsilon: 1e-6,
            seed: 42,
            trials: 100,
            structure: PerturbationStructure::AllTerms,
        };
        let rep = perturb_experiment(&op, lam, &spec, &RefineConfig::default())
            .map_err(|e| format!("at λ = {lam}: {e}"))?;
        let rate = rep.satisfaction_rate();
        ensure(
            rate >= 0.99,
            format!("rate {rate:.4} < 0.99 at λ = {lam}"),
        )?;
    }

    // 1×1 linear operator: the first-order bound is exact.
    let scalar = gallery::shifted_diagonal(&[2.0]);
    let spec = PerturbationSpec {
        epsilon: 1e-3,
        seed: 9,
        trials: 20,
        structure: PerturbationStructure::BaseOnly,
    };
    let rep = perturb_experiment(&scalar, c(2.0, 0.0), &spec, &RefineConfig::default())
        .map_err(|e| format!("scalar family: {e}"))?;
    for s in &rep.samples {
        ensure(!s.diverged, "scalar family trial diverged")?;
        let bound = s.delta_norm / rep.sigma_min_deriv;
        ensure(
            (s.actual_shift - bound).abs() <= 1e-12,
            format!(
                "scalar family: shift {:.16e} vs bound {:.16e}",
                s.actual_shift, bound
            ),
        )?;
    }
    Ok(())
}

fn criterion_5_condition_identities() -> Result<(), String> {
    let op = gallery::example_quadratic();
    // T'(0) is the exchange matrix, so its condition number is exactly 1.
    let kappa = condition_number(&op, c(0.0, 0.0)).map_err(|e| e.to_string())?;
    ensure(
        (kappa - 1.0).abs() <= 1e-12,
        format!("κ(T'(0)) = {kappa:.16e}"),
    )?;

    let delta = 3.7e-4;
    let b1 = bauer_fike_bound(&op, c(0.0, 0.0), delta).map_err(|e| e.to_string())?;
    let b2 = bauer_fike_bound(&op, c(0.0, 0.0), 2.0 * delta).map_err(|e| e.to_string())?;
    ensure(
        b2 == 2.0 * b1,
        format!("bound(2δ) = {b2:.16e} vs 2·bound(δ) = {:.16e}", 2.0 * b1),
    )
}

fn refine_order_checks(
    op: &NepOperator,
    target: C64,
    label: &str,
) -> Result<(), String> {
    let seed = target + c(1e-2, 0.0);
    let cfg = RefineConfig::default();

    let newton = newton_det(op, seed, &cfg).map_err(|e| format!("{label}: newton: {e}"))?;
    ensure(newton.converged, format!("{label}: newton not converged"))?;
    ensure(
        newton.iterations <= 6,
        format!("{label}: newton took {} iterations", newton.iterations),
    )?;
    let err = (newton.lambda - target).norm();
    ensure(err <= 1e-12, format!("{label}: newton error {err:.3e}"))?;

    let var =
        variational_solve(op, seed, &cfg).map_err(|e| format!("{label}: variational: {e}"))?;
    ensure(var.converged, format!("{label}: variational not converged"))?;
    ensure(
        var.iterations <= 10,
        format!("{label}: variational took {} iterations", var.iterations),
    )?;
    let err = (var.lambda - target).norm();
    ensure(err <= 1e-12, format!("{label}: variational error {err:.3e}"))?;

    // Quadratic contraction of the Newton error sequence; pairs whose
    // 5e² target sits at machine precision carry no information.
    let errs: Vec<f64> = newton
        .history
        .iter()
        .map(|(l, _)| (*l - target).norm())
        .collect();
    let mut checked = 0;
    for w in errs.windows(2) {
        if w[0] < 1e-3 && w[0] > 1e-14 {
            ensure(
                w[1] <= 5.0 * w[0] * w[0] + 1e-15,
                format!("{label}: error pair ({:.3e}, {:.3e}) breaks 5e²", w[0], w[1]),
            )?;
            checked += 1;
        }
    }
    ensure(
        checked >= 1,
        format!("{label}: no measurable pair in {errs:?}"),
    )
}

fn criterion_6_convergence_orders() -> Result<(), String> {
    refine_order_checks(
        &gallery::shifted_diagonal(&[1.0, 2.0]),
        c(1.0, 0.0),
        "diagonal",
    )?;
    refine_order_checks(
        &gallery::example_quadratic(),
        c(0.17102535791737067, 1.2417699040694765),
        "quadratic",
    )
}

fn criterion_7_noise_scaling() -> Result<(), String> {
    let op = gallery::example_quadratic();
    let lam = c(0.17102535791737067, 1.2417699040694765);
    let spec = PerturbationSpec {
        seed: 7,
        ..PerturbationSpec::default()
    };
    let cfg = RefineConfig::default();

    let rep = convergence_under_noise(&op, lam, &[1e-3, 1e-5, 1e-7], &spec, &cfg)
        .map_err(|e| e.to_string())?;
    ensure(
        (rep.slope_loglog - 1.0).abs() <= 0.2,
        format!("log-log slope {:.4}", rep.slope_loglog),
    )?;

    let clean =
        convergence_under_noise(&op, lam, &[0.0], &spec, &cfg).map_err(|e| e.to_string())?;
    ensure(
        clean.floors[0] <= cfg.tol,
        format!("noise-free floor {:.3e} above tolerance {:.1e}", clean.floors[0], cfg.tol),
    )
}

/// Scalar family λ² − μ: fold at μ = 0 where the two branches ±√μ meet.
fn fold_family() -> ParametricNep {
    ParametricNep::new(1, |mu| {
        NepOperator::new(
            CMatrix::from_real(&[&[-mu]]),
            vec![Term {
                coeff: CMatrix::identity(1),
                func: ScalarFunction::Monomial { power: 2 },
            }],
        )
        .unwrap()
    })
}

fn scalar_delta(epsilon: f64, power: u32) -> ParametricNep {
    ParametricNep::new(1, move |_| {
        NepOperator::new(
            CMatrix::zeros(1, 1),
            vec![Term {
                coeff: CMatrix::from_real(&[&[epsilon]]),
                func: ScalarFunction::Monomial { power },
            }],
        )
        .unwrap()
    })
}

fn criterion_8_bifurcation_detection() -> Result<(), String> {
    let fam = fold_family();
    let grid: Vec<f64> = (0..11).map(|k| 1.0 - 0.099 * k as f64).collect();
    let cfg = RefineConfig::default();

    let report = detect_bifurcation(&fam, &grid, c(1.0, 0.0), &cfg)
        .map_err(|e| format!("detection: {e}"))?;
    let mu_c = report.critical_mu.ok_or("no critical point detected")?;
    let lambda_c = report.critical_lambda.ok_or("critical λ missing")?;
    ensure(mu_c.abs() <= 1e-6, format!("critical μ = {mu_c:.3e}"))?;

    // The two branches ±√μ stay separated on the grid...
    let plus = eigen_path(&fam, &grid, c(1.0, 0.0), &cfg).map_err(|e| e.to_string())?;
    let minus = eigen_path(&fam, &grid, c(-1.0, 0.0), &cfg).map_err(|e| e.to_string())?;
    for (i, (p, m)) in plus.iter().zip(&minus).enumerate() {
        let gap = (p.lambda - m.lambda).norm();
        ensure(
            gap >= grid[i].sqrt(),
            format!("branches merged early: gap {gap:.3e} at μ = {}", grid[i]),
        )?;
    }
    // ...and coalesce at the critical parameter: detection run from the
    // opposite branch must land on the same critical point with a
    // merging λ. A real-seeded corrector cannot cross the real axis,
    // which is the basin boundary at the fold, so each branch's own
    // detection is the meaningful coalescence witness.
    let minus_report = detect_bifurcation(&fam, &grid, c(-1.0, 0.0), &cfg)
        .map_err(|e| format!("minus-branch detection: {e}"))?;
    let mu_c_minus = minus_report
        .critical_mu
        .ok_or("minus branch found no critical point")?;
    let lambda_c_minus = minus_report
        .critical_lambda
        .ok_or("minus branch critical λ missing")?;
    ensure(
        (mu_c - mu_c_minus).abs() <= 1e-6,
        format!("critical μ split: {mu_c:.3e} vs {mu_c_minus:.3e}"),
    )?;
    let gap = (lambda_c - lambda_c_minus).norm();
    ensure(gap <= 1e-6, format!("branches {gap:.3e} apart at critical μ"))?;

    // ΔT = ε·λ: both sensitivity estimates; agreement is only required
    // when the closed form rises above its 1e-8 reliability floor.
    let (closed, fd) =
        bifurcation_sensitivity(&fam, &scalar_delta(1e-5, 1), &grid, c(1.0, 0.0), mu_c, lambda_c, &cfg)
            .map_err(|e| format!("λ-linear overlay: {e}"))?;
    ensure(closed.is_finite() && fd.is_finite(), "overlay estimate not finite")?;
    if closed.abs() > 1e-8 {
        ensure(
            (closed - fd).abs() <= 0.1 * closed.abs(),
            format!("estimates disagree: closed {closed:.6e}, fd {fd:.6e}"),
        )?;
    }

    // ΔT = ε constant: the closed form is exactly zero while re-detection
    // sees the true shift ε; the report must surface both.
    let eps = 1e-5;
    let (closed, fd) =
        bifurcation_sensitivity(&fam, &scalar_delta(eps, 0), &grid, c(1.0, 0.0), mu_c, lambda_c, &cfg)
            .map_err(|e| format!("constant overlay: {e}"))?;
    ensure(closed == 0.0, format!("constant overlay closed form {closed:.3e}"))?;
    ensure(
        (fd - eps).abs() <= 1e-7,
        format!("constant overlay fd {fd:.6e}, expected ε = {eps:.1e}"),
    )
}

fn criterion_9_adaptivity_payoff() -> Result<(), String> {
    let op = gallery::close_pair(1e-4);
    let disk = CircularContour::new(c(0.5, 0.0), 1.0);
    let truth = [c(1.0, 0.0), c(1.0001, 0.0)];

    let cfg = SolverConfig {
        n_initial: 16,
        ..SolverConfig::default()
    };
    let report = solve(&op, disk, &cfg).map_err(|e| format!("adaptive solve: {e}"))?;
    ensure(report.converged, "adaptive solve not converged")?;
    let d = set_distance(&report.eigenvalues, &truth)?;
    ensure(d <= 1e-10, format!("adaptive distance {d:.3e} > 1e-10"))?;
    ensure(
        report.contour_history.len() >= 2,
        "no refinement contour was spawned",
    )?;

    let frozen = SolverConfig {
        n_initial: 16,
        adaptive: false,
        ..SolverConfig::default()
    };
    match solve(&op, disk, &frozen) {
        Err(SolveError::NotConverged { report }) => {
            for got in &report.eigenvalues {
                let err = truth.iter().map(|t| (*got - *t).norm()).fold(f64::INFINITY, f64::min);
                ensure(
                    err > 1e-10,
                    format!("frozen-budget estimate {got} unexpectedly sharp"),
                )?;
            }
            Ok(())
        }
        Err(_) => Ok(()),
        Ok(_) => Err("solve met the tolerance without adaptivity".into()),
    }
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_str()
        .expect("utf-8 path")
        .to_owned()
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<i32, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_nepkit"))
        .args(args)
        .current_dir(dir)
        .env_remove("NEPKIT_SEED")
        .output()
        .map_err(|e| format!("spawn failed: {e}"))?;
    out.status.code().ok_or_else(|| "killed by signal".into())
}

fn read_out(dir: &Path, rel: &str) -> Result<String, String> {
    std::fs::read_to_string(dir.join(rel)).map_err(|e| format!("{rel}: {e}"))
}

fn criterion_10_determinism_and_exit_codes() -> Result<(), String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let ex1 = fixture("example1_quadratic.json");
    let lam = "0.17102535791737067,1.2417699040694765";

    for name in ["pa", "pb"] {
        let code = run_cli(
            dir,
            &["perturb", "--problem", &ex1, "--lambda0", lam, "--seed", "11", "--out", name],
        )?;
        ensure(code == 0, format!("seeded perturb exited {code}"))?;
    }
    ensure(
        read_out(dir, "pa/bound_vs_actual.csv")? == read_out(dir, "pb/bound_vs_actual.csv")?,
        "seeded perturb runs are not byte-identical",
    )?;
    for name in ["sa", "sb"] {
        let code = run_cli(dir, &["solve", "--problem", &ex1, "--radius", "2", "--out", name])?;
        ensure(code == 0, format!("solve exited {code}"))?;
    }
    ensure(
        read_out(dir, "sa/eigenvalues.csv")? == read_out(dir, "sb/eigenvalues.csv")?,
        "solve runs are not byte-identical",
    )?;

    let broken = dir.join("broken.json");
    std::fs::write(&broken, "{\"dimension\":").map_err(|e| e.to_string())?;
    let broken = broken.to_str().unwrap().to_owned();
    let diag = fixture("diag12_linear.json");
    let fold = fixture("fold_family.json");
    let ex2 = fixture("example2_exponential.json");
    let escape = fixture("escape_family.json");

    let matrix: Vec<(Vec<&str>, i32)> = vec![
        (vec!["solve", "--problem", &ex1, "--radius", "2", "--out", "m0"], 0),
        (vec!["solve", "--problem", &ex1, "--radius", "0"], 1),
        (vec!["solve", "--problem", &broken, "--radius", "1"], 1),
        (vec!["solve", "--problem", &fold, "--radius", "1"], 1),
        (vec!["oracle", "--problem", &ex2], 1),
        (vec!["perturb", "--problem", &ex1, "--lambda0", "0.4,0.4"], 1),
        (
            vec!["refine", "--problem", &diag, "--lambda0", "1.5,0", "--method", "newton"],
            2,
        ),
        (
            vec![
                "bifurcate", "--problem", &escape, "--grid", "-1:0:3", "--lambda0", "0,0",
                "--out", "m7",
            ],
            2,
        ),
    ];
    for (args, expect) in &matrix {
        let code = run_cli(dir, args)?;
        ensure(
            code == *expect,
            format!("{args:?} exited {code}, expected {expect}"),
        )?;
    }
    ensure(
        dir.join("m7/path.csv").exists(),
        "broken continuation did not write its partial path",
    )
}

fn main() {
    type Criterion = fn() -> Result<(), String>;
    let criteria: Vec<(u32, &str, Criterion)> = vec![
        (1, "polynomial-oracle-equivalence", criterion_1_polynomial_oracle_equivalence),
        (2, "winding-consistency", criterion_2_winding_consistency),
        (3, "transcendental-residual-audit", criterion_3_transcendental_residual_audit),
        (4, "empirical-shift-bound", criterion_4_empirical_shift_bound),
        (5, "condition-identities", criterion_5_condition_identities),
        (6, "convergence-orders", criterion_6_convergence_orders),
        (7, "noise-scaling", criterion_7_noise_scaling),
        (8, "bifurcation-detection", criterion_8_bifurcation_detection),
        (9, "adaptivity-payoff", criterion_9_adaptivity_payoff),
        (10, "determinism-and-exit-codes", criterion_10_determinism_and_exit_codes),
    ];

    let mut failures = 0;
    for (number, name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(()) => println!("acceptance {number:2} {name}: PASS"),
            Err(why) => {
                failures += 1;
                println!("acceptance {number:2} {name}: FAIL ({why})");
            }
        }
    }
    if failures > 0 {
        println!("acceptance gate: {failures} criterion(s) failing");
        std::process::exit(1);
    }
    println!("acceptance gate: all 10 criteria pass");
}
