//! First-order eigenvalue sensitivity: the σ_min-of-derivative shift
//! bound, its condition-number relative form, seeded Monte-Carlo
//! experiments against both, and refinement-rate degradation under
//! operator noise.

use crate::linalg::{spectral_norm, svd_extremes, CMatrix, C64};
use crate::operator::{NepOperator, OperatorError, PerturbedOperator, Term};
use crate::refine::{newton_det, variational_solve, RefineConfig, RefineError};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// The shift bounds are first order; finite perturbations carry
/// curvature the slack must absorb.
pub const FIRST_ORDER_SLACK: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum PerturbationError {
    #[error("derivative is singular at λ0; the first-order bound is vacuous")]
    DerivativeSingular,
    #[error("operator vanishes at λ0; relative bound undefined")]
    ZeroOperator,
    #[error("λ0 = {lambda} is not a converged eigenvalue (σ_min ratio {ratio:.2e})")]
    NotAnEigenvalue { lambda: C64, ratio: f64 },
    #[error("trial {trial} did not re-converge")]
    TrialDiverged { trial: usize },
    #[error(transparent)]
    Domain(#[from] OperatorError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerturbationStructure {
    /// Independent Gaussian blocks on the base and every term, scaled
    /// jointly.
    AllTerms,
    BaseOnly,
    TermIndex(usize),
}

#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    pub epsilon: f64,
    pub seed: u64,
    pub trials: usize,
    pub structure: PerturbationStructure,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        PerturbationSpec {
            epsilon: 1e-6,
            seed: 42,
            trials: 100,
            structure: PerturbationStructure::AllTerms,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundSample {
    pub actual_shift: f64,
    /// ‖ΔT(λ′)‖ at the re-converged eigenvalue, the norm the bound is
    /// stated with.
    pub delta_norm: f64,
    pub delta_norm_at_lambda0: f64,
    pub satisfied: bool,
    pub diverged: bool,
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub lambda0: C64,
    pub sigma_min_deriv: f64,
    pub kappa: f64,
    /// ε/σ_min(T′(λ0)) at the nominal perturbation size.
    pub absolute_bound: f64,
    /// κ·ε/‖T(λ0)‖ at the nominal perturbation size.
    pub relative_bound: f64,
    pub samples: Vec<BoundSample>,
}

impl BoundReport {
    pub fn satisfaction_rate(&self) -> f64 {
        if self.samples.is_empty() {
            return 1.0;
        }
        let ok = self.samples.iter().filter(|s| s.satisfied).count();
        ok as f64 / self.samples.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct NoiseConvergenceReport {
    pub epsilon_levels: Vec<f64>,
    /// Median per-iteration contraction of the variational error, one
    /// entry per level.
    pub rates: Vec<f64>,
    /// Terminal |λ_k − λ̃*| per level.
    pub floors: Vec<f64>,
    /// |λ̃* − λ*| per level; the quantity the log-log slope is fit on.
    pub shifts: Vec<f64>,
    pub slope_loglog: f64,
}

fn deriv_extremes(op: &NepOperator, lambda0: C64) -> Result<(f64, f64), PerturbationError> {
    let tp = op.derivative(lambda0)?;
    let s = svd_extremes(&tp).map_err(|_| PerturbationError::DerivativeSingular)?;
    if s.sigma_min <= 1e-14 {
        return Err(PerturbationError::DerivativeSingular);
    }
    Ok((s.sigma_min, s.sigma_max))
}

/// |λ′ − λ0| ≤ ‖ΔT(λ′)‖ / σ_min(T′(λ0)) for simple eigenvalues, to
/// first order.
pub fn bauer_fike_bound(
    op: &NepOperator,
    lambda0: C64,
    delta_norm: f64,
) -> Result<f64, PerturbationError> {
    let (s_min, _) = deriv_extremes(op, lambda0)?;
    Ok(delta_norm / s_min)
}

/// κ(T′(λ0)) = σ_max/σ_min of the derivative.
pub fn condition_number(op: &NepOperator, lambda0: C64) -> Result<f64, PerturbationError> {
    let (s_min, s_max) = deriv_extremes(op, lambda0)?;
    Ok(s_max / s_min)
}

/// κ(T′(λ0)) · ‖ΔT‖ / ‖T(λ0)‖.
pub fn relative_bound(
    op: &NepOperator,
    lambda0: C64,
    delta_norm: f64,
) -> Result<f64, PerturbationError> {
    let kappa = condition_number(op, lambda0)?;
    let t_norm = spectral_norm(&op.evaluate(lambda0)?);
    if t_norm == 0.0 {
        return Err(PerturbationError::ZeroOperator);
    }
    Ok(kappa * delta_norm / t_norm)
}

fn gaussian_square(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    crate::random::gaussian_matrix(dim, dim, rng)
}

/// Unscaled perturbation operator for one trial.
fn draw_delta(
    op: &NepOperator,
    structure: &PerturbationStructure,
    rng: &mut ChaCha8Rng,
) -> NepOperator {
    let dim = op.dim();
    let (base, terms) = match structure {
        PerturbationStructure::AllTerms => {
            let base = gaussian_square(dim, rng);
            let terms = op
                .terms()
                .iter()
                .map(|t| Term {
                    coeff: gaussian_square(dim, rng),
                    func: t.func.clone(),
                })
                .collect();
            (base, terms)
        }
        PerturbationStructure::BaseOnly => (gaussian_square(dim, rng), Vec::new()),
        PerturbationStructure::TermIndex(i) => {
            assert!(*i < op.terms().len(), "term index out of range");
            let term = Term {
                coeff: gaussian_square(dim, rng),
                func: op.terms()[*i].func.clone(),
            };
            (CMatrix::zeros(dim, dim), vec![term])
        }
    };
    NepOperator::new(base, terms).expect("perturbation operator is well formed")
}

fn scaled_delta(delta: &NepOperator, factor: f64) -> NepOperator {
    let f = C64::new(factor, 0.0);
    let base = delta.base().scale(f);
    let terms = delta
        .terms()
        .iter()
        .map(|t| Term {
            coeff: t.coeff.scale(f),
            func: t.func.clone(),
        })
        .collect();
    NepOperator::new(base, terms).expect("scaled perturbation is well formed")
}

fn assert_eigenvalue(op: &NepOperator, lambda0: C64) -> Result<(), PerturbationError> {
    let t = op.evaluate(lambda0)?;
    let s = svd_extremes(&t).map_err(|_| PerturbationError::NotAnEigenvalue {
        lambda: lambda0,
        ratio: f64::INFINITY,
    })?;
    let ratio = s.sigma_min / (1.0 + s.sigma_max);
    if ratio > 1e-8 {
        return Err(PerturbationError::NotAnEigenvalue {
            lambda: lambda0,
            ratio,
        });
    }
    Ok(())
}

/// Seeded trials of: perturb with ‖ΔT(λ0)‖ = ε, re-converge from λ0,
/// compare the realized shift against the first-order bound evaluated
/// with ‖ΔT(λ′)‖.
pub fn perturb_experiment(
    op: &NepOperator,
    lambda0: C64,
    spec: &PerturbationSpec,
    refine_cfg: &RefineConfig,
) -> Result<BoundReport, PerturbationError> {
    assert!(spec.epsilon >= 0.0, "epsilon must be nonnegative");
    assert!(spec.trials >= 1, "need at least one trial");
    assert_eigenvalue(op, lambda0)?;
    let (s_min, s_max) = deriv_extremes(op, lambda0)?;
    let kappa = s_max / s_min;
    let t_norm = spectral_norm(&op.evaluate(lambda0)?);

    let mut samples = Vec::with_capacity(spec.trials);
    for trial in 0..spec.trials {
        if spec.epsilon == 0.0 {
            samples.push(BoundSample {
                actual_shift: 0.0,
                delta_norm: 0.0,
                delta_norm_at_lambda0: 0.0,
                satisfied: true,
                diverged: false,
            });
            continue;
        }
        let mut rng = crate::random::seeded(spec.seed ^ trial as u64);
        let raw = draw_delta(op, &spec.structure, &mut rng);
        let norm0 = spectral_norm(&raw.evaluate(lambda0)?);
        assert!(norm0 > 0.0, "Gaussian draw produced a zero perturbation");
        let delta = scaled_delta(&raw, spec.epsilon / norm0);
        let perturbed = PerturbedOperator::new(op.clone(), delta).combined();
        match newton_det(&perturbed, lambda0, refine_cfg) {
            Ok(res) if res.converged => {
                let lambda_prime = res.lambda;
                let shift = (lambda_prime - lambda0).norm();
                let dn_prime = spectral_norm(
                    &perturbed
                        .evaluate(lambda_prime)?
                        .sub(&op.evaluate(lambda_prime)?),
                );
                let bound = dn_prime / s_min;
                samples.push(BoundSample {
                    actual_shift: shift,
                    delta_norm: dn_prime,
                    delta_norm_at_lambda0: spec.epsilon,
                    satisfied: shift <= bound * (1.0 + FIRST_ORDER_SLACK),
                    diverged: false,
                });
            }
            _ => samples.push(BoundSample {
                actual_shift: f64::NAN,
                delta_norm: f64::NAN,
                delta_norm_at_lambda0: spec.epsilon,
                satisfied: false,
                diverged: true,
            }),
        }
    }
    Ok(BoundReport {
        lambda0,
        sigma_min_deriv: s_min,
        kappa,
        absolute_bound: spec.epsilon / s_min,
        relative_bound: kappa * spec.epsilon / t_norm,
        samples,
    })
}

fn median(mut xs: Vec<f64>) -> f64 {
    assert!(!xs.is_empty());
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Per noise level: perturb once, run the variational iteration from a
/// fixed 1e-2 offset, fit the contraction rate on pre-floor iterations,
/// and fit the log-log slope of eigenvalue drift against ε.
pub fn convergence_under_noise(
    op: &NepOperator,
    lambda_star: C64,
    epsilon_levels: &[f64],
    spec: &PerturbationSpec,
    refine_cfg: &RefineConfig,
) -> Result<NoiseConvergenceReport, PerturbationError> {
    assert!(!epsilon_levels.is_empty());
    assert_eigenvalue(op, lambda_star)?;
    let tight = RefineConfig {
        tol: refine_cfg.tol.min(1e-13),
        max_iter: refine_cfg.max_iter.max(100),
        fd_step: refine_cfg.fd_step,
    };

    let mut rates = Vec::new();
    let mut floors = Vec::new();
    let mut shifts = Vec::new();
    for (level, &eps) in epsilon_levels.iter().enumerate() {
        assert!(eps >= 0.0, "noise level must be nonnegative");
        let perturbed = if eps > 0.0 {
            let mut rng = crate::random::seeded(spec.seed ^ level as u64);
            let raw = draw_delta(op, &spec.structure, &mut rng);
            let norm0 = spectral_norm(&raw.evaluate(lambda_star)?);
            assert!(norm0 > 0.0, "Gaussian draw produced a zero perturbation");
            let delta = scaled_delta(&raw, eps / norm0);
            PerturbedOperator::new(op.clone(), delta).combined()
        } else {
            op.clone()
        };
        let tilde = newton_det(&perturbed, lambda_star, &tight)
            .map_err(|_| PerturbationError::TrialDiverged { trial: level })?;
        if !tilde.converged {
            return Err(PerturbationError::TrialDiverged { trial: level });
        }
        let lambda_tilde = tilde.lambda;
        let run = match variational_solve(&perturbed, lambda_star + C64::new(1e-2, 0.0), refine_cfg)
        {
            Ok(res) => res,
            Err(RefineError::NotConverged { result }) => *result,
            Err(_) => return Err(PerturbationError::TrialDiverged { trial: level }),
        };
        let errors: Vec<f64> = run
            .history
            .iter()
            .map(|(lam, _)| (*lam - lambda_tilde).norm())
            .collect();
        let floor = errors.last().copied().unwrap_or(0.0);
        let mut ratios = Vec::new();
        for w in errors.windows(2) {
            // Ratios inside the noise floor measure dithering, not
            // contraction; keep only the approach phase.
            if w[0] > 10.0 * floor && w[0] > 0.0 {
                ratios.push(w[1] / w[0]);
            }
        }
        rates.push(if ratios.is_empty() { 0.0 } else { median(ratios) });
        floors.push(floor);
        shifts.push((lambda_tilde - lambda_star).norm());
    }

    let pts: Vec<(f64, f64)> = epsilon_levels
        .iter()
        .zip(&shifts)
        .filter(|(&e, &s)| e > 0.0 && s > 0.0)
        .map(|(&e, &s)| (e.ln(), s.ln()))
        .collect();
    let slope_loglog = if pts.len() < 2 {
        f64::NAN
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        num / den
    };
    Ok(NoiseConvergenceReport {
        epsilon_levels: epsilon_levels.to_vec(),
        rates,
        floors,
        shifts,
        slope_loglog,
    })
}
