//! Local eigenpair polishing: Newton iteration on det T(λ) via the
//! log-derivative trace formula, and a curvature-adaptive variational
//! iteration on the residual functional J(λ) = σ_min(T(λ))².

use crate::linalg::{lu_solve, svd_extremes, CVector, C64};
use crate::operator::{NepOperator, OperatorError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RefineError {
    #[error("trace denominator vanished at λ = {lambda}; critical point or multiple root")]
    SingularIterate { lambda: C64 },
    #[error("curvature |J″| ≤ 1e-14 at λ = {lambda}; step undefined")]
    FlatCurvature { lambda: C64 },
    #[error("no convergence within {} iterations (last λ = {})", result.iterations, result.lambda)]
    NotConverged { result: Box<RefineResult> },
    #[error(transparent)]
    Domain(#[from] OperatorError),
}

#[derive(Debug, Clone)]
pub struct RefineConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            tol: 1e-12,
            max_iter: 50,
            fd_step: 1e-7,
        }
    }
}

/// history holds (λ_k, σ_min(T(λ_k))) per visited iterate, the final λ
/// included.
#[derive(Debug, Clone)]
pub struct RefineResult {
    pub lambda: C64,
    pub x: CVector,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<(C64, f64)>,
}

/// Unit right singular vector for σ_min(T(λ)).
pub fn eigenvector_for(op: &NepOperator, lambda: C64) -> CVector {
    let t = op.evaluate(lambda).expect("λ in operator domain");
    let s = svd_extremes(&t).expect("SVD of evaluated operator");
    s.v_min
}

fn sigma_min_of(op: &NepOperator, lambda: C64) -> Result<(f64, f64), RefineError> {
    let t = op.evaluate(lambda)?;
    let s = svd_extremes(&t).map_err(|_| RefineError::SingularIterate { lambda })?;
    Ok((s.sigma_min, s.sigma_max))
}

fn finish(
    op: &NepOperator,
    lambda: C64,
    iterations: usize,
    history: Vec<(C64, f64)>,
) -> Result<RefineResult, RefineError> {
    let x = eigenvector_for(op, lambda);
    let residual = op.residual(lambda, &x)?;
    let (s_min, s_max) = sigma_min_of(op, lambda)?;
    Ok(RefineResult {
        lambda,
        x,
        residual,
        iterations,
        converged: s_min <= 1e-8 * (1.0 + s_max),
        history,
    })
}

/// λ_{k+1} = λ_k − 1/tr(T(λ_k)⁻¹ T′(λ_k)); the trace is d/dλ log det T.
pub fn newton_det(
    op: &NepOperator,
    lambda0: C64,
    cfg: &RefineConfig,
) -> Result<RefineResult, RefineError> {
    let mut lambda = lambda0;
    let mut history = Vec::new();
    for k in 0..cfg.max_iter {
        let (s_min, _) = sigma_min_of(op, lambda)?;
        history.push((lambda, s_min));
        let t = op.evaluate(lambda)?;
        let tp = op.derivative(lambda)?;
        let solved = match lu_solve(&t, &tp) {
            Ok(m) => m,
            // Singular T means the iterate already sits on the spectrum.
            Err(_) => return finish(op, lambda, k, history),
        };
        let mut trace = C64::new(0.0, 0.0);
        for i in 0..solved.rows() {
            trace += solved[(i, i)];
        }
        if trace.norm() < 1e-14 {
            return Err(RefineError::SingularIterate { lambda });
        }
        let step = trace.inv();
        lambda -= step;
        if step.norm() <= cfg.tol * (1.0 + lambda.norm()) {
            let (s_min, _) = sigma_min_of(op, lambda)?;
            history.push((lambda, s_min));
            return finish(op, lambda, k + 1, history);
        }
    }
    let result = finish(op, lambda, cfg.max_iter, history)?;
    Err(RefineError::NotConverged {
        result: Box::new(result),
    })
}

/// One curvature-adaptive update λ_k − J′/|J″|.
pub fn variational_step(
    _j_value: f64,
    j_prime: C64,
    j_second: C64,
    lambda_k: C64,
) -> Result<C64, RefineError> {
    let curv = j_second.norm();
    if curv <= 1e-14 {
        return Err(RefineError::FlatCurvature { lambda: lambda_k });
    }
    Ok(lambda_k - j_prime / curv)
}

/// Gradient and curvature of J by central differences in the real and
/// imaginary directions; J′ combines both as a Wirtinger-style descent
/// direction, J″ is the mean in-plane curvature.
fn fd_derivatives(
    op: &NepOperator,
    lambda: C64,
    h: f64,
) -> Result<(f64, C64, C64), RefineError> {
    let j = |l: C64| -> Result<f64, RefineError> {
        let (s, _) = sigma_min_of(op, l)?;
        Ok(s * s)
    };
    let j0 = j(lambda)?;
    let jpr = j(lambda + C64::new(h, 0.0))?;
    let jmr = j(lambda - C64::new(h, 0.0))?;
    let jpi = j(lambda + C64::new(0.0, h))?;
    let jmi = j(lambda - C64::new(0.0, h))?;
    let grad = C64::new((jpr - jmr) / (2.0 * h), (jpi - jmi) / (2.0 * h));
    let jxx = (jpr - 2.0 * j0 + jmr) / (h * h);
    let jyy = (jpi - 2.0 * j0 + jmi) / (h * h);
    let curv = C64::new((jxx + jyy) / 2.0, 0.0);
    Ok((j0, grad, curv))
}

pub fn variational_solve(
    op: &NepOperator,
    lambda0: C64,
    cfg: &RefineConfig,
) -> Result<RefineResult, RefineError> {
    let mut lambda = lambda0;
    let mut history = Vec::new();
    for k in 0..cfg.max_iter {
        let (s_min, _) = sigma_min_of(op, lambda)?;
        history.push((lambda, s_min));
        let h = cfg.fd_step.max(1e-8 * (1.0 + lambda.norm()));
        let (j0, grad, curv) = fd_derivatives(op, lambda, h)?;
        let next = variational_step(j0, grad, curv, lambda)?;
        let step = (next - lambda).norm();
        if step <= cfg.tol * (1.0 + lambda.norm()) {
            // Stationary already; a first-step stop reports 0 iterations.
            return finish(op, lambda, k, history);
        }
        lambda = next;
        let (s_next, _) = sigma_min_of(op, lambda)?;
        if step <= cfg.tol * (1.0 + lambda.norm()) || s_next == 0.0 {
            history.push((lambda, s_next));
            return finish(op, lambda, k + 1, history);
        }
    }
    let result = finish(op, lambda, cfg.max_iter, history)?;
    Err(RefineError::NotConverged {
        result: Box::new(result),
    })
}
