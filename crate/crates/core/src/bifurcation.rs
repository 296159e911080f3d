//! Parameter continuation for eigenvalue paths, detection of critical
//! parameter values where det T_λ degenerates along a tracked path, and
//! first-order sensitivity of the critical parameter under structured
//! perturbations of the operator family.

use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{determinant, svd_extremes, CMatrix, CVector, C64};
use crate::operator::{NepOperator, OperatorError, PerturbedOperator};
use crate::refine::{newton_det, RefineConfig};

/// Finite-difference step for ∂T/∂μ, scaled by 1+|μ| at use sites.
pub const DEFAULT_MU_DELTA: f64 = 1e-6;

/// Predictor steps larger than this multiple of 1+|λ| are discarded in
/// favour of the previous λ; tangents blow up next to critical points.
const TANGENT_CAP: f64 = 1.0;
/// Bisection stops once the μ bracket is this small, scaled by 1+|μ|.
const BRACKET_TOL: f64 = 1e-8;
/// Off-grid minimisation of |det T_λ| narrows μ to this width, scaled by
/// 1+|μ|. Tighter than BRACKET_TOL so that square-root-type degeneracies
/// are pinned closely enough for the residual soundness gate.
const COLLAPSE_TOL: f64 = 1e-14;
/// An on-path |det T_λ| below this fraction of the path median is a dip.
const DIP_FRACTION: f64 = 1e-10;
/// An off-grid |det T_λ| minimum counts as critical only below this
/// fraction of the path median; shallow minima are not bifurcations.
const DEEP_FRACTION: f64 = 1e-4;
/// March past the grid only while |det T_λ| fell by at least this factor
/// over the last grid step.
const MARCH_TRIGGER: f64 = 0.9;
const MARCH_LIMIT: usize = 80;
const MINIMIZE_LIMIT: usize = 240;

#[derive(Debug, Error)]
pub enum BifurcationError {
    /// yᴴ T_λ x vanished relative to ‖T_λ‖; the eigenvalue is defective
    /// or the pair does not belong to it.
    #[error("transversality failure at lambda = {lambda}, mu = {mu}")]
    Transversality { lambda: C64, mu: f64 },
    /// Continuation lost the eigenvalue at grid index `index`; the points
    /// accepted before the break are preserved.
    #[error("eigenvalue path broke at grid index {index} after {} points", path.len())]
    PathBroken { index: usize, path: Vec<PathPoint> },
    /// d/dα det T_λ along the path is numerically zero at the critical
    /// point, so the closed-form sensitivity quotient is undefined.
    #[error("sensitivity denominator is degenerate")]
    DegenerateDenominator,
    /// Re-detection on the perturbed family found no critical point.
    #[error("no critical point detected on the perturbed family")]
    FdDetectionFailed,
    #[error(transparent)]
    Domain(#[from] OperatorError),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}

/// One-parameter operator family μ ↦ T(·, μ) with a fixed dimension.
#[derive(Clone)]
pub struct ParametricNep {
    dim: usize,
    builder: Arc<dyn Fn(f64) -> NepOperator + Send + Sync>,
    pub mu_delta: f64,
}

impl std::fmt::Debug for ParametricNep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParametricNep")
            .field("dim", &self.dim)
            .field("mu_delta", &self.mu_delta)
            .finish()
    }
}

impl ParametricNep {
    pub fn new<F>(dim: usize, builder: F) -> Self
    where
        F: Fn(f64) -> NepOperator + Send + Sync + 'static,
    {
        assert!(dim > 0, "parametric family dimension must be positive");
        ParametricNep {
            dim,
            builder: Arc::new(builder),
            mu_delta: DEFAULT_MU_DELTA,
        }
    }

    pub fn with_mu_delta(mut self, mu_delta: f64) -> Self {
        assert!(mu_delta > 0.0, "mu_delta must be positive");
        self.mu_delta = mu_delta;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn build(&self, mu: f64) -> NepOperator {
        let op = (self.builder)(mu);
        assert_eq!(
            op.dim(),
            self.dim,
            "family builder returned an operator of the wrong dimension"
        );
        op
    }

    /// Family μ ↦ T(·, μ) + ΔT(·, μ) with this family's μ_delta.
    pub fn perturbed_by(&self, delta: &ParametricNep) -> ParametricNep {
        assert_eq!(self.dim, delta.dim, "perturbation dimension mismatch");
        let base = self.builder.clone();
        let delta = delta.builder.clone();
        ParametricNep {
            dim: self.dim,
            builder: Arc::new(move |mu| PerturbedOperator::new(base(mu), delta(mu)).combined()),
            mu_delta: self.mu_delta,
        }
    }
}

/// One accepted continuation point. `det_deriv` is det T_λ(λ, μ), the
/// quantity whose zero along the path marks a bifurcation.
#[derive(Debug, Clone)]
pub struct PathPoint {
    pub mu: f64,
    pub lambda: C64,
    pub det_deriv: C64,
    pub residual: f64,
}

/// Path plus the detected critical point, when one exists. The critical
/// fields are present or absent together; the sensitivity fields are
/// filled by callers that run `bifurcation_sensitivity`.
#[derive(Debug, Clone)]
pub struct BifurcationReport {
    pub path: Vec<PathPoint>,
    pub critical_mu: Option<f64>,
    pub critical_lambda: Option<C64>,
    pub delta_alpha_closed: Option<f64>,
    pub delta_alpha_fd: Option<f64>,
}

/// Right/left near-null vectors of T(λ), both unit norm.
#[derive(Debug, Clone)]
pub struct AdjointPair {
    pub x: CVector,
    pub y: CVector,
}

/// Right and left singular vectors for σ_min(T(λ)).
pub fn adjoint_pair(op: &NepOperator, lambda: C64) -> Result<AdjointPair, BifurcationError> {
    let t = op.evaluate(lambda)?;
    let s = svd_extremes(&t)?;
    Ok(AdjointPair {
        x: s.v_min.normalized(),
        y: s.u_min.normalized(),
    })
}

/// ∂T/∂μ at (λ, μ) by central differences on the family builder.
pub fn partial_mu(
    pnep: &ParametricNep,
    lambda: C64,
    mu: f64,
) -> Result<CMatrix, BifurcationError> {
    let h = pnep.mu_delta * (1.0 + mu.abs());
    let plus = pnep.build(mu + h).evaluate(lambda)?;
    let minus = pnep.build(mu - h).evaluate(lambda)?;
    Ok(plus.sub(&minus).scale(C64::new(1.0 / (2.0 * h), 0.0)))
}

/// dλ/dμ = −(yᴴ ∂T/∂μ x) / (yᴴ T_λ x) for a simple eigenvalue.
pub fn eigenvalue_derivative(
    pnep: &ParametricNep,
    mu: f64,
    lambda: C64,
    pair: &AdjointPair,
) -> Result<C64, BifurcationError> {
    let op = pnep.build(mu);
    let t_lambda = op.derivative(lambda)?;
    let denom = pair.y.dot(&t_lambda.mul_vec(&pair.x));
    if denom.norm() <= 1e-12 * t_lambda.frobenius_norm() {
        return Err(BifurcationError::Transversality { lambda, mu });
    }
    let t_mu = partial_mu(pnep, lambda, mu)?;
    let num = pair.y.dot(&t_mu.mul_vec(&pair.x));
    Ok(-num / denom)
}

fn det_lambda(op: &NepOperator, lambda: C64) -> Result<C64, BifurcationError> {
    Ok(determinant(&op.derivative(lambda)?))
}

/// Tangent predictor for the move μ_prev → μ_next. Falls back to the
/// previous λ when the pair is defective or the tangent step is outsized;
/// the returned unit direction is kept for corrector retry seeds.
fn predictor(
    pnep: &ParametricNep,
    mu_prev: f64,
    lambda_prev: C64,
    dmu: f64,
) -> Result<(C64, C64), BifurcationError> {
    let op_prev = pnep.build(mu_prev);
    let tangent = adjoint_pair(&op_prev, lambda_prev)
        .and_then(|pair| eigenvalue_derivative(pnep, mu_prev, lambda_prev, &pair));
    match tangent {
        Ok(d) => {
            let step = d * C64::new(dmu, 0.0);
            let dir = if step.norm() > 0.0 {
                step / C64::new(step.norm(), 0.0)
            } else {
                C64::new(1.0, 0.0)
            };
            if step.norm() <= TANGENT_CAP * (1.0 + lambda_prev.norm()) {
                Ok((lambda_prev + step, dir))
            } else {
                Ok((lambda_prev, dir))
            }
        }
        Err(BifurcationError::Transversality { .. }) => {
            Ok((lambda_prev, C64::new(1.0, 0.0)))
        }
        Err(e) => Err(e),
    }
}

/// Newton corrector with retry seeds. The retries kick perpendicular to
/// the incoming tangent so that paths crossing a symmetric critical point
/// leave the invariant line of the unperturbed iteration; the kick sign
/// follows the tangent, which keeps symmetric sibling branches on
/// opposite sides.
fn correct(
    op: &NepOperator,
    pred: C64,
    anchor: C64,
    dir: C64,
    cfg: &RefineConfig,
) -> Option<(C64, f64)> {
    let s = (pred - anchor).norm().max(1e-3 * (1.0 + anchor.norm()));
    let i = C64::new(0.0, 1.0);
    let seeds = [
        pred,
        anchor + i * dir * C64::new(s, 0.0),
        anchor - i * dir * C64::new(s, 0.0),
        pred + C64::new(0.6 * s * 1e-3, 0.8 * s * 1e-3),
    ];
    for seed in seeds {
        // Only step-tolerance convergence counts: a NotConverged iterate
        // can sit at a tiny residual while running away to −∞ on
        // families whose root escapes (e^λ + μ as μ → 0).
        if let Ok(result) = newton_det(op, seed, cfg) {
            if result.converged {
                return Some((result.lambda, result.residual));
            }
        }
    }
    None
}

/// Predict-and-correct one continuation step; `None` means the corrector
/// failed from every retry seed.
fn advance(
    pnep: &ParametricNep,
    mu_prev: f64,
    lambda_prev: C64,
    mu_next: f64,
    cfg: &RefineConfig,
) -> Result<Option<PathPoint>, BifurcationError> {
    let (pred, dir) = predictor(pnep, mu_prev, lambda_prev, mu_next - mu_prev)?;
    let op = pnep.build(mu_next);
    match correct(&op, pred, lambda_prev, dir, cfg) {
        Some((lambda, residual)) => Ok(Some(PathPoint {
            mu: mu_next,
            lambda,
            det_deriv: det_lambda(&op, lambda)?,
            residual,
        })),
        None => Ok(None),
    }
}

/// Continue one eigenvalue across a monotone μ grid. The seed only needs
/// to be in the Newton basin of the first grid point's eigenvalue.
pub fn eigen_path(
    pnep: &ParametricNep,
    mu_grid: &[f64],
    lambda_seed: C64,
    cfg: &RefineConfig,
) -> Result<Vec<PathPoint>, BifurcationError> {
    assert!(!mu_grid.is_empty(), "parameter grid is empty");
    assert!(
        mu_grid.windows(2).all(|w| w[1] > w[0]) || mu_grid.windows(2).all(|w| w[1] < w[0]),
        "parameter grid must be strictly monotone"
    );
    let mut path: Vec<PathPoint> = Vec::with_capacity(mu_grid.len());
    for (index, &mu) in mu_grid.iter().enumerate() {
        let next = match path.last() {
            Some(prev) => advance(pnep, prev.mu, prev.lambda, mu, cfg)?,
            None => {
                let op = pnep.build(mu);
                match correct(&op, lambda_seed, lambda_seed, C64::new(1.0, 0.0), cfg) {
                    Some((lambda, residual)) => Some(PathPoint {
                        mu,
                        lambda,
                        det_deriv: det_lambda(&op, lambda)?,
                        residual,
                    }),
                    None => None,
                }
            }
        };
        match next {
            Some(point) => path.push(point),
            None => return Err(BifurcationError::PathBroken { index, path }),
        }
    }
    Ok(path)
}

fn median_abs_det(path: &[PathPoint]) -> f64 {
    let mut mags: Vec<f64> = path.iter().map(|p| p.det_deriv.norm()).collect();
    mags.sort_by(|a, b| a.total_cmp(b));
    mags[mags.len() / 2]
}

/// Sign change of the dominant (larger-magnitude) component across a pair.
fn sign_change(a: C64, b: C64) -> bool {
    let use_re = a.re.abs().max(b.re.abs()) >= a.im.abs().max(b.im.abs());
    let (x, y) = if use_re { (a.re, b.re) } else { (a.im, b.im) };
    x * y < 0.0
}

/// Bisect a sign-change bracket of the dominant det T_λ component,
/// re-converging λ at every probe. Returns the near-critical point.
fn bisect(
    pnep: &ParametricNep,
    lo: &PathPoint,
    hi: &PathPoint,
    cfg: &RefineConfig,
) -> Result<PathPoint, BifurcationError> {
    let use_re = lo.det_deriv.re.abs().max(hi.det_deriv.re.abs())
        >= lo.det_deriv.im.abs().max(hi.det_deriv.im.abs());
    let comp = |d: C64| if use_re { d.re } else { d.im };
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    for _ in 0..200 {
        let mid = 0.5 * (lo.mu + hi.mu);
        if (hi.mu - lo.mu).abs() <= BRACKET_TOL * (1.0 + mid.abs()) {
            break;
        }
        let from = if (mid - lo.mu).abs() <= (mid - hi.mu).abs() { &lo } else { &hi };
        let probe = match advance(pnep, from.mu, from.lambda, mid, cfg)? {
            Some(p) => p,
            // Probe off-centre once; a second failure ends the narrowing.
            None => {
                let off = lo.mu + 0.382 * (hi.mu - lo.mu);
                match advance(pnep, lo.mu, lo.lambda, off, cfg)? {
                    Some(p) => p,
                    None => break,
                }
            }
        };
        if comp(probe.det_deriv) == 0.0 {
            return Ok(probe);
        }
        if comp(probe.det_deriv).signum() == comp(lo.det_deriv).signum() {
            lo = probe;
        } else {
            hi = probe;
        }
    }
    Ok(if lo.det_deriv.norm() <= hi.det_deriv.norm() { lo } else { hi })
}

/// Golden-section style narrowing of a bracketed |det T_λ| minimum along
/// the path, re-converging λ at every probe. Corrector failures shrink
/// the interval from the failing side.
fn minimize(
    pnep: &ParametricNep,
    mut mu_lo: f64,
    mut best: PathPoint,
    mut mu_hi: f64,
    cfg: &RefineConfig,
) -> Result<PathPoint, BifurcationError> {
    if mu_lo > mu_hi {
        std::mem::swap(&mut mu_lo, &mut mu_hi);
    }
    for _ in 0..MINIMIZE_LIMIT {
        if (mu_hi - mu_lo).abs() <= COLLAPSE_TOL * (1.0 + best.mu.abs()) {
            break;
        }
        let lo_len = best.mu - mu_lo;
        let hi_len = mu_hi - best.mu;
        let mu_t = if lo_len > hi_len {
            best.mu - 0.381_966 * lo_len
        } else {
            best.mu + 0.381_966 * hi_len
        };
        match advance(pnep, best.mu, best.lambda, mu_t, cfg)? {
            Some(p) => {
                if p.det_deriv.norm() < best.det_deriv.norm() {
                    if mu_t < best.mu {
                        mu_hi = best.mu;
                    } else {
                        mu_lo = best.mu;
                    }
                    best = p;
                } else if mu_t < best.mu {
                    mu_lo = mu_t;
                } else {
                    mu_hi = mu_t;
                }
            }
            None => {
                if mu_t < best.mu {
                    mu_lo = mu_t;
                } else {
                    mu_hi = mu_t;
                }
            }
        }
    }
    Ok(best)
}

/// March past the last grid point while |det T_λ| keeps falling. Stops on
/// a dominant-component sign change (bisected), a bracketed minimum
/// (narrowed and depth-gated), or a corrector-failure boundary that the
/// step collapse pins down.
fn march(
    pnep: &ParametricNep,
    path: &[PathPoint],
    med: f64,
    cfg: &RefineConfig,
) -> Result<Option<PathPoint>, BifurcationError> {
    let prev = &path[path.len() - 2];
    let end = &path[path.len() - 1];
    let deep = |p: &PathPoint| p.det_deriv.norm() <= DEEP_FRACTION * med;
    if end.det_deriv.norm() > MARCH_TRIGGER * prev.det_deriv.norm() {
        return Ok(None);
    }
    let mut before = prev.clone();
    let mut at = end.clone();
    let mut step = at.mu - before.mu;
    for _ in 0..MARCH_LIMIT {
        if step.abs() <= COLLAPSE_TOL * (1.0 + at.mu.abs()) {
            return Ok(deep(&at).then(|| at.clone()));
        }
        match advance(pnep, at.mu, at.lambda, at.mu + step, cfg)? {
            Some(p) => {
                if sign_change(at.det_deriv, p.det_deriv) {
                    let c = bisect(pnep, &at, &p, cfg)?;
                    return Ok(Some(c));
                }
                if p.det_deriv.norm() >= at.det_deriv.norm() {
                    let c = minimize(pnep, before.mu, at.clone(), p.mu, cfg)?;
                    return Ok(deep(&c).then_some(c));
                }
                before = at;
                at = p;
            }
            None => step *= 0.5,
        }
    }
    Ok(deep(&at).then(|| at.clone()))
}

/// Track the path over the grid and locate a parameter value where
/// det T_λ degenerates along it: an on-grid dip, a sign change bracketed
/// and bisected, or a degeneracy just beyond the grid end reached by
/// marching. Absent critical fields mean no bifurcation in range, which
/// is a valid outcome, not an error.
pub fn detect_bifurcation(
    pnep: &ParametricNep,
    mu_grid: &[f64],
    lambda_seed: C64,
    cfg: &RefineConfig,
) -> Result<BifurcationReport, BifurcationError> {
    let path = eigen_path(pnep, mu_grid, lambda_seed, cfg)?;
    let mut report = BifurcationReport {
        path: path.clone(),
        critical_mu: None,
        critical_lambda: None,
        delta_alpha_closed: None,
        delta_alpha_fd: None,
    };
    if path.len() < 2 {
        return Ok(report);
    }
    let med = median_abs_det(&path);
    let critical = find_critical(pnep, &path, med, cfg)?;
    if let Some(c) = critical {
        report.critical_mu = Some(c.mu);
        report.critical_lambda = Some(c.lambda);
    }
    Ok(report)
}

fn find_critical(
    pnep: &ParametricNep,
    path: &[PathPoint],
    med: f64,
    cfg: &RefineConfig,
) -> Result<Option<PathPoint>, BifurcationError> {
    if let Some(p) = path.iter().find(|p| p.det_deriv.norm() <= DIP_FRACTION * med) {
        return Ok(Some(p.clone()));
    }
    for w in path.windows(2) {
        if sign_change(w[0].det_deriv, w[1].det_deriv) {
            return Ok(Some(bisect(pnep, &w[0], &w[1], cfg)?));
        }
    }
    march(pnep, path, med, cfg)
}

/// d/dμ of det T_λ(λ*(μ), μ) at the critical point, by finite differences
/// with λ re-converged on each side; falls back to one-sided differences
/// when continuation only survives on one side.
fn path_det_slope(
    pnep: &ParametricNep,
    mu_c: f64,
    lambda_c: C64,
    cfg: &RefineConfig,
) -> Result<C64, BifurcationError> {
    let h = pnep.mu_delta * (1.0 + mu_c.abs());
    let plus = advance(pnep, mu_c, lambda_c, mu_c + h, cfg)?;
    let minus = advance(pnep, mu_c, lambda_c, mu_c - h, cfg)?;
    let hc = C64::new(h, 0.0);
    match (plus, minus) {
        (Some(p), Some(m)) => Ok((p.det_deriv - m.det_deriv) / (hc * 2.0)),
        (Some(p), None) => {
            let g0 = det_lambda(&pnep.build(mu_c), lambda_c)?;
            Ok((p.det_deriv - g0) / hc)
        }
        (None, Some(m)) => {
            let g0 = det_lambda(&pnep.build(mu_c), lambda_c)?;
            Ok((g0 - m.det_deriv) / hc)
        }
        (None, None) => Err(BifurcationError::DegenerateDenominator),
    }
}

/// First-order shift of the critical parameter under the perturbation
/// family `delta`, by two independent estimators:
/// closed = det(∂ΔT/∂λ) / (d/dμ det T_λ along the path), both evaluated
/// at the critical point, and fd = the re-detected critical μ of the
/// perturbed family minus μ_c. The two disagree for λ-independent
/// perturbations (closed is then identically zero) and near fold-type
/// degeneracies where the slope diverges; both are always returned so
/// reports can surface the discrepancy.
pub fn bifurcation_sensitivity(
    pnep: &ParametricNep,
    delta: &ParametricNep,
    mu_grid: &[f64],
    lambda_seed: C64,
    mu_c: f64,
    lambda_c: C64,
    cfg: &RefineConfig,
) -> Result<(f64, f64), BifurcationError> {
    let numerator = determinant(&delta.build(mu_c).derivative(lambda_c)?);
    let denominator = path_det_slope(pnep, mu_c, lambda_c, cfg)?;
    if denominator.norm() <= 1e-12 {
        return Err(BifurcationError::DegenerateDenominator);
    }
    let closed = (numerator / denominator).re;
    let perturbed = pnep.perturbed_by(delta);
    let re_detected = match detect_bifurcation(&perturbed, mu_grid, lambda_seed, cfg) {
        Ok(report) => report.critical_mu.ok_or(BifurcationError::FdDetectionFailed)?,
        Err(BifurcationError::PathBroken { .. }) => {
            return Err(BifurcationError::FdDetectionFailed)
        }
        Err(e) => return Err(e),
    };
    Ok((closed, re_detected - mu_c))
}
