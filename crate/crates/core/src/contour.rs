//! Circular contours, trapezoidal quadrature grids, resolvent moments,
//! and argument-principle eigenvalue counting.

use crate::linalg::{lu_solve, CMatrix, C64};
use crate::operator::NepOperator;
use std::f64::consts::PI;
use thiserror::Error;

/// Inter-node phase step beyond which the winding number is considered
/// aliased; Nyquist-style guard.
pub const MAX_PHASE_STEP: f64 = PI / 2.0;

/// |det| below this multiple of the across-node maximum flags a zero of
/// det sitting on the contour itself.
pub const ZERO_ON_CONTOUR_REL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("operator factorization failed at node {node}; perturb n or the radius")]
    NodeSingular { node: usize },
    #[error("det T vanishes at contour node {node}; the contour passes through the spectrum")]
    ZeroOnContour { node: usize },
    #[error("phase step {step:.3} rad at node {node} exceeds {MAX_PHASE_STEP:.3}; grid too coarse")]
    PhaseJumpTooLarge { node: usize, step: f64 },
    #[error("operator domain excludes contour node {node}")]
    Domain { node: usize },
}

/// λ(t) = center + radius·e^{2πit}, t ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularContour {
    pub center: C64,
    pub radius: f64,
}

impl CircularContour {
    pub fn new(center: C64, radius: f64) -> Self {
        assert!(radius.is_finite() && radius > 0.0, "radius must be positive");
        CircularContour { center, radius }
    }

    pub fn point_at(&self, t: f64) -> C64 {
        self.center + C64::from_polar(self.radius, 2.0 * PI * t)
    }

    /// Membership with a relative slack on the radius; slack 0 is the
    /// closed disk.
    pub fn contains(&self, lambda: C64, rel_slack: f64) -> bool {
        (lambda - self.center).norm() <= self.radius * (1.0 + rel_slack)
    }
}

/// Uniform trapezoid nodes λⱼ = c + r·e^{2πi j/n}, j = 1..n, with
/// node_factors fⱼ = r·e^{2πi j/n}/n so Σ fⱼ g(λⱼ) ≈ (1/2πi)∮ g dλ.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub contour: CircularContour,
    pub n: usize,
    pub nodes: Vec<C64>,
    pub node_factors: Vec<C64>,
}

pub fn discretize(contour: CircularContour, n: usize) -> QuadratureGrid {
    assert!(n >= 4, "need at least 4 quadrature nodes");
    let mut nodes = Vec::with_capacity(n);
    let mut node_factors = Vec::with_capacity(n);
    for j in 1..=n {
        let offset = C64::from_polar(contour.radius, 2.0 * PI * j as f64 / n as f64);
        nodes.push(contour.center + offset);
        node_factors.push(offset / n as f64);
    }
    QuadratureGrid {
        contour,
        n,
        nodes,
        node_factors,
    }
}

/// Zeroth and first resolvent moments against a probe block, tagged
/// with the source contour so extraction can filter to its disk.
/// `scale` is the largest node-wise ‖T(z)⁻¹·probe‖_F, the reference
/// magnitude for deciding that a0 is numerically zero.
#[derive(Debug, Clone)]
pub struct MomentPair {
    pub a0: CMatrix,
    pub a1: CMatrix,
    pub probe: CMatrix,
    pub contour: CircularContour,
    pub scale: f64,
}

/// a0 ≈ (1/2πi)∮ T(z)⁻¹·probe dz, a1 ≈ (1/2πi)∮ z·T(z)⁻¹·probe dz.
pub fn moments(
    op: &NepOperator,
    grid: &QuadratureGrid,
    probe: &CMatrix,
) -> Result<MomentPair, QuadratureError> {
    assert_eq!(probe.rows(), op.dim(), "probe row count must match operator");
    let mut a0 = CMatrix::zeros(probe.rows(), probe.cols());
    let mut a1 = CMatrix::zeros(probe.rows(), probe.cols());
    let mut scale = 0.0_f64;
    for (j, (&lam, &f)) in grid.nodes.iter().zip(&grid.node_factors).enumerate() {
        let t = op
            .evaluate(lam)
            .map_err(|_| QuadratureError::Domain { node: j })?;
        let y = lu_solve(&t, probe).map_err(|_| QuadratureError::NodeSingular { node: j })?;
        scale = scale.max(y.frobenius_norm());
        a0 = a0.add_scaled(&y, f);
        a1 = a1.add_scaled(&y, f * lam);
    }
    Ok(MomentPair {
        a0,
        a1,
        probe: probe.clone(),
        contour: grid.contour,
        scale,
    })
}

/// Winding number of det T around 0 along the contour: zeros minus
/// poles of det inside, by the argument principle. Negative values
/// arise for rational operators whose det has enclosed poles.
pub fn count_eigenvalues_inside(
    op: &NepOperator,
    grid: &QuadratureGrid,
) -> Result<i64, QuadratureError> {
    let mut dets = Vec::with_capacity(grid.n);
    for (j, &lam) in grid.nodes.iter().enumerate() {
        let d = op
            .determinant_at(lam)
            .map_err(|_| QuadratureError::Domain { node: j })?;
        dets.push(d);
    }
    let scale = dets.iter().map(|d| d.norm()).fold(0.0_f64, f64::max);
    for (j, d) in dets.iter().enumerate() {
        if d.norm() < ZERO_ON_CONTOUR_REL * scale || d.norm() == 0.0 {
            return Err(QuadratureError::ZeroOnContour { node: j });
        }
    }
    let mut total = 0.0;
    for j in 0..grid.n {
        let next = dets[(j + 1) % grid.n];
        let mut step = next.arg() - dets[j].arg();
        while step > PI {
            step -= 2.0 * PI;
        }
        while step <= -PI {
            step += 2.0 * PI;
        }
        if step.abs() > MAX_PHASE_STEP {
            return Err(QuadratureError::PhaseJumpTooLarge { node: j, step });
        }
        total += step;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}
