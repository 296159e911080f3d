//! Companion-linearization oracle for polynomial and rational
//! operators: exact finite spectra for cross-checking the contour
//! solver.

use crate::contour::CircularContour;
use crate::linalg::{
    determinant, dense_eig, lu_solve, svd_extremes, CMatrix, C64, DENSE_EIG_LIMIT,
};
use crate::operator::{NepOperator, OperatorError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompanionError {
    #[error("operator has no closed-form oracle: {0}")]
    Unsupported(#[from] OperatorError),
    #[error("leading coefficient is singular for every trial shift; det is degenerate")]
    DegenerateLeading,
    #[error("companion dimension {dim} exceeds the dense eigensolver limit {DENSE_EIG_LIMIT}")]
    TooLarge { dim: usize },
    #[error("dense eigensolver failed on the companion matrix: {0}")]
    Eig(#[from] crate::linalg::LinalgError),
}

fn is_zero_matrix(m: &CMatrix) -> bool {
    m.max_abs() == 0.0
}

/// Eigenvalues of the block companion pencil for P(λ) = Σ λᵏ A_k with
/// invertible leading block: the pencil
/// [[0, I, …], …, [−A₀, …, −A_{d−1}]] − λ·diag(I, …, I, A_d) reduced to
/// standard form with one block solve.
fn companion_spectrum(coeffs: &[CMatrix]) -> Result<Vec<C64>, CompanionError> {
    let d = coeffs.len() - 1;
    let n = coeffs[0].rows();
    let size = n * d;
    if size > DENSE_EIG_LIMIT {
        return Err(CompanionError::TooLarge { dim: size });
    }
    let mut a = CMatrix::zeros(size, size);
    let mut b = CMatrix::zeros(size, size);
    for blk in 0..d - 1 {
        for i in 0..n {
            a[(blk * n + i, (blk + 1) * n + i)] = C64::new(1.0, 0.0);
        }
    }
    for k in 0..d {
        for i in 0..n {
            for j in 0..n {
                a[((d - 1) * n + i, k * n + j)] = -coeffs[k][(i, j)];
            }
        }
    }
    for blk in 0..d - 1 {
        for i in 0..n {
            b[(blk * n + i, blk * n + i)] = C64::new(1.0, 0.0);
        }
    }
    for i in 0..n {
        for j in 0..n {
            b[((d - 1) * n + i, (d - 1) * n + j)] = coeffs[d][(i, j)];
        }
    }
    let standard = lu_solve(&b, &a).map_err(CompanionError::Eig)?;
    Ok(dense_eig(&standard)?)
}

/// All finite eigenvalues of the matrix polynomial Σ λᵏ A_k (ascending
/// coefficients). A singular leading block is handled by the shifted
/// reversal Q(t) = tᵈ P(σ + 1/t), whose leading block P(σ) is made
/// invertible by the shift; roots map back through λ = σ + 1/t.
pub fn polynomial_eigenvalues(coeffs: &[CMatrix]) -> Result<Vec<C64>, CompanionError> {
    assert!(!coeffs.is_empty());
    let n = coeffs[0].rows();
    let mut coeffs: Vec<CMatrix> = coeffs.to_vec();
    while coeffs.len() > 1 && is_zero_matrix(coeffs.last().unwrap()) {
        coeffs.pop();
    }
    if coeffs.len() == 1 {
        return if determinant(&coeffs[0]).norm() == 0.0 {
            Err(CompanionError::DegenerateLeading)
        } else {
            Ok(Vec::new())
        };
    }
    let d = coeffs.len() - 1;

    let lead_scale = coeffs.last().unwrap().max_abs();
    let lead_det = determinant(coeffs.last().unwrap()).norm();
    if lead_det > 1e-8 * lead_scale.powi(n as i32) {
        return companion_spectrum(&coeffs);
    }

    let eval_at = |s: C64| -> CMatrix {
        let mut acc = CMatrix::zeros(n, n);
        let mut p = C64::new(1.0, 0.0);
        for c in &coeffs {
            acc = acc.add_scaled(c, p);
            p *= s;
        }
        acc
    };
    let shifts = [
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(0.37, -0.61),
        C64::new(-1.23, 0.89),
    ];
    let scale = coeffs.iter().map(|c| c.max_abs()).fold(0.0_f64, f64::max);
    let sigma = shifts
        .iter()
        .copied()
        .find(|&s| determinant(&eval_at(s)).norm() > 1e-10 * scale.powi(n as i32).max(1e-280))
        .ok_or(CompanionError::DegenerateLeading)?;

    // Reversed coefficients: coefficient of t^m in Q is
    // Σ_k A_k · C(k, d−m) σ^{k−(d−m)}.
    let mut rev = vec![CMatrix::zeros(n, n); d + 1];
    for (m, slot) in rev.iter_mut().enumerate() {
        let j = d - m;
        for (k, a_k) in coeffs.iter().enumerate() {
            if k < j {
                continue;
            }
            let mut binom = 1.0;
            for i in 0..j {
                binom *= (k - i) as f64 / (j - i) as f64;
            }
            let factor = C64::new(binom, 0.0) * sigma.powi((k - j) as i32);
            *slot = slot.add_scaled(a_k, factor);
        }
    }
    let ts = companion_spectrum(&rev)?;
    let mut out = Vec::new();
    for t in ts {
        if t.norm() > 1e-10 {
            out.push(sigma + t.inv());
        }
    }
    Ok(out)
}

/// Exact spectrum of a monomial/rational operator via polynomialize +
/// companion linearization, with pole-adjacent spurious roots filtered
/// by a residual test under the original operator. Restricted to the
/// disk when a contour is given.
pub fn oracle_eigenvalues(
    op: &NepOperator,
    inside: Option<&CircularContour>,
) -> Result<Vec<C64>, CompanionError> {
    let (poly, spurious) = op.polynomialize()?;
    let coeffs = poly
        .monomial_coefficients()
        .expect("polynomialize returns monomial terms");
    let roots = polynomial_eigenvalues(&coeffs)?;
    let mut out = Vec::new();
    for r in roots {
        let near_pole = spurious.iter().any(|&mu| (r - mu).norm() <= 1e-8);
        if near_pole {
            let keep = match op.evaluate(r) {
                Ok(t) => match svd_extremes(&t) {
                    Ok(s) => s.sigma_min <= 1e-8 * s.sigma_max,
                    Err(_) => false,
                },
                Err(_) => false,
            };
            if !keep {
                continue;
            }
        }
        if let Some(contour) = inside {
            if !contour.contains(r, 0.0) {
                continue;
            }
        }
        out.push(r);
    }
    out.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(out)
}
