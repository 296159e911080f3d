//! Operator model T(λ) = A₀ + Σᵢ Aᵢ fᵢ(λ) with tagged scalar factors
//! and their analytic λ-derivatives.

use crate::linalg::{determinant, CMatrix, CVector, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("scalar function of term {term} undefined at λ = {lambda} (pole or branch cut)")]
    DomainError { lambda: C64, term: usize },
    #[error("residual undefined for the zero vector")]
    ZeroVector,
    #[error("unsupported scalar function: {detail}")]
    UnsupportedFunction { detail: String },
}

/// Maximum monomial power; guards `powi` overflow and keeps the
/// companion linearization at a sane size.
pub const MAX_MONOMIAL_POWER: u32 = 64;

/// Scalar factor attached to a coefficient matrix. Evaluation uses
/// principal branches throughout; the logarithm's cut is (−∞, 0].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarFunction {
    Monomial { power: u32 },
    RationalPole { pole: C64 },
    Exponential,
    Logarithmic,
    Sinusoidal,
}

impl ScalarFunction {
    /// True when λ is outside the function's domain.
    pub fn excludes(&self, lambda: C64) -> bool {
        match self {
            ScalarFunction::Monomial { .. } => false,
            ScalarFunction::RationalPole { pole } => (lambda - pole).norm() == 0.0,
            ScalarFunction::Exponential | ScalarFunction::Sinusoidal => false,
            ScalarFunction::Logarithmic => lambda.im == 0.0 && lambda.re <= 0.0,
        }
    }

    fn value(&self, lambda: C64) -> C64 {
        match self {
            ScalarFunction::Monomial { power } => lambda.powi(*power as i32),
            ScalarFunction::RationalPole { pole } => (lambda - pole).inv(),
            ScalarFunction::Exponential => lambda.exp(),
            ScalarFunction::Logarithmic => lambda.ln(),
            ScalarFunction::Sinusoidal => lambda.sin(),
        }
    }

    fn deriv(&self, lambda: C64) -> C64 {
        match self {
            ScalarFunction::Monomial { power: 0 } => C64::new(0.0, 0.0),
            ScalarFunction::Monomial { power } => {
                C64::new(*power as f64, 0.0) * lambda.powi(*power as i32 - 1)
            }
            ScalarFunction::RationalPole { pole } => {
                let d = lambda - pole;
                -(d * d).inv()
            }
            ScalarFunction::Exponential => lambda.exp(),
            ScalarFunction::Logarithmic => lambda.inv(),
            ScalarFunction::Sinusoidal => lambda.cos(),
        }
    }

    fn deriv2(&self, lambda: C64) -> C64 {
        match self {
            ScalarFunction::Monomial { power: 0 } | ScalarFunction::Monomial { power: 1 } => {
                C64::new(0.0, 0.0)
            }
            ScalarFunction::Monomial { power } => {
                let k = *power as f64;
                C64::new(k * (k - 1.0), 0.0) * lambda.powi(*power as i32 - 2)
            }
            ScalarFunction::RationalPole { pole } => {
                let d = lambda - pole;
                C64::new(2.0, 0.0) * (d * d * d).inv()
            }
            ScalarFunction::Exponential => lambda.exp(),
            ScalarFunction::Logarithmic => -(lambda * lambda).inv(),
            ScalarFunction::Sinusoidal => -lambda.sin(),
        }
    }

    /// Derivative order needed by the log/rational domain guards is the
    /// same for all three derivative levels: λ = 0 (log) or λ = μ.
    fn excludes_deriv(&self, lambda: C64) -> bool {
        match self {
            ScalarFunction::Logarithmic => self.excludes(lambda) || lambda.norm() == 0.0,
            _ => self.excludes(lambda),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Term {
    pub coeff: CMatrix,
    pub func: ScalarFunction,
}

/// T(λ) = base + Σ terms[i].coeff · terms[i].func(λ). Immutable after
/// construction; evaluation at distinct λ needs no coordination.
#[derive(Debug, Clone)]
pub struct NepOperator {
    base: CMatrix,
    terms: Vec<Term>,
}

impl NepOperator {
    pub fn new(base: CMatrix, terms: Vec<Term>) -> Result<Self, OperatorError> {
        assert!(base.is_square(), "base matrix must be square");
        let n = base.rows();
        for t in &terms {
            assert!(
                t.coeff.rows() == n && t.coeff.cols() == n,
                "term dimension {}x{} does not match operator dimension {}",
                t.coeff.rows(),
                t.coeff.cols(),
                n
            );
            if let ScalarFunction::Monomial { power } = t.func {
                if power > MAX_MONOMIAL_POWER {
                    return Err(OperatorError::UnsupportedFunction {
                        detail: format!("monomial power {power} exceeds {MAX_MONOMIAL_POWER}"),
                    });
                }
            }
        }
        assert!(
            !terms.is_empty() || base.max_abs() > 0.0,
            "operator must have a term or a nonzero base"
        );
        Ok(NepOperator { base, terms })
    }

    pub fn dim(&self) -> usize {
        self.base.rows()
    }

    pub fn base(&self) -> &CMatrix {
        &self.base
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Poles and log branch points that contours must avoid, with the
    /// log cut handled separately by the caller.
    pub fn singular_points(&self) -> Vec<C64> {
        let mut pts = Vec::new();
        for t in &self.terms {
            match t.func {
                ScalarFunction::RationalPole { pole } => pts.push(pole),
                ScalarFunction::Logarithmic => pts.push(C64::new(0.0, 0.0)),
                _ => {}
            }
        }
        pts
    }

    pub fn has_log_term(&self) -> bool {
        self.terms
            .iter()
            .any(|t| matches!(t.func, ScalarFunction::Logarithmic))
    }

    fn domain_check(&self, lambda: C64, deriv: bool) -> Result<(), OperatorError> {
        for (i, t) in self.terms.iter().enumerate() {
            let outside = if deriv {
                t.func.excludes_deriv(lambda)
            } else {
                t.func.excludes(lambda)
            };
            if outside {
                return Err(OperatorError::DomainError { lambda, term: i });
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, lambda: C64) -> Result<CMatrix, OperatorError> {
        self.domain_check(lambda, false)?;
        let mut out = self.base.clone();
        for t in &self.terms {
            out = out.add_scaled(&t.coeff, t.func.value(lambda));
        }
        Ok(out)
    }

    pub fn derivative(&self, lambda: C64) -> Result<CMatrix, OperatorError> {
        self.domain_check(lambda, true)?;
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for t in &self.terms {
            out = out.add_scaled(&t.coeff, t.func.deriv(lambda));
        }
        Ok(out)
    }

    pub fn second_derivative(&self, lambda: C64) -> Result<CMatrix, OperatorError> {
        self.domain_check(lambda, true)?;
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for t in &self.terms {
            out = out.add_scaled(&t.coeff, t.func.deriv2(lambda));
        }
        Ok(out)
    }

    pub fn determinant_at(&self, lambda: C64) -> Result<C64, OperatorError> {
        Ok(determinant(&self.evaluate(lambda)?))
    }

    /// ‖T(λ)x‖₂ / ‖x‖₂.
    pub fn residual(&self, lambda: C64, x: &CVector) -> Result<f64, OperatorError> {
        let xn = x.norm();
        if xn == 0.0 {
            return Err(OperatorError::ZeroVector);
        }
        Ok(self.evaluate(lambda)?.mul_vec(x).norm() / xn)
    }

    /// Ascending monomial coefficient matrices when every term is a
    /// monomial; None otherwise. Zero-degree content sits in index 0.
    pub fn monomial_coefficients(&self) -> Option<Vec<CMatrix>> {
        let n = self.dim();
        let mut degree = 0u32;
        for t in &self.terms {
            match t.func {
                ScalarFunction::Monomial { power } => degree = degree.max(power),
                _ => return None,
            }
        }
        let mut coeffs = vec![CMatrix::zeros(n, n); degree as usize + 1];
        coeffs[0] = self.base.clone();
        for t in &self.terms {
            if let ScalarFunction::Monomial { power } = t.func {
                coeffs[power as usize] = coeffs[power as usize].add(&t.coeff);
            }
        }
        Some(coeffs)
    }

    /// Multiplies through by ∏(λ−μᵢ) over distinct poles, expanding to a
    /// pure monomial operator. Returns the poles each repeated dim times:
    /// those are the candidate spurious roots the companion oracle must
    /// filter by residual under the original operator.
    pub fn polynomialize(&self) -> Result<(NepOperator, Vec<C64>), OperatorError> {
        let n = self.dim();
        let mut poles: Vec<C64> = Vec::new();
        for t in &self.terms {
            match t.func {
                ScalarFunction::Monomial { .. } => {}
                ScalarFunction::RationalPole { pole } => {
                    if !poles.iter().any(|p| *p == pole) {
                        poles.push(pole);
                    }
                }
                ref f => {
                    return Err(OperatorError::UnsupportedFunction {
                        detail: format!("cannot polynomialize transcendental term {f:?}"),
                    })
                }
            }
        }
        if poles.is_empty() {
            return Ok((self.clone(), Vec::new()));
        }

        // Scalar polynomial ∏(λ−μ) over a pole subset, ascending coefficients.
        let product = |skip: Option<C64>| -> Vec<C64> {
            let mut p = vec![C64::new(1.0, 0.0)];
            for &mu in &poles {
                if skip == Some(mu) {
                    continue;
                }
                let mut next = vec![C64::new(0.0, 0.0); p.len() + 1];
                for (k, &c) in p.iter().enumerate() {
                    next[k] -= c * mu;
                    next[k + 1] += c;
                }
                p = next;
            }
            p
        };

        let full = product(None);
        let max_power = self
            .terms
            .iter()
            .filter_map(|t| match t.func {
                ScalarFunction::Monomial { power } => Some(power as usize),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let degree = full.len() - 1 + max_power;
        let mut coeffs = vec![CMatrix::zeros(n, n); degree + 1];
        for (k, &c) in full.iter().enumerate() {
            coeffs[k] = coeffs[k].add_scaled(&self.base, c);
        }
        for t in &self.terms {
            match t.func {
                ScalarFunction::Monomial { power } => {
                    for (k, &c) in full.iter().enumerate() {
                        let idx = k + power as usize;
                        coeffs[idx] = coeffs[idx].add_scaled(&t.coeff, c);
                    }
                }
                ScalarFunction::RationalPole { pole } => {
                    for (k, &c) in product(Some(pole)).iter().enumerate() {
                        coeffs[k] = coeffs[k].add_scaled(&t.coeff, c);
                    }
                }
                _ => unreachable!(),
            }
        }

        let base = coeffs[0].clone();
        let terms = coeffs
            .into_iter()
            .enumerate()
            .skip(1)
            .map(|(power, coeff)| Term {
                coeff,
                func: ScalarFunction::Monomial {
                    power: power as u32,
                },
            })
            .collect();
        let mut spurious = Vec::new();
        for &mu in &poles {
            for _ in 0..n {
                spurious.push(mu);
            }
        }
        Ok((NepOperator::new(base, terms)?, spurious))
    }
}

/// T̃(λ) = T(λ) + ΔT(λ) with ΔT itself a full operator, so a
/// perturbation can hit any subset of the coefficient matrices.
#[derive(Debug, Clone)]
pub struct PerturbedOperator {
    pub base_op: NepOperator,
    pub delta: NepOperator,
}

impl PerturbedOperator {
    pub fn new(base_op: NepOperator, delta: NepOperator) -> Self {
        assert_eq!(base_op.dim(), delta.dim(), "perturbation dimension mismatch");
        PerturbedOperator { base_op, delta }
    }

    /// Single operator evaluating to base + delta; term lists concatenate.
    pub fn combined(&self) -> NepOperator {
        let base = self.base_op.base.add(&self.delta.base);
        let mut terms = self.base_op.terms.clone();
        terms.extend(self.delta.terms.iter().cloned());
        NepOperator::new(base, terms).expect("combined operator is well formed")
    }

    pub fn delta_norm_at(&self, lambda: C64) -> Result<f64, OperatorError> {
        Ok(crate::linalg::spectral_norm(&self.delta.evaluate(lambda)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::linalg::spectral_norm;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_mat_close(a: &CMatrix, b: &CMatrix, tol: f64) {
        assert_eq!(a.rows(), b.rows());
        assert_eq!(a.cols(), b.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                assert!(
                    (a[(i, j)] - b[(i, j)]).norm() <= tol,
                    "entry ({i},{j}): {} vs {}",
                    a[(i, j)],
                    b[(i, j)]
                );
            }
        }
    }

    #[test]
    fn quadratic_example_at_zero_is_stiffness_block() {
        let op = gallery::example_quadratic();
        let k = CMatrix::from_real(&[&[5.0, 1.0], &[1.0, 5.0]]);
        assert_mat_close(&op.evaluate(c(0.0, 0.0)).unwrap(), &k, 0.0);
    }

    #[test]
    fn quadratic_example_at_one_sums_all_blocks() {
        let op = gallery::example_quadratic();
        let want = CMatrix::from_real(&[&[7.0, 2.0], &[2.0, 8.0]]);
        assert_mat_close(&op.evaluate(c(1.0, 0.0)).unwrap(), &want, 1e-15);
    }

    #[test]
    fn rational_example_at_two_and_a_half() {
        let op = gallery::example_rational();
        let want = CMatrix::from_real(&[&[8.0, 3.0], &[3.0, 7.0]]);
        assert_mat_close(&op.evaluate(c(2.5, 0.0)).unwrap(), &want, 1e-14);
    }

    #[test]
    fn quadratic_derivative_at_zero_is_damping_block() {
        let op = gallery::example_quadratic();
        let cmat = CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_mat_close(&op.derivative(c(0.0, 0.0)).unwrap(), &cmat, 0.0);
    }

    #[test]
    fn quadratic_derivative_at_one() {
        let op = gallery::example_quadratic();
        let want = CMatrix::from_real(&[&[4.0, 1.0], &[1.0, 6.0]]);
        assert_mat_close(&op.derivative(c(1.0, 0.0)).unwrap(), &want, 1e-15);
    }

    #[test]
    fn rational_derivative_at_two_and_a_half_negates_coupling() {
        let op = gallery::example_rational();
        let want = CMatrix::from_real(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        assert_mat_close(&op.derivative(c(2.5, 0.0)).unwrap(), &want, 1e-14);
    }

    #[test]
    fn quadratic_second_derivative_is_constant_mass_block() {
        let op = gallery::example_quadratic();
        let want = CMatrix::from_real(&[&[4.0, 0.0], &[0.0, 6.0]]);
        for lam in [c(0.0, 0.0), c(1.0, 1.0), c(-3.0, 0.25)] {
            assert_mat_close(&op.second_derivative(lam).unwrap(), &want, 1e-13);
        }
    }

    #[test]
    fn linear_monomial_has_zero_second_derivative() {
        let op = NepOperator::new(
            CMatrix::zeros(2, 2),
            vec![Term {
                coeff: CMatrix::identity(2),
                func: ScalarFunction::Monomial { power: 1 },
            }],
        )
        .unwrap();
        let d2 = op.second_derivative(c(0.7, -0.3)).unwrap();
        assert_eq!(d2.max_abs(), 0.0);
    }

    #[test]
    fn exponential_second_derivative_at_zero_is_coefficient() {
        let e = CMatrix::from_real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let op = NepOperator::new(
            CMatrix::zeros(2, 2),
            vec![Term {
                coeff: e.clone(),
                func: ScalarFunction::Exponential,
            }],
        )
        .unwrap();
        assert_mat_close(&op.second_derivative(c(0.0, 0.0)).unwrap(), &e, 0.0);
    }

    #[test]
    fn determinant_of_quadratic_example() {
        let op = gallery::example_quadratic();
        let d0 = op.determinant_at(c(0.0, 0.0)).unwrap();
        assert!((d0 - c(24.0, 0.0)).norm() < 1e-12);
        let d1 = op.determinant_at(c(1.0, 0.0)).unwrap();
        assert!((d1 - c(52.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn determinant_vanishes_at_linear_eigenvalue() {
        let op = gallery::shifted_diagonal(&[1.0, 2.0]);
        let d = op.determinant_at(c(1.0, 0.0)).unwrap();
        assert_eq!(d.norm(), 0.0);
    }

    #[test]
    fn residual_of_exact_eigenpair_is_zero() {
        let op = gallery::shifted_diagonal(&[1.0, 2.0]);
        let e1 = CVector::from_slice(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(op.residual(c(1.0, 0.0), &e1).unwrap(), 0.0);
    }

    #[test]
    fn residual_of_wrong_axis_is_gap() {
        let op = gallery::shifted_diagonal(&[1.0, 2.0]);
        let e2 = CVector::from_slice(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert!((op.residual(c(1.0, 0.0), &e2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn residual_is_norm_ratio() {
        let op = gallery::shifted_diagonal(&[1.0, 2.0]);
        let s = 1.0 / 2.0_f64.sqrt();
        let x = CVector::from_slice(&[c(s, 0.0), c(s, 0.0)]);
        assert!((op.residual(c(0.0, 0.0), &x).unwrap() - 2.5_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn residual_rejects_zero_vector() {
        let op = gallery::shifted_diagonal(&[1.0, 2.0]);
        let z = CVector::zeros(2);
        assert!(matches!(
            op.residual(c(0.0, 0.0), &z),
            Err(OperatorError::ZeroVector)
        ));
    }

    #[test]
    fn rational_pole_evaluation_is_domain_error() {
        let op = gallery::example_rational();
        assert!(matches!(
            op.evaluate(c(1.5, 0.0)),
            Err(OperatorError::DomainError { .. })
        ));
    }

    #[test]
    fn log_branch_cut_is_domain_error() {
        let op = gallery::example_logarithmic();
        assert!(op.evaluate(c(-1.0, 0.0)).is_err());
        assert!(op.evaluate(c(0.0, 0.0)).is_err());
        assert!(op.evaluate(c(-1.0, 1e-9)).is_ok());
        assert!(op.derivative(c(1.0, 0.0)).is_ok());
    }

    #[test]
    fn monomial_power_cap_is_enforced() {
        let err = NepOperator::new(
            CMatrix::identity(1),
            vec![Term {
                coeff: CMatrix::identity(1),
                func: ScalarFunction::Monomial { power: 65 },
            }],
        );
        assert!(matches!(
            err,
            Err(OperatorError::UnsupportedFunction { .. })
        ));
    }

    #[test]
    fn finite_difference_validates_derivatives_for_every_kind() {
        use rand::Rng;
        let kinds = [
            ScalarFunction::Monomial { power: 3 },
            ScalarFunction::Monomial { power: 0 },
            ScalarFunction::RationalPole { pole: c(1.5, 0.0) },
            ScalarFunction::Exponential,
            ScalarFunction::Logarithmic,
            ScalarFunction::Sinusoidal,
        ];
        let mut rng = crate::random::seeded(7);
        for func in kinds {
            let coeff = CMatrix::from_real(&[&[2.0, -1.0], &[0.5, 3.0]]);
            let op = NepOperator::new(
                CMatrix::zeros(2, 2),
                vec![Term {
                    coeff,
                    func,
                }],
            )
            .unwrap();
            let mut checked = 0;
            while checked < 20 {
                let lam = c(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0));
                if func.excludes_deriv(lam) || (lam - c(1.5, 0.0)).norm() < 0.1 {
                    continue;
                }
                let h = 1e-5 * (1.0 + lam.norm());
                let hc = c(h, 0.0);
                let fd = op
                    .evaluate(lam + hc)
                    .unwrap()
                    .sub(&op.evaluate(lam - hc).unwrap())
                    .scale(c(1.0 / (2.0 * h), 0.0));
                let d = op.derivative(lam).unwrap();
                let err = spectral_norm(&fd.sub(&d));
                assert!(
                    err <= 1e-6 * spectral_norm(&d).max(1e-10),
                    "{func:?} first derivative mismatch at {lam}: {err}"
                );
                let fd2 = op
                    .derivative(lam + hc)
                    .unwrap()
                    .sub(&op.derivative(lam - hc).unwrap())
                    .scale(c(1.0 / (2.0 * h), 0.0));
                let d2 = op.second_derivative(lam).unwrap();
                let err2 = spectral_norm(&fd2.sub(&d2));
                assert!(
                    err2 <= 1e-5 * spectral_norm(&d2).max(1e-8),
                    "{func:?} second derivative mismatch at {lam}: {err2}"
                );
                checked += 1;
            }
        }
    }

    #[test]
    fn evaluation_is_linear_in_coefficients() {
        let op_a = gallery::example_quadratic();
        let b = CMatrix::from_real(&[&[0.3, -0.1], &[0.2, 0.4]]);
        let shifted = NepOperator::new(
            op_a.base().clone(),
            op_a.terms()
                .iter()
                .enumerate()
                .map(|(i, t)| Term {
                    coeff: if i == 0 { t.coeff.add(&b) } else { t.coeff.clone() },
                    func: t.func,
                })
                .collect(),
        )
        .unwrap();
        let extra = NepOperator::new(
            CMatrix::zeros(2, 2),
            vec![Term {
                coeff: b,
                func: op_a.terms()[0].func,
            }],
        )
        .unwrap();
        let lam = c(0.8, -1.3);
        let lhs = shifted.evaluate(lam).unwrap();
        let rhs = op_a.evaluate(lam).unwrap().add(&extra.evaluate(lam).unwrap());
        let scale = spectral_norm(&lhs).max(1.0);
        assert!(spectral_norm(&lhs.sub(&rhs)) <= 1e-14 * scale);
    }

    #[test]
    fn polynomialize_keeps_pure_polynomials_unchanged() {
        let op = gallery::example_quadratic();
        let (poly, spurious) = op.polynomialize().unwrap();
        assert!(spurious.is_empty());
        let lam = c(0.3, 0.9);
        assert_mat_close(
            &poly.evaluate(lam).unwrap(),
            &op.evaluate(lam).unwrap(),
            1e-14,
        );
    }

    #[test]
    fn polynomialize_scalar_rational_shifts_the_root() {
        // 1 + 1/(λ−2) has the lone root λ = 1; multiplying by (λ−2)
        // gives λ−1 with candidate spurious root 2.
        let op = NepOperator::new(
            CMatrix::identity(1),
            vec![Term {
                coeff: CMatrix::identity(1),
                func: ScalarFunction::RationalPole { pole: c(2.0, 0.0) },
            }],
        )
        .unwrap();
        let (poly, spurious) = op.polynomialize().unwrap();
        assert_eq!(spurious, vec![c(2.0, 0.0)]);
        let coeffs = poly.monomial_coefficients().unwrap();
        assert_eq!(coeffs.len(), 2);
        assert!((coeffs[0][(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((coeffs[1][(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn polynomialize_rational_example_matches_off_pole() {
        let op = gallery::example_rational();
        let (poly, spurious) = op.polynomialize().unwrap();
        assert_eq!(spurious, vec![c(1.5, 0.0), c(1.5, 0.0)]);
        for lam in [c(2.5, 0.0), c(0.3, 1.1), c(-1.0, -0.4)] {
            let factor = lam - c(1.5, 0.0);
            let want = op.evaluate(lam).unwrap().scale(factor);
            assert_mat_close(&poly.evaluate(lam).unwrap(), &want, 1e-12);
        }
    }

    #[test]
    fn polynomialize_rejects_transcendental_terms() {
        let op = gallery::example_exponential();
        assert!(matches!(
            op.polynomialize(),
            Err(OperatorError::UnsupportedFunction { .. })
        ));
    }

    #[test]
    fn combined_perturbation_sums_pointwise() {
        let op = gallery::example_quadratic();
        let delta = NepOperator::new(
            CMatrix::from_real(&[&[1e-3, 0.0], &[0.0, -1e-3]]),
            vec![Term {
                coeff: CMatrix::from_real(&[&[0.0, 1e-3], &[1e-3, 0.0]]),
                func: ScalarFunction::Monomial { power: 1 },
            }],
        )
        .unwrap();
        let pert = PerturbedOperator::new(op.clone(), delta.clone());
        let lam = c(0.4, 0.7);
        let want = op.evaluate(lam).unwrap().add(&delta.evaluate(lam).unwrap());
        assert_mat_close(&pert.combined().evaluate(lam).unwrap(), &want, 1e-14);
    }
}
