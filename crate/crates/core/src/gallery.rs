//! Ready-made operators used across tests, benches, and the CLI's
//! built-in problem names.

use crate::linalg::{CMatrix, C64};
use crate::operator::{NepOperator, ScalarFunction, Term};
use rand::Rng;

fn term(coeff: CMatrix, func: ScalarFunction) -> Term {
    Term { coeff, func }
}

/// λ²M + λC + K with M = diag(2,3), C the exchange matrix, K = 5I + J.
/// Four eigenvalues, all inside |λ| < 2.
pub fn example_quadratic() -> NepOperator {
    let m = CMatrix::from_real(&[&[2.0, 0.0], &[0.0, 3.0]]);
    let c = CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let k = CMatrix::from_real(&[&[5.0, 1.0], &[1.0, 5.0]]);
    NepOperator::new(
        k,
        vec![
            term(c, ScalarFunction::Monomial { power: 1 }),
            term(m, ScalarFunction::Monomial { power: 2 }),
        ],
    )
    .unwrap()
}

/// e^λ M + λC + K with the same blocks as the quadratic example. No
/// eigenvalues inside |λ| < 2; the nearest pair sits at ≈ 0.5413 ± 2.5381i.
pub fn example_exponential() -> NepOperator {
    let m = CMatrix::from_real(&[&[2.0, 0.0], &[0.0, 3.0]]);
    let c = CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let k = CMatrix::from_real(&[&[5.0, 1.0], &[1.0, 5.0]]);
    NepOperator::new(
        k,
        vec![
            term(c, ScalarFunction::Monomial { power: 1 }),
            term(m, ScalarFunction::Exponential),
        ],
    )
    .unwrap()
}

/// (M+K) + C/(λ−1.5) with M = diag(3,2), C = [[1,2],[2,1]], K = 4I + J.
/// Real eigenvalues ≈ 1.09832 and ≈ 1.68216 straddle the pole at 1.5.
pub fn example_rational() -> NepOperator {
    let m = CMatrix::from_real(&[&[3.0, 0.0], &[0.0, 2.0]]);
    let c = CMatrix::from_real(&[&[1.0, 2.0], &[2.0, 1.0]]);
    let k = CMatrix::from_real(&[&[4.0, 1.0], &[1.0, 4.0]]);
    NepOperator::new(
        m.add(&k),
        vec![term(
            c,
            ScalarFunction::RationalPole {
                pole: C64::new(1.5, 0.0),
            },
        )],
    )
    .unwrap()
}

/// log(λ)M + λC + K with M = diag(1,4), C = 2·exchange, K = 6I + 2J.
/// One eigenvalue ≈ 3.45314 inside the disk |λ−3| < 1.5.
pub fn example_logarithmic() -> NepOperator {
    let m = CMatrix::from_real(&[&[1.0, 0.0], &[0.0, 4.0]]);
    let c = CMatrix::from_real(&[&[0.0, 2.0], &[2.0, 0.0]]);
    let k = CMatrix::from_real(&[&[6.0, 2.0], &[2.0, 6.0]]);
    NepOperator::new(
        k,
        vec![
            term(c, ScalarFunction::Monomial { power: 1 }),
            term(m, ScalarFunction::Logarithmic),
        ],
    )
    .unwrap()
}

/// λI − diag(shifts): linear problem whose spectrum is exactly `shifts`.
pub fn shifted_diagonal(shifts: &[f64]) -> NepOperator {
    let n = shifts.len();
    let mut base = CMatrix::zeros(n, n);
    for (i, &s) in shifts.iter().enumerate() {
        base[(i, i)] = C64::new(-s, 0.0);
    }
    NepOperator::new(
        base,
        vec![term(
            CMatrix::identity(n),
            ScalarFunction::Monomial { power: 1 },
        )],
    )
    .unwrap()
}

/// The quadratic example with its stiffness block shifted by μI: the
/// eigenvalues move smoothly in μ and stay simple on μ ∈ [0, 1].
pub fn shifted_stiffness_family() -> crate::bifurcation::ParametricNep {
    crate::bifurcation::ParametricNep::new(2, |mu| {
        let m = CMatrix::from_real(&[&[2.0, 0.0], &[0.0, 3.0]]);
        let c = CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let k = CMatrix::from_real(&[&[5.0 + mu, 1.0], &[1.0, 5.0 + mu]]);
        NepOperator::new(
            k,
            vec![
                term(c, ScalarFunction::Monomial { power: 1 }),
                term(m, ScalarFunction::Monomial { power: 2 }),
            ],
        )
        .unwrap()
    })
}

/// Diagonal quadratic with roots 1 and 1+gap in the first/second entry
/// and spectator roots at 3 and 2.5. The spectators keep the moment
/// quadrature error genuinely O(ρⁿ) at coarse n; a plain shifted
/// diagonal would be extracted exactly at any node count because each
/// resolvent entry then has a single pole and the a1-against-a0
/// reduction cancels the alias terms.
pub fn close_pair(gap: f64) -> NepOperator {
    assert!(gap > 0.0);
    let r2 = 1.0 + gap;
    // entries (λ−1)(λ−3) and (λ−r2)(λ−2.5)
    let a0 = CMatrix::from_real(&[&[3.0, 0.0], &[0.0, 2.5 * r2]]);
    let a1 = CMatrix::from_real(&[&[-4.0, 0.0], &[0.0, -(r2 + 2.5)]]);
    NepOperator::new(
        a0,
        vec![
            term(a1, ScalarFunction::Monomial { power: 1 }),
            term(CMatrix::identity(2), ScalarFunction::Monomial { power: 2 }),
        ],
    )
    .unwrap()
}

/// Random quadratic λ²A₂ + λA₁ + A₀ with seeded Gaussian blocks.
pub fn random_quadratic(dim: usize, seed: u64) -> NepOperator {
    let mut rng = crate::random::seeded(seed);
    let mut mats = Vec::new();
    for _ in 0..3 {
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        mats.push(m);
    }
    let a0 = mats.remove(0);
    let a1 = mats.remove(0);
    let a2 = mats.remove(0);
    NepOperator::new(
        a0,
        vec![
            term(a1, ScalarFunction::Monomial { power: 1 }),
            term(a2, ScalarFunction::Monomial { power: 2 }),
        ],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallery_dimensions_are_two_by_two() {
        for op in [
            example_quadratic(),
            example_exponential(),
            example_rational(),
            example_logarithmic(),
        ] {
            assert_eq!(op.dim(), 2);
        }
    }

    #[test]
    fn rational_example_pole_is_registered() {
        let pts = example_rational().singular_points();
        assert_eq!(pts, vec![C64::new(1.5, 0.0)]);
    }

    #[test]
    fn logarithmic_example_registers_branch_point() {
        let op = example_logarithmic();
        assert!(op.has_log_term());
        assert_eq!(op.singular_points(), vec![C64::new(0.0, 0.0)]);
    }

    #[test]
    fn shifted_diagonal_vanishes_on_its_spectrum() {
        let op = shifted_diagonal(&[0.5, -1.25, 3.0]);
        for s in [0.5, -1.25, 3.0] {
            assert_eq!(op.determinant_at(C64::new(s, 0.0)).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn random_quadratic_is_seed_deterministic() {
        let a = random_quadratic(3, 11);
        let b = random_quadratic(3, 11);
        let lam = C64::new(0.3, -0.8);
        let d = a
            .evaluate(lam)
            .unwrap()
            .sub(&b.evaluate(lam).unwrap())
            .max_abs();
        assert_eq!(d, 0.0);
    }
}
