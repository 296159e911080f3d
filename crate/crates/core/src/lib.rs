//! Dense toolkit for nonlinear eigenvalue problems T(λ)x = 0 where
//! T(λ) = A₀ + Σᵢ Aᵢ fᵢ(λ) with monomial, rational, exponential,
//! logarithmic, or sinusoidal scalar factors.
//!
//! The solver locates all eigenvalues inside a circular contour by
//! resolvent moment integration, verifies counts against the winding
//! number of det T, and subdivides or refines contours until the
//! requested residual tolerance holds. Separate modules refine single
//! eigenpairs (Newton on det, curvature-adaptive variational descent),
//! bound eigenvalue drift under operator perturbations, and track
//! eigenvalue paths of parameter-dependent operators through
//! bifurcations.

pub mod bifurcation;
pub mod companion;
pub mod contour;
pub mod gallery;
pub mod linalg;
pub mod operator;
pub mod perturbation;
pub mod random;
pub mod refine;
pub mod solver;

pub use bifurcation::{
    AdjointPair, BifurcationError, BifurcationReport, ParametricNep, PathPoint,
};
pub use contour::{CircularContour, MomentPair, QuadratureError, QuadratureGrid};
pub use linalg::{CMatrix, CVector, LinalgError, C64};
pub use operator::{NepOperator, OperatorError, PerturbedOperator, ScalarFunction, Term};
pub use perturbation::{
    BoundReport, NoiseConvergenceReport, PerturbationError, PerturbationSpec,
    PerturbationStructure,
};
pub use refine::{RefineConfig, RefineError, RefineResult};
pub use solver::{Cluster, SolveError, SolveReport, SolverConfig};
