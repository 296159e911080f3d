//! Dense complex matrix kernels: LU solves, determinants, SVD extremes, norms,
//! and a small dense eigensolver. Everything here is written directly against
//! `Complex64` storage; no external linear algebra backend is used.
//!
//! All routines are plain functions of their inputs and keep no hidden state,
//! so values can be shared freely across threads.

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Hard cap for the dense eigensolver; this crate is desk-scale by design.
pub const DENSE_EIG_LIMIT: usize = 512;

/// Pivot magnitudes below `SINGULAR_PIVOT_REL * max|a_ij|` mean the matrix is
/// treated as singular. In resolvent applications this is exactly the signal
/// that a quadrature node landed on an eigenvalue.
pub const SINGULAR_PIVOT_REL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is numerically singular (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("{what} exceeded its iteration budget ({budget})")]
    ConvergenceFailure { what: &'static str, budget: usize },
}

// ── vectors ──────────────────────────────────────────────────────────────────

#[derive(Clone, Debug, PartialEq)]
pub struct CVector {
    data: Vec<C64>,
}

impl CVector {
    pub fn zeros(dim: usize) -> Self {
        CVector { data: vec![C64::new(0.0, 0.0); dim] }
    }

    pub fn from_slice(entries: &[C64]) -> Self {
        assert!(entries.iter().all(|e| e.re.is_finite() && e.im.is_finite()), "non-finite vector entry");
        CVector { data: entries.to_vec() }
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self::from_slice(&entries.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian inner product; the first argument is conjugated.
    pub fn dot(&self, other: &CVector) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, alpha: C64) -> CVector {
        CVector { data: self.data.iter().map(|e| e * alpha).collect() }
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim());
        CVector { data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn normalized(&self) -> CVector {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(C64::new(1.0 / n, 0.0))
    }
}

impl std::ops::Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

// ── matrices ─────────────────────────────────────────────────────────────────

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>, // row-major
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty());
        let cols = rows[0].len();
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &v) in r.iter().enumerate() {
                assert!(v.re.is_finite() && v.im.is_finite(), "non-finite matrix entry");
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_real<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        Self::from_rows(
            &rows
                .iter()
                .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        )
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> CVector {
        CVector { data: (0..self.rows).map(|i| self[(i, j)]).collect() }
    }

    pub fn set_col(&mut self, j: usize, v: &CVector) {
        assert_eq!(v.dim(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim());
        let mut out = CVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        self.add_scaled(other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        self.add_scaled(other, C64::new(-1.0, 0.0))
    }

    /// self + alpha * other
    pub fn add_scaled(&self, other: &CMatrix, alpha: C64) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, &v) in out.data.iter_mut().zip(&other.data) {
            *o += alpha * v;
        }
        out
    }

    pub fn scale(&self, alpha: C64) -> CMatrix {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o *= alpha;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|e| e.re.is_finite() && e.im.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// ── LU factorization ─────────────────────────────────────────────────────────

struct LuFactors {
    lu: CMatrix,
    perm: Vec<usize>,
    parity: f64,
    /// Index of the first pivot that fell below the singularity threshold.
    singular_at: Option<(usize, f64, f64)>,
}

fn lu_factor(a: &CMatrix) -> LuFactors {
    assert!(a.is_square(), "LU needs a square matrix");
    let n = a.rows();
    let threshold = SINGULAR_PIVOT_REL * a.max_abs();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut parity = 1.0;
    let mut singular_at = None;

    for k in 0..n {
        let mut best = k;
        let mut best_mag = lu[(k, k)].norm();
        for i in k + 1..n {
            let mag = lu[(i, k)].norm();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        if best != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(best, j)];
                lu[(best, j)] = t;
            }
            perm.swap(k, best);
            parity = -parity;
        }
        if best_mag <= threshold {
            if singular_at.is_none() {
                singular_at = Some((k, best_mag, threshold));
            }
            continue; // leave the zero column; determinant still wants remaining pivots
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            if factor != C64::new(0.0, 0.0) {
                for j in k + 1..n {
                    let sub = factor * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
    }

    LuFactors { lu, perm, parity, singular_at }
}

impl LuFactors {
    fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.lu.rows();
        assert_eq!(b.rows(), n);
        let m = b.cols();
        let mut x = CMatrix::zeros(n, m);
        // apply permutation
        for i in 0..n {
            for j in 0..m {
                x[(i, j)] = b[(self.perm[i], j)];
            }
        }
        // forward substitution with unit lower triangle
        for k in 0..n {
            for i in k + 1..n {
                let f = self.lu[(i, k)];
                if f != C64::new(0.0, 0.0) {
                    for j in 0..m {
                        let sub = f * x[(k, j)];
                        x[(i, j)] -= sub;
                    }
                }
            }
        }
        // back substitution
        for k in (0..n).rev() {
            let d = self.lu[(k, k)];
            for j in 0..m {
                let mut acc = x[(k, j)];
                for i in k + 1..n {
                    acc -= self.lu[(k, i)] * x[(i, j)];
                }
                x[(k, j)] = acc / d;
            }
        }
        x
    }
}

/// Solve A·X = B by partially pivoted LU.
pub fn lu_solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    let f = lu_factor(a);
    if let Some((_, pivot, threshold)) = f.singular_at {
        return Err(LinalgError::SingularMatrix { pivot, threshold });
    }
    Ok(f.solve(b))
}

pub fn lu_solve_vec(a: &CMatrix, b: &CVector) -> Result<CVector, LinalgError> {
    let mut bm = CMatrix::zeros(b.dim(), 1);
    for i in 0..b.dim() {
        bm[(i, 0)] = b[i];
    }
    Ok(lu_solve(a, &bm)?.col(0))
}

/// Determinant from LU pivots and permutation parity. Singular input gives 0.
pub fn determinant(a: &CMatrix) -> C64 {
    let f = lu_factor(a);
    if f.singular_at.is_some() {
        return C64::new(0.0, 0.0);
    }
    let mut det = C64::new(f.parity, 0.0);
    for k in 0..f.lu.rows() {
        det *= f.lu[(k, k)];
    }
    det
}

// ── Hermitian Jacobi eigendecomposition ──────────────────────────────────────

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
/// Returns eigenvalues ascending with matching orthonormal eigenvector columns.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix), LinalgError> {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.clone();
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    const MAX_SWEEPS: usize = 60;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            let mut evals: Vec<(f64, usize)> =
                (0..n).map(|i| (m[(i, i)].re, i)).collect();
            evals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut vs = CMatrix::zeros(n, n);
            for (dst, &(_, src)) in evals.iter().enumerate() {
                let c = v.col(src);
                vs.set_col(dst, &c);
            }
            return Ok((evals.into_iter().map(|(e, _)| e).collect(), vs));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-18 * scale {
                    continue;
                }
                let phi = apq / mag; // unit phase
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column update with T = [[c, s], [-conj(phi) s, conj(phi) c]].
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - phi.conj() * s * akq;
                    m[(k, q)] = s * akp + phi.conj() * c * akq;
                }
                // Row update with T adjoint.
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - phi * s * aqk;
                    m[(q, k)] = s * apk + phi * c * aqk;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - phi.conj() * s * vkq;
                    v[(k, q)] = s * vkp + phi.conj() * c * vkq;
                }
            }
        }
    }
    Err(LinalgError::ConvergenceFailure { what: "Hermitian Jacobi eigendecomposition", budget: MAX_SWEEPS })
}

// ── SVD ──────────────────────────────────────────────────────────────────────

#[derive(Clone, Debug)]
pub struct ThinSvd {
    /// rows × k left singular vectors, k = min(rows, cols).
    pub u: CMatrix,
    /// Singular values, descending.
    pub sigma: Vec<f64>,
    /// cols × k right singular vectors.
    pub v: CMatrix,
}

/// Thin SVD via the Hermitian Gram pair on the smaller side. Singular values
/// are refreshed as ‖A·vᵢ‖ so small ones do not inherit the squared
/// conditioning of the Gram matrix.
pub fn thin_svd(a: &CMatrix) -> Result<ThinSvd, LinalgError> {
    if a.rows() < a.cols() {
        let t = thin_svd(&a.adjoint())?;
        return Ok(ThinSvd { u: t.v, sigma: t.sigma, v: t.u });
    }
    let k = a.cols();
    let gram = a.adjoint().mul(a);
    let (evals, vecs) = hermitian_eigen(&gram)?;
    // ascending -> descending
    let order: Vec<usize> = (0..k).rev().collect();
    let mut sigma = Vec::with_capacity(k);
    let mut v = CMatrix::zeros(k, k);
    let mut u = CMatrix::zeros(a.rows(), k);
    for (dst, &src) in order.iter().enumerate() {
        let vi = vecs.col(src);
        let avi = a.mul_vec(&vi);
        let s = avi.norm();
        sigma.push(s);
        v.set_col(dst, &vi);
        let _ = evals; // eigenvalues only seed the ordering; σ comes from ‖A·v‖
        if s > 0.0 {
            u.set_col(dst, &avi.scale(C64::new(1.0 / s, 0.0)));
        }
    }
    // Orthonormal completion for (numerically) zero singular directions.
    let cutoff = sigma.first().copied().unwrap_or(0.0) * 1e-15;
    for i in 0..k {
        if sigma[i] > cutoff && sigma[i] > 0.0 {
            continue;
        }
        let mut best: Option<CVector> = None;
        let mut best_norm = -1.0;
        for e in 0..a.rows() {
            let mut cand = CVector::zeros(a.rows());
            cand[e] = C64::new(1.0, 0.0);
            for j in 0..k {
                if j == i {
                    continue;
                }
                let col = u.col(j);
                let proj = col.dot(&cand);
                cand = cand.sub(&col.scale(proj));
            }
            let n = cand.norm();
            if n > best_norm {
                best_norm = n;
                best = Some(cand);
            }
        }
        if let Some(cand) = best {
            if best_norm > 1e-8 {
                u.set_col(i, &cand.scale(C64::new(1.0 / best_norm, 0.0)));
            }
        }
    }
    Ok(ThinSvd { u, sigma, v })
}

#[derive(Clone, Debug)]
pub struct SvdExtremes {
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub v_min: CVector,
    pub u_min: CVector,
}

/// Largest/smallest singular values with the singular vector pair for σ_min.
/// Right vectors come from AᴴA, left vectors from AAᴴ, so u_min stays
/// meaningful even when σ_min is exactly zero.
pub fn svd_extremes(a: &CMatrix) -> Result<SvdExtremes, LinalgError> {
    assert!(a.is_square(), "svd_extremes expects a square matrix");
    let n = a.rows();
    let (_, vr) = hermitian_eigen(&a.adjoint().mul(a))?;
    let (_, vl) = hermitian_eigen(&a.mul(&a.adjoint()))?;
    let v_min = vr.col(0);
    let v_max = vr.col(n - 1);
    let u_min = vl.col(0);
    let sigma_min = a.mul_vec(&v_min).norm();
    let sigma_max = a.mul_vec(&v_max).norm();
    Ok(SvdExtremes { sigma_max, sigma_min, v_min, u_min })
}

/// (frobenius, spectral) norm pair. Spectral is the canonical norm for every
/// bound in this crate.
pub fn norms(a: &CMatrix) -> (f64, f64) {
    let frob = a.frobenius_norm();
    let spectral = if a.is_square() {
        svd_extremes(a).map(|s| s.sigma_max).unwrap_or(frob)
    } else {
        thin_svd(a).map(|s| s.sigma.first().copied().unwrap_or(0.0)).unwrap_or(frob)
    };
    (frob, spectral)
}

pub fn spectral_norm(a: &CMatrix) -> f64 {
    norms(a).1
}

// ── dense eigenvalues (Hessenberg + shifted QR) ──────────────────────────────

fn hessenberg(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k, rows k+1..n.
        let m = n - k - 1;
        let mut x: Vec<C64> = (0..m).map(|t| h[(k + 1 + t, k)]).collect();
        let xnorm = x.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        x[0] += phase * xnorm;
        let vnorm_sqr: f64 = x.iter().map(|e| e.norm_sqr()).sum();
        if vnorm_sqr == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sqr;
        // Left: rows k+1..n, all columns.
        for j in 0..n {
            let mut w = C64::new(0.0, 0.0);
            for t in 0..m {
                w += x[t].conj() * h[(k + 1 + t, j)];
            }
            w *= beta;
            for t in 0..m {
                let sub = w * x[t];
                h[(k + 1 + t, j)] -= sub;
            }
        }
        // Right: columns k+1..n, all rows.
        for i in 0..n {
            let mut w = C64::new(0.0, 0.0);
            for t in 0..m {
                w += h[(i, k + 1 + t)] * x[t];
            }
            w *= beta;
            for t in 0..m {
                let sub = w * x[t].conj();
                h[(i, k + 1 + t)] -= sub;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    h
}

fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - C64::new(4.0, 0.0) * det).sqrt();
    let q1 = tr + disc;
    let q2 = tr - disc;
    let q = if q1.norm() >= q2.norm() { q1 } else { q2 };
    if q.norm() == 0.0 {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    }
    let l1 = q * 0.5;
    (l1, det / l1)
}

struct Givens {
    c: f64,
    s: C64,
}

fn givens(a: C64, b: C64) -> (Givens, C64) {
    if b.norm() == 0.0 {
        return (Givens { c: 1.0, s: C64::new(0.0, 0.0) }, a);
    }
    if a.norm() == 0.0 {
        // rotate [0; b] to [|b|; 0]
        return (Givens { c: 0.0, s: b.conj() / b.norm() }, C64::new(b.norm(), 0.0));
    }
    let scale = a.norm() + b.norm();
    let norm = scale * ((a / scale).norm_sqr() + (b / scale).norm_sqr()).sqrt();
    let alpha = a / a.norm();
    let c = a.norm() / norm;
    let s = alpha * b.conj() / norm;
    (Givens { c, s }, alpha * norm)
}

/// Eigenvalues of a general complex matrix by Hessenberg reduction and
/// single-shift QR with deflation. Ordering is unspecified.
pub fn dense_eig(a: &CMatrix) -> Result<Vec<C64>, LinalgError> {
    assert!(a.is_square(), "dense_eig needs a square matrix");
    let n = a.rows();
    assert!(n <= DENSE_EIG_LIMIT, "dense_eig limited to {DENSE_EIG_LIMIT}");
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    if n == 2 {
        let (l1, l2) = eig2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
        return Ok(vec![l1, l2]);
    }
    let mut h = hessenberg(a);
    let mut eigs: Vec<C64> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let budget = 60 * n;
    let mut steps = 0usize;
    let mut stagnation = 0usize;
    let eps = f64::EPSILON;

    loop {
        // Zero negligible subdiagonals and find the active window [lo..=hi].
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let local = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let thresh = if local > 0.0 { eps * local } else { eps * h.max_abs() };
            if sub <= thresh {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            eigs.push(h[(hi, hi)]);
            if hi == 0 {
                break;
            }
            hi -= 1;
            stagnation = 0;
            continue;
        }
        if lo + 1 == hi {
            let (l1, l2) = eig2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs.push(l1);
            eigs.push(l2);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            stagnation = 0;
            continue;
        }

        if steps >= budget {
            return Err(LinalgError::ConvergenceFailure { what: "shifted QR iteration", budget });
        }
        steps += 1;
        stagnation += 1;

        let shift = if stagnation % 12 == 0 {
            // exceptional shift to break symmetry-induced stalls
            let kick = h[(hi, hi - 1)].norm() + h[(hi - 1, hi - 2)].norm();
            h[(hi, hi)] + C64::new(0.75 * kick, -0.4375 * kick)
        } else {
            let (l1, l2) = eig2(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
            // Wilkinson choice: eigenvalue of the trailing 2x2 nearest h[hi][hi]
            if (l1 - h[(hi, hi)]).norm() <= (l2 - h[(hi, hi)]).norm() {
                l1
            } else {
                l2
            }
        };

        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        let mut rotations: Vec<Givens> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (g, r) = givens(h[(k, k)], h[(k + 1, k)]);
            h[(k, k)] = r;
            h[(k + 1, k)] = C64::new(0.0, 0.0);
            for j in k + 1..n {
                let t1 = h[(k, j)];
                let t2 = h[(k + 1, j)];
                h[(k, j)] = g.c * t1 + g.s * t2;
                h[(k + 1, j)] = -g.s.conj() * t1 + g.c * t2;
            }
            rotations.push(g);
        }
        for (k, g) in (lo..hi).zip(rotations.iter()) {
            let top = (k + 1).min(hi);
            for i in 0..=top {
                let t1 = h[(i, k)];
                let t2 = h[(i, k + 1)];
                h[(i, k)] = g.c * t1 + g.s.conj() * t2;
                h[(i, k + 1)] = -g.s * t1 + g.c * t2;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }

    debug_assert_eq!(eigs.len(), n);
    Ok(eigs)
}

// ─────────────────────────────────────────────────────────────────────────────
