//! Adaptive contour solver: resolvent-moment extraction inside a disk,
//! cluster-driven child contours, node escalation, and winding-guided
//! quadrant subdivision until the verified spectrum matches the
//! argument-principle count.

use crate::contour::{
    count_eigenvalues_inside, discretize, moments, CircularContour, MomentPair, QuadratureError,
};
use crate::linalg::{dense_eig, svd_extremes, thin_svd, CMatrix, CVector, C64};
use crate::operator::NepOperator;
use crate::refine::eigenvector_for;
use thiserror::Error;

/// Probe entries are seeded once so identical solves produce identical
/// reports.
const PROBE_SEED: u64 = 0x6e65_706b_6974;
const MAX_DEPTH: usize = 8;
/// Per-disk quadrature node cap for extraction escalation.
const NODE_CAP: usize = 4096;
/// Winding computation may escalate further; det evaluations are cheap.
const WINDING_NODE_CAP: usize = 8192;
/// Two candidates within this relative distance are the same eigenvalue.
const DEDUPE_REL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("contour rejected: {reason}")]
    InvalidContour { reason: String },
    #[error("contour passes through the spectrum; shift the center or radius")]
    ContourOnSpectrum,
    #[error("moment matrix has rank zero; no eigenvalues detected inside the contour")]
    RankZero,
    #[error("solver did not converge; partial report attached")]
    NotConverged { report: Box<SolveReport> },
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub n_initial: usize,
    pub tol: f64,
    pub max_outer: usize,
    pub rank_tol: f64,
    /// Clustering threshold as a fraction of the current contour radius.
    pub cluster_radius: f64,
    pub refine_margin: f64,
    /// Probe column override; None picks min(dim, winding + 2).
    pub probe_cols: Option<usize>,
    /// With adaptivity off the solver runs one extraction pass at
    /// n_initial and reports honestly, without clustering or recursion.
    pub adaptive: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n_initial: 32,
            tol: 1e-10,
            max_outer: 20,
            rank_tol: 1e-10,
            cluster_radius: 1e-2,
            refine_margin: 1.5,
            probe_cols: None,
            adaptive: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cluster {
    pub members: Vec<C64>,
    pub centroid: C64,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: Vec<CVector>,
    pub residuals: Vec<f64>,
    pub outer_iterations: usize,
    pub contour_history: Vec<CircularContour>,
    pub converged: bool,
    /// Argument-principle count on the initial contour; None when the
    /// phase could not be tracked even at the winding node cap.
    pub winding: Option<i64>,
}

/// Rank-truncated two-moment extraction: a0 = UΣVᴴ, keep σ > rank_tol·σ_max,
/// eigenvalues of Uₖᴴ·a1·Vₖ·Σₖ⁻¹ filtered to the source disk.
pub fn extract_eigenvalues(mp: &MomentPair, rank_tol: f64) -> Result<Vec<C64>, SolveError> {
    let svd = thin_svd(&mp.a0).map_err(|_| SolveError::RankZero)?;
    let sigma_max = svd.sigma.first().copied().unwrap_or(0.0);
    // a0 at roundoff level relative to the node resolvent magnitudes
    // means the region holds no resolvent poles.
    if sigma_max <= 1e-12 * mp.scale * mp.contour.radius {
        return Err(SolveError::RankZero);
    }
    let k = svd.sigma.iter().filter(|&&s| s > rank_tol * sigma_max).count();
    if k == 0 {
        return Err(SolveError::RankZero);
    }
    // B = Uₖᴴ a1 Vₖ Σₖ⁻¹, k×k.
    let rows = mp.a0.rows();
    let cols = mp.a0.cols();
    let mut uk = CMatrix::zeros(rows, k);
    let mut vk = CMatrix::zeros(cols, k);
    for j in 0..k {
        uk.set_col(j, &svd.u.col(j));
        vk.set_col(j, &svd.v.col(j));
    }
    let mut b = uk.adjoint().mul(&mp.a1).mul(&vk);
    for i in 0..k {
        for j in 0..k {
            b[(i, j)] /= C64::new(svd.sigma[j], 0.0);
        }
    }
    let eigs = dense_eig(&b).map_err(|_| SolveError::RankZero)?;
    Ok(eigs
        .into_iter()
        .filter(|&e| mp.contour.contains(e, 1e-8))
        .collect())
}

fn sort_points(points: &mut [C64]) {
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Single-linkage clustering: estimates chain into one cluster when
/// consecutive links are ≤ radius. Deterministic via (re, im) sort.
pub fn cluster(estimates: &[C64], radius: f64) -> Vec<Cluster> {
    assert!(radius > 0.0);
    let mut pts = estimates.to_vec();
    sort_points(&mut pts);
    let m = pts.len();
    let mut assigned = vec![false; m];
    let mut out = Vec::new();
    for start in 0..m {
        if assigned[start] {
            continue;
        }
        let mut members = vec![pts[start]];
        assigned[start] = true;
        let mut frontier = vec![start];
        while let Some(i) = frontier.pop() {
            for j in 0..m {
                if !assigned[j] && (pts[i] - pts[j]).norm() <= radius {
                    assigned[j] = true;
                    members.push(pts[j]);
                    frontier.push(j);
                }
            }
        }
        sort_points(&mut members);
        let mut centroid = C64::new(0.0, 0.0);
        for p in &members {
            centroid += *p;
        }
        centroid /= members.len() as f64;
        let rad = members
            .iter()
            .map(|p| (*p - centroid).norm())
            .fold(0.0_f64, f64::max);
        out.push(Cluster {
            members,
            centroid,
            radius: rad,
        });
    }
    out
}

/// Child contour around a cluster; the floor guards single-point
/// clusters.
pub fn refine_contour(c: &Cluster, margin: f64) -> CircularContour {
    assert!(!c.members.is_empty() && margin > 1.0);
    let radius = (margin * c.radius).max(1e-8 * (1.0 + c.centroid.norm()));
    CircularContour::new(c.centroid, radius)
}

/// Set agreement by greedy nearest matching after a (re, im) sort.
pub fn converged(prev: &[C64], next: &[C64], eps: f64) -> bool {
    if prev.len() != next.len() {
        return false;
    }
    let mut a = prev.to_vec();
    let mut b = next.to_vec();
    sort_points(&mut a);
    sort_points(&mut b);
    let mut used = vec![false; b.len()];
    for p in &a {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for (j, q) in b.iter().enumerate() {
            if !used[j] {
                let d = (*p - *q).norm();
                if d < best_d {
                    best_d = d;
                    best = Some(j);
                }
            }
        }
        match best {
            Some(j) if best_d <= eps => used[j] = true,
            _ => return false,
        }
    }
    true
}

fn validate_contour(op: &NepOperator, contour: &CircularContour) -> Result<(), SolveError> {
    for p in op.singular_points() {
        if contour.contains(p, 1e-9) {
            return Err(SolveError::InvalidContour {
                reason: format!("singular point {p} lies inside or on the contour"),
            });
        }
    }
    if op.has_log_term() {
        // Distance from the disk to the branch cut (−∞, 0].
        let c = contour.center;
        let dist = if c.re <= 0.0 { c.im.abs() } else { c.norm() };
        if dist <= contour.radius * (1.0 + 1e-9) {
            return Err(SolveError::InvalidContour {
                reason: "contour crosses the logarithm branch cut (-inf, 0]".into(),
            });
        }
    }
    Ok(())
}

enum Winding {
    Count(i64),
    OnSpectrum,
    Unavailable,
}

fn winding_of(op: &NepOperator, contour: CircularContour, n0: usize) -> Winding {
    let mut n = n0.max(64);
    loop {
        match count_eigenvalues_inside(op, &discretize(contour, n)) {
            Ok(w) => return Winding::Count(w),
            Err(QuadratureError::PhaseJumpTooLarge { .. }) => {
                if n >= WINDING_NODE_CAP {
                    return Winding::Unavailable;
                }
                n *= 2;
            }
            Err(_) => return Winding::OnSpectrum,
        }
    }
}

fn extract_with_retry(
    op: &NepOperator,
    contour: CircularContour,
    n: usize,
    probe: &CMatrix,
    rank_tol: f64,
) -> Result<Vec<C64>, ()> {
    let mut n_try = n;
    for _ in 0..3 {
        match moments(op, &discretize(contour, n_try), probe) {
            Ok(mp) => {
                return Ok(match extract_eigenvalues(&mp, rank_tol) {
                    Ok(v) => v,
                    Err(_) => Vec::new(),
                })
            }
            // Shifting n by one rotates every node phase.
            Err(QuadratureError::NodeSingular { .. }) | Err(QuadratureError::Domain { .. }) => {
                n_try += 1;
            }
            Err(_) => return Err(()),
        }
    }
    Err(())
}

fn is_verified(op: &NepOperator, lambda: C64, vtol: f64) -> bool {
    match op.evaluate(lambda) {
        Ok(t) => match svd_extremes(&t) {
            Ok(s) => s.sigma_min <= vtol * (1.0 + s.sigma_max),
            Err(_) => false,
        },
        Err(_) => false,
    }
}

/// First-order distance bound to the nearest eigenvalue,
/// σ_min(T)/σ_min(T′); used to size child disks around uncertain
/// estimates.
fn uncertainty_radius(op: &NepOperator, lambda: C64, fallback: f64) -> f64 {
    let bound = (|| {
        let t = svd_extremes(&op.evaluate(lambda).ok()?).ok()?;
        let tp = svd_extremes(&op.derivative(lambda).ok()?).ok()?;
        if tp.sigma_min <= 1e-14 * (1.0 + tp.sigma_max) {
            return None;
        }
        Some(t.sigma_min / tp.sigma_min)
    })();
    bound.unwrap_or(fallback).min(fallback)
}

fn dedupe(cands: Vec<(C64, bool)>) -> Vec<(C64, bool)> {
    let mut out: Vec<(C64, bool)> = Vec::new();
    for c in cands {
        match out
            .iter()
            .position(|o| (o.0 - c.0).norm() <= DEDUPE_REL * (1.0 + c.0.norm()))
        {
            Some(i) => {
                // Later verified entries come from finer contours.
                if c.1 {
                    out[i] = c;
                }
            }
            None => out.push(c),
        }
    }
    out
}

struct Ctx {
    history: Vec<CircularContour>,
    outer: usize,
    initial_winding: Option<Option<i64>>,
}

fn solve_disk(
    op: &NepOperator,
    contour: CircularContour,
    cfg: &SolverConfig,
    depth: usize,
    ctx: &mut Ctx,
) -> Result<Vec<(C64, bool)>, SolveError> {
    let mut contour = contour;
    if depth > 0 {
        let mut shrink = 0;
        while validate_contour(op, &contour).is_err() {
            contour = CircularContour::new(contour.center, contour.radius * 0.8);
            shrink += 1;
            if shrink > 3 {
                return Ok(Vec::new());
            }
        }
    }
    ctx.history.push(contour);

    let target = {
        let mut bump = 0;
        loop {
            match winding_of(op, contour, cfg.n_initial) {
                Winding::Count(w) => break Some(w),
                Winding::Unavailable => break None,
                Winding::OnSpectrum => {
                    if depth == 0 {
                        return Err(SolveError::ContourOnSpectrum);
                    }
                    bump += 1;
                    if bump > 3 {
                        return Ok(Vec::new());
                    }
                    contour =
                        CircularContour::new(contour.center, contour.radius * (1.0 + 1e-3));
                    *ctx.history.last_mut().unwrap() = contour;
                }
            }
        }
    };
    if depth == 0 {
        ctx.initial_winding = Some(target);
    }
    if target == Some(0) {
        return Ok(Vec::new());
    }
    if let Some(w) = target {
        if w < 0 {
            return Err(SolveError::InvalidContour {
                reason: format!("determinant has {} more poles than zeros inside", -w),
            });
        }
    }

    let probe_cols = cfg
        .probe_cols
        .unwrap_or_else(|| {
            let hint = target.map(|w| w as usize + 2).unwrap_or(4);
            hint.clamp(1, op.dim())
        })
        .clamp(1, op.dim());
    let mut rng = crate::random::seeded(PROBE_SEED);
    let probe = crate::random::gaussian_matrix(op.dim(), probe_cols, &mut rng);
    let vtol = cfg.tol.max(1e-12);

    let mut n = cfg.n_initial;
    let mut child_results: Vec<(C64, bool)> = Vec::new();
    let mut child_disks: Vec<CircularContour> = Vec::new();
    let mut attempted: Vec<CircularContour> = Vec::new();
    let mut refuted: Vec<C64> = Vec::new();
    let mut quadrants_done = false;
    let mut prev_set: Option<Vec<C64>> = None;
    let mut last_inside: Vec<(C64, bool)> = Vec::new();

    for _pass in 0..cfg.max_outer.max(1) {
        if depth == 0 {
            ctx.outer += 1;
        }
        let raw = match extract_with_retry(op, contour, n, &probe, cfg.rank_tol) {
            Ok(v) => v,
            Err(()) => {
                if depth == 0 {
                    return Err(SolveError::ContourOnSpectrum);
                }
                Vec::new()
            }
        };
        // Children replace the parent's estimates within their disks.
        let mut cands: Vec<(C64, bool)> = Vec::new();
        'raw: for e in raw {
            for cd in &child_disks {
                if cd.contains(e, 1e-6) {
                    continue 'raw;
                }
            }
            for r in &refuted {
                if (e - *r).norm() <= DEDUPE_REL * (1.0 + e.norm()) {
                    continue 'raw;
                }
            }
            cands.push((e, is_verified(op, e, vtol)));
        }
        cands.extend(child_results.iter().cloned());
        let cands = dedupe(cands);
        last_inside = cands
            .iter()
            .filter(|(e, _)| contour.contains(*e, 1e-8))
            .cloned()
            .collect();
        let all_verified = last_inside.iter().all(|c| c.1);
        let count = last_inside.len() as i64;

        let done = match target {
            Some(w) => all_verified && count == w,
            None => {
                let set: Vec<C64> = last_inside.iter().map(|c| c.0).collect();
                let scale = 1.0 + contour.center.norm() + contour.radius;
                let stable = prev_set
                    .as_ref()
                    .map(|p| converged(p, &set, vtol * scale))
                    .unwrap_or(false);
                prev_set = Some(set);
                all_verified && stable && !last_inside.is_empty()
            }
        };
        if done || !cfg.adaptive {
            return Ok(last_inside);
        }

        // Mechanism 1: child contours around clusters that are either
        // multi-member or unverified.
        let points: Vec<C64> = last_inside.iter().map(|c| c.0).collect();
        let mut spawned = false;
        if !points.is_empty() && depth < MAX_DEPTH {
            for cl in cluster(&points, cfg.cluster_radius * contour.radius) {
                let statuses: Vec<bool> = cl
                    .members
                    .iter()
                    .map(|m| {
                        last_inside
                            .iter()
                            .find(|(e, _)| (*e - *m).norm() == 0.0)
                            .map(|(_, v)| *v)
                            .unwrap_or(false)
                    })
                    .collect();
                if cl.members.len() == 1 && statuses[0] {
                    continue;
                }
                let base = refine_contour(&cl, cfg.refine_margin);
                if base.radius >= 0.9 * contour.radius {
                    continue;
                }
                // Grow the child to cover the first-order error bound of
                // its unverified members, staying strictly inside the
                // parent so the recursion shrinks.
                let unc = cl
                    .members
                    .iter()
                    .zip(&statuses)
                    .filter(|(_, v)| !**v)
                    .map(|(m, _)| uncertainty_radius(op, *m, contour.radius * 0.4))
                    .fold(0.0_f64, f64::max);
                let radius = base
                    .radius
                    .max((cfg.refine_margin * unc).min(0.6 * contour.radius));
                let child = CircularContour::new(base.center, radius);
                if attempted.iter().any(|a| {
                    (a.center - child.center).norm() <= 0.1 * a.radius.max(child.radius)
                        && (a.radius - child.radius).abs() <= 0.2 * a.radius
                }) {
                    continue;
                }
                attempted.push(child);
                spawned = true;
                let res = solve_disk(op, child, cfg, depth + 1, ctx)?;
                if res.is_empty() {
                    for (m, v) in cl.members.iter().zip(&statuses) {
                        if !v {
                            refuted.push(*m);
                        }
                    }
                } else {
                    child_results.extend(res);
                    child_disks.push(child);
                }
            }
        }
        if spawned {
            continue;
        }
        // Mechanism 2: denser quadrature on this contour.
        if n < NODE_CAP {
            n *= 2;
            continue;
        }
        // Mechanism 3: winding deficit means the moment rank cannot see
        // every enclosed eigenvalue; overlapping quadrant disks cover
        // the parent with smaller spectra per disk.
        if !quadrants_done && depth < MAX_DEPTH {
            quadrants_done = true;
            let r = contour.radius;
            let c = contour.center;
            for (dx, dy) in [(0.5, 0.5), (-0.5, 0.5), (0.5, -0.5), (-0.5, -0.5)] {
                let q = CircularContour::new(c + C64::new(dx * r, dy * r), 0.75 * r);
                let res = solve_disk(op, q, cfg, depth + 1, ctx)?;
                child_results.extend(res);
                child_disks.push(q);
            }
            continue;
        }
        break;
    }
    Ok(last_inside)
}

/// Full adaptive solve inside the contour. A non-converged run returns
/// NotConverged carrying the partial report.
pub fn solve(
    op: &NepOperator,
    contour: CircularContour,
    cfg: &SolverConfig,
) -> Result<SolveReport, SolveError> {
    assert!(cfg.n_initial >= 4, "n_initial must be at least 4");
    assert!(cfg.tol > 0.0 && cfg.rank_tol > 0.0 && cfg.cluster_radius > 0.0);
    assert!(cfg.refine_margin > 1.0, "refine_margin must exceed 1");
    validate_contour(op, &contour)?;
    let mut ctx = Ctx {
        history: Vec::new(),
        outer: 0,
        initial_winding: None,
    };
    let mut cands = solve_disk(op, contour, cfg, 0, &mut ctx)?;
    cands.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));

    let winding = ctx.initial_winding.flatten();
    let vtol = cfg.tol.max(1e-12);
    let mut eigenvalues = Vec::new();
    let mut eigenvectors = Vec::new();
    let mut residuals = Vec::new();
    let mut all_ok = true;
    for (lambda, flagged) in &cands {
        let x = eigenvector_for(op, *lambda);
        let res = op.residual(*lambda, &x).unwrap_or(f64::INFINITY);
        let scale = match op.evaluate(*lambda) {
            Ok(t) => crate::linalg::spectral_norm(&t),
            Err(_) => f64::INFINITY,
        };
        if !(res <= vtol * (1.0 + scale)) || !flagged {
            all_ok = false;
        }
        eigenvalues.push(*lambda);
        eigenvectors.push(x);
        residuals.push(res);
    }
    let count_ok = match winding {
        Some(w) => eigenvalues.len() as i64 == w,
        None => true,
    };
    let report = SolveReport {
        eigenvalues,
        eigenvectors,
        residuals,
        outer_iterations: ctx.outer,
        contour_history: ctx.history,
        converged: all_ok && count_ok,
        winding,
    };
    if report.converged {
        Ok(report)
    } else {
        Err(SolveError::NotConverged {
            report: Box::new(report),
        })
    }
}
