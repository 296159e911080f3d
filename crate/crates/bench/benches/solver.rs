use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nepkit_core::contour::{discretize, moments, CircularContour};
use nepkit_core::gallery;
use nepkit_core::linalg::CMatrix;
use nepkit_core::solver::{extract_eigenvalues, solve, SolverConfig};
use nepkit_core::C64;

fn bench_solver(c: &mut Criterion) {
    let op = gallery::example_quadratic();
    let disk = CircularContour::new(C64::new(0.0, 0.0), 2.0);

    c.bench_function("evaluate_quadratic", |b| {
        b.iter(|| op.evaluate(C64::new(0.3, 0.7)).unwrap())
    });

    for n in [32usize, 128] {
        let grid = discretize(disk, n);
        let probe = CMatrix::identity(op.dim());
        c.bench_function(&format!("moments_n{n}"), |b| {
            b.iter(|| moments(&op, &grid, &probe).unwrap())
        });
    }

    // Extraction on a sub-spectrum disk; the full-spectrum disk has a
    // vanishing zeroth moment and is handled by subdivision inside solve.
    let half = CircularContour::new(C64::new(0.0, 1.4), 0.6);
    let mp = moments(&op, &discretize(half, 64), &CMatrix::identity(op.dim())).unwrap();
    c.bench_function("extract_from_moments", |b| {
        b.iter_batched(
            || mp.clone(),
            |mp| extract_eigenvalues(&mp, 1e-10).unwrap(),
            BatchSize::SmallInput,
        )
    });

    c.bench_function("adaptive_solve_quadratic", |b| {
        b.iter(|| solve(&op, disk, &SolverConfig::default()).unwrap())
    });

    let pair = gallery::close_pair(1e-4);
    let pair_disk = CircularContour::new(C64::new(0.5, 0.0), 1.0);
    let cfg = SolverConfig {
        n_initial: 16,
        ..SolverConfig::default()
    };
    c.bench_function("adaptive_solve_close_pair", |b| {
        b.iter(|| solve(&pair, pair_disk, &cfg).unwrap())
    });
}

criterion_group!(solver, bench_solver);
criterion_main!(solver);
