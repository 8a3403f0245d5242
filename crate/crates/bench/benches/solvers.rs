use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use slabmom_core::entropy::{ansatz_moments, solve};
use slabmom_core::problems;
use slabmom_core::{Model, ModelKind, NewtonConfig, OrdinateSet, Scheme};

fn newton(c: &mut Criterion) {
    let cfg = NewtonConfig::default();
    let mut group = c.benchmark_group("newton_solve");
    for (kind, q) in [(ModelKind::Mn, 54), (ModelKind::Hfmn, 15), (ModelKind::Pmmn, 15)] {
        let model = Model::new(kind, 8, q).unwrap();
        // A forward-peaked state: exponential in mu.
        let psi_moments = model.spec.project(|mu| (3.0 * mu).exp());
        let warm = solve(&model.spec, &psi_moments, &cfg, None).unwrap().alpha;
        let perturbed: Vec<f64> = psi_moments.iter().map(|v| v * 1.01).collect();
        group.bench_function(BenchmarkId::new("cold", kind), |b| {
            b.iter(|| solve(&model.spec, black_box(&psi_moments), &cfg, None).unwrap())
        });
        group.bench_function(BenchmarkId::new("warm", kind), |b| {
            b.iter(|| solve(&model.spec, black_box(&perturbed), &cfg, Some(&warm)).unwrap())
        });
        group.bench_function(BenchmarkId::new("ansatz_moments", kind), |b| {
            b.iter(|| ansatz_moments(&model.spec, black_box(&warm)).unwrap())
        });
    }
    group.finish();
}

fn flux_stage(c: &mut Criterion) {
    let problem = problems::plane_source();
    let mut group = c.benchmark_group("flux_stage");
    group.sample_size(10);
    for kind in [ModelKind::Hfpn, ModelKind::Hfmn, ModelKind::Pmmn] {
        let model = Model::new(kind, 8, 15).unwrap();
        let grid = problem.grid(300).unwrap();
        let means = problem.initial_moments(&model.spec, &grid).unwrap();
        let scheme = Scheme::new(model, &problem, grid, Default::default()).unwrap();
        let mut field = scheme.field_from_means(means).unwrap();
        let mut diag = scheme.new_diagnostics();
        // Advance a little so that the profile is no longer a Dirac.
        scheme.run(&mut field, 0.1, &mut diag).unwrap();
        group.bench_function(BenchmarkId::from_parameter(kind), |b| {
            b.iter(|| scheme.flux_rhs(&mut field, 0.1, &mut diag).unwrap())
        });
    }
    group.finish();
}

fn sn_reference(c: &mut Criterion) {
    let problem = problems::plane_source();
    let grid = problem.grid(240).unwrap();
    let ords = OrdinateSet::gauss_legendre(32).unwrap();
    let mut group = c.benchmark_group("sn_reference");
    group.sample_size(10);
    group.bench_function("plane_source_M32_J240_t0.2", |b| {
        b.iter(|| slabmom_core::solve_sn(&problem, &grid, &ords, 0.2, true).unwrap())
    });
    group.finish();
}

criterion_group!(benches, newton, flux_stage, sn_reference);
criterion_main!(benches);
