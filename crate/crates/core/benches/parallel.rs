use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use thurston_willmore::experiments::{sweep, verify_minimality_with, SweepSpec, Thresholds};
use thurston_willmore::functional::residual_trace;
use thurston_willmore::{
    canonical_coefficients, generate_cmc_sphere, Execution, GeometryParams, PerturbationSpec,
};

fn modes() -> Vec<Execution> {
    let mut out = vec![Execution::Sequential];
    if cfg!(feature = "parallel") {
        out.push(Execution::Parallel);
    }
    out
}

fn bench_sweep(c: &mut Criterion) {
    let spec = SweepSpec {
        k_values: vec![-1.0, 0.0, 1.0],
        tau_values: vec![0.0, 0.5],
        h_values: vec![0.6, 1.0],
        perturbation_grid: vec![],
    };
    let mut group = c.benchmark_group("sweep_12_cases");
    group.sample_size(10);
    for exec in modes() {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| b.iter(|| sweep(&spec, exec)),
        );
    }
    group.finish();
}

fn bench_residual(c: &mut Criterion) {
    let g = GeometryParams::new(-1.0, -0.5).unwrap();
    let p = generate_cmc_sphere(&g, 0.8).unwrap();
    let coeffs = canonical_coefficients(&g);
    let mut group = c.benchmark_group("residual_trace_2047");
    for exec in modes() {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| b.iter(|| residual_trace(&p, coeffs, exec).unwrap()),
        );
    }
    group.finish();
}

fn bench_minimality(c: &mut Criterion) {
    let g = GeometryParams::nil();
    let grid: Vec<_> = [-0.2, -0.1, 0.1, 0.2]
        .into_iter()
        .flat_map(|e| [1, 2].map(|m| PerturbationSpec::new(e, m).unwrap()))
        .collect();
    let mut group = c.benchmark_group("minimality_8_perturbations");
    group.sample_size(10);
    for exec in modes() {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| {
                b.iter(|| {
                    verify_minimality_with(&g, 1.0, &grid, &Thresholds::default(), exec).unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_residual, bench_minimality);
criterion_main!(benches);
