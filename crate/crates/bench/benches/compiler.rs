use criterion::{black_box, criterion_group, criterion_main, Criterion};
use qmarkov_bench::{sample_gks, sample_hamiltonian};
use qmarkov_core::circuit::RunMode;
use qmarkov_core::generator::GeneratorSpec;
use qmarkov_core::pipeline::{compile, validate, JobSpec};

fn job(t: f64, eps: f64) -> JobSpec {
    JobSpec {
        generator: GeneratorSpec::new(sample_gks(), sample_hamiltonian()).unwrap(),
        t,
        eps,
        mode: RunMode::Deterministic,
        trajectories: 0,
        seed: 0,
        k_override: Some(1),
    }
}

fn bench_compile(c: &mut Criterion) {
    let j = job(0.5, 1e-2);
    c.bench_function("compile_t0.5_eps1e-2", |b| {
        b.iter(|| compile(black_box(&j)).unwrap())
    });
}

fn bench_validate(c: &mut Criterion) {
    let j = job(0.5, 1e-2);
    c.bench_function("validate_t0.5_eps1e-2", |b| {
        b.iter(|| validate(black_box(&j)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_compile, bench_validate
}
criterion_main!(benches);
