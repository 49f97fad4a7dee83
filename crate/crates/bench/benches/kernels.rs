use criterion::{criterion_group, criterion_main, Criterion};
use opspread_bench::fixture;
use opspread_core::{
    bi_lanczos, build_full, build_hamiltonian, build_string_basis, evolve_full, sample_couplings,
    BiLanczosOptions, DisorderSpec, Parity, TimeGrid,
};

fn string_basis(c: &mut Criterion) {
    let f = fixture(8, 0.0);
    c.bench_function("string_basis_odd_n8", |b| {
        b.iter(|| build_string_basis(&f.majoranas, Parity::Odd).unwrap())
    });
}

fn lindbladian(c: &mut Criterion) {
    let f = fixture(8, 0.0);
    let spec = DisorderSpec::new(8, 4, 1.0, 0, 1).unwrap();
    let h = build_hamiltonian(&sample_couplings(&spec, 0).unwrap(), &f.majoranas).unwrap();
    c.bench_function("build_full_n8", |b| {
        b.iter(|| build_full(&h, &f.majoranas, 0.05).unwrap())
    });
}

fn lanczos(c: &mut Criterion) {
    let mut group = c.benchmark_group("bi_lanczos_n8");
    group.sample_size(20);
    for mu in [0.0, 0.05] {
        let f = fixture(8, mu);
        group.bench_function(format!("mu{mu}"), |b| {
            b.iter(|| bi_lanczos(&f.lindbladian, &f.x0, &BiLanczosOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn evolution(c: &mut Criterion) {
    let f = fixture(8, 0.05);
    let grid = TimeGrid::linear(120.0, 241).unwrap();
    let mut group = c.benchmark_group("evolve_full_n8");
    group.sample_size(10);
    group.bench_function("241_points", |b| {
        b.iter(|| evolve_full(&f.lindbladian, &f.x0, &grid).unwrap())
    });
    group.finish();
}

criterion_group!(benches, string_basis, lindbladian, lanczos, evolution);
criterion_main!(benches);
