use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nonharmonic::random::random_spectral_field;
use nonharmonic::{analyze, partial_analyze, synthesize, Axis, Basis, BoundaryParams, GridSpec};

fn transforms(c: &mut Criterion) {
    let h = BoundaryParams::new(2.0, 3.0).unwrap();
    let mut group = c.benchmark_group("transforms");
    for n in [64usize, 256, 512] {
        let k = n / 4 - 1;
        let spec = GridSpec::square(n).unwrap();
        let f = synthesize(&random_spectral_field(k, Basis::L, 1), &h, spec);
        group.bench_with_input(BenchmarkId::new("analyze", n), &f, |b, f| b.iter(|| analyze(f, &h, k).unwrap()));
        let coeffs = analyze(&f, &h, k).unwrap();
        group.bench_with_input(BenchmarkId::new("synthesize", n), &coeffs, |b, c| {
            b.iter(|| synthesize(c, &h, spec))
        });
        group.bench_with_input(BenchmarkId::new("partial_analyze_x2", n), &f, |b, f| {
            b.iter(|| partial_analyze(f, &h, Axis::X2, k, Basis::L).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, transforms);
criterion_main!(benches);
