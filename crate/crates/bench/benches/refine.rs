use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hermite_bench::{helix, spiral};
use hermite_core::{refine_only, RefineConfig, Scheme};

fn schemes(c: &mut Criterion) {
    let data = spiral(0.5);
    let mut group = c.benchmark_group("refine_spiral_6_levels");
    for (name, scheme) in [
        ("ihb", Scheme::Ihb),
        ("hb_lr3", Scheme::HbLr(3)),
        ("linear_lr3", Scheme::LinearLr(3)),
    ] {
        let cfg = RefineConfig::new(scheme, 6);
        group.bench_function(name, |b| b.iter(|| refine_only(&data, &cfg).unwrap()));
    }
    group.finish();
}

fn depth(c: &mut Criterion) {
    let data = helix(1.0);
    let mut group = c.benchmark_group("ihb_helix_depth");
    for levels in [4, 6, 8] {
        let cfg = RefineConfig::new(Scheme::Ihb, levels);
        group.bench_with_input(BenchmarkId::from_parameter(levels), &cfg, |b, cfg| {
            b.iter(|| refine_only(&data, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, schemes, depth);
criterion_main!(benches);
