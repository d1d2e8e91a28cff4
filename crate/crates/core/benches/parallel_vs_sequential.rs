use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use horn_core::lr::tensor_decomposition;
use horn_core::sampler::{horn_histogram, HistBounds, SamplerConfig};
use horn_core::so_density::so3_density_grid;
use horn_core::{DynkinWeight, Execution, GroupClass, Spectrum};
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn histogram(c: &mut Criterion) {
    let a = Spectrum::new(vec![1.0, 0.0, -1.0], true).unwrap();
    let cfg = SamplerConfig::new(GroupClass::So, a.clone(), a, 1 << 16, 42).unwrap();
    let bounds = HistBounds {
        x_min: 0.0,
        x_max: 2.0,
        y_min: -1.0,
        y_max: 1.0,
    };
    let mut g = c.benchmark_group("horn_histogram_so3_65536");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| horn_histogram(black_box(&cfg), bounds, (100, 100), exec).unwrap())
        });
    }
    g.finish();
}

fn so3_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("so3_density_grid_32");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| so3_density_grid(black_box(32), exec))
        });
    }
    g.finish();
}

fn decomposition(c: &mut Criterion) {
    let l = DynkinWeight::new(vec![4, 3, 2]);
    let m = DynkinWeight::new(vec![2, 3, 4]);
    let mut g = c.benchmark_group("su4_decomposition");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| tensor_decomposition(black_box(&l), black_box(&m), exec))
        });
    }
    g.finish();
}

criterion_group!(benches, histogram, so3_grid, decomposition);
criterion_main!(benches);
