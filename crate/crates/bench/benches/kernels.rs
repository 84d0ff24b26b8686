use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use replicalc::mc::{self, SimConfig, SimMode};
use replicalc::normal::{standard_normal_cdf, standard_normal_quantile};
use replicalc::replication::{ReplicationQuery, SampleSize};
use replicalc::{convolve, discretize_gaussian, RangeSpec, StudyDesign};

fn normal_kernel(c: &mut Criterion) {
    let xs: Vec<f64> = (0..1024).map(|i| -8.0 + 16.0 * i as f64 / 1023.0).collect();
    let ps: Vec<f64> = (1..=1024).map(|i| i as f64 / 1025.0).collect();
    c.bench_function("cdf x1024", |b| {
        b.iter(|| xs.iter().map(|&x| standard_normal_cdf(black_box(x))).sum::<f64>())
    });
    c.bench_function("quantile x1024", |b| {
        b.iter(|| ps.iter().map(|&p| standard_normal_quantile(black_box(p))).sum::<f64>())
    });
}

fn convolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("convolve");
    for delta in [0.01, 0.005] {
        let truth = discretize_gaussian(1.96, 1.0, &RangeSpec::new(-4.0, 8.0, delta).unwrap()).unwrap();
        let noise = discretize_gaussian(0.0, 1.0, &RangeSpec::centered(6.0, delta).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(delta), &delta, |b, _| {
            b.iter(|| convolve(black_box(&truth), black_box(&noise)).unwrap())
        });
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let cfg = SimConfig {
        trials: 100_000,
        seed: 1,
        design: StudyDesign::crossover(1.96, 10.0, 100).unwrap(),
        query: ReplicationQuery::with_default_threshold(SampleSize::Finite(100)).unwrap(),
        mode: SimMode::PValueReplication,
    };
    let mut group = c.benchmark_group("simulate");
    group.sample_size(20);
    group.bench_function("replication 1e5 trials", |b| {
        b.iter(|| mc::simulate(black_box(&cfg)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, normal_kernel, convolution, simulation);
criterion_main!(benches);
