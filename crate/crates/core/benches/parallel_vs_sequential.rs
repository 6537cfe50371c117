use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use satquant::harness::{gen_data, gen_weights, run_sweep, Distribution, ExperimentConfig};
use satquant::pipeline::{quantize_layer_with, LayerOptions, Method};
use satquant::Execution;

fn layer(c: &mut Criterion) {
    let xt = gen_data(Distribution::Gaussian, 16, 1024, 1).unwrap();
    let w = gen_weights(1024, 32, 2);
    let mut group = c.benchmark_group("quantize_layer_16x1024x32");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let opts = LayerOptions { exec, seed: 0 };
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &opts, |b, opts| {
            b.iter(|| quantize_layer_with(&xt, &w, 4, Method::Accelerated, opts).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let base = ExperimentConfig::from_json(
        r#"{"kind":"neuron","m":8,"N0":256,"bits":[2,4],
            "methods":["baseline","accelerated"],"seeds":[0,1,2,3,4,5,6,7]}"#,
    )
    .unwrap();
    let mut group = c.benchmark_group("sweep_neuron_8x256");
    group.sample_size(10);
    for workers in [1, 4] {
        let cfg = ExperimentConfig {
            workers: Some(workers),
            ..base.clone()
        };
        group.bench_with_input(BenchmarkId::new("workers", workers), &cfg, |b, cfg| {
            b.iter(|| run_sweep(cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, layer, sweep);
criterion_main!(benches);
