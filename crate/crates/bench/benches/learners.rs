use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use driftbench::learners::{
    FimtTree, ForestConfig, OnlineBaggingForest, Regressor, SlidingWindowKnn, Soknl, TreeConfig,
};
use driftbench_bench::linear_stream;

const N: usize = 2_000;
const D: usize = 8;

fn make(name: &str) -> Box<dyn Regressor> {
    let forest = ForestConfig {
        ensemble_size: 10,
        ..ForestConfig::default()
    };
    match name {
        "knn" => Box::new(SlidingWindowKnn::numeric(10, 1000, D)),
        "fimt" => Box::new(FimtTree::numeric(TreeConfig::default(), D)),
        "arf" => Box::new(OnlineBaggingForest::numeric(forest, D)),
        "soknl" => Box::new(Soknl::numeric(forest, D)),
        _ => unreachable!(),
    }
}

/// One predict-then-learn pass over `N` instances from a fresh learner.
fn test_then_train(c: &mut Criterion) {
    let data = linear_stream(1, N, D);
    let mut group = c.benchmark_group("test_then_train");
    group.throughput(Throughput::Elements(N as u64));
    group.sample_size(10);
    for name in ["knn", "fimt", "arf", "soknl"] {
        group.bench_function(name, |b| {
            b.iter_batched(
                || make(name),
                |mut l| {
                    let mut acc = 0.0;
                    for inst in &data {
                        acc += l.predict(&inst.features);
                        l.learn(&inst.features, inst.target);
                    }
                    acc
                },
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

/// Prediction cost of a learner warmed on `N` instances.
fn predict_warm(c: &mut Criterion) {
    let data = linear_stream(2, N, D);
    let probe = linear_stream(3, 1, D).remove(0);
    let mut group = c.benchmark_group("predict_warm");
    for name in ["knn", "fimt", "arf", "soknl"] {
        let mut l = make(name);
        data.iter().for_each(|i| l.learn(&i.features, i.target));
        group.bench_function(name, |b| {
            b.iter(|| l.predict(std::hint::black_box(&probe.features)))
        });
    }
    group.finish();
}

criterion_group!(benches, test_then_train, predict_warm);
criterion_main!(benches);
