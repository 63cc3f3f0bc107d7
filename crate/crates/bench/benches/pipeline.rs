use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use driftbench::drift::{
    compose_gradual, compose_incremental, BootstrapSampler, ConceptOrder, DriftKind, DriftSpec,
};
use driftbench::eval::{run_experiment, ExperimentConfig, MetricState};
use driftbench::interval::{AdaPiConfig, AdaPiModel, Interval};
use driftbench::learners::SlidingWindowKnn;
use driftbench::{Schema, SeededRng};
use driftbench_bench::linear_stream;

fn evaluation(c: &mut Criterion) {
    let data = linear_stream(4, 10_000, 10);
    let mut group = c.benchmark_group("evaluation");
    group.throughput(Throughput::Elements(data.len() as u64));
    group.sample_size(10);
    group.bench_function("knn_adapi_10k", |b| {
        b.iter(|| {
            let mut knn = SlidingWindowKnn::numeric(10, 1000, 10);
            let mut pi = AdaPiModel::new(AdaPiConfig::default()).unwrap();
            run_experiment(
                &data,
                &mut knn,
                Some(&mut pi),
                &ExperimentConfig::new(10),
                |_| {},
            )
            .unwrap()
        })
    });
    group.finish();
}

fn metrics(c: &mut Criterion) {
    let data = linear_stream(5, 10_000, 1);
    let mut group = c.benchmark_group("metric_state");
    group.throughput(Throughput::Elements(data.len() as u64));
    for (name, window) in [("cumulative", None), ("prequential_1000", Some(1000))] {
        group.bench_function(name, |b| {
            b.iter(|| {
                let mut s = match window {
                    Some(w) => MetricState::prequential(w, 1),
                    None => MetricState::cumulative(1),
                };
                for inst in &data {
                    let p = inst.features[0];
                    s.record(inst.target, p, Some(Interval::centered(p, 0.5)));
                }
                s.snapshot()
            })
        });
    }
    group.finish();
}

fn composers(c: &mut Criterion) {
    let schema = Schema::numeric(6);
    let samplers: Vec<BootstrapSampler> = (0..4)
        .map(|i| BootstrapSampler::new(schema.clone(), linear_stream(10 + i, 5_000, 6)).unwrap())
        .collect();
    let spec = |kind| DriftSpec {
        kind,
        num_concepts: 4,
        concept_length: 50_000,
        drift_length: 10_000,
        seed: 1,
        order: ConceptOrder::Random,
    };
    let rng = SeededRng::new(1);
    let mut group = c.benchmark_group("compose_200k");
    group.throughput(Throughput::Elements(200_000));
    group.sample_size(10);
    group.bench_function("gradual", |b| {
        b.iter(|| compose_gradual(&samplers, &spec(DriftKind::Gradual), &rng).unwrap())
    });
    group.bench_function("incremental", |b| {
        b.iter(|| {
            compose_incremental(&samplers, &spec(DriftKind::Incremental), &rng, "x0").unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, evaluation, metrics, composers);
criterion_main!(benches);
