use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use wectkit::classify::{train_kernel_svm, train_svm, Gamma};
use wectkit::{
    compute_wect_along, wect_distance, Aggregation, CurveMetric, Extension, IntensityModel, ShapeKind, WectEngine,
};
use wectkit_bench::{study_complex, study_directions, study_vectors, study_wects};

fn transform(c: &mut Criterion) {
    let k = study_complex(ShapeKind::SwissCheese, IntensityModel::Uniform, Extension::Avg, 1);
    let dirs = study_directions();
    c.bench_function("wect/study image, 15 directions", |b| {
        b.iter(|| compute_wect_along(black_box(&k), &dirs).unwrap())
    });
    let engine = WectEngine::new(k.shared_complex().clone(), &dirs).unwrap();
    c.bench_function("wect/study image, 15 directions, reused plans", |b| {
        b.iter(|| engine.wect(black_box(&k)).unwrap())
    });
}

fn distance(c: &mut Criterion) {
    let wects = study_wects(ShapeKind::Annulus, IntensityModel::Uniform, 2);
    c.bench_function("distance/exact L2 integral, 15 directions", |b| {
        b.iter(|| {
            wect_distance(
                black_box(&wects[0]),
                &wects[1],
                CurveMetric::L2,
                Aggregation::Integral,
                -45.0,
                45.0,
            )
            .unwrap()
        })
    });
}

fn svm(c: &mut Criterion) {
    let mut wects = study_wects(ShapeKind::Disc, IntensityModel::Uniform, 100);
    wects.extend(study_wects(ShapeKind::Disc, IntensityModel::normal(0.17), 100));
    let features: Vec<Vec<f64>> = study_vectors(&wects).into_iter().map(|v| v.values).collect();
    let labels: Vec<usize> = (0..200).map(|i| i / 100).collect();
    let mut group = c.benchmark_group("svm");
    group.sample_size(10);
    group.bench_function("rbf, 200 x 1365", |b| {
        b.iter(|| train_kernel_svm(black_box(&features), &labels, 20.0, Gamma::Scale).unwrap())
    });
    group.bench_function("linear, 200 x 1365", |b| {
        b.iter(|| train_svm(black_box(&features), &labels, 20.0, 7).unwrap())
    });
    group.finish();
}

criterion_group!(benches, transform, distance, svm);
criterion_main!(benches);
