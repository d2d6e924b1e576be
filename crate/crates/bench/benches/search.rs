use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lingam_spp::measures::knn_mi;
use lingam_spp::{
    direct_lingam_order, enumerate_paths, shortest_path_order, MeasureConfig, PlrMatrix, PriorKnowledge,
};
use lingam_spp_bench::{fixture, skewed_column};

fn plr_matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("plr_matrix");
    for p in [4, 8] {
        let data = fixture(p, 1000, 1);
        group.bench_with_input(BenchmarkId::from_parameter(p), &data, |b, d| {
            b.iter(|| PlrMatrix::from_columns(black_box(d.columns())).unwrap())
        });
    }
    group.finish();
}

fn ordering(c: &mut Criterion) {
    let data = fixture(8, 1000, 2);
    let none = PriorKnowledge::none();
    let cfg = MeasureConfig::plr();
    let mut group = c.benchmark_group("ordering_p8");
    group.sample_size(10);
    group.bench_function("shortest_path", |b| b.iter(|| shortest_path_order(&data, &cfg, &none).unwrap()));
    group.bench_function("direct", |b| b.iter(|| direct_lingam_order(&data, &cfg, &none).unwrap()));
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let data = fixture(7, 1000, 3);
    let mut group = c.benchmark_group("enumerate_p7");
    group.sample_size(10);
    group.bench_function("plr", |b| b.iter(|| enumerate_paths(&data, &MeasureConfig::plr()).unwrap()));
    group.finish();
}

fn knn(c: &mut Criterion) {
    let x = skewed_column(1000, 4);
    let y = skewed_column(1000, 5);
    c.bench_function("knn_mi_n1000", |b| b.iter(|| knn_mi(&[black_box(&x)], black_box(&y), 32).unwrap()));
}

criterion_group!(benches, plr_matrix, ordering, enumeration, knn);
criterion_main!(benches);
