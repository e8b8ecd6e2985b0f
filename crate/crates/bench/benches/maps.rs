use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ricker_bench::figure_map;
use ricker_core::{find_periodic_points, map_derivative_log, SearchGrid};

fn return_map(c: &mut Criterion) {
    let cm = figure_map(6.0);
    c.bench_function("apply f", |b| b.iter(|| cm.apply(black_box(0.3))));
    c.bench_function("derivative f^50", |b| {
        b.iter(|| map_derivative_log(&cm, black_box(0.3), 50))
    });
    let grid = SearchGrid::for_map(&cm);
    let mut group = c.benchmark_group("periodic points");
    group.sample_size(10);
    for omega in [1, 3, 5] {
        group.bench_function(format!("omega {omega}"), |b| {
            b.iter(|| find_periodic_points(&cm, omega, &grid))
        });
    }
    group.finish();
}

criterion_group!(benches, return_map);
criterion_main!(benches);
