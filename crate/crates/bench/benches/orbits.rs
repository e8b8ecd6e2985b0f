use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ricker_bench::{even_cycle, multistable_cycle};
use ricker_core::{
    basin_scan, detect_cycle, iterate_direct, iterate_factored, AxisRange, DetectParams,
    InitialData, ScanGrid,
};

fn iteration(c: &mut Criterion) {
    let cycle = multistable_cycle();
    let init = InitialData::new(1.0, 0.8).unwrap();
    c.bench_function("iterate_direct 1e4", |b| {
        b.iter(|| iterate_direct(black_box(&cycle), init, 10_000).unwrap())
    });
    c.bench_function("iterate_factored 1e4", |b| {
        b.iter(|| iterate_factored(black_box(&cycle), init, 10_000).unwrap())
    });
    let even = even_cycle();
    c.bench_function("iterate_factored even 1e4", |b| {
        b.iter(|| iterate_factored(black_box(&even), init, 10_000).unwrap())
    });
}

fn detection(c: &mut Criterion) {
    let params = DetectParams::default();
    let trace = iterate_direct(
        &multistable_cycle(),
        InitialData::new(1.0, 0.8).unwrap(),
        params.steps(),
    )
    .unwrap();
    c.bench_function("detect_cycle default window", |b| {
        b.iter(|| detect_cycle(black_box(&trace), &params).unwrap())
    });
    let grid = ScanGrid {
        x_prev_range: AxisRange::new(0.2, 2.5, 4),
        x_curr_range: AxisRange::new(0.2, 2.5, 4),
        cycle: multistable_cycle(),
        params: DetectParams {
            burn_in: 10_000,
            ..params
        },
    };
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    group.bench_function("basin_scan 4x4", |b| {
        b.iter(|| basin_scan(black_box(&grid)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, iteration, detection);
criterion_main!(benches);
