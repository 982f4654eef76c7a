use criterion::{black_box, criterion_group, criterion_main, Criterion};
use twopath::oracle::{gaussian_packet, propagate, Grid};

fn propagation(c: &mut Criterion) {
    let mut group = c.benchmark_group("split_step");
    group.sample_size(20);
    for log_n in [10u32, 12] {
        let n = 1usize << log_n;
        let grid = Grid::new(0.0, 0.3, n).unwrap();
        let mut state = gaussian_packet(&grid, 0.5 * grid.extent(), 20.0, 2.0)
            .unwrap()
            .with_decay_rate(0.05)
            .unwrap();
        state.add_region(0.4 * grid.extent(), 0.6 * grid.extent(), 2.0);
        let dt = 1e-3;
        group.bench_function(format!("100_steps_n{n}"), |b| {
            b.iter(|| propagate(black_box(&state), 100.0 * dt, dt).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, propagation);
criterion_main!(benches);
