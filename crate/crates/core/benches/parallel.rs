use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use kraus_landscape::feedback::{monte_carlo_average_with, random_process};
use kraus_landscape::landscape::{sweep_with, AscentConfig, Objective};
use kraus_landscape::random::random_density;
use kraus_landscape::{Execution, SeededRng};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let cfg = AscentConfig {
        max_iterations: 200,
        ..AscentConfig::default()
    };
    for n in [2, 3] {
        let obj = Objective::random(n, &mut SeededRng::new(n as u64, 0));
        let base = SeededRng::new(7, 0);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| sweep_with(&obj, 16, &cfg, 1e-4, &base, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    let mut rng = SeededRng::new(1, 0);
    let process = random_process(3, 4, 3, 2, 2, &mut rng);
    let rho0 = random_density(3, &mut rng);
    let base = SeededRng::new(2, 0);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| monte_carlo_average_with(&process, &rho0, 2000, &base, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_monte_carlo);
criterion_main!(benches);
