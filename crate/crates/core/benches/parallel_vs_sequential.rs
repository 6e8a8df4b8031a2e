use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zonobal::decompose::partition_once_exact_with;
use zonobal::measure::estimate_section_measure_with;
use zonobal::numerics::{orthonormalize, Matrix, Rng};
use zonobal::zonotope::random_normalized_zonotope;
use zonobal::{Exec, Tolerances};

fn section_measure(c: &mut Criterion) {
    let mut rng = Rng::new(1);
    let k = random_normalized_zonotope(8, 64, &mut rng).unwrap();
    let h = orthonormalize(
        &Matrix::from_vec(8, 4, rng.gaussian_vector(32)).unwrap(),
        &Tolerances::default(),
    )
    .unwrap();
    let mut group = c.benchmark_group("section_measure_20k");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| {
                b.iter(|| {
                    estimate_section_measure_with(exec, &k, &h, 1.0, 1.0, 20_000, &Rng::new(2))
                        .unwrap()
                })
            },
        );
    }
    group.finish();
}

fn exhaustive_split(c: &mut Criterion) {
    let mut rng = Rng::new(3);
    let v: Vec<Vec<f64>> = (0..14).map(|_| rng.gaussian_vector(4)).collect();
    let mut group = c.benchmark_group("exhaustive_split_m14");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| b.iter(|| partition_once_exact_with(exec, black_box(&v)).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, section_measure, exhaustive_split);
criterion_main!(benches);
