//! Batch-path benchmarks: the DFT transform against its naive reference,
//! and the Hurwitz sweep under different pool sizes (with the `parallel`
//! feature) or plain sequential (without).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use resonator_core::characters::CharacterGroup;
use resonator_core::lfun::{l_values_all, EvalParams};
use resonator_core::C64;

fn bench_transform(c: &mut Criterion) {
    let mut grp = c.benchmark_group("transform_all");
    for q in [1009u64, 10_007] {
        let g = CharacterGroup::new(q).unwrap();
        let f: Vec<C64> = (0..g.m())
            .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        grp.bench_with_input(BenchmarkId::new("fft", q), &q, |b, _| {
            b.iter(|| g.transform_all(&f).unwrap())
        });
        if q <= 1009 {
            grp.bench_with_input(BenchmarkId::new("naive", q), &q, |b, _| {
                b.iter(|| g.transform_all_naive(&f).unwrap())
            });
        }
    }
    grp.finish();
}

#[cfg(feature = "parallel")]
fn bench_hurwitz_sweep(c: &mut Criterion) {
    let mut grp = c.benchmark_group("l_values_all");
    grp.sample_size(20);
    let q = 10_007u64;
    let g = CharacterGroup::new(q).unwrap();
    let p = EvalParams::default();
    let cores = std::thread::available_parallelism().map_or(4, |n| n.get());
    for workers in [1usize, cores] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap();
        grp.bench_with_input(
            BenchmarkId::new(format!("threads_{workers}"), q),
            &q,
            |b, _| b.iter(|| pool.install(|| l_values_all(&g, 0.75, &p).unwrap())),
        );
    }
    grp.finish();
}

#[cfg(not(feature = "parallel"))]
fn bench_hurwitz_sweep(c: &mut Criterion) {
    let mut grp = c.benchmark_group("l_values_all");
    grp.sample_size(20);
    let q = 10_007u64;
    let g = CharacterGroup::new(q).unwrap();
    let p = EvalParams::default();
    grp.bench_with_input(BenchmarkId::new("sequential", q), &q, |b, _| {
        b.iter(|| l_values_all(&g, 0.75, &p).unwrap())
    });
    grp.finish();
}

criterion_group!(benches, bench_transform, bench_hurwitz_sweep);
criterion_main!(benches);
