//! Benchmarks of the word-parallel pipelines.
//!
//! The same suite compiles against the rayon path (default features)
//! and the sequential fallback (`--no-default-features`); compare the
//! two criterion baselines:
//!
//! ```text
//! cargo bench -p billiards-core -- --save-baseline rayon
//! cargo bench -p billiards-core --no-default-features -- --save-baseline seq
//! ```

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use billiards_core::geometry::tri6;
use billiards_core::orbits::marked_length_spectrum;
use billiards_core::rigidity::{bowen_dimension, trace_cover};

fn bench_mls(c: &mut Criterion) {
    let table = tri6();
    let mut group = c.benchmark_group("mls");
    group.sample_size(20);
    group.bench_function("tri6_maxlen6", |b| {
        b.iter_batched(
            || &table,
            |t| marked_length_spectrum(t, 6),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn bench_trace_cover(c: &mut Criterion) {
    let table = tri6();
    let mut group = c.benchmark_group("trace_cover");
    group.sample_size(10);
    group.bench_function("tri6_depth3", |b| {
        b.iter_batched(|| &table, |t| trace_cover(t, 3).unwrap(), BatchSize::SmallInput)
    });
    group.finish();
}

fn bench_dimension(c: &mut Criterion) {
    let table = tri6();
    let mut group = c.benchmark_group("dimension");
    group.sample_size(10);
    group.bench_function("tri6_n8", |b| {
        b.iter_batched(|| &table, |t| bowen_dimension(t, 8).unwrap(), BatchSize::SmallInput)
    });
    group.finish();
}

criterion_group!(benches, bench_mls, bench_trace_cover, bench_dimension);
criterion_main!(benches);
