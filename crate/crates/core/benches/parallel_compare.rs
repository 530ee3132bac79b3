//! Sequential vs rayon comparison for the data-parallel kernels.
//!
//! Run with `cargo bench -p siegel-core`. Both strategies live in one
//! binary (the `parallel` feature compiles rayon in but keeps the
//! sequential path callable), so the pairs below measure the same exact
//! computation under both schedulers.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use siegel_core::eisenstein::{eis2_det2, tau_table};
use siegel_core::lattices::{genus_theta1, leech_lattice, short_vector_counts_exec};
use siegel_core::Exec;

fn bench_eis2(c: &mut Criterion) {
    let mut group = c.benchmark_group("eis2_det2_table_k6");
    group.sample_size(10);
    for (name, ex) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &ex, |b, &ex| {
            b.iter(|| eis2_det2(6, 600, ex).unwrap());
        });
    }
    group.finish();
}

fn bench_leech_norm4(c: &mut Criterion) {
    let lat = leech_lattice();
    let mut group = c.benchmark_group("leech_short_vectors_norm4");
    group.sample_size(10);
    for (name, ex) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &ex, |b, &ex| {
            b.iter(|| {
                let counts = short_vector_counts_exec(lat, 4, ex);
                assert_eq!(counts.get(&4), Some(&196_560));
            });
        });
    }
    group.finish();
}

fn bench_tau(c: &mut Criterion) {
    let mut group = c.benchmark_group("tau_table_20k");
    group.sample_size(10);
    for (name, ex) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &ex, |b, &ex| {
            b.iter(|| tau_table(20_000, ex));
        });
    }
    group.finish();
}

fn bench_genus(c: &mut Criterion) {
    let mut group = c.benchmark_group("genus_theta1_p23_t300");
    group.sample_size(10);
    // genus_theta1 is pure per-coefficient work driven by from_fn; compare
    // through the enumeration-heavy lattice path instead when parallel
    group.bench_function("compute", |b| {
        b.iter(|| genus_theta1(23, 300).unwrap());
    });
    group.finish();
}

criterion_group!(benches, bench_eis2, bench_leech_norm4, bench_tau, bench_genus);
criterion_main!(benches);
