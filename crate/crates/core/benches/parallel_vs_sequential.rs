//! Data-parallel loops against the same loops on one thread.
//!
//! With the `parallel` feature each workload runs twice: on the global rayon
//! pool and inside a one-thread pool, which is the sequential schedule.
//! Without the feature only the sequential build is measured; compare the
//! two `cargo bench` runs by their `exec::MODE` labels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use difflab_core::correlation::PairCountOracle;
use difflab_core::fourier::{
    parallelogram_check, periodogram, sup_norm_estimate, BinarySeq, DEFAULT_MAX_FFT,
};
use difflab_core::rudin::{derive_substitution, sequence_prefix};
use difflab_core::SignSequence;

type Workload = Box<dyn Fn() + Send + Sync>;

fn workloads() -> Vec<(&'static str, Workload)> {
    let signs: SignSequence = "+-".parse().unwrap();
    let rule = derive_substitution(&signs);
    let oracle = PairCountOracle::new(&rule, 1 << 18).unwrap();
    let seq = BinarySeq::new(sequence_prefix(&signs, 1 << 16)).unwrap();
    let seq2 = seq.clone();
    vec![
        (
            "pair_counts_4^9",
            Box::new(move || {
                for k in 0..=8 {
                    std::hint::black_box(oracle.counts(k));
                }
            }),
        ),
        (
            "periodogram_4^8",
            Box::new(move || {
                std::hint::black_box(periodogram(&seq, DEFAULT_MAX_FFT).unwrap());
            }),
        ),
        (
            "sup_scan_2^16_x8",
            Box::new(move || {
                std::hint::black_box(sup_norm_estimate(&seq2, 8, DEFAULT_MAX_FFT).unwrap());
            }),
        ),
        (
            "parallelogram_k14_256",
            Box::new(move || {
                std::hint::black_box(parallelogram_check(&signs, 14, 256).unwrap());
            }),
        ),
    ]
}

#[cfg(feature = "parallel")]
fn bench(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let threads = rayon::current_num_threads();
    let mut group = c.benchmark_group("parallel_vs_sequential");
    group.sample_size(10);
    for (name, f) in workloads() {
        group.bench_function(BenchmarkId::new(format!("rayon_{threads}"), name), |b| {
            b.iter(&f)
        });
        group.bench_function(BenchmarkId::new("one_thread", name), |b| {
            b.iter(|| single.install(&f))
        });
    }
    group.finish();
}

#[cfg(not(feature = "parallel"))]
fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("parallel_vs_sequential");
    group.sample_size(10);
    for (name, f) in workloads() {
        group.bench_function(BenchmarkId::new(difflab_core::exec::MODE, name), |b| {
            b.iter(&f)
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
