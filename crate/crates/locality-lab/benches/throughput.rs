//! Throughput of the two inner loops everything funnels through — Monte
//! Carlo simulation trials and permutation-family evaluation — comparing the
//! data-parallel path (`par::map_range` / `par::sum_range`, rayon under the
//! default `parallel` feature) against the always-available sequential twins
//! on the same workload closures.
//!
//! Run with `cargo bench`; rebuild with `--no-default-features` to measure
//! the fully sequential library build.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use locality_lab::algo::WalkMinTree;
use locality_lab::graph::{generate, GraphSpec};
use locality_lab::models::SeedBits;
use locality_lab::par;
use locality_lab::perm::{declared_seed_bits, ExplicitPerm, KwisePerm, PermHandle};
use locality_lab::seeding::{derive_seed, stream_rng};
use locality_lab::sim::{simulate_query, HSpec, QueryResult, VirtualWorld};

/// One failure-estimation trial: fresh relabelling of `[4096]`, one simulated
/// query per vertex of a 64-cycle. Returns the failure count so the result
/// is observed and nothing is optimized away.
fn simulation_trial_workload(c: &mut Criterion) {
    let g = generate(&GraphSpec::Cycle { n: 64 }).unwrap();
    let big_n = 4096u64;
    let alg = WalkMinTree { budget: 3 };
    let empty = SeedBits::empty();
    let trial = |i: usize| -> u64 {
        let seed = derive_seed(7, "bench-trial", i as u64);
        let pi = PermHandle::Explicit(ExplicitPerm::new(big_n, seed).unwrap());
        let world = VirtualWorld::new(&g, HSpec::Cycle, big_n, pi).unwrap();
        let mut failures = 0;
        for v in 0..g.n() as u64 {
            let outcome = simulate_query(&world, &alg, v, 3, &empty).unwrap();
            if !matches!(outcome.result, QueryResult::Success { .. }) {
                failures += 1;
            }
        }
        failures
    };

    let mut group = c.benchmark_group("simulation-trials");
    group.sample_size(20);
    for trials in [32usize, 128] {
        group.bench_with_input(BenchmarkId::new("parallel", trials), &trials, |b, &t| {
            b.iter(|| par::map_range(t, trial).into_iter().sum::<u64>())
        });
        group.bench_with_input(BenchmarkId::new("sequential", trials), &trials, |b, &t| {
            b.iter(|| par::map_range_seq(t, trial).into_iter().sum::<u64>())
        });
    }
    group.finish();
}

/// One quality-measurement slice: instantiate a bounded-independence member
/// over `[2^16]` and forward-evaluate a spread of 64 points.
fn family_evaluation_workload(c: &mut Criterion) {
    let n = 1u64 << 16;
    let (k, eps_log2) = (7usize, 24u32);
    let bits = declared_seed_bits(n, k, eps_log2);
    let eval = |i: usize| -> u64 {
        let member = SeedBits::random(&mut stream_rng(11, "bench-member", i as u64), bits);
        let pi = KwisePerm::new(n, k, eps_log2, member).unwrap();
        (0..64u64).map(|u| pi.forward(u * 1021 % n).unwrap()).sum()
    };

    let mut group = c.benchmark_group("kwise-evaluation");
    group.sample_size(20);
    for seeds in [64usize, 256] {
        group.bench_with_input(BenchmarkId::new("parallel", seeds), &seeds, |b, &s| {
            b.iter(|| par::sum_range(s, eval))
        });
        group.bench_with_input(BenchmarkId::new("sequential", seeds), &seeds, |b, &s| {
            b.iter(|| par::sum_range_seq(s, eval))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    simulation_trial_workload,
    family_evaluation_workload
);
criterion_main!(benches);
