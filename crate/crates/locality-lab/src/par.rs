//! Index-parallel execution helpers.
//!
//! Every data-parallel loop in the crate (per-vertex model runs, Monte Carlo
//! trials, exhaustive seed/permutation enumerations) funnels through
//! [`map_range`] / [`try_map_range`] / [`sum_range`]. With the default
//! `parallel` feature these run on rayon; without it they degrade to plain
//! sequential loops with identical results. Outputs are always collected in
//! index order, so the feature flag never changes observable behaviour.
//!
//! The `*_seq` variants are available unconditionally; benches use them as the
//! sequential baseline when comparing against the parallel path.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, collecting results in index order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential twin of [`map_range`], available under every feature set.
pub fn map_range_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Maps a fallible `f` over `0..n`; the first error (lowest index under the
/// sequential build, any one under rayon) aborts the loop.
pub fn try_map_range<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sums `f(i)` over `0..n`.
pub fn sum_range<F>(n: usize, f: F) -> u64
where
    F: Fn(usize) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).sum()
    }
}

/// Sequential twin of [`sum_range`].
pub fn sum_range_seq<F>(n: usize, f: F) -> u64
where
    F: Fn(usize) -> u64,
{
    (0..n).map(f).sum()
}

/// Caps the global worker pool from the `LOCALITY_LAB_THREADS` environment
/// variable. Call once at process start; later calls are no-ops. Without the
/// `parallel` feature this does nothing.
pub fn init_thread_cap_from_env() {
    #[cfg(feature = "parallel")]
    {
        if let Ok(raw) = std::env::var("LOCALITY_LAB_THREADS") {
            if let Ok(threads) = raw.trim().parse::<usize>() {
                if threads >= 1 {
                    // Ignore the error: the pool may already be built, which
                    // is fine for a best-effort cap.
                    let _ = rayon::ThreadPoolBuilder::new()
                        .num_threads(threads)
                        .build_global();
                }
            }
        }
    }
}
