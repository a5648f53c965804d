//! Empirical uniformity measurement for permutation families.
//!
//! A family is `(ε, k)`-good if, for every ordered tuple of `k` distinct
//! points, the image tuple under a random member is within total-variation
//! distance `ε` of uniform over distinct tuples. At small `n` we can measure
//! this exactly from a seed ensemble: count every domain-tuple → image-tuple
//! event, then take the worst TV distance over domain tuples. For families
//! with a short declared seed length the ensemble is *all* seeds, turning the
//! measurement into an exhaustive check of the declared guarantee.

use super::{declared_seed_bits, ExplicitPerm, KwisePerm, LazyPerm, PermError, PermHandle};
use crate::models::SeedBits;
use crate::par;
use crate::seeding::derive_seed;

/// Largest `n` for which tuple counting is attempted.
const TUPLE_N_LIMIT: u64 = 12;
/// Largest number of ordered distinct tuples (rows/columns of the count
/// matrix) we are willing to materialise.
const TUPLE_COUNT_LIMIT: u64 = 2048;
/// Largest declared seed length for which exhaustive enumeration runs.
const EXHAUSTIVE_BITS_LIMIT: usize = 20;

/// Outcome of a uniformity measurement over a seed ensemble.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FamilyQuality {
    pub family: String,
    pub n: u64,
    pub k: usize,
    /// Declared distance bound as `ε = 2^-epsilon_log2`, when the family
    /// makes one.
    pub declared_epsilon_log2: Option<u32>,
    /// Worst-case total-variation distance to uniform over domain tuples.
    pub measured_tv: f64,
    /// Ensemble size the measurement was taken over.
    pub seeds: u64,
    /// Whether the ensemble was the family's entire seed space.
    pub exhaustive: bool,
}

impl FamilyQuality {
    /// Whether the measurement honours the declared bound. Only meaningful
    /// for exhaustive ensembles; sampled ones carry estimation error.
    pub fn within_declared(&self) -> bool {
        match self.declared_epsilon_log2 {
            Some(e) => self.measured_tv <= 0.5f64.powi(e as i32),
            None => true,
        }
    }
}

/// Number of ordered tuples of `k` distinct points from `[n]`: the falling
/// factorial `n · (n-1) ⋯ (n-k+1)`.
fn falling_factorial(n: u64, k: usize) -> u64 {
    (0..k as u64).map(|i| n - i).product()
}

/// Ranks an ordered distinct tuple into `0..falling_factorial(n, k)` by
/// mapping each entry to its position among the points not yet used.
fn rank_tuple(n: u64, tuple: &[u64], used: &mut u64) -> u64 {
    *used = 0;
    let mut rank = 0u64;
    for (i, &x) in tuple.iter().enumerate() {
        let pos = x - (*used & ((1u64 << x) - 1)).count_ones() as u64;
        rank = rank * (n - i as u64) + pos;
        *used |= 1 << x;
    }
    rank
}

/// Enumerates all ordered distinct `k`-tuples over `[n]` in rank order.
fn all_tuples(n: u64, k: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(falling_factorial(n, k) as usize);
    let mut current = Vec::with_capacity(k);
    fn extend(n: u64, k: usize, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for x in 0..n {
            if !current.contains(&x) {
                current.push(x);
                extend(n, k, current, out);
                current.pop();
            }
        }
    }
    extend(n, k, &mut current, &mut out);
    out
}

/// Measures the worst-case tuple-wise TV distance to uniform for the family
/// given by `build`, over the seed ensemble `0..seed_count`.
///
/// For every seed the full count matrix (domain tuple × image tuple) is
/// accumulated; the distance for a domain tuple `t` is
/// `½ Σ_s |count(t → s)/S − 1/T|` with `S` seeds and `T` tuples, and the
/// reported figure is the maximum over `t`.
pub fn tuple_uniformity_test(
    n: u64,
    k: usize,
    seed_count: u64,
    build: impl Fn(u64) -> Result<PermHandle, PermError> + Sync,
) -> Result<f64, PermError> {
    if n > TUPLE_N_LIMIT || k == 0 || k as u64 > n {
        return Err(PermError::InvalidParameter(format!(
            "tuple counting supports 1 <= k <= n <= {TUPLE_N_LIMIT}, got n={n} k={k}"
        )));
    }
    let tuples = falling_factorial(n, k);
    if tuples > TUPLE_COUNT_LIMIT {
        return Err(PermError::InvalidParameter(format!(
            "{tuples} ordered tuples exceed the counting limit {TUPLE_COUNT_LIMIT}"
        )));
    }
    if seed_count == 0 {
        return Err(PermError::InvalidParameter("empty seed ensemble".into()));
    }

    let domain_tuples = all_tuples(n, k);
    let t = tuples as usize;

    // One count matrix per block of seeds, merged afterwards; block results
    // are index-ordered, so the merge is deterministic.
    let blocks = 16u64.min(seed_count);
    let block_counts: Vec<Result<Vec<u64>, PermError>> = par::map_range(blocks as usize, |b| {
        let lo = seed_count * b as u64 / blocks;
        let hi = seed_count * (b as u64 + 1) / blocks;
        let mut counts = vec![0u64; t * t];
        let mut image = vec![0u64; k];
        let mut used = 0u64;
        for seed in lo..hi {
            let handle = build(seed)?;
            let table: Vec<u64> = (0..n)
                .map(|u| handle.forward(u))
                .collect::<Result<_, _>>()?;
            for (row, tuple) in domain_tuples.iter().enumerate() {
                for (slot, &x) in image.iter_mut().zip(tuple) {
                    *slot = table[x as usize];
                }
                let col = rank_tuple(n, &image, &mut used) as usize;
                counts[row * t + col] += 1;
            }
        }
        Ok(counts)
    });

    let mut counts = vec![0u64; t * t];
    for block in block_counts {
        for (acc, c) in counts.iter_mut().zip(block?) {
            *acc += c;
        }
    }

    let uniform = 1.0 / t as f64;
    let seeds = seed_count as f64;
    let mut worst = 0.0f64;
    for row in counts.chunks(t) {
        let tv: f64 = row
            .iter()
            .map(|&c| (c as f64 / seeds - uniform).abs())
            .sum::<f64>()
            / 2.0;
        worst = worst.max(tv);
    }
    Ok(worst)
}

/// Exhaustively measures a bounded-independence family against its declared
/// `(ε, k)` guarantee by enumerating its entire seed space.
pub fn kwise_quality_exhaustive(
    n: u64,
    k: usize,
    epsilon_log2: u32,
) -> Result<FamilyQuality, PermError> {
    let bits = declared_seed_bits(n, k, epsilon_log2);
    if bits > EXHAUSTIVE_BITS_LIMIT {
        return Err(PermError::InvalidParameter(format!(
            "declared seed length {bits} exceeds the exhaustive limit {EXHAUSTIVE_BITS_LIMIT}"
        )));
    }
    let seeds = 1u64 << bits;
    let measured_tv = tuple_uniformity_test(n, k, seeds, |i| {
        let seed = SeedBits::from_index(i, bits);
        KwisePerm::new(n, k, epsilon_log2, seed).map(PermHandle::Kwise)
    })?;
    Ok(FamilyQuality {
        family: "kwise".into(),
        n,
        k,
        declared_epsilon_log2: Some(epsilon_log2),
        measured_tv,
        seeds,
        exhaustive: true,
    })
}

/// Measures the fully random family over a sampled seed ensemble derived
/// from `master_seed`. Sampled ensembles estimate rather than certify, so no
/// declared bound is attached.
pub fn explicit_quality_sampled(
    n: u64,
    k: usize,
    master_seed: u64,
    seeds: u64,
) -> Result<FamilyQuality, PermError> {
    let measured_tv = tuple_uniformity_test(n, k, seeds, |i| {
        let seed = derive_seed(master_seed, "quality-seed", i);
        ExplicitPerm::new(n, seed).map(PermHandle::Explicit)
    })?;
    Ok(FamilyQuality {
        family: "explicit".into(),
        n,
        k,
        declared_epsilon_log2: None,
        measured_tv,
        seeds,
        exhaustive: false,
    })
}

/// Largest `n` whose `n!` random tapes are enumerated.
const LAZY_TAPE_LIMIT: u64 = 8;

/// Measures the deferred sampler over its *entire* randomness space: one
/// scripted tape per permutation. The sampler draws the `m`-th assignment
/// uniformly from the unused values, so the count matrix comes out exactly
/// uniform — the measured distance is 0.0, with no floating-point slack,
/// because every cell holds the same integer count.
pub fn lazy_quality_exhaustive(n: u64, k: usize) -> Result<FamilyQuality, PermError> {
    if n == 0 || n > LAZY_TAPE_LIMIT {
        return Err(PermError::InvalidParameter(format!(
            "tape enumeration supports 1 <= n <= {LAZY_TAPE_LIMIT}, got {n}"
        )));
    }
    let tapes: u64 = (1..=n).product();
    let measured_tv = tuple_uniformity_test(n, k, tapes, |mut index| {
        // Decode the tape index into per-assignment ranks: the m-th
        // assignment picks among the n−m still-unused values.
        let mut script = Vec::with_capacity(n as usize);
        for m in 0..n {
            let radix = n - m;
            script.push(index % radix);
            index /= radix;
        }
        Ok(PermHandle::Lazy(LazyPerm::scripted(n, script)?))
    })?;
    Ok(FamilyQuality {
        family: "lazy".into(),
        n,
        k,
        declared_epsilon_log2: None,
        measured_tv,
        seeds: tapes,
        exhaustive: true,
    })
}
