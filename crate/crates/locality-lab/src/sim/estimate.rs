//! Monte Carlo validation of the failure bound.

use serde::{Deserialize, Serialize};

use super::query::simulate_query;
use super::world::{failure_bound, FailureBound, HSpec, VirtualWorld};
use super::SimError;
use crate::graph::LabeledGraph;
use crate::models::{LcaAlgorithm, SeedBits};
use crate::par;
use crate::perm::{PermError, PermHandle};
use crate::seeding::derive_seed;

/// Aggregate of an [`estimate_failure`] run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureEstimate {
    pub trials: u64,
    pub queries_per_trial: u64,
    /// Total `(query, trial)` pairs: `trials · queries_per_trial`.
    pub pairs: u64,
    pub failures: u64,
    /// `failures / pairs`.
    pub rate: f64,
    pub bound: FailureBound,
    /// One binomial standard deviation at the bound rate.
    pub sigma: f64,
    /// Whether `rate ≤ bound + 4σ`.
    pub within_tolerance: bool,
}

/// Measures the empirical failure rate of the localized simulation: fresh
/// permutation per trial (seed derived from `master_seed` and the trial
/// index), one simulated query per real vertex per trial.
///
/// Every failure is an abort on a real-but-undiscovered preimage; genuine
/// runtime errors (budget violations, stateful handles) propagate as `Err`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_failure(
    g: &LabeledGraph,
    h: &HSpec,
    big_n: u64,
    alg: &dyn LcaAlgorithm,
    budget: usize,
    family: &(dyn Fn(u64) -> Result<PermHandle, PermError> + Sync),
    master_seed: u64,
    trials: u64,
) -> Result<FailureEstimate, SimError> {
    if trials == 0 {
        return Err(SimError::Parameter("at least one trial is required".into()));
    }
    let n = g.n() as u64;
    let bound = failure_bound(n, big_n, g.delta() as u64, budget)?;
    let seed = SeedBits::empty();

    let per_trial: Vec<Result<u64, SimError>> = par::map_range(trials as usize, |i| {
        let pi = family(derive_seed(master_seed, "sim-trial", i as u64))?;
        let world = VirtualWorld::new(g, h.clone(), big_n, pi)?;
        let mut failed = 0u64;
        for v in 0..n {
            let outcome = simulate_query(&world, alg, v, budget, &seed)?;
            if !outcome.result.is_success() {
                failed += 1;
            }
        }
        Ok(failed)
    });

    let mut failures = 0u64;
    for r in per_trial {
        failures += r?;
    }
    let pairs = trials * n;
    let rate = failures as f64 / pairs as f64;
    let p = bound.value();
    let sigma = (p * (1.0 - p) / pairs as f64).sqrt();
    Ok(FailureEstimate {
        trials,
        queries_per_trial: n,
        pairs,
        failures,
        rate,
        bound,
        sigma,
        within_tolerance: rate <= p + 4.0 * sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::{BallSizeTree, RemoteProber};
    use crate::graph::{generate, GraphSpec};
    use crate::perm::{declared_seed_bits, ExplicitPerm, KwisePerm};
    use crate::seeding::stream_rng;

    fn explicit_family(big_n: u64) -> impl Fn(u64) -> Result<PermHandle, PermError> + Sync {
        move |seed| Ok(PermHandle::Explicit(ExplicitPerm::new(big_n, seed)?))
    }

    #[test]
    fn ball_walking_algorithms_never_fail() {
        let g = generate(&GraphSpec::Cycle { n: 10 }).unwrap();
        let alg = BallSizeTree {
            radius: 2,
            delta: 2,
        };
        let est = estimate_failure(
            &g,
            &HSpec::Empty,
            400,
            &alg,
            5,
            &explicit_family(400),
            7,
            50,
        )
        .unwrap();
        assert_eq!(est.failures, 0);
        assert_eq!(est.pairs, 500);
        assert!(est.within_tolerance);
    }

    /// One probe at a fixed offset from the (relabelled) query hits an
    /// independent id, whose preimage is uniform over the other `N−1` points:
    /// the failure rate must track `(n−1)/(N−1)` and stay under the bound.
    #[test]
    fn remote_probe_rate_matches_the_hypergeometric_prediction() {
        let n = 10u64;
        let big_n = 10_000u64;
        let g = generate(&GraphSpec::Cycle { n: n as usize }).unwrap();
        let alg = RemoteProber {
            offsets: vec![big_n / 2],
        };
        let trials = 4_000u64;
        let est = estimate_failure(
            &g,
            &HSpec::Empty,
            big_n,
            &alg,
            1,
            &explicit_family(big_n),
            123,
            trials,
        )
        .unwrap();
        assert!(
            est.within_tolerance,
            "rate {} vs bound {}",
            est.rate,
            est.bound.value()
        );

        let predicted = (n - 1) as f64 / (big_n - 1) as f64;
        let sigma = (predicted * (1.0 - predicted) / est.pairs as f64).sqrt();
        assert!(
            (est.rate - predicted).abs() <= 6.0 * sigma,
            "rate {} strayed from prediction {predicted}",
            est.rate
        );
        assert!(est.failures > 0, "expected ~36 failures over 40k pairs");
    }

    /// The short-seed family is statistically indistinguishable from the
    /// uniform one at the scales the simulation touches.
    #[test]
    fn kwise_family_tracks_the_explicit_family() {
        let n = 10u64;
        let big_n = 10_000u64;
        let g = generate(&GraphSpec::Cycle { n: n as usize }).unwrap();
        let alg = RemoteProber {
            offsets: vec![big_n / 2],
        };
        let trials = 4_000u64;
        // Independence must cover every evaluation a query makes:
        // k = 1 + (Δ+1)·t = 4.
        let (k, eps_log2) = (4usize, 24u32);
        let bits = declared_seed_bits(big_n, k, eps_log2);
        let kwise_family = move |seed: u64| {
            let mut rng = stream_rng(seed, "kwise-member", 0);
            let seed_bits = SeedBits::random(&mut rng, bits);
            Ok(PermHandle::Kwise(KwisePerm::new(
                big_n, k, eps_log2, seed_bits,
            )?))
        };
        let kwise = estimate_failure(
            &g,
            &HSpec::Empty,
            big_n,
            &alg,
            1,
            &kwise_family,
            123,
            trials,
        )
        .unwrap();
        let explicit = estimate_failure(
            &g,
            &HSpec::Empty,
            big_n,
            &alg,
            1,
            &explicit_family(big_n),
            123,
            trials,
        )
        .unwrap();
        assert!(kwise.within_tolerance);
        let predicted = (n - 1) as f64 / (big_n - 1) as f64;
        let sigma = (predicted * (1.0 - predicted) / kwise.pairs as f64).sqrt();
        assert!(
            (kwise.rate - explicit.rate).abs() <= 8.0 * sigma,
            "families diverged: kwise {} vs explicit {}",
            kwise.rate,
            explicit.rate
        );
    }
}
