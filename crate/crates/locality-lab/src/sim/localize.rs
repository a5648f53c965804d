//! The constructive localizer: run a probe algorithm on an `n⁴`-sized
//! relabelled world with a short-seed permutation family, and certify that
//! every answer was produced locally.
//!
//! The permutation family's independence must cover every evaluation one
//! query can make — `k = 1 + (Δ+1)·t` points — at closeness
//! `ε = 1/(n·N^{4k})`, which keeps the family seed within
//! `O(t·Δ·log n)` bits of the algorithm's own seed. Since `ε` at these
//! exponents is far below what a float can hold, it is carried everywhere as
//! `epsilon_log2` (`ε = 2^-e`).

use serde::{Deserialize, Serialize};

use super::query::{simulate_query, QueryOutcome};
use super::world::{failure_bound, FailureBound, HSpec, VirtualWorld};
use super::SimError;
use crate::bits::ceil_log2;
use crate::graph::LabeledGraph;
use crate::models::{Label, LcaAlgorithm, SeedBits};
use crate::perm::{declared_seed_bits, KwisePerm, PermHandle};
use crate::seeding::stream_rng;
use std::collections::BTreeSet;

/// Default cap on `t(N)·Δ / n^{1/4}`: generous at desk scale, but it still
/// rejects algorithms whose probe bound grows with the id space.
pub const DEFAULT_LOCALITY_GUARD: u64 = 64;

/// Constant in the seed-bit budget `s(N) + C·t(N)·Δ·log₂ n` that the
/// family's seed length is checked against.
pub const SEED_OVERHEAD_CONSTANT: u64 = 64;

/// Tunables of [`run_localized_lca`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizerConfig {
    /// Constant in the admission guard `t(N)·Δ ≤ guard·n^{1/4}`.
    pub locality_guard: u64,
    /// Constant in the seed-bit budget.
    pub seed_overhead: u64,
}

impl Default for LocalizerConfig {
    fn default() -> Self {
        LocalizerConfig {
            locality_guard: DEFAULT_LOCALITY_GUARD,
            seed_overhead: SEED_OVERHEAD_CONSTANT,
        }
    }
}

/// Per-query proof that the run was local.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCertificate {
    pub vertex: u64,
    pub probes: usize,
    /// Every real probed vertex lies within distance `t` of the query.
    pub radius_ok: bool,
    /// The real probed vertices induce a connected subgraph with the query.
    pub connected: bool,
    /// At most `t` probes were spent.
    pub within_budget: bool,
}

impl QueryCertificate {
    pub fn passes(&self) -> bool {
        self.radius_ok && self.connected && self.within_budget
    }
}

/// Complete record of one localized run over all vertices of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizeRun {
    pub n: u64,
    pub big_n: u64,
    pub delta: u64,
    /// Probe budget `t(N)` declared by the algorithm for the id space.
    pub budget: usize,
    /// Independence parameter `1 + (Δ+1)·t(N)` of the family.
    pub k: u64,
    /// Family closeness as `ε = 2^-epsilon_log2`.
    pub epsilon_log2: u32,
    pub family_seed_bits: usize,
    pub algorithm_seed_bits: usize,
    pub total_seed_bits: usize,
    /// `s(N) + C·t(N)·Δ·log₂ n`.
    pub seed_bit_budget: usize,
    pub within_seed_budget: bool,
    pub bound: FailureBound,
    /// `π(v)` for every vertex, also the decoder for id-valued answers.
    pub relabeled_queries: Vec<u64>,
    pub outcomes: Vec<QueryOutcome>,
    pub certificates: Vec<QueryCertificate>,
    /// Whether any query aborted; retry with a fresh master seed if so.
    pub failed: bool,
    /// All answers in vertex order, present only when every query succeeded.
    pub labels: Option<Vec<Label>>,
}

impl LocalizeRun {
    pub fn all_certificates_pass(&self) -> bool {
        self.certificates.iter().all(QueryCertificate::passes)
    }

    /// Decodes id-valued answers (e.g. matching partners) back to real
    /// vertex ids via the recorded query relabelling. Non-negative answers
    /// with no matching query image become `-2`, which no verifier accepts.
    pub fn graph_space_partners(&self) -> Option<Vec<Label>> {
        let labels = self.labels.as_ref()?;
        Some(
            labels
                .iter()
                .map(|&a| {
                    if a < 0 {
                        a
                    } else {
                        self.relabeled_queries
                            .iter()
                            .position(|&w| w == a as u64)
                            .map_or(-2, |p| p as Label)
                    }
                })
                .collect(),
        )
    }
}

/// Checks the locality certificate for one query: all real probed vertices
/// within distance `t` of `vertex`, and `{vertex} ∪ probed` connected in `g`.
pub fn probe_locality_certificate(
    g: &LabeledGraph,
    vertex: u64,
    g_probed: &[u64],
    t: usize,
) -> bool {
    let dist = g.bfs_distances(vertex as usize);
    let radius_ok = g_probed
        .iter()
        .all(|&u| matches!(dist[u as usize], Some(d) if d <= t));
    radius_ok && induced_connected(g, vertex, g_probed)
}

fn induced_connected(g: &LabeledGraph, vertex: u64, g_probed: &[u64]) -> bool {
    let members: BTreeSet<u64> = g_probed.iter().copied().chain([vertex]).collect();
    let mut seen = BTreeSet::from([vertex]);
    let mut frontier = vec![vertex];
    while let Some(u) = frontier.pop() {
        for &w in g.neighbors(u as usize) {
            let w = w as u64;
            if members.contains(&w) && seen.insert(w) {
                frontier.push(w);
            }
        }
    }
    seen.len() == members.len()
}

/// Runs `alg` over every vertex of `g` inside a fresh `N = n⁴` world, with a
/// bounded-independence relabelling whose parameters are derived from the
/// algorithm's declared probe bound. All randomness stems from `master_seed`.
pub fn run_localized_lca(
    alg: &dyn LcaAlgorithm,
    g: &LabeledGraph,
    h: &HSpec,
    master_seed: u64,
    config: &LocalizerConfig,
) -> Result<LocalizeRun, SimError> {
    let n = g.n() as u64;
    if n < 2 {
        return Err(SimError::Parameter(
            "localization needs at least two vertices".into(),
        ));
    }
    let big_n = n
        .checked_pow(4)
        .ok_or_else(|| SimError::Parameter(format!("id space n⁴ overflows for n = {n}")))?;
    let delta = (g.delta() as u64).max(h.degree_bound());
    let budget = alg.probe_bound(big_n);

    // Admission guard: the probe bound must be genuinely local relative to
    // the graph, or the failure bound below is vacuous.
    let guard = config.locality_guard as f64 * (n as f64).powf(0.25);
    if (budget as u64).saturating_mul(delta) as f64 > guard {
        return Err(SimError::Parameter(format!(
            "`{}` probes {budget} ids at degree {delta}, past the locality guard {guard:.1}",
            alg.id()
        )));
    }

    let bound = failure_bound(n, big_n, delta, budget)?;
    let k = bound.k;
    let b = ceil_log2(big_n);
    let epsilon_log2: u32 = ceil_log2(n)
        .checked_add(
            u32::try_from(4 * k * b as u64)
                .map_err(|_| SimError::Parameter("ε exponent overflows".into()))?,
        )
        .ok_or_else(|| SimError::Parameter("ε exponent overflows".into()))?;

    let family_seed_bits = declared_seed_bits(big_n, k as usize, epsilon_log2);
    let family_seed = SeedBits::random(
        &mut stream_rng(master_seed, "localize-family", 0),
        family_seed_bits,
    );
    let pi = KwisePerm::new(big_n, k as usize, epsilon_log2, family_seed)?;

    let algorithm_seed_bits = alg.seed_bits(big_n);
    let alg_seed = SeedBits::random(
        &mut stream_rng(master_seed, "localize-alg", 0),
        algorithm_seed_bits,
    );

    let total_seed_bits = family_seed_bits + algorithm_seed_bits;
    let seed_bit_budget = algorithm_seed_bits
        + (config.seed_overhead * budget as u64 * delta * ceil_log2(n) as u64) as usize;

    let world = VirtualWorld::new(g, h.clone(), big_n, PermHandle::Kwise(pi))?;
    let mut outcomes = Vec::with_capacity(g.n());
    let mut certificates = Vec::with_capacity(g.n());
    for v in 0..n {
        let outcome = simulate_query(&world, alg, v, budget, &alg_seed)?;
        let dist = g.bfs_distances(v as usize);
        certificates.push(QueryCertificate {
            vertex: v,
            probes: outcome.transcript.total_probes(),
            radius_ok: outcome
                .g_probed
                .iter()
                .all(|&u| matches!(dist[u as usize], Some(d) if d <= budget)),
            connected: induced_connected(g, v, &outcome.g_probed),
            within_budget: outcome.transcript.total_probes() <= budget,
        });
        outcomes.push(outcome);
    }

    let failed = outcomes.iter().any(|o| !o.result.is_success());
    let labels = (!failed).then(|| {
        outcomes
            .iter()
            .map(|o| o.result.answer().expect("no query failed"))
            .collect()
    });
    Ok(LocalizeRun {
        n,
        big_n,
        delta,
        budget,
        k,
        epsilon_log2,
        family_seed_bits,
        algorithm_seed_bits,
        total_seed_bits,
        seed_bit_budget,
        within_seed_budget: total_seed_bits <= seed_bit_budget,
        bound,
        relabeled_queries: outcomes.iter().map(|o| o.relabeled_query).collect(),
        outcomes,
        certificates,
        failed,
        labels,
    })
}
