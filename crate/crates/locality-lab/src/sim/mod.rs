//! The relabelled virtual world and the localized query simulation.
//!
//! The construction that turns a far-probing algorithm into a local one
//! embeds the real graph `G` into a much larger identifier space `[N]`: the
//! ids outside `G` carry a *known* virtual graph `H`, and a random
//! permutation π of `[N]` relabels everything. An algorithm runs against the
//! relabelled union `G ∪ H` and cannot tell which ids are real. The
//! simulation answers its probes from two sources only — the portion of `G`
//! already discovered (the set `Q`) and the known structure of `H` — and
//! declares failure the moment a probe's preimage lands in `G` outside `Q`.
//! Because a uniformly relabelled probe almost never hits the tiny real
//! graph, the failure probability is bounded by `k·n/(N−k)` with
//! `k = 1 + (Δ+1)·t` probes' worth of discoveries, and on success the
//! algorithm's whole view was reconstructed from a radius-`t` neighbourhood:
//! the run was local whether the algorithm meant to be or not.
//!
//! The module provides the world and its probe oracles ([`VirtualWorld`],
//! [`WorldOracle`]), the per-query simulation with its discovered-set
//! invariants ([`simulate_query`]), the failure bound and its Monte Carlo
//! validation ([`failure_bound`], [`estimate_failure`]), exhaustive
//! derandomization at micro scale ([`derandomize_search`]), and the
//! end-to-end localizer that runs a probe algorithm on `N = n⁴` ids with a
//! short-seed permutation family and certifies every answer's locality
//! ([`run_localized_lca`]).

mod derand;
mod estimate;
mod localize;
mod query;
mod world;

pub use derand::{
    derandomize_search, enumerate_bounded_graphs, permutation_tables, DerandomizationReport,
};
pub use estimate::{estimate_failure, FailureEstimate};
pub use localize::{
    probe_locality_certificate, run_localized_lca, LocalizeRun, LocalizerConfig, QueryCertificate,
    DEFAULT_LOCALITY_GUARD, SEED_OVERHEAD_CONSTANT,
};
pub use query::{simulate_query, FailureRecord, QueryOutcome, QueryResult};
pub use world::{failure_bound, FailureBound, HSpec, VirtualWorld, WorldOracle};

use thiserror::Error;

/// Errors from world construction and the simulation drivers.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Perm(#[from] crate::perm::PermError),
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}
