//! Exhaustive derandomization at micro scale.
//!
//! The probabilistic argument says a random relabelling works for *all*
//! queries of *all* graphs in a family simultaneously with probability at
//! least `1 − (#queries)·k·n/(N−k)`; when that is positive, a good fixed
//! permutation exists. Here the whole argument is replayed concretely: every
//! permutation of a tiny id space is tested against every enumerated graph
//! and query, and the observed fraction of good permutations is compared
//! with the union-bound prediction.

use serde::{Deserialize, Serialize};

use super::query::simulate_query;
use super::world::{failure_bound, FailureBound, HSpec, VirtualWorld};
use super::SimError;
use crate::graph::LabeledGraph;
use crate::models::{LcaAlgorithm, SeedBits};
use crate::par;
use crate::perm::{ExplicitPerm, PermHandle};

/// Largest id space whose permutations are enumerated (`8! = 40320`).
const DERAND_ID_LIMIT: u64 = 8;
/// Largest vertex count for graph-family enumeration (2^15 edge subsets).
const DERAND_GRAPH_LIMIT: usize = 6;

/// Outcome of an exhaustive search over all permutations of `[N]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerandomizationReport {
    pub total_perms: u64,
    pub good_perms: u64,
    /// Per-permutation verdict, aligned with [`permutation_tables`] order.
    pub good_mask: Vec<bool>,
    /// The lexicographically first good permutation, as a forward table.
    pub first_good: Option<Vec<u64>>,
    /// `good_perms / total_perms`.
    pub good_fraction: f64,
    /// `1 − (#queries)·bound`; may be negative, in which case the union
    /// bound predicts nothing.
    pub union_bound_prediction: f64,
    /// Queries each permutation must survive (Σ over graphs of their order).
    pub queries_per_perm: u64,
    pub bound: FailureBound,
}

/// All permutations of `0..n` as forward tables, in lexicographic order.
pub fn permutation_tables(n: u64) -> Result<Vec<Vec<u64>>, SimError> {
    if n == 0 || n > DERAND_ID_LIMIT {
        return Err(SimError::Parameter(format!(
            "permutation enumeration covers 1..={DERAND_ID_LIMIT} ids, got {n}"
        )));
    }
    let mut table: Vec<u64> = (0..n).collect();
    let mut out = vec![table.clone()];
    // Standard next-permutation walk over lexicographic order.
    while let Some(i) = table.windows(2).rposition(|w| w[0] < w[1]) {
        let j = table
            .iter()
            .rposition(|&x| x > table[i])
            .expect("a successor exists right of the pivot");
        table.swap(i, j);
        table[i + 1..].reverse();
        out.push(table.clone());
    }
    Ok(out)
}

/// Every graph on `n` labeled vertices with maximum degree ≤ `delta`, in
/// edge-subset bitmask order. Non-edges leave isolated vertices, which is
/// how smaller graphs appear padded to a common vertex count.
pub fn enumerate_bounded_graphs(n: usize, delta: usize) -> Result<Vec<LabeledGraph>, SimError> {
    if n == 0 || n > DERAND_GRAPH_LIMIT {
        return Err(SimError::Parameter(format!(
            "graph enumeration covers 1..={DERAND_GRAPH_LIMIT} vertices, got {n}"
        )));
    }
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << slots.len()) {
        let edges: Vec<(usize, usize)> = slots
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if let Ok(g) = LabeledGraph::from_edges(n, delta, &edges) {
            out.push(g);
        }
    }
    Ok(out)
}

/// Tests every permutation of `[big_n]` against every graph and every query,
/// and reports which ones let the localized simulation succeed everywhere.
pub fn derandomize_search(
    graphs: &[LabeledGraph],
    h: &HSpec,
    big_n: u64,
    budget: usize,
    alg: &dyn LcaAlgorithm,
) -> Result<DerandomizationReport, SimError> {
    if graphs.is_empty() {
        return Err(SimError::Parameter("no graphs to search over".into()));
    }
    let n_max = graphs.iter().map(LabeledGraph::n).max().unwrap() as u64;
    let delta = graphs.iter().map(LabeledGraph::delta).max().unwrap() as u64;
    let bound = failure_bound(n_max, big_n, delta, budget)?;
    let queries_per_perm: u64 = graphs.iter().map(|g| g.n() as u64).sum();

    let tables = permutation_tables(big_n)?;
    let seed = SeedBits::empty();
    let verdicts: Vec<Result<bool, SimError>> = par::map_range(tables.len(), |i| {
        let pi = ExplicitPerm::from_table(tables[i].clone())?;
        for g in graphs {
            let world = VirtualWorld::new(g, h.clone(), big_n, PermHandle::Explicit(pi.clone()))?;
            for v in 0..g.n() as u64 {
                let outcome = simulate_query(&world, alg, v, budget, &seed)?;
                if !outcome.result.is_success() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    });

    let mut good_mask = Vec::with_capacity(tables.len());
    for v in verdicts {
        good_mask.push(v?);
    }
    let good_perms = good_mask.iter().filter(|&&b| b).count() as u64;
    let first_good = good_mask.iter().position(|&b| b).map(|i| tables[i].clone());
    Ok(DerandomizationReport {
        total_perms: tables.len() as u64,
        good_perms,
        good_fraction: good_perms as f64 / tables.len() as f64,
        good_mask,
        first_good,
        union_bound_prediction: 1.0 - queries_per_perm as f64 * bound.value(),
        queries_per_perm,
        bound,
    })
}
