//! Deterministic gadget generators.
//!
//! Every generator is a pure function of its [`GraphSpec`]: randomised kinds
//! carry an explicit seed inside the spec, so `generate` called twice with
//! equal specs returns byte-identical graphs.

use super::{GraphError, LabeledGraph};
use crate::seeding;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// Attempt budget for rejection-sampled generators. Exceeding it is a hard
/// error, never a silent retry with different parameters.
pub const DEFAULT_ATTEMPT_BUDGET: u32 = 10_000;

/// A declarative graph description. See [`generate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSpec {
    /// The cycle on `n ≥ 3` vertices, edges `{i, i+1 mod n}`.
    Cycle { n: usize },
    /// The path `0 – 1 – … – n-1`.
    Path { n: usize },
    /// Two disjoint 3-vertex paths placed on seeded vertex ids; all remaining
    /// ids are isolated. Requires `n ≥ 6`.
    TwoPath { n: usize, seed: u64 },
    /// A uniform-ish `d`-regular graph via the configuration model with
    /// rejection of loops and duplicate edges.
    RandomRegular { n: usize, d: usize, seed: u64 },
    /// Disjoint union; part `i` keeps its structure with ids offset by the
    /// sizes of parts `0..i`.
    DisjointUnion { parts: Vec<GraphSpec> },
    /// Bipartite double cover: vertices `v` and `v + n`, and each base edge
    /// `{u, v}` becomes the pair of edges `{u, v + n}` and `{u + n, v}`.
    DoubleCover { base: Box<GraphSpec> },
    /// Two disjoint copies: vertices `v` and `v + n`, each base edge kept in
    /// both copies.
    TwoCopies { base: Box<GraphSpec> },
    /// The base graph padded with isolated vertices up to `total` ids.
    IsolatedPadding { base: Box<GraphSpec>, total: usize },
}

/// Materialises a spec into a canonical [`LabeledGraph`].
pub fn generate(spec: &GraphSpec) -> Result<LabeledGraph, GraphError> {
    match spec {
        GraphSpec::Cycle { n } => {
            if *n < 3 {
                return Err(GraphError::InvalidParameter(format!(
                    "cycle needs at least 3 vertices, got {n}"
                )));
            }
            let edges: Vec<_> = (0..*n).map(|i| (i, (i + 1) % n)).collect();
            LabeledGraph::from_edges(*n, 2, &edges)
        }
        GraphSpec::Path { n } => {
            if *n == 0 {
                return Err(GraphError::InvalidParameter("empty path".into()));
            }
            let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
            LabeledGraph::from_edges(*n, 2.min(n - 1), &edges)
        }
        GraphSpec::TwoPath { n, seed } => two_path(*n, *seed),
        GraphSpec::RandomRegular { n, d, seed } => {
            sample_random_regular(*n, *d, *seed, DEFAULT_ATTEMPT_BUDGET).map(|(g, _)| g)
        }
        GraphSpec::DisjointUnion { parts } => {
            let mut edges = Vec::new();
            let mut offset = 0usize;
            let mut delta = 0usize;
            for part in parts {
                let g = generate(part)?;
                edges.extend(g.edges().into_iter().map(|(u, v)| (u + offset, v + offset)));
                delta = delta.max(g.delta());
                offset += g.n();
            }
            LabeledGraph::from_edges(offset, delta, &edges)
        }
        GraphSpec::DoubleCover { base } => Ok(double_cover(&generate(base)?)),
        GraphSpec::TwoCopies { base } => Ok(two_copies(&generate(base)?)),
        GraphSpec::IsolatedPadding { base, total } => {
            let g = generate(base)?;
            if *total < g.n() {
                return Err(GraphError::InvalidParameter(format!(
                    "padding target {total} smaller than base size {}",
                    g.n()
                )));
            }
            LabeledGraph::from_edges(*total, g.delta(), &g.edges())
        }
    }
}

/// The bipartite double cover of `g`: ids `0..n` and `n..2n`, with each edge
/// `{u, v}` lifted to `{u, v + n}` and `{u + n, v}`.
pub fn double_cover(g: &LabeledGraph) -> LabeledGraph {
    let n = g.n();
    let mut edges = Vec::with_capacity(2 * g.edge_count());
    for (u, v) in g.edges() {
        edges.push((u, v + n));
        edges.push((v, u + n));
    }
    LabeledGraph::from_edges(2 * n, g.delta(), &edges)
        .expect("double cover preserves the degree bound")
}

/// Two disjoint copies of `g` on ids `0..n` and `n..2n`.
pub fn two_copies(g: &LabeledGraph) -> LabeledGraph {
    let n = g.n();
    let mut edges = Vec::with_capacity(2 * g.edge_count());
    for (u, v) in g.edges() {
        edges.push((u, v));
        edges.push((u + n, v + n));
    }
    LabeledGraph::from_edges(2 * n, g.delta(), &edges).expect("copies preserve the degree bound")
}

fn two_path(n: usize, seed: u64) -> Result<LabeledGraph, GraphError> {
    if n < 6 {
        return Err(GraphError::InvalidParameter(format!(
            "a two-path instance needs at least 6 vertices, got {n}"
        )));
    }
    let mut ids: Vec<usize> = (0..n).collect();
    let mut rng = seeding::stream_rng(seed, "two-path", 0);
    ids.shuffle(&mut rng);
    let edges = [
        (ids[0], ids[1]),
        (ids[1], ids[2]),
        (ids[3], ids[4]),
        (ids[4], ids[5]),
    ];
    LabeledGraph::from_edges(n, 2, &edges)
}

/// Samples a `d`-regular graph on `n` vertices via the configuration model:
/// shuffle `n·d` stubs, pair them consecutively, and reject the pairing if it
/// induces a loop or duplicate edge. Returns the graph together with the
/// number of attempts consumed.
pub fn sample_random_regular(
    n: usize,
    d: usize,
    seed: u64,
    budget: u32,
) -> Result<(LabeledGraph, u32), GraphError> {
    if d >= n && !(d == 0 && n > 0) {
        return Err(GraphError::InvalidParameter(format!(
            "regular degree {d} needs more than {d} vertices, got {n}"
        )));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(GraphError::InvalidParameter(format!(
            "no {d}-regular graph on {n} vertices: odd stub count"
        )));
    }
    if d == 0 {
        return Ok((LabeledGraph::from_edges(n, 0, &[])?, 0));
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for attempt in 0..budget {
        let mut rng = seeding::stream_rng(seed, "regular-attempt", u64::from(attempt));
        stubs.shuffle(&mut rng);
        if let Some(edges) = pair_stubs(&stubs) {
            let g = LabeledGraph::from_edges(n, d, &edges)?;
            return Ok((g, attempt + 1));
        }
    }
    Err(GraphError::BudgetExhausted {
        budget,
        reason: format!("no simple {d}-regular pairing on {n} vertices"),
    })
}

/// Pairs consecutive stubs into edges, failing on loops or duplicates.
fn pair_stubs(stubs: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut edges = Vec::with_capacity(stubs.len() / 2);
    let mut seen = std::collections::HashSet::with_capacity(stubs.len() / 2);
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if u == v || !seen.insert((u, v)) {
            return None;
        }
        edges.push((u, v));
    }
    Some(edges)
}

/// Rejection-samples a `d`-regular graph until its girth is at least
/// `min_girth`, spending at most `budget` girth rejections. Returns the graph
/// and the number of candidates drawn.
pub fn sample_high_girth_regular(
    n: usize,
    d: usize,
    min_girth: usize,
    seed: u64,
    budget: u32,
) -> Result<(LabeledGraph, u32), GraphError> {
    for attempt in 0..budget {
        let candidate_seed = seeding::derive_seed(seed, "high-girth", u64::from(attempt));
        let (g, _) = sample_random_regular(n, d, candidate_seed, budget)?;
        if g.girth().is_none_or(|girth| girth >= min_girth) {
            return Ok((g, attempt + 1));
        }
    }
    Err(GraphError::BudgetExhausted {
        budget,
        reason: format!("no {d}-regular graph on {n} vertices with girth ≥ {min_girth} found"),
    })
}
