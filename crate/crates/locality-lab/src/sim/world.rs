//! The virtual world `G ∪ H` under a relabelling permutation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::graph::LabeledGraph;
use crate::models::{ModelError, ProbeSource};
use crate::perm::{PermError, PermHandle};

/// The known virtual graph on the identifiers `n..N`.
///
/// `H` is procedural: its adjacency is computed on demand and the graph is
/// never materialised, which is what makes id spaces like `N = n⁴` usable.
/// Whatever the shape, `H` must be total on `n..N`, symmetric, loop-free and
/// within the ambient degree bound.
#[derive(Clone)]
pub enum HSpec {
    /// No edges: every virtual id is isolated.
    Empty,
    /// One cycle `n – n+1 – … – N−1 – n` (an edge for two ids, isolated for
    /// one).
    Cycle,
    /// Caller-supplied adjacency on the true ids `n..N`, with a declared
    /// degree bound. The callback must be symmetric; probes assert it.
    Custom {
        degree: u64,
        adjacency: Arc<dyn Fn(u64) -> Vec<u64> + Send + Sync>,
    },
}

impl HSpec {
    /// Worst-case degree of the virtual graph.
    pub fn degree_bound(&self) -> u64 {
        match self {
            HSpec::Empty => 0,
            HSpec::Cycle => 2,
            HSpec::Custom { degree, .. } => *degree,
        }
    }

    /// Neighbors of the true id `u ∈ [n, N)` in `H`, sorted.
    fn neighbors(&self, n: u64, big_n: u64, u: u64) -> Vec<u64> {
        debug_assert!((n..big_n).contains(&u));
        match self {
            HSpec::Empty => Vec::new(),
            HSpec::Cycle => {
                let m = big_n - n;
                if m == 1 {
                    return Vec::new();
                }
                let pos = u - n;
                let prev = n + (pos + m - 1) % m;
                let next = n + (pos + 1) % m;
                if prev == next {
                    vec![prev]
                } else {
                    let mut out = vec![prev, next];
                    out.sort_unstable();
                    out
                }
            }
            HSpec::Custom { degree, adjacency } => {
                let mut out = adjacency(u);
                out.sort_unstable();
                out.dedup();
                assert!(
                    out.len() as u64 <= *degree,
                    "virtual adjacency of {u} exceeds its declared degree {degree}"
                );
                for &v in &out {
                    assert!(
                        (n..big_n).contains(&v) && v != u,
                        "virtual adjacency of {u} leaves the id range n..N or loops"
                    );
                    assert!(
                        adjacency(v).contains(&u),
                        "virtual adjacency is not symmetric between {u} and {v}"
                    );
                }
                out
            }
        }
    }
}

impl fmt::Debug for HSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HSpec::Empty => f.write_str("Empty"),
            HSpec::Cycle => f.write_str("Cycle"),
            HSpec::Custom { degree, .. } => f
                .debug_struct("Custom")
                .field("degree", degree)
                .finish_non_exhaustive(),
        }
    }
}

/// The relabelled union `G ∪ H` on the identifier space `[N]`.
///
/// True ids `0..n` are the vertices of `G`, true ids `n..N` carry `H`, and
/// every externally visible id goes through π: a probe for `w` is answered
/// as `π(adj(π⁻¹(w)))`. No probe path bypasses the translation.
pub struct VirtualWorld<'g> {
    g: &'g LabeledGraph,
    h: HSpec,
    big_n: u64,
    delta: u64,
    pi: PermHandle,
}

impl<'g> VirtualWorld<'g> {
    /// Assembles a world, checking `N > n`, the permutation's domain, and
    /// `H`'s degree against the graph's declared bound.
    pub fn new(
        g: &'g LabeledGraph,
        h: HSpec,
        big_n: u64,
        pi: PermHandle,
    ) -> Result<Self, SimError> {
        let n = g.n() as u64;
        if big_n <= n {
            return Err(SimError::Parameter(format!(
                "id space of {big_n} cannot host a graph on {n} vertices"
            )));
        }
        if pi.n() != big_n {
            return Err(SimError::Parameter(format!(
                "permutation covers {} ids but the world has {big_n}",
                pi.n()
            )));
        }
        if h.degree_bound() > g.delta() as u64 {
            return Err(SimError::Parameter(format!(
                "virtual graph degree {} exceeds the ambient bound {}",
                h.degree_bound(),
                g.delta()
            )));
        }
        Ok(VirtualWorld {
            g,
            h,
            big_n,
            delta: g.delta() as u64,
            pi,
        })
    }

    /// Number of real vertices (`|V(G)|`).
    pub fn n(&self) -> u64 {
        self.g.n() as u64
    }

    /// Size of the identifier space.
    pub fn big_n(&self) -> u64 {
        self.big_n
    }

    /// Ambient degree bound (covers both `G` and `H`).
    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn graph(&self) -> &LabeledGraph {
        self.g
    }

    pub fn pi(&self) -> &PermHandle {
        &self.pi
    }

    /// Adjacency of a true id in `G ∪ H`.
    pub fn true_neighbors(&self, u: u64) -> Vec<u64> {
        assert!(u < self.big_n, "true id {u} outside the world");
        if u < self.n() {
            self.g
                .neighbors(u as usize)
                .iter()
                .map(|&v| v as u64)
                .collect()
        } else {
            self.h.neighbors(self.n(), self.big_n, u)
        }
    }

    /// Answers a probe in relabelled space: `π(adj(π⁻¹(w)))`, sorted.
    pub fn relabeled_probe(&self, w: u64) -> Result<Vec<u64>, PermError> {
        let u = self.pi.inverse(w)?;
        let mut out = self
            .true_neighbors(u)
            .into_iter()
            .map(|x| self.pi.forward(x))
            .collect::<Result<Vec<u64>, PermError>>()?;
        out.sort_unstable();
        Ok(out)
    }

    /// Materialises the relabelled `G ∪ H` as an ordinary graph, for
    /// faithfulness checks at toy scale only.
    pub fn materialize(&self) -> Result<LabeledGraph, SimError> {
        const LIMIT: u64 = 1 << 16;
        if self.big_n > LIMIT {
            return Err(SimError::Parameter(format!(
                "refusing to materialise a world on {} ids (limit {LIMIT})",
                self.big_n
            )));
        }
        let mut edges = Vec::new();
        for u in 0..self.big_n {
            for v in self.true_neighbors(u) {
                if u < v {
                    edges.push((self.pi.forward(u)? as usize, self.pi.forward(v)? as usize));
                }
            }
        }
        Ok(LabeledGraph::from_edges(
            self.big_n as usize,
            self.delta as usize,
            &edges,
        )?)
    }
}

impl fmt::Debug for VirtualWorld<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VirtualWorld")
            .field("n", &self.n())
            .field("big_n", &self.big_n)
            .field("delta", &self.delta)
            .field("h", &self.h)
            .finish_non_exhaustive()
    }
}

/// Probe adapter that answers every relabelled probe truthfully from the
/// whole world — the reference the localized simulation is measured against.
pub struct WorldOracle<'w, 'g> {
    world: &'w VirtualWorld<'g>,
}

impl<'w, 'g> WorldOracle<'w, 'g> {
    pub fn new(world: &'w VirtualWorld<'g>) -> Self {
        WorldOracle { world }
    }
}

impl ProbeSource for WorldOracle<'_, '_> {
    fn id_space(&self) -> u64 {
        self.world.big_n()
    }

    fn fetch(&mut self, id: u64) -> Result<Vec<u64>, ModelError> {
        self.world
            .relabeled_probe(id)
            .map_err(|e| perm_to_model(e, self.world.big_n()))
    }
}

pub(super) fn perm_to_model(e: PermError, id_space: u64) -> ModelError {
    match e {
        PermError::OutOfRange { point, .. } => ModelError::ProbeOutOfRange {
            id: point,
            id_space,
        },
        other => ModelError::Unsupported(other.to_string()),
    }
}

/// The per-query failure bound of the localized simulation.
///
/// At most `k = 1 + (Δ+1)·t` true ids are ever involved in one query, so the
/// chance that some probe's preimage hits `V(G)` outside the discovered set
/// is at most `k·n/(N−k)`; held as an exact integer ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureBound {
    /// Discovered-set cap `1 + (Δ+1)·t`.
    pub k: u64,
    /// Numerator `k·n`.
    pub numer: u64,
    /// Denominator `N − k`.
    pub denom: u64,
    /// The cruder `n²/N`, valid whenever `k ≤ n/2`.
    pub simplified: Option<f64>,
}

impl FailureBound {
    pub fn value(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }
}

/// Evaluates the failure bound `k·n/(N−k)` for a graph of `n` vertices in an
/// id space of `N`, degree bound `delta`, probe budget `t`.
pub fn failure_bound(n: u64, big_n: u64, delta: u64, t: usize) -> Result<FailureBound, SimError> {
    let k = (delta + 1)
        .checked_mul(t as u64)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| SimError::Parameter("discovered-set cap overflows".into()))?;
    if k >= big_n {
        return Err(SimError::Parameter(format!(
            "discovered-set cap {k} reaches the id space {big_n}; the bound is vacuous"
        )));
    }
    let numer = k
        .checked_mul(n)
        .ok_or_else(|| SimError::Parameter("failure bound numerator overflows".into()))?;
    Ok(FailureBound {
        k,
        numer,
        denom: big_n - k,
        simplified: (2 * k <= n).then(|| (n * n) as f64 / big_n as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};
    use crate::perm::ExplicitPerm;

    fn identity_world(g: &LabeledGraph, h: HSpec, big_n: u64) -> VirtualWorld<'_> {
        let pi = PermHandle::Explicit(ExplicitPerm::identity(big_n).unwrap());
        VirtualWorld::new(g, h, big_n, pi).unwrap()
    }

    #[test]
    fn empty_h_ids_are_isolated() {
        let g = generate(&GraphSpec::Cycle { n: 4 }).unwrap();
        let pi = PermHandle::Explicit(ExplicitPerm::new(16, 9).unwrap());
        let world = VirtualWorld::new(&g, HSpec::Empty, 16, pi).unwrap();
        for u in 4..16u64 {
            let w = world.pi().forward(u).unwrap();
            assert_eq!(world.relabeled_probe(w).unwrap(), Vec::<u64>::new());
        }
        // Real vertices keep their cycle structure through the relabelling.
        let w0 = world.pi().forward(0).unwrap();
        let answer = world.relabeled_probe(w0).unwrap();
        let mut expect = vec![
            world.pi().forward(1).unwrap(),
            world.pi().forward(3).unwrap(),
        ];
        expect.sort_unstable();
        assert_eq!(answer, expect);
    }

    #[test]
    fn cycle_h_wraps_the_virtual_range() {
        let g = generate(&GraphSpec::Cycle { n: 4 }).unwrap();
        let world = identity_world(&g, HSpec::Cycle, 16);
        // H is the cycle 4–5–…–15–4 under the identity relabelling.
        assert_eq!(world.relabeled_probe(7).unwrap(), vec![6, 8]);
        assert_eq!(world.relabeled_probe(4).unwrap(), vec![5, 15]);
        assert_eq!(world.relabeled_probe(15).unwrap(), vec![4, 14]);
    }

    #[test]
    fn tiny_virtual_ranges_degenerate_cleanly() {
        let g = generate(&GraphSpec::Cycle { n: 4 }).unwrap();
        let lone = identity_world(&g, HSpec::Cycle, 5);
        assert_eq!(lone.relabeled_probe(4).unwrap(), Vec::<u64>::new());
        let pair = identity_world(&g, HSpec::Cycle, 6);
        assert_eq!(pair.relabeled_probe(4).unwrap(), vec![5]);
        assert_eq!(pair.relabeled_probe(5).unwrap(), vec![4]);
    }

    #[test]
    fn construction_guards_fire() {
        let g = generate(&GraphSpec::Cycle { n: 4 }).unwrap();
        let pi = PermHandle::Explicit(ExplicitPerm::identity(4).unwrap());
        assert!(VirtualWorld::new(&g, HSpec::Empty, 4, pi).is_err());
        let wrong_domain = PermHandle::Explicit(ExplicitPerm::identity(8).unwrap());
        assert!(VirtualWorld::new(&g, HSpec::Empty, 16, wrong_domain).is_err());
        let too_dense = HSpec::Custom {
            degree: 3,
            adjacency: Arc::new(|_| Vec::new()),
        };
        let pi = PermHandle::Explicit(ExplicitPerm::identity(16).unwrap());
        assert!(VirtualWorld::new(&g, too_dense, 16, pi).is_err());
    }

    #[test]
    fn probes_match_the_materialized_world() {
        let g = generate(&GraphSpec::Cycle { n: 5 }).unwrap();
        let pi = PermHandle::Explicit(ExplicitPerm::new(20, 31).unwrap());
        let world = VirtualWorld::new(&g, HSpec::Cycle, 20, pi).unwrap();
        let flat = world.materialize().unwrap();
        for w in 0..20u64 {
            let via_probe = world.relabeled_probe(w).unwrap();
            let via_graph: Vec<u64> = flat
                .neighbors(w as usize)
                .iter()
                .map(|&v| v as u64)
                .collect();
            assert_eq!(via_probe, via_graph, "divergence at relabelled id {w}");
        }
    }

    #[test]
    fn probe_answers_are_symmetric() {
        let g = generate(&GraphSpec::Cycle { n: 5 }).unwrap();
        let pi = PermHandle::Explicit(ExplicitPerm::new(20, 8).unwrap());
        let world = VirtualWorld::new(&g, HSpec::Cycle, 20, pi).unwrap();
        for w in 0..20u64 {
            for r in world.relabeled_probe(w).unwrap() {
                assert!(world.relabeled_probe(r).unwrap().contains(&w));
            }
        }
    }

    #[test]
    fn bound_arithmetic_is_exact() {
        let b = failure_bound(10, 10_000, 2, 2).unwrap();
        assert_eq!((b.k, b.numer, b.denom), (7, 70, 9993));
        assert!(b.simplified.is_none(), "k = 7 exceeds n/2 = 5");
        assert!((b.value() - 70.0 / 9993.0).abs() < 1e-15);

        let zero_probe = failure_bound(10, 10_000, 2, 0).unwrap();
        assert_eq!(
            (zero_probe.k, zero_probe.numer, zero_probe.denom),
            (1, 10, 9999)
        );
        assert_eq!(zero_probe.simplified, Some(0.01));

        assert!(failure_bound(4, 10, 2, 3).is_err());
    }
}
