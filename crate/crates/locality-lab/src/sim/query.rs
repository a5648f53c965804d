//! One simulated query against the relabelled world.
//!
//! The oracle here is the restricted one: it answers a probe only when the
//! preimage is already-discovered real structure or known virtual structure,
//! and aborts the query otherwise. The discovered set `Q` and its two
//! invariants — members are in `H` or within distance `s` of the query after
//! `s` steps, and `|Q| ≤ 1 + (Δ+1)·t` — are asserted on every probe, so a
//! bug in the bookkeeping dies loudly instead of skewing failure statistics.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::world::{perm_to_model, VirtualWorld};
use super::SimError;
use crate::models::{
    Label, LcaAlgorithm, ModelError, ProbeSession, ProbeSource, ProbeTranscript, QueryCtx, SeedBits,
};

/// Where and how a simulated query aborted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    /// 1-based index of the offending probe.
    pub probe_index: usize,
    /// The relabelled id that was probed.
    pub relabeled: u64,
    /// Its preimage: a real vertex outside the discovered set.
    pub preimage: u64,
}

/// Terminal state of one simulated query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum QueryResult {
    Success { answer: Label },
    Failure(FailureRecord),
}

impl QueryResult {
    pub fn is_success(&self) -> bool {
        matches!(self, QueryResult::Success { .. })
    }

    pub fn answer(&self) -> Option<Label> {
        match self {
            QueryResult::Success { answer } => Some(*answer),
            QueryResult::Failure(_) => None,
        }
    }
}

/// Everything observable about one simulated query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryOutcome {
    /// The real vertex the query was about.
    pub vertex: u64,
    /// The id the algorithm was actually asked: `π(vertex)`.
    pub relabeled_query: u64,
    pub result: QueryResult,
    /// Probe/answer log in relabelled space.
    pub transcript: ProbeTranscript,
    /// Probes whose preimage was a real vertex.
    pub probes_to_g: usize,
    /// Probes whose preimage was a virtual vertex.
    pub probes_to_h: usize,
    /// Final discovered set, sorted true ids.
    pub discovered: Vec<u64>,
    /// True ids added to the discovered set by each probe, in probe order.
    pub discovery_trace: Vec<Vec<u64>>,
    /// Real vertices that were probe targets, sorted true ids.
    pub g_probed: Vec<u64>,
}

/// Probe source that enforces the locality discipline of the simulation.
struct LocalizedOracle<'w, 'g> {
    world: &'w VirtualWorld<'g>,
    vertex: u64,
    budget: usize,
    /// BFS distances from `vertex` in the real graph, for invariant checks.
    dist: Vec<Option<usize>>,
    discovered: BTreeSet<u64>,
    step: usize,
    probes_to_g: usize,
    probes_to_h: usize,
    g_probed: BTreeSet<u64>,
    discovery_trace: Vec<Vec<u64>>,
    failure: Option<FailureRecord>,
}

impl<'w, 'g> LocalizedOracle<'w, 'g> {
    fn new(world: &'w VirtualWorld<'g>, vertex: u64, budget: usize) -> Self {
        LocalizedOracle {
            world,
            vertex,
            budget,
            dist: world.graph().bfs_distances(vertex as usize),
            discovered: BTreeSet::from([vertex]),
            step: 0,
            probes_to_g: 0,
            probes_to_h: 0,
            g_probed: BTreeSet::new(),
            discovery_trace: Vec::new(),
            failure: None,
        }
    }

    /// Discovered-set cap `1 + (Δ+1)·s` after `s` steps.
    fn cap(&self) -> usize {
        1 + (self.world.delta() as usize + 1) * self.step.min(self.budget)
    }

    fn check_invariants(&self, added: &[u64]) {
        let n = self.world.n();
        for &x in added {
            if x < n {
                let d = self.dist[x as usize]
                    .expect("a discovered real vertex must be reachable from the query");
                assert!(
                    d <= self.step,
                    "simulation invariant violated: vertex {x} at distance {d} \
                     from query {} entered the discovered set at step {}",
                    self.vertex,
                    self.step
                );
            }
        }
        assert!(
            self.discovered.len() <= self.cap(),
            "discovered set grew to {} past its cap {}",
            self.discovered.len(),
            self.cap()
        );
    }
}

impl ProbeSource for LocalizedOracle<'_, '_> {
    fn id_space(&self) -> u64 {
        self.world.big_n()
    }

    fn fetch(&mut self, id: u64) -> Result<Vec<u64>, ModelError> {
        let world = self.world;
        let u = world
            .pi()
            .inverse(id)
            .map_err(|e| perm_to_model(e, world.big_n()))?;
        self.step += 1;
        let local = self.discovered.contains(&u);
        if u < world.n() {
            self.g_probed.insert(u);
            self.probes_to_g += 1;
            if !local {
                // A real vertex outside Q: the query fails even when the
                // vertex is geometrically nearby, which is exactly what
                // keeps the distance invariant checkable.
                self.failure = Some(FailureRecord {
                    probe_index: self.step,
                    relabeled: id,
                    preimage: u,
                });
                return Err(ModelError::WorldProbeRejected);
            }
        } else {
            self.probes_to_h += 1;
        }

        let neighbors = world.true_neighbors(u);
        let mut added = Vec::new();
        for x in std::iter::once(u).chain(neighbors.iter().copied()) {
            if self.discovered.insert(x) {
                added.push(x);
            }
        }
        self.check_invariants(&added);
        self.discovery_trace.push(added);

        let mut out = neighbors
            .into_iter()
            .map(|x| world.pi().forward(x))
            .collect::<Result<Vec<u64>, _>>()
            .map_err(|e| perm_to_model(e, world.big_n()))?;
        out.sort_unstable();
        Ok(out)
    }
}

/// Runs one query of a stateless probe algorithm against the world, answering
/// only from discovered real structure and known virtual structure.
///
/// A probe whose preimage is an undiscovered real vertex aborts the query
/// with a [`QueryResult::Failure`]; that verdict wins over whatever the
/// algorithm returns. Budget violations and other runtime errors are `Err`s,
/// not failures — they indicate a broken setup rather than an unlucky
/// relabelling.
pub fn simulate_query(
    world: &VirtualWorld<'_>,
    alg: &dyn LcaAlgorithm,
    vertex: u64,
    budget: usize,
    seed: &SeedBits,
) -> Result<QueryOutcome, SimError> {
    if vertex >= world.n() {
        return Err(SimError::Parameter(format!(
            "query vertex {vertex} outside the real graph of {} vertices",
            world.n()
        )));
    }
    if alg.state_bits(world.big_n()) != 0 {
        return Err(SimError::Parameter(format!(
            "`{}` declares state; the localized simulation handles stateless algorithms only",
            alg.id()
        )));
    }

    let relabeled_query = world.pi().forward(vertex)?;
    let mut oracle = LocalizedOracle::new(world, vertex, budget);
    let mut session = ProbeSession::new(&mut oracle, Some(budget));
    let mut ctx = QueryCtx::stateless(seed);
    let verdict = alg.answer(&mut session, relabeled_query, &mut ctx);
    let transcript = session.into_transcript();

    let result = match (oracle.failure, verdict) {
        // The rejection verdict stands even if the algorithm swallowed the
        // error and produced a label anyway.
        (Some(record), _) => QueryResult::Failure(record),
        (None, Ok(answer)) => QueryResult::Success { answer },
        (None, Err(e)) => return Err(SimError::Model(e.at_query(vertex))),
    };

    Ok(QueryOutcome {
        vertex,
        relabeled_query,
        result,
        transcript,
        probes_to_g: oracle.probes_to_g,
        probes_to_h: oracle.probes_to_h,
        discovered: oracle.discovered.into_iter().collect(),
        discovery_trace: oracle.discovery_trace,
        g_probed: oracle.g_probed.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::{BallSizeTree, ConstantLabel, FixedIdProber, SelfDegree};
    use crate::graph::{generate, GraphSpec};
    use crate::perm::{ExplicitPerm, PermHandle};
    use crate::sim::HSpec;

    fn world(n: usize, h: HSpec, big_n: u64, seed: Option<u64>) -> VirtualWorld<'static> {
        let g = Box::leak(Box::new(generate(&GraphSpec::Cycle { n }).unwrap()));
        let pi = match seed {
            Some(s) => PermHandle::Explicit(ExplicitPerm::new(big_n, s).unwrap()),
            None => PermHandle::Explicit(ExplicitPerm::identity(big_n).unwrap()),
        };
        VirtualWorld::new(g, h, big_n, pi).unwrap()
    }

    #[test]
    fn probe_free_queries_always_succeed() {
        let w = world(5, HSpec::Empty, 40, Some(3));
        let out = simulate_query(&w, &ConstantLabel(7), 2, 4, &SeedBits::empty()).unwrap();
        assert_eq!(out.result, QueryResult::Success { answer: 7 });
        assert_eq!(out.discovered, vec![2]);
        assert_eq!(out.transcript.total_probes(), 0);
        assert_eq!((out.probes_to_g, out.probes_to_h), (0, 0));
    }

    #[test]
    fn probing_the_query_itself_is_local() {
        let w = world(5, HSpec::Empty, 40, Some(11));
        for v in 0..5u64 {
            let out = simulate_query(&w, &SelfDegree, v, 4, &SeedBits::empty()).unwrap();
            assert_eq!(out.result, QueryResult::Success { answer: 2 });
            assert_eq!(out.probes_to_g, 1);
            assert_eq!(out.g_probed, vec![v]);
            // The probe reveals the query vertex's two neighbors.
            assert_eq!(out.discovered.len(), 3);
        }
    }

    #[test]
    fn ball_walks_stay_inside_the_discovered_set() {
        let w = world(9, HSpec::Empty, 100, Some(5));
        let alg = BallSizeTree {
            radius: 2,
            delta: 2,
        };
        let out = simulate_query(&w, &alg, 4, 5, &SeedBits::empty()).unwrap();
        assert_eq!(out.result, QueryResult::Success { answer: 5 });
        assert_eq!(out.probes_to_g, 5);
        assert_eq!(out.g_probed, vec![2, 3, 4, 5, 6]);
        // Probing the distance-2 shell revealed the distance-3 shell.
        assert_eq!(out.discovered, vec![1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(out.discovery_trace.len(), 5);
    }

    #[test]
    fn virtual_probes_succeed_and_real_strangers_fail() {
        // Identity relabelling makes targets predictable: true id 20 is
        // virtual, true id 3 is a real vertex away from the query.
        let w = world(5, HSpec::Empty, 40, None);
        let virtual_probe = FixedIdProber { target: 20 };
        let out = simulate_query(&w, &virtual_probe, 0, 4, &SeedBits::empty()).unwrap();
        assert_eq!(out.result, QueryResult::Success { answer: 0 });
        assert_eq!((out.probes_to_g, out.probes_to_h), (0, 1));
        assert_eq!(out.discovered, vec![0, 20]);

        let stranger = FixedIdProber { target: 3 };
        let out = simulate_query(&w, &stranger, 0, 4, &SeedBits::empty()).unwrap();
        assert_eq!(
            out.result,
            QueryResult::Failure(FailureRecord {
                probe_index: 1,
                relabeled: 3,
                preimage: 3,
            })
        );
        assert_eq!(out.probes_to_g, 1);
    }

    #[test]
    fn nearby_but_undiscovered_vertices_still_fail() {
        // Vertex 1 is adjacent to the query 0, but has not been discovered
        // when it is probed directly, so the convention rejects the probe.
        let w = world(5, HSpec::Empty, 40, None);
        let neighbor_probe = FixedIdProber { target: 1 };
        let out = simulate_query(&w, &neighbor_probe, 0, 4, &SeedBits::empty()).unwrap();
        assert!(matches!(out.result, QueryResult::Failure(_)));
    }

    #[test]
    fn budget_violations_are_errors_not_failures() {
        let w = world(9, HSpec::Empty, 100, Some(5));
        let alg = BallSizeTree {
            radius: 3,
            delta: 2,
        };
        // Radius 3 needs 7 probes on a cycle; grant only 4.
        let err = simulate_query(&w, &alg, 0, 4, &SeedBits::empty()).unwrap_err();
        assert!(matches!(
            err,
            SimError::Model(ModelError::QueryFailed { query: 0, .. })
        ));
    }

    #[test]
    fn query_must_name_a_real_vertex() {
        let w = world(5, HSpec::Empty, 40, Some(3));
        assert!(simulate_query(&w, &ConstantLabel(0), 5, 4, &SeedBits::empty()).is_err());
    }
}
