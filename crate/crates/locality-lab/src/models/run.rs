//! Runtimes for the three execution models, plus the state-elimination
//! wrapper that turns a query-order-oblivious LCA into a stateless one.

use super::{
    collect_ball, GraphOracle, Label, LcaAlgorithm, LcaContext, LocalAlgorithm, ModelError,
    ProbeSession, ProbeTranscript, QueryCtx, SeedBits, StateBuffer, StateSnapshot,
};
use crate::graph::LabeledGraph;
use crate::par;

/// Result of a synchronous-rounds execution.
#[derive(Debug, Clone)]
pub struct LocalRun {
    pub radius: usize,
    pub labels: Vec<Label>,
}

/// Runs a LOCAL algorithm: every vertex evaluates the same pure function of
/// its radius-`r` ball. Vertices are independent, so this runs data-parallel.
pub fn run_local(alg: &dyn LocalAlgorithm, g: &LabeledGraph) -> Result<LocalRun, ModelError> {
    let radius = alg.radius(g.n() as u64);
    let labels = par::try_map_range(g.n(), |v| {
        let view = collect_ball(g, v, radius);
        alg.evaluate(&view).map_err(|e| e.at_query(v as u64))
    })?;
    Ok(LocalRun { radius, labels })
}

/// Result of a per-vertex probe-tree execution.
#[derive(Debug, Clone)]
pub struct PartreeRun {
    pub budget: usize,
    pub labels: Vec<Label>,
    pub transcripts: Vec<ProbeTranscript>,
}

/// Runs a stateless algorithm as the probe-tree family `v ↦ T_v`: one
/// independent, budgeted, seedless execution per vertex. State-full handles
/// are rejected up front, and a budget violation is a hard error naming the
/// offending vertex.
pub fn run_partree(
    alg: &dyn LcaAlgorithm,
    g: &LabeledGraph,
    budget: Option<usize>,
) -> Result<PartreeRun, ModelError> {
    let n = g.n() as u64;
    if alg.state_bits(n) != 0 {
        return Err(ModelError::StatefulPartree { id: alg.id() });
    }
    let budget = budget.unwrap_or_else(|| alg.probe_bound(n));
    let seed = SeedBits::empty();
    let per_vertex = par::try_map_range(g.n(), |v| {
        let mut oracle = GraphOracle::new(g);
        let mut session = ProbeSession::new(&mut oracle, Some(budget));
        let mut ctx = QueryCtx::stateless(&seed);
        let label = alg
            .answer(&mut session, v as u64, &mut ctx)
            .map_err(|e| e.at_query(v as u64))?;
        Ok((label, session.into_transcript()))
    })?;
    let (labels, transcripts) = per_vertex.into_iter().unzip();
    Ok(PartreeRun {
        budget,
        labels,
        transcripts,
    })
}

/// Result of an LCA execution over a query stream.
#[derive(Debug, Clone)]
pub struct LcaRun {
    pub queries: Vec<u64>,
    pub answers: Vec<Label>,
    pub transcripts: Vec<ProbeTranscript>,
    /// State snapshot after each query, in stream order.
    pub state_trace: Vec<StateSnapshot>,
}

/// Runs an LCA over `queries` in order, threading seed and state through the
/// context. Queries are sequential by definition: state written while
/// answering one query is visible to the next.
pub fn run_lca(
    alg: &dyn LcaAlgorithm,
    g: &LabeledGraph,
    queries: &[u64],
    ctx: &mut LcaContext,
) -> Result<LcaRun, ModelError> {
    let n = g.n() as u64;
    let budget = ctx.probe_budget.unwrap_or_else(|| alg.probe_bound(n));
    let mut run = LcaRun {
        queries: queries.to_vec(),
        answers: Vec::with_capacity(queries.len()),
        transcripts: Vec::with_capacity(queries.len()),
        state_trace: Vec::with_capacity(queries.len()),
    };
    for &query in queries {
        if query >= n {
            return Err(ModelError::BadQuery { query, id_space: n });
        }
        let mut oracle = GraphOracle::new(g);
        let mut session = ProbeSession::new(&mut oracle, Some(budget));
        let mut qctx = QueryCtx::with_state(&ctx.seed, &mut ctx.state);
        let answer = alg
            .answer(&mut session, query, &mut qctx)
            .map_err(|e| e.at_query(query))?;
        run.answers.push(answer);
        run.transcripts.push(session.into_transcript());
        run.state_trace.push(ctx.state.snapshot());
    }
    Ok(run)
}

/// The state-elimination wrapper: answers every query by invoking the inner
/// algorithm on a fresh initial state with the one shared seed.
///
/// For a query-order-oblivious inner algorithm this preserves the produced
/// labeling and the per-query probe bound; the wrapper itself declares zero
/// state. Order-obliviousness cannot be checked statically — callers assert it
/// and the test suites exercise it over sampled query orders.
pub struct Statelessified<A> {
    inner: A,
}

/// Wraps `alg`; see [`Statelessified`].
pub fn statelessify<A: LcaAlgorithm>(alg: A) -> Statelessified<A> {
    Statelessified { inner: alg }
}

impl<A: LcaAlgorithm> LcaAlgorithm for Statelessified<A> {
    fn id(&self) -> String {
        format!("stateless:{}", self.inner.id())
    }

    fn probe_bound(&self, n: u64) -> usize {
        self.inner.probe_bound(n)
    }

    fn seed_bits(&self, n: u64) -> usize {
        self.inner.seed_bits(n)
    }

    fn answer(
        &self,
        probes: &mut ProbeSession<'_>,
        query: u64,
        ctx: &mut QueryCtx<'_>,
    ) -> Result<Label, ModelError> {
        let mut fresh = StateBuffer::new(self.inner.state_bits(probes.id_space()));
        let mut inner_ctx = QueryCtx::with_state(ctx.seed(), &mut fresh);
        self.inner.answer(probes, query, &mut inner_ctx)
    }
}

/// Labeling assembled from one query per vertex, with its verifier verdict.
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub labels: Vec<Label>,
    pub verdict: crate::algo::VerifyReport,
}

/// Queries every vertex in index order, assembles the induced labeling, and
/// verifies it against the problem's feasibility predicate. This is the
/// "consistency across queries" check: answers must cohere into one global
/// solution even though each was produced locally.
pub fn check_consistency(
    alg: &dyn LcaAlgorithm,
    g: &LabeledGraph,
    ctx: &mut LcaContext,
    problem: crate::algo::ProblemId,
) -> Result<ConsistencyReport, ModelError> {
    let queries: Vec<u64> = (0..g.n() as u64).collect();
    let run = run_lca(alg, g, &queries, ctx)?;
    let verdict = crate::algo::verify_solution(problem, g, &run.answers)?;
    Ok(ConsistencyReport {
        labels: run.answers,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};
    use crate::models::{gather_ball_by_probes, BallView};

    /// Answers the degree of the queried vertex; 1 probe.
    struct SelfDegree;

    impl LcaAlgorithm for SelfDegree {
        fn id(&self) -> String {
            "self-degree".into()
        }
        fn probe_bound(&self, _n: u64) -> usize {
            1
        }
        fn answer(
            &self,
            probes: &mut ProbeSession<'_>,
            query: u64,
            _ctx: &mut QueryCtx<'_>,
        ) -> Result<Label, ModelError> {
            Ok(probes.probe(query)?.len() as Label)
        }
    }

    /// Gathers a radius-2 ball and answers its size; sized for degree ≤ 3.
    struct BallSize;

    impl LcaAlgorithm for BallSize {
        fn id(&self) -> String {
            "ball-size-2".into()
        }
        fn probe_bound(&self, _n: u64) -> usize {
            crate::models::max_ball_size(3, 2)
        }
        fn answer(
            &self,
            probes: &mut ProbeSession<'_>,
            query: u64,
            _ctx: &mut QueryCtx<'_>,
        ) -> Result<Label, ModelError> {
            let ball = gather_ball_by_probes(probes, query, 2)?;
            Ok(ball.len() as Label)
        }
    }

    /// LOCAL twin of [`BallSize`].
    struct LocalBallSize;

    impl LocalAlgorithm for LocalBallSize {
        fn id(&self) -> String {
            "local-ball-size-2".into()
        }
        fn radius(&self, _n: u64) -> usize {
            2
        }
        fn evaluate(&self, view: &BallView) -> Result<Label, ModelError> {
            Ok(view.len() as Label)
        }
    }

    /// State-full counter: answers how many queries were served before this
    /// one. Not query-order-oblivious; used to observe state threading.
    struct QueryCounter;

    impl LcaAlgorithm for QueryCounter {
        fn id(&self) -> String {
            "query-counter".into()
        }
        fn probe_bound(&self, _n: u64) -> usize {
            0
        }
        fn state_bits(&self, _n: u64) -> usize {
            64
        }
        fn answer(
            &self,
            _probes: &mut ProbeSession<'_>,
            _query: u64,
            ctx: &mut QueryCtx<'_>,
        ) -> Result<Label, ModelError> {
            let state = ctx.state()?;
            let count = if state.is_empty() {
                0u64
            } else {
                u64::from_le_bytes(state.read().try_into().expect("8-byte counter"))
            };
            state.write(&(count + 1).to_le_bytes(), 64)?;
            Ok(count as Label)
        }
    }

    /// State-full but query-order-oblivious: caches probe answers (degrees)
    /// between queries, never changing any answer.
    struct CachingDegree;

    impl CachingDegree {
        fn decode(state: &StateBuffer) -> Vec<(u64, u64)> {
            state
                .read()
                .chunks_exact(16)
                .map(|c| {
                    (
                        u64::from_le_bytes(c[..8].try_into().unwrap()),
                        u64::from_le_bytes(c[8..].try_into().unwrap()),
                    )
                })
                .collect()
        }
    }

    impl LcaAlgorithm for CachingDegree {
        fn id(&self) -> String {
            "caching-degree".into()
        }
        fn probe_bound(&self, _n: u64) -> usize {
            1
        }
        fn state_bits(&self, n: u64) -> usize {
            128 * n as usize
        }
        fn answer(
            &self,
            probes: &mut ProbeSession<'_>,
            query: u64,
            ctx: &mut QueryCtx<'_>,
        ) -> Result<Label, ModelError> {
            let mut cache = Self::decode(ctx.state()?);
            if let Some(&(_, degree)) = cache.iter().find(|(q, _)| *q == query) {
                return Ok(degree as Label);
            }
            let degree = probes.probe(query)?.len() as u64;
            cache.push((query, degree));
            let bytes: Vec<u8> = cache
                .iter()
                .flat_map(|(q, d)| {
                    let mut b = q.to_le_bytes().to_vec();
                    b.extend_from_slice(&d.to_le_bytes());
                    b
                })
                .collect();
            let bits = bytes.len() * 8;
            ctx.state()?.write(&bytes, bits)?;
            Ok(degree as Label)
        }
    }

    #[test]
    fn partree_and_stateless_lca_agree() {
        // The model equivalence for deterministic stateless algorithms:
        // identical labelings and identical transcripts.
        let g = generate(&GraphSpec::RandomRegular {
            n: 10,
            d: 3,
            seed: 9,
        })
        .unwrap();
        let alg = BallSize;
        let tree_run = run_partree(&alg, &g, None).unwrap();
        let mut ctx = LcaContext::for_algorithm(&alg, g.n() as u64, SeedBits::empty());
        let queries: Vec<u64> = (0..g.n() as u64).collect();
        let lca_run = run_lca(&alg, &g, &queries, &mut ctx).unwrap();
        assert_eq!(tree_run.labels, lca_run.answers);
        assert_eq!(tree_run.transcripts, lca_run.transcripts);
    }

    #[test]
    fn local_and_probed_ball_algorithms_agree() {
        let g = generate(&GraphSpec::Cycle { n: 12 }).unwrap();
        let local = run_local(&LocalBallSize, &g).unwrap();
        let trees = run_partree(&BallSize, &g, None).unwrap();
        assert_eq!(local.labels, trees.labels);
        assert!(local.labels.iter().all(|&l| l == 5));
    }

    #[test]
    fn budget_violations_name_the_vertex() {
        let g = generate(&GraphSpec::Cycle { n: 8 }).unwrap();
        let err = run_partree(&BallSize, &g, Some(2)).unwrap_err();
        match err {
            ModelError::QueryFailed { query: 0, source } => {
                assert!(matches!(
                    *source,
                    ModelError::ProbeBudgetExceeded { budget: 2 }
                ));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn stateful_handles_cannot_run_as_trees() {
        let g = generate(&GraphSpec::Cycle { n: 4 }).unwrap();
        assert!(matches!(
            run_partree(&QueryCounter, &g, None),
            Err(ModelError::StatefulPartree { .. })
        ));
        // The statelessified wrapper is admissible.
        let wrapped = statelessify(QueryCounter);
        let run = run_partree(&wrapped, &g, None).unwrap();
        // Fresh state per query: every count is zero.
        assert_eq!(run.labels, vec![0, 0, 0, 0]);
    }

    #[test]
    fn state_threads_through_a_query_stream() {
        let g = generate(&GraphSpec::Cycle { n: 5 }).unwrap();
        let alg = QueryCounter;
        let mut ctx = LcaContext::for_algorithm(&alg, 5, SeedBits::empty());
        let run = run_lca(&alg, &g, &[3, 1, 4, 1], &mut ctx).unwrap();
        assert_eq!(run.answers, vec![0, 1, 2, 3]);
        assert_eq!(run.state_trace.len(), 4);
        // Replaying from any recorded snapshot reproduces the next answer.
        let mut replay_ctx = LcaContext::for_algorithm(&alg, 5, SeedBits::empty());
        replay_ctx.state.restore(&run.state_trace[1]);
        let replay = run_lca(&alg, &g, &[4], &mut replay_ctx).unwrap();
        assert_eq!(replay.answers, vec![2]);
    }

    #[test]
    fn statelessified_caching_is_order_invariant() {
        let g = generate(&GraphSpec::TwoPath { n: 8, seed: 3 }).unwrap();
        let wrapped = statelessify(CachingDegree);
        let queries: Vec<u64> = (0..8).collect();
        let mut baseline_ctx = LcaContext::for_algorithm(&wrapped, 8, SeedBits::empty());
        let baseline = run_lca(&wrapped, &g, &queries, &mut baseline_ctx).unwrap();

        // The state-full original answers identically in any query order
        // (it is query-order-oblivious), and so does the wrapper.
        for seed in 0..20u64 {
            let mut order: Vec<u64> = (0..8).collect();
            use rand::seq::SliceRandom;
            order.shuffle(&mut crate::seeding::stream_rng(seed, "order", 0));

            let mut stateful_ctx = LcaContext::for_algorithm(&CachingDegree, 8, SeedBits::empty());
            let stateful = run_lca(&CachingDegree, &g, &order, &mut stateful_ctx).unwrap();
            let mut wrapped_ctx = LcaContext::for_algorithm(&wrapped, 8, SeedBits::empty());
            let rewrapped = run_lca(&wrapped, &g, &order, &mut wrapped_ctx).unwrap();
            assert_eq!(stateful.answers, rewrapped.answers);

            // Per-vertex labels match the index-order baseline.
            for (pos, &q) in order.iter().enumerate() {
                assert_eq!(rewrapped.answers[pos], baseline.answers[q as usize]);
            }
            // Probe bound is preserved: at most one probe per query.
            assert!(rewrapped.transcripts.iter().all(|t| t.total_probes() <= 1));
        }
    }

    #[test]
    fn bad_queries_are_rejected() {
        let g = generate(&GraphSpec::Cycle { n: 4 }).unwrap();
        let mut ctx = LcaContext::for_algorithm(&SelfDegree, 4, SeedBits::empty());
        assert!(matches!(
            run_lca(&SelfDegree, &g, &[9], &mut ctx),
            Err(ModelError::BadQuery { query: 9, .. })
        ));
    }
}
