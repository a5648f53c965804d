//! Conversion of message-passing algorithms into per-vertex probe routines.
//!
//! An `r`-round message-passing algorithm's output at `v` is a function of
//! the radius-`r` ball around `v`, so a probe routine can reproduce it by
//! fetching that ball (one probe per ball vertex) and evaluating locally.
//! The probe bound is the largest possible ball size for the declared degree
//! bound, which is a constant whenever `r` is.

use crate::models::{
    gather_ball_by_probes, max_ball_size, Label, LcaAlgorithm, LocalAlgorithm, ModelError,
    ProbeSession, QueryCtx,
};

/// Runs a [`LocalAlgorithm`] as a stateless, seedless probe routine by
/// gathering the query's radius-`r` ball.
#[derive(Debug, Clone)]
pub struct LcaFromLocal<A> {
    inner: A,
    delta: usize,
}

impl<A: LocalAlgorithm> LcaFromLocal<A> {
    /// Wraps `inner`, declaring the degree bound its inputs respect.
    pub fn new(inner: A, delta: usize) -> Self {
        LcaFromLocal { inner, delta }
    }

    /// Gathering radius on an id space of `n`.
    pub fn radius_on(&self, n: u64) -> usize {
        self.inner.radius(n)
    }
}

impl<A: LocalAlgorithm> LcaAlgorithm for LcaFromLocal<A> {
    fn id(&self) -> String {
        format!("{}-lca", self.inner.id())
    }

    fn probe_bound(&self, n: u64) -> usize {
        max_ball_size(self.delta, self.inner.radius(n))
    }

    fn answer(
        &self,
        probes: &mut ProbeSession<'_>,
        query: u64,
        _ctx: &mut QueryCtx<'_>,
    ) -> Result<Label, ModelError> {
        let radius = self.inner.radius(probes.id_space());
        let view = gather_ball_by_probes(probes, query, radius)?;
        self.inner.evaluate(&view)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::coloring::CycleColoring;
    use crate::algo::{verify_solution, ProblemId};
    use crate::graph::{generate, GraphSpec};
    use crate::models::{run_local, run_partree};

    #[test]
    fn probed_coloring_matches_the_message_passing_run() {
        let g = generate(&GraphSpec::Cycle { n: 40 }).unwrap();
        let local = run_local(&CycleColoring, &g).unwrap();

        let lca = LcaFromLocal::new(CycleColoring, 2);
        let probed = run_partree(&lca, &g, None).unwrap();

        assert_eq!(local.labels, probed.labels);
        let report = verify_solution(ProblemId::CycleColoring3, &g, &probed.labels).unwrap();
        assert!(report.feasible);
    }

    #[test]
    fn probe_count_is_the_ball_size_and_within_the_declared_bound() {
        let g = generate(&GraphSpec::Cycle { n: 40 }).unwrap();
        let lca = LcaFromLocal::new(CycleColoring, 2);
        let bound = lca.probe_bound(40);
        let run = run_partree(&lca, &g, Some(bound)).unwrap();
        for transcript in &run.transcripts {
            // On a cycle large enough, the radius-r ball has exactly 2r+1
            // vertices, one probe each.
            assert_eq!(transcript.total_probes(), bound);
        }
    }
}
