//! Leader election on two disjoint 3-vertex paths, the separation example
//! for read-write state.
//!
//! The instance class has exactly two degree-2 vertices (the path middles),
//! and the task is to answer `1` on exactly one vertex. With state, one
//! probe per query suffices: the first middle queried records itself as the
//! leader in `O(log n)` shared bits, and every later query compares against
//! the record. Without state, answers must be a pure function of the query
//! and the graph, so a routine must locate a canonical middle; scanning ids
//! upward costs as many probes as the position of the second middle, which
//! an adversarial id assignment pushes to `n`.

use crate::bits::ceil_log2;
use crate::graph::{GraphError, LabeledGraph};
use crate::models::{Label, LcaAlgorithm, ModelError, ProbeSession, QueryCtx};

/// Width in bits of the leader record for an id space of `n`.
fn record_bits(n: u64) -> usize {
    ceil_log2(n.max(2)) as usize
}

/// State-full leader election: 1 probe per query, `⌈log₂ n⌉` state bits.
///
/// The shared state is empty until the first degree-2 query arrives; that
/// query writes its own id and answers `1`. Every other query answers `0`,
/// so each execution order elects exactly one leader (which order it is may
/// differ between orders — the routine is deliberately not order-oblivious).
#[derive(Debug, Clone, Copy, Default)]
pub struct StatefulTwoPathLeader;

impl LcaAlgorithm for StatefulTwoPathLeader {
    fn id(&self) -> String {
        "two-path-leader-stateful".into()
    }

    fn probe_bound(&self, _n: u64) -> usize {
        1
    }

    fn state_bits(&self, n: u64) -> usize {
        record_bits(n)
    }

    fn answer(
        &self,
        probes: &mut ProbeSession<'_>,
        query: u64,
        ctx: &mut QueryCtx<'_>,
    ) -> Result<Label, ModelError> {
        let n = probes.id_space();
        let neighbors = probes.probe(query)?;
        if neighbors.len() != 2 {
            return Ok(0);
        }
        let state = ctx.state()?;
        if state.is_empty() {
            let bits = record_bits(n);
            let bytes = &query.to_le_bytes()[..bits.div_ceil(8)];
            state.write(bytes, bits)?;
            return Ok(1);
        }
        let mut stored = [0u8; 8];
        stored[..state.read().len()].copy_from_slice(state.read());
        Ok(Label::from(u64::from_le_bytes(stored) == query))
    }
}

/// Stateless baseline: answers are a pure function of query and graph, and
/// the leader is the smallest-id middle. The scan probes ids upward until it
/// has seen both middles, so its cost is the position of the second middle.
#[derive(Debug, Clone, Copy, Default)]
pub struct TwoPathScan;

impl LcaAlgorithm for TwoPathScan {
    fn id(&self) -> String {
        "two-path-leader-scan".into()
    }

    fn probe_bound(&self, n: u64) -> usize {
        n as usize
    }

    fn answer(
        &self,
        probes: &mut ProbeSession<'_>,
        query: u64,
        _ctx: &mut QueryCtx<'_>,
    ) -> Result<Label, ModelError> {
        let mut middles = Vec::new();
        for id in 0..probes.id_space() {
            if probes.probe(id)?.len() == 2 {
                middles.push(id);
                if middles.len() == 2 {
                    break;
                }
            }
        }
        match middles.as_slice() {
            [leader, _] => Ok(Label::from(query == *leader)),
            _ => Err(ModelError::Unsupported(
                "input is not a pair of 3-vertex paths".into(),
            )),
        }
    }
}

/// The two-path instance that maximizes [`TwoPathScan`]'s cost: both middles
/// carry the largest ids, so the scan probes all `n` vertices.
pub fn worst_case_two_path(n: usize) -> Result<LabeledGraph, GraphError> {
    if n < 6 {
        return Err(GraphError::InvalidParameter(format!(
            "two-path instances need at least 6 vertices, got {n}"
        )));
    }
    let edges = [(0, n - 2), (1, n - 2), (2, n - 1), (3, n - 1)];
    LabeledGraph::from_edges(n, 2, &edges)
}
