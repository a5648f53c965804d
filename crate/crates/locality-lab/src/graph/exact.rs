//! Exact optima by exhaustive search, for use as test oracles and in gap
//! reports. Both routines are exponential and guarded to desk scale.

use super::{GraphError, LabeledGraph};

/// Hard cap on vertex count for the exact searches below.
pub const EXACT_LIMIT: usize = 26;

/// Size of a maximum independent set, by branch and bound over bitmasks.
pub fn max_independent_set_size(g: &LabeledGraph) -> Result<usize, GraphError> {
    let n = g.n();
    if n > EXACT_LIMIT {
        return Err(GraphError::ExactSearchTooLarge {
            n,
            limit: EXACT_LIMIT,
        });
    }
    let masks: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    Ok(branch(all, &masks))
}

/// Branches on the lowest remaining vertex: either skip it, or take it and
/// drop its neighbourhood.
fn branch(remaining: u32, masks: &[u32]) -> usize {
    if remaining == 0 {
        return 0;
    }
    let v = remaining.trailing_zeros() as usize;
    let without = branch(remaining & !(1 << v), masks);
    let with = 1 + branch(remaining & !(1 << v) & !masks[v], masks);
    with.max(without)
}

/// Size of a maximum cut, by enumerating all 2^(n-1) bipartitions (vertex 0 is
/// pinned to one side).
pub fn max_cut_size(g: &LabeledGraph) -> Result<usize, GraphError> {
    let n = g.n();
    if n > EXACT_LIMIT {
        return Err(GraphError::ExactSearchTooLarge {
            n,
            limit: EXACT_LIMIT,
        });
    }
    let edges = g.edges();
    if n == 0 {
        return Ok(0);
    }
    let mut best = 0;
    for mask in 0..(1u32 << (n - 1)) {
        let mask = mask << 1; // vertex 0 stays on side 0
        let cut = edges
            .iter()
            .filter(|(u, v)| ((mask >> u) ^ (mask >> v)) & 1 == 1)
            .count();
        best = best.max(cut);
    }
    Ok(best)
}
