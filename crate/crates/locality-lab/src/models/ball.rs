//! Radius-`r` views.
//!
//! A [`BallView`] is the subgraph induced on all vertices within distance `r`
//! of a center: exactly what a vertex knows after `r` synchronous rounds, and
//! exactly what a ball-gathering probe algorithm can reconstruct. Edges
//! leaving the ball are not part of the view.

use super::{ModelError, ProbeSession};
use crate::graph::LabeledGraph;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

/// The induced ball of some radius around a center vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallView {
    center: u64,
    radius: usize,
    id_space: u64,
    /// Sorted members, each with its distance from the center and its induced
    /// (within-ball) sorted neighbor list.
    members: BTreeMap<u64, (usize, Vec<u64>)>,
}

impl BallView {
    pub fn center(&self) -> u64 {
        self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Size of the ambient identifier space (the graph order `n`), which the
    /// synchronous model assumes every node knows.
    pub fn id_space(&self) -> u64 {
        self.id_space
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.members.contains_key(&id)
    }

    /// Sorted ball members.
    pub fn vertices(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.keys().copied()
    }

    /// Within-ball neighbors of a member.
    pub fn neighbors(&self, id: u64) -> Option<&[u64]> {
        self.members.get(&id).map(|(_, adj)| adj.as_slice())
    }

    /// Distance from the center to a member.
    pub fn distance(&self, id: u64) -> Option<usize> {
        self.members.get(&id).map(|(d, _)| *d)
    }

    /// Within-ball degree of a member.
    pub fn degree(&self, id: u64) -> Option<usize> {
        self.neighbors(id).map(<[u64]>::len)
    }

    fn from_parts(
        center: u64,
        radius: usize,
        id_space: u64,
        dist: BTreeMap<u64, usize>,
        full_adj: &BTreeMap<u64, Vec<u64>>,
    ) -> Self {
        let members = dist
            .iter()
            .map(|(&v, &d)| {
                let induced: Vec<u64> = full_adj[&v]
                    .iter()
                    .copied()
                    .filter(|u| dist.contains_key(u))
                    .collect();
                (v, (d, induced))
            })
            .collect();
        BallView {
            center,
            radius,
            id_space,
            members,
        }
    }
}

/// Gathers the radius-`radius` ball around `center` directly from a graph.
pub fn collect_ball(g: &LabeledGraph, center: usize, radius: usize) -> BallView {
    assert!(center < g.n(), "center must be a vertex of g");
    let mut dist: BTreeMap<u64, usize> = BTreeMap::from([(center as u64, 0)]);
    let mut adj: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut frontier = vec![center];
    adj.insert(
        center as u64,
        g.neighbors(center).iter().map(|&v| v as u64).collect(),
    );
    for layer in 0..radius {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if let Entry::Vacant(slot) = dist.entry(w as u64) {
                    slot.insert(layer + 1);
                    adj.insert(w as u64, g.neighbors(w).iter().map(|&v| v as u64).collect());
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    BallView::from_parts(center as u64, radius, g.n() as u64, dist, &adj)
}

/// Gathers the ball through a probe session: breadth-first, each discovered
/// vertex probed exactly once, layers in ascending-id order. Costs exactly
/// (ball size) probes, which on degree-≤2 graphs is at most `2·radius + 1`.
pub fn gather_ball_by_probes(
    session: &mut ProbeSession<'_>,
    center: u64,
    radius: usize,
) -> Result<BallView, ModelError> {
    let id_space = session.id_space();
    let mut dist: BTreeMap<u64, usize> = BTreeMap::from([(center, 0)]);
    let mut adj: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut frontier = vec![center];
    for layer in 0..=radius {
        let mut next = Vec::new();
        for &u in &frontier {
            let neighbors = session.probe(u)?;
            for &w in &neighbors {
                if layer < radius && !dist.contains_key(&w) {
                    dist.insert(w, layer + 1);
                    next.push(w);
                }
            }
            adj.insert(u, neighbors);
        }
        next.sort_unstable();
        frontier = next;
    }
    Ok(BallView::from_parts(center, radius, id_space, dist, &adj))
}

/// Worst-case ball size at the given radius under a degree bound: the Moore
/// bound `1 + Δ·Σ_{i<r}(Δ−1)^i`, saturating instead of overflowing.
pub fn max_ball_size(delta: usize, radius: usize) -> usize {
    match delta {
        0 => 1,
        1 => {
            if radius == 0 {
                1
            } else {
                2
            }
        }
        2 => 2usize.saturating_mul(radius).saturating_add(1),
        _ => {
            let mut total = 1usize;
            let mut layer = delta;
            for _ in 0..radius {
                total = total.saturating_add(layer);
                layer = layer.saturating_mul(delta - 1);
            }
            total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};
    use crate::models::{GraphOracle, ProbeSession};

    #[test]
    fn ball_on_a_six_cycle_radius_one() {
        let g = generate(&GraphSpec::Cycle { n: 6 }).unwrap();
        let ball = collect_ball(&g, 0, 1);
        assert_eq!(ball.vertices().collect::<Vec<_>>(), vec![0, 1, 5]);
        // Induced edges only: {0,1} and {0,5}; the 1–2 and 4–5 edges leave
        // the ball.
        assert_eq!(ball.neighbors(0).unwrap(), &[1, 5]);
        assert_eq!(ball.neighbors(1).unwrap(), &[0]);
        assert_eq!(ball.distance(5), Some(1));
    }

    #[test]
    fn ball_covering_the_whole_cycle() {
        let g = generate(&GraphSpec::Cycle { n: 6 }).unwrap();
        let ball = collect_ball(&g, 2, 3);
        assert_eq!(ball.len(), 6);
        for v in 0..6u64 {
            assert_eq!(ball.degree(v), Some(2));
        }
        assert_eq!(ball.distance(5), Some(3));
    }

    #[test]
    fn probed_ball_matches_direct_ball_and_probe_count() {
        let g = generate(&GraphSpec::RandomRegular {
            n: 14,
            d: 3,
            seed: 2,
        })
        .unwrap();
        for radius in 0..3 {
            for v in 0..14 {
                let direct = collect_ball(&g, v, radius);
                let mut oracle = GraphOracle::new(&g);
                let mut session = ProbeSession::new(&mut oracle, None);
                let probed = gather_ball_by_probes(&mut session, v as u64, radius).unwrap();
                assert_eq!(probed, direct);
                // Each ball member is probed exactly once.
                assert_eq!(session.probes_used(), direct.len());
            }
        }
    }

    #[test]
    fn probe_cost_on_cycles_is_linear_in_radius() {
        let g = generate(&GraphSpec::Cycle { n: 64 }).unwrap();
        for radius in 0..6 {
            let mut oracle = GraphOracle::new(&g);
            let mut session = ProbeSession::new(&mut oracle, None);
            gather_ball_by_probes(&mut session, 10, radius).unwrap();
            assert_eq!(session.probes_used(), 2 * radius + 1);
            assert!(session.probes_used() <= max_ball_size(2, radius));
        }
    }

    #[test]
    fn moore_bounds() {
        assert_eq!(max_ball_size(2, 4), 9);
        assert_eq!(max_ball_size(3, 2), 10);
        assert_eq!(max_ball_size(0, 7), 1);
        assert_eq!(max_ball_size(1, 3), 2);
        // Saturates rather than overflowing.
        assert_eq!(max_ball_size(3, 200), usize::MAX);
    }
}
