//! Synchronous-round simulation restricted to a ball view.
//!
//! A [`SyncProgram`] is a message-passing computation in which every vertex
//! holds a state and all vertices update simultaneously from their own state
//! and their neighbors' states. Simulating `r` rounds inside a radius-`r`
//! ball yields the center's final state exactly: the round-`j` state of a
//! vertex at distance `d` depends only on round-`j-1` states at distance
//! `d + 1`, so the cone of vertices whose states remain computable shrinks by
//! one layer per round and still covers the center after round `r`.

use std::collections::BTreeMap;

use crate::models::{BallView, ModelError};

/// One vertex-synchronous computation, described by its per-round transition.
pub(crate) trait SyncProgram {
    type State: Clone;

    /// Total number of synchronous rounds.
    fn round_count(&self) -> usize;

    /// Round-0 state of `v`, computed from information local to `v`.
    ///
    /// For vertices on the ball boundary the induced neighbor list may be
    /// incomplete, so anything derived from it here must only ever be read
    /// back from vertices strictly inside the ball (which `run_at_center`
    /// guarantees for every round past the first).
    fn init(&self, view: &BallView, v: u64) -> Result<Self::State, ModelError>;

    /// State of `v` after round `round`, given its own and its neighbors'
    /// previous states. `neighbors` is sorted by id and complete: the engine
    /// only calls this while `v`'s full neighborhood is visible.
    fn step(
        &self,
        round: usize,
        v: u64,
        own: &Self::State,
        neighbors: &[(u64, &Self::State)],
    ) -> Result<Self::State, ModelError>;
}

/// Runs `program` to completion inside `view` and returns the center's state.
///
/// Requires `view.radius() >= round_count()`: each round consumes one layer
/// of the ball, and a vertex's update is computed only while its complete
/// neighborhood is still visible.
pub(crate) fn run_at_center<P: SyncProgram>(
    program: &P,
    view: &BallView,
) -> Result<P::State, ModelError> {
    let rounds = program.round_count();
    if view.radius() < rounds {
        return Err(ModelError::Unsupported(format!(
            "ball of radius {} cannot host {rounds} rounds",
            view.radius()
        )));
    }

    let mut states: BTreeMap<u64, P::State> = BTreeMap::new();
    for v in view.vertices() {
        states.insert(v, program.init(view, v)?);
    }

    for round in 0..rounds {
        // After this round, states stay trustworthy up to this distance.
        let keep = rounds - round - 1;
        let mut next: BTreeMap<u64, P::State> = BTreeMap::new();
        for (&v, own) in &states {
            if view.distance(v).expect("state holder is in the view") > keep {
                continue;
            }
            let neighbor_states: Vec<(u64, &P::State)> = view
                .neighbors(v)
                .expect("state holder is in the view")
                .iter()
                .map(|&w| (w, states.get(&w).expect("neighbor inside the cone")))
                .collect();
            next.insert(v, program.step(round, v, own, &neighbor_states)?);
        }
        states = next;
    }

    Ok(states
        .remove(&view.center())
        .expect("center survives every round"))
}
