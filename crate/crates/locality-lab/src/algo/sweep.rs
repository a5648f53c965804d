//! Maximal independent set and maximal matching on maximum-degree-2 graphs,
//! built as color-class sweeps on top of [`CycleColoring`]'s rounds.
//!
//! Once every vertex holds a proper color in `{0,1,2}`, each color class
//! acts in its own round(s) while the classes below it have already
//! committed, so simultaneous decisions never conflict.

use crate::algo::coloring::{coloring_rounds, final_color, CvProgram, CvState};
use crate::algo::rounds::{run_at_center, SyncProgram};
use crate::models::{BallView, Label, LocalAlgorithm, ModelError};

/// Rounds appended after the coloring for the independent-set sweep: one per
/// color class.
const MIS_SWEEP_ROUNDS: usize = 3;

/// Rounds appended after the coloring for the matching sweep: per color
/// class, two propose/respond repetitions (one per unit of degree), plus a
/// final settle round in which the last proposers adopt their acceptances.
const MATCHING_SWEEP_ROUNDS: usize = 3 * 2 * 2 + 1;

#[derive(Debug, Clone)]
struct MisState {
    cv: CvState,
    decided: Option<bool>,
}

struct MisProgram {
    cv: CvProgram,
}

impl SyncProgram for MisProgram {
    type State = MisState;

    fn round_count(&self) -> usize {
        self.cv.round_count() + MIS_SWEEP_ROUNDS
    }

    fn init(&self, view: &BallView, v: u64) -> Result<MisState, ModelError> {
        Ok(MisState {
            cv: self.cv.init(view, v)?,
            decided: None,
        })
    }

    fn step(
        &self,
        round: usize,
        v: u64,
        own: &MisState,
        neighbors: &[(u64, &MisState)],
    ) -> Result<MisState, ModelError> {
        let mut next = own.clone();
        if round < self.cv.round_count() {
            let cv_neighbors: Vec<(u64, &CvState)> =
                neighbors.iter().map(|&(w, s)| (w, &s.cv)).collect();
            next.cv = self.cv.step(round, v, &own.cv, &cv_neighbors)?;
            return Ok(next);
        }

        // Sweep round for one color class: join unless an already-joined
        // neighbor (necessarily of a lower class) blocks.
        let class = (round - self.cv.round_count()) as u64;
        if own.decided.is_none() && final_color(&own.cv) == class {
            let blocked = neighbors.iter().any(|(_, s)| s.decided == Some(true));
            next.decided = Some(!blocked);
        }
        Ok(next)
    }
}

/// Maximal independent set on maximum-degree-2 graphs: 3-color, then admit
/// color classes in increasing order. Answers are `1` for members and `0`
/// otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct MisOnCycles;

impl LocalAlgorithm for MisOnCycles {
    fn id(&self) -> String {
        "mis-cycle".into()
    }

    fn radius(&self, n: u64) -> usize {
        coloring_rounds(n) + MIS_SWEEP_ROUNDS
    }

    fn evaluate(&self, view: &BallView) -> Result<Label, ModelError> {
        let program = MisProgram {
            cv: CvProgram::for_id_space(view.id_space()),
        };
        let end = run_at_center(&program, view)?;
        Ok(Label::from(end.decided == Some(true)))
    }
}

#[derive(Debug, Clone)]
struct MatchingState {
    cv: CvState,
    partner: Option<u64>,
    proposal: Option<u64>,
}

struct MatchingProgram {
    cv: CvProgram,
}

impl SyncProgram for MatchingProgram {
    type State = MatchingState;

    fn round_count(&self) -> usize {
        self.cv.round_count() + MATCHING_SWEEP_ROUNDS
    }

    fn init(&self, view: &BallView, v: u64) -> Result<MatchingState, ModelError> {
        Ok(MatchingState {
            cv: self.cv.init(view, v)?,
            partner: None,
            proposal: None,
        })
    }

    fn step(
        &self,
        round: usize,
        v: u64,
        own: &MatchingState,
        neighbors: &[(u64, &MatchingState)],
    ) -> Result<MatchingState, ModelError> {
        let mut next = own.clone();
        if round < self.cv.round_count() {
            let cv_neighbors: Vec<(u64, &CvState)> =
                neighbors.iter().map(|&(w, s)| (w, &s.cv)).collect();
            next.cv = self.cv.step(round, v, &own.cv, &cv_neighbors)?;
            return Ok(next);
        }

        let of = |id: u64| -> &MatchingState {
            neighbors
                .iter()
                .find(|(w, _)| *w == id)
                .map(|(_, s)| *s)
                .expect("proposals address neighbors")
        };

        let sweep = round - self.cv.round_count();
        if sweep.is_multiple_of(2) {
            // Settle-and-propose round. First adopt an acceptance from the
            // previous respond round, then (during a class's own reps)
            // propose to the smallest visibly unmatched neighbor.
            if next.partner.is_none() {
                if let Some(target) = own.proposal {
                    if of(target).partner == Some(v) {
                        next.partner = Some(target);
                    }
                }
            }
            next.proposal = None;
            if sweep < MATCHING_SWEEP_ROUNDS - 1 {
                let class = (sweep / 4) as u64;
                if final_color(&own.cv) == class && next.partner.is_none() {
                    next.proposal = neighbors
                        .iter()
                        .find(|(_, s)| s.partner.is_none())
                        .map(|&(w, _)| w);
                }
            }
        } else {
            // Respond round: among this rep's proposers targeting us, accept
            // the smallest. Proposers are all of one color class, so no
            // vertex both proposes and responds in the same rep.
            if own.partner.is_none() {
                next.partner = neighbors
                    .iter()
                    .find(|(_, s)| s.proposal == Some(v))
                    .map(|&(w, _)| w);
            }
        }
        Ok(next)
    }
}

/// Maximal matching on maximum-degree-2 graphs: 3-color, then let each color
/// class propose to unmatched neighbors for as many repetitions as the
/// degree bound. Answers are the partner id, or `-1` for unmatched vertices.
#[derive(Debug, Clone, Copy, Default)]
pub struct MatchingOnCycles;

impl LocalAlgorithm for MatchingOnCycles {
    fn id(&self) -> String {
        "matching-cycle".into()
    }

    fn radius(&self, n: u64) -> usize {
        coloring_rounds(n) + MATCHING_SWEEP_ROUNDS
    }

    fn evaluate(&self, view: &BallView) -> Result<Label, ModelError> {
        let program = MatchingProgram {
            cv: CvProgram::for_id_space(view.id_space()),
        };
        let end = run_at_center(&program, view)?;
        Ok(match end.partner {
            Some(w) => w as Label,
            None => -1,
        })
    }
}
