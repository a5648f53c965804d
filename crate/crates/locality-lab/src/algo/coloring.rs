//! Deterministic 3-coloring of graphs of maximum degree 2 in the
//! message-passing model.
//!
//! Degree-2 graphs (disjoint unions of cycles, paths, and isolated vertices)
//! have no consistent orientation a vertex could compute locally, so the
//! computation runs on two overlaid pseudoforests instead: every vertex
//! points at its smallest neighbor in forest `lo` and at its largest in
//! forest `hi` (a degree-1 vertex points at its only neighbor in both).
//! Every edge is the out-edge of at least one endpoint in at least one
//! forest, so a labeling that is proper along both forests' parent edges is
//! proper on the whole graph.
//!
//! Per forest, colors start as vertex ids and shrink in three stages:
//!
//! 1. *Bit reduction*: a vertex with color `c` and parent color `p` recolors
//!    to `2i + bit_i(c)` where `i` is the lowest bit position where `c` and
//!    `p` differ. Parent/child colors stay distinct, and a palette of size
//!    `m` shrinks to `2⌈log₂ m⌉` per round, reaching 6 after O(log* n)
//!    rounds.
//! 2. *Shift + eliminate*: three times, every vertex adopts its parent's
//!    color (which makes all children of a vertex monochrome), then the
//!    highest remaining color class (5, then 4, then 3) recolors to the
//!    smallest color in `{0,1,2}` not used by its parent or children. The
//!    recoloring class is independent within the forest and, thanks to the
//!    shift, sees at most two distinct colors around itself.
//! 3. *Pair merge*: the two forest colors form a product color
//!    `3·lo + hi < 9`, proper on every edge; six final rounds eliminate
//!    classes 8 down to 3, each vertex picking a color unused by its at most
//!    two neighbors.
//!
//! Total round count is `O(log* n) + 12`, so the algorithm also runs as a
//! constant-probe per-vertex routine once wrapped by
//! [`crate::algo::LcaFromLocal`].

use std::collections::BTreeSet;

use crate::algo::rounds::{run_at_center, SyncProgram};
use crate::bits::ceil_log2;
use crate::models::{BallView, Label, LocalAlgorithm, ModelError};

/// One synchronous round of the coloring computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Round {
    /// Per-forest bit reduction against the parent's color.
    Reduce,
    /// Per-forest shift: adopt the parent's color.
    Shift,
    /// Per-forest recoloring of class `x` into `{0,1,2}`.
    EliminateForest(u64),
    /// Whole-graph recoloring of product-color class `x` into `{0,1,2}`.
    EliminateMerged(u64),
}

/// Round schedule for an id space of size `n`: enough reductions to push a
/// palette of `n` colors below 7, then the fixed shift/eliminate and merge
/// tails.
fn schedule(n: u64) -> Vec<Round> {
    let mut rounds = Vec::new();
    let mut palette = n.max(1);
    while palette > 6 {
        palette = 2 * u64::from(ceil_log2(palette));
        rounds.push(Round::Reduce);
    }
    for class in [5, 4, 3] {
        rounds.push(Round::Shift);
        rounds.push(Round::EliminateForest(class));
    }
    for class in (3..9).rev() {
        rounds.push(Round::EliminateMerged(class));
    }
    rounds
}

/// Per-vertex state threaded through the rounds. Parent pointers are fixed
/// at round 0; boundary vertices of a ball may record incomplete pointers,
/// but the cone discipline of the round engine keeps those from ever being
/// read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) struct CvState {
    parent_lo: Option<u64>,
    parent_hi: Option<u64>,
    color_lo: u64,
    color_hi: u64,
    merged: Option<u64>,
}

/// Final color of a fully reduced state.
pub(super) fn final_color(state: &CvState) -> u64 {
    state.merged.unwrap_or(3 * state.color_lo + state.color_hi)
}

/// `2i + bit_i(c)` for the lowest bit position `i` where `c` and `p` differ.
fn reduce(c: u64, p: u64) -> u64 {
    debug_assert_ne!(c, p, "parent edges always join distinct colors");
    let i = (c ^ p).trailing_zeros() as u64;
    2 * i + ((c >> i) & 1)
}

/// Smallest color in `{0,1,2}` avoiding `forbidden`; the callers guarantee
/// `forbidden` has at most two elements.
fn free_color(forbidden: &BTreeSet<u64>) -> u64 {
    (0..3)
        .find(|c| !forbidden.contains(c))
        .expect("at most two colors are ever forbidden")
}

/// Round count of the coloring on an id space of size `n`, shared with the
/// sweeps that extend it.
pub(super) fn coloring_rounds(n: u64) -> usize {
    schedule(n).len()
}

pub(super) struct CvProgram {
    rounds: Vec<Round>,
}

impl CvProgram {
    pub(super) fn for_id_space(n: u64) -> CvProgram {
        CvProgram {
            rounds: schedule(n),
        }
    }
}

impl SyncProgram for CvProgram {
    type State = CvState;

    fn round_count(&self) -> usize {
        self.rounds.len()
    }

    fn init(&self, view: &BallView, v: u64) -> Result<CvState, ModelError> {
        let neighbors = view.neighbors(v).expect("init is called on view members");
        if neighbors.len() > 2 {
            return Err(ModelError::Unsupported(format!(
                "vertex {v} has degree {}, but the coloring supports maximum degree 2",
                neighbors.len()
            )));
        }
        Ok(CvState {
            parent_lo: neighbors.first().copied(),
            parent_hi: neighbors.last().copied(),
            color_lo: v,
            color_hi: v,
            merged: None,
        })
    }

    fn step(
        &self,
        round: usize,
        v: u64,
        own: &CvState,
        neighbors: &[(u64, &CvState)],
    ) -> Result<CvState, ModelError> {
        let of = |id: u64| -> &CvState {
            neighbors
                .iter()
                .find(|(w, _)| *w == id)
                .map(|(_, s)| *s)
                .expect("parent pointers address neighbors")
        };
        let mut next = own.clone();
        match self.rounds[round] {
            Round::Reduce => {
                next.color_lo = match own.parent_lo {
                    Some(p) => reduce(own.color_lo, of(p).color_lo),
                    None => own.color_lo & 1,
                };
                next.color_hi = match own.parent_hi {
                    Some(p) => reduce(own.color_hi, of(p).color_hi),
                    None => own.color_hi & 1,
                };
            }
            Round::Shift => {
                if let Some(p) = own.parent_lo {
                    next.color_lo = of(p).color_lo;
                }
                if let Some(p) = own.parent_hi {
                    next.color_hi = of(p).color_hi;
                }
            }
            Round::EliminateForest(class) => {
                if own.color_lo == class {
                    let mut forbidden = BTreeSet::new();
                    if let Some(p) = own.parent_lo {
                        forbidden.insert(of(p).color_lo);
                    }
                    for (_, s) in neighbors {
                        if s.parent_lo == Some(v) {
                            forbidden.insert(s.color_lo);
                        }
                    }
                    next.color_lo = free_color(&forbidden);
                }
                if own.color_hi == class {
                    let mut forbidden = BTreeSet::new();
                    if let Some(p) = own.parent_hi {
                        forbidden.insert(of(p).color_hi);
                    }
                    for (_, s) in neighbors {
                        if s.parent_hi == Some(v) {
                            forbidden.insert(s.color_hi);
                        }
                    }
                    next.color_hi = free_color(&forbidden);
                }
            }
            Round::EliminateMerged(class) => {
                let mine = final_color(own);
                if mine == class {
                    let forbidden: BTreeSet<u64> =
                        neighbors.iter().map(|(_, s)| final_color(s)).collect();
                    next.merged = Some(free_color(&forbidden));
                } else {
                    next.merged = Some(mine);
                }
            }
        }
        Ok(next)
    }
}

/// Deterministic 3-coloring of maximum-degree-2 graphs, with round count
/// `O(log* n) + 12` in the id-space size `n`. Inputs containing a vertex of
/// degree 3 or more are rejected.
#[derive(Debug, Clone, Copy, Default)]
pub struct CycleColoring;

impl LocalAlgorithm for CycleColoring {
    fn id(&self) -> String {
        "cycle-coloring3".into()
    }

    fn radius(&self, n: u64) -> usize {
        coloring_rounds(n)
    }

    fn evaluate(&self, view: &BallView) -> Result<Label, ModelError> {
        let program = CvProgram::for_id_space(view.id_space());
        let end = run_at_center(&program, view)?;
        Ok(final_color(&end) as Label)
    }
}
