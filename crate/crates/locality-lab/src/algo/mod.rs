//! Algorithms and their verifiers.
//!
//! The message-passing algorithms ([`CycleColoring`], [`MisOnCycles`],
//! [`MatchingOnCycles`]) are built on a shared synchronous-round engine and
//! double as probe routines through [`LcaFromLocal`]. The remaining types
//! are probe routines natively: baselines, bounded probe trees, adversarial
//! probers, and the two-path leader-election pair that separates read-write
//! state from statelessness.

mod basic;
mod coloring;
mod from_local;
mod rounds;
mod sweep;
mod two_path;
mod verify;

pub use basic::{
    BallSizeTree, ConstantLabel, FixedIdProber, RemoteProber, SelfDegree, WalkMinTree,
};
pub use coloring::CycleColoring;
pub use from_local::LcaFromLocal;
pub use sweep::{MatchingOnCycles, MisOnCycles};
pub use two_path::{worst_case_two_path, StatefulTwoPathLeader, TwoPathScan};
pub use verify::{verify_solution, ProblemId, VerifyReport};

use crate::models::{LcaAlgorithm, LocalAlgorithm};

/// Instantiates a message-passing algorithm from its registry spec.
///
/// Recognized specs: `cycle-coloring3`, `mis-cycle`, `matching-cycle`.
pub fn make_local(spec: &str) -> Result<Box<dyn LocalAlgorithm>, String> {
    match spec {
        "cycle-coloring3" => Ok(Box::new(CycleColoring)),
        "mis-cycle" => Ok(Box::new(MisOnCycles)),
        "matching-cycle" => Ok(Box::new(MatchingOnCycles)),
        other => Err(format!("unknown message-passing algorithm `{other}`")),
    }
}

/// Instantiates a probe routine from its registry spec.
///
/// Recognized specs:
///
/// - `cycle-coloring3`, `mis-cycle`, `matching-cycle` — the message-passing
///   algorithms run through ball gathering (degree bound 2),
/// - `two-path-leader-stateful`, `two-path-leader-scan`,
/// - `self-degree`, `constant:<label>`,
/// - `ball-size:<radius>:<delta>`, `walk-min:<budget>`,
/// - `remote:<offset>,<offset>,...`, `fixed-id:<target>`.
pub fn make_lca(spec: &str) -> Result<Box<dyn LcaAlgorithm>, String> {
    match spec {
        "cycle-coloring3" => return Ok(Box::new(LcaFromLocal::new(CycleColoring, 2))),
        "mis-cycle" => return Ok(Box::new(LcaFromLocal::new(MisOnCycles, 2))),
        "matching-cycle" => return Ok(Box::new(LcaFromLocal::new(MatchingOnCycles, 2))),
        "two-path-leader-stateful" => return Ok(Box::new(StatefulTwoPathLeader)),
        "two-path-leader-scan" => return Ok(Box::new(TwoPathScan)),
        "self-degree" => return Ok(Box::new(SelfDegree)),
        _ => {}
    }
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| format!("unknown probe routine `{spec}`"))?;
    let parse = |field: &str, what: &str| -> Result<u64, String> {
        field
            .parse::<u64>()
            .map_err(|e| format!("bad {what} in `{spec}`: {e}"))
    };
    match kind {
        "constant" => {
            let label = args
                .parse::<i64>()
                .map_err(|e| format!("bad label in `{spec}`: {e}"))?;
            Ok(Box::new(ConstantLabel(label)))
        }
        "ball-size" => {
            let (radius, delta) = args
                .split_once(':')
                .ok_or_else(|| format!("`{spec}` wants ball-size:<radius>:<delta>"))?;
            Ok(Box::new(BallSizeTree {
                radius: parse(radius, "radius")? as usize,
                delta: parse(delta, "delta")? as usize,
            }))
        }
        "walk-min" => Ok(Box::new(WalkMinTree {
            budget: parse(args, "budget")? as usize,
        })),
        "remote" => {
            let offsets = args
                .split(',')
                .map(|o| parse(o, "offset"))
                .collect::<Result<Vec<u64>, String>>()?;
            Ok(Box::new(RemoteProber { offsets }))
        }
        "fixed-id" => Ok(Box::new(FixedIdProber {
            target: parse(args, "target")?,
        })),
        other => Err(format!("unknown probe routine kind `{other}`")),
    }
}
