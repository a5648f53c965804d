//! Small probe routines: baselines for consistency sweeps, the bounded probe
//! trees compared by the indistinguishability experiments, and adversarial
//! probers that deliberately reach far from their query.

use crate::models::{
    gather_ball_by_probes, max_ball_size, Label, LcaAlgorithm, ModelError, ProbeSession, QueryCtx,
};
use std::collections::BTreeSet;

/// Answers a fixed label without probing.
#[derive(Debug, Clone, Copy)]
pub struct ConstantLabel(pub Label);

impl LcaAlgorithm for ConstantLabel {
    fn id(&self) -> String {
        format!("constant:{}", self.0)
    }

    fn probe_bound(&self, _n: u64) -> usize {
        0
    }

    fn answer(
        &self,
        _probes: &mut ProbeSession<'_>,
        _query: u64,
        _ctx: &mut QueryCtx<'_>,
    ) -> Result<Label, ModelError> {
        Ok(self.0)
    }
}

/// Answers the query's degree; one probe.
#[derive(Debug, Clone, Copy, Default)]
pub struct SelfDegree;

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

/// Gathers the radius-`radius` ball around the query and answers its size.
/// The probe tree never leaves the ball, so on graphs of girth above
/// `2·radius + 1` it cannot see any cycle.
#[derive(Debug, Clone, Copy)]
pub struct BallSizeTree {
    pub radius: usize,
    pub delta: usize,
}

impl LcaAlgorithm for BallSizeTree {
    fn id(&self) -> String {
        format!("ball-size:{}", self.radius)
    }

    fn probe_bound(&self, _n: u64) -> usize {
        max_ball_size(self.delta, self.radius)
    }

    fn answer(
        &self,
        probes: &mut ProbeSession<'_>,
        query: u64,
        _ctx: &mut QueryCtx<'_>,
    ) -> Result<Label, ModelError> {
        let view = gather_ball_by_probes(probes, query, self.radius)?;
        Ok(view.len() as Label)
    }
}

/// Walks greedily from the query: each step probes the smallest id seen but
/// not yet probed, up to `budget` probes. Answers the number of distinct ids
/// observed — on a triangle the walk closes after 3 probes, which is what
/// lets it tell short cycles from their double covers.
#[derive(Debug, Clone, Copy)]
pub struct WalkMinTree {
    pub budget: usize,
}

impl LcaAlgorithm for WalkMinTree {
    fn id(&self) -> String {
        format!("walk-min:{}", self.budget)
    }

    fn probe_bound(&self, _n: u64) -> usize {
        self.budget
    }

    fn answer(
        &self,
        probes: &mut ProbeSession<'_>,
        query: u64,
        _ctx: &mut QueryCtx<'_>,
    ) -> Result<Label, ModelError> {
        let mut seen: BTreeSet<u64> = BTreeSet::new();
        let mut probed: BTreeSet<u64> = BTreeSet::new();
        seen.insert(query);
        while probed.len() < self.budget {
            let Some(&next) = seen.difference(&probed).next() else {
                break;
            };
            let neighbors = probes.probe(next)?;
            probed.insert(next);
            seen.extend(neighbors);
        }
        Ok(seen.len() as Label)
    }
}

/// Probes `query + offset (mod n)` for each configured offset. With offsets
/// around `n/2` this is the worst case for simulations that only vouch for
/// ids near the query. Answers the total neighbor count observed.
#[derive(Debug, Clone)]
pub struct RemoteProber {
    pub offsets: Vec<u64>,
}

impl LcaAlgorithm for RemoteProber {
    fn id(&self) -> String {
        let offsets: Vec<String> = self.offsets.iter().map(u64::to_string).collect();
        format!("remote:{}", offsets.join(","))
    }

    fn probe_bound(&self, _n: u64) -> usize {
        self.offsets.len()
    }

    fn answer(
        &self,
        probes: &mut ProbeSession<'_>,
        query: u64,
        _ctx: &mut QueryCtx<'_>,
    ) -> Result<Label, ModelError> {
        let n = probes.id_space();
        let mut total = 0usize;
        for &offset in &self.offsets {
            total += probes.probe((query + offset) % n)?.len();
        }
        Ok(total as Label)
    }
}

/// Probes one fixed id regardless of the query and answers its degree. The
/// minimal prober whose behavior depends on the id assignment alone.
#[derive(Debug, Clone, Copy)]
pub struct FixedIdProber {
    pub target: u64,
}

impl LcaAlgorithm for FixedIdProber {
    fn id(&self) -> String {
        format!("fixed-id:{}", self.target)
    }

    fn probe_bound(&self, _n: u64) -> usize {
        1
    }

    fn answer(
        &self,
        probes: &mut ProbeSession<'_>,
        _query: u64,
        _ctx: &mut QueryCtx<'_>,
    ) -> Result<Label, ModelError> {
        Ok(probes.probe(self.target)?.len() as Label)
    }
}
