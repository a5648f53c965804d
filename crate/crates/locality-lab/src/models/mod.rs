//! Execution models for local graph algorithms.
//!
//! Three runtimes share one probe vocabulary:
//!
//! * [`run_local`] — synchronous rounds: after `r` rounds a vertex knows
//!   exactly its radius-`r` ball, so the model evaluates a pure function of
//!   that [`BallView`].
//! * [`run_partree`] — one independent probe tree per vertex with a hard
//!   probe budget and no shared state.
//! * [`run_lca`] — a centralised local algorithm answering a query stream,
//!   with an explicit seed and a bounded read-write state that persists
//!   between queries.
//!
//! A *probe* asks for the full neighbor list of one identifier. Budgets are
//! hard caps: exceeding one is an error attributed to the offending query,
//! never a silent truncation. A stateless LCA and a per-vertex probe-tree
//! family are the same object — [`run_partree`] accepts any stateless
//! [`LcaAlgorithm`] and runs it as the family `v ↦ T_v`, which is what makes
//! the equivalence between the two models checkable rather than folklore.

mod ball;
mod run;

pub use ball::{collect_ball, gather_ball_by_probes, max_ball_size, BallView};
pub use run::{
    check_consistency, run_lca, run_local, run_partree, statelessify, ConsistencyReport, LcaRun,
    LocalRun, PartreeRun, Statelessified,
};

use crate::graph::LabeledGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Output label of an algorithm at one vertex. Interpretation is per problem:
/// colors are `0..=delta`, set membership is `0/1`, matching answers are the
/// partner id or `-1` for unmatched.
pub type Label = i64;

/// Errors raised by the model runtimes and the algorithms they drive.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("probe id {id} out of range for id space of size {id_space}")]
    ProbeOutOfRange { id: u64, id_space: u64 },
    #[error("probe budget of {budget} exhausted")]
    ProbeBudgetExceeded { budget: usize },
    #[error("query {query} out of range for id space of size {id_space}")]
    BadQuery { query: u64, id_space: u64 },
    #[error("stateless handle attempted a state access")]
    StateAccess,
    #[error("state write of {attempted_bits} bits exceeds declared capacity of {capacity_bits}")]
    StateCapacity {
        capacity_bits: usize,
        attempted_bits: usize,
    },
    #[error("algorithm `{id}` declares state and cannot run as a probe-tree family")]
    StatefulPartree { id: String },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("labeling has {got} entries but the graph has {expected} vertices")]
    LabelingMismatch { expected: usize, got: usize },
    #[error("probe rejected by the simulated world")]
    WorldProbeRejected,
    #[error("query {query} failed: {source}")]
    QueryFailed {
        query: u64,
        #[source]
        source: Box<ModelError>,
    },
}

impl ModelError {
    pub(crate) fn at_query(self, query: u64) -> ModelError {
        ModelError::QueryFailed {
            query,
            source: Box::new(self),
        }
    }
}

/// One probe and its answer, both in the prober's id space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub probed: u64,
    pub neighbors: Vec<u64>,
}

/// The ordered probe/answer log of a single execution.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeTranscript {
    pub entries: Vec<ProbeEntry>,
}

impl ProbeTranscript {
    pub fn total_probes(&self) -> usize {
        self.entries.len()
    }

    /// Canonical byte encoding, used for witness hashing and distribution
    /// keys. Probes and answers appear in execution order.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for entry in &self.entries {
            out.extend_from_slice(&entry.probed.to_le_bytes());
            out.extend_from_slice(&(entry.neighbors.len() as u64).to_le_bytes());
            for &v in &entry.neighbors {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }
}

/// Anything that can answer probes: a real graph, or a simulated world.
pub trait ProbeSource {
    /// Size of the identifier space (`n` for graphs, `N` for worlds).
    fn id_space(&self) -> u64;
    /// Full sorted neighbor list of `id`.
    fn fetch(&mut self, id: u64) -> Result<Vec<u64>, ModelError>;
}

/// Probe adapter over a [`LabeledGraph`].
pub struct GraphOracle<'a> {
    graph: &'a LabeledGraph,
}

impl<'a> GraphOracle<'a> {
    pub fn new(graph: &'a LabeledGraph) -> Self {
        GraphOracle { graph }
    }
}

impl ProbeSource for GraphOracle<'_> {
    fn id_space(&self) -> u64 {
        self.graph.n() as u64
    }

    fn fetch(&mut self, id: u64) -> Result<Vec<u64>, ModelError> {
        if id >= self.id_space() {
            return Err(ModelError::ProbeOutOfRange {
                id,
                id_space: self.id_space(),
            });
        }
        Ok(self
            .graph
            .neighbors(id as usize)
            .iter()
            .map(|&v| v as u64)
            .collect())
    }
}

/// A budgeted, transcript-recording probe session handed to algorithms.
pub struct ProbeSession<'a> {
    source: &'a mut dyn ProbeSource,
    budget: Option<usize>,
    transcript: ProbeTranscript,
}

impl<'a> ProbeSession<'a> {
    pub fn new(source: &'a mut dyn ProbeSource, budget: Option<usize>) -> Self {
        ProbeSession {
            source,
            budget,
            transcript: ProbeTranscript::default(),
        }
    }

    /// Size of the ambient id space (assumed known to every node).
    pub fn id_space(&self) -> u64 {
        self.source.id_space()
    }

    pub fn probes_used(&self) -> usize {
        self.transcript.entries.len()
    }

    /// Issues one probe. Checks the budget before touching the source, so a
    /// budget violation never leaks information.
    pub fn probe(&mut self, id: u64) -> Result<Vec<u64>, ModelError> {
        if let Some(budget) = self.budget {
            if self.transcript.entries.len() >= budget {
                return Err(ModelError::ProbeBudgetExceeded { budget });
            }
        }
        let neighbors = self.source.fetch(id)?;
        self.transcript.entries.push(ProbeEntry {
            probed: id,
            neighbors: neighbors.clone(),
        });
        Ok(neighbors)
    }

    pub fn transcript(&self) -> &ProbeTranscript {
        &self.transcript
    }

    pub fn into_transcript(self) -> ProbeTranscript {
        self.transcript
    }
}

/// A seed presented as an explicit bit string, so declared seed lengths can be
/// audited exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedBits {
    bytes: Vec<u8>,
    bit_len: usize,
}

impl SeedBits {
    pub fn empty() -> Self {
        SeedBits {
            bytes: Vec::new(),
            bit_len: 0,
        }
    }

    /// Draws exactly `bit_len` random bits; unused high bits of the last byte
    /// are zeroed so equal bit strings have equal encodings.
    pub fn random(rng: &mut impl rand::RngCore, bit_len: usize) -> Self {
        let mut bytes = vec![0u8; bit_len.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        Self::mask_tail(&mut bytes, bit_len);
        SeedBits { bytes, bit_len }
    }

    /// Interprets `index` as a little-endian `bit_len`-bit string; used when
    /// enumerating an entire seed space.
    pub fn from_index(index: u64, bit_len: usize) -> Self {
        assert!(bit_len <= 64, "indexed seeds cover at most 64 bits");
        let mut bytes = index.to_le_bytes()[..bit_len.div_ceil(8)].to_vec();
        Self::mask_tail(&mut bytes, bit_len);
        SeedBits { bytes, bit_len }
    }

    fn mask_tail(bytes: &mut [u8], bit_len: usize) {
        if !bit_len.is_multiple_of(8) {
            if let Some(last) = bytes.last_mut() {
                *last &= (1u8 << (bit_len % 8)) - 1;
            }
        }
    }

    pub fn bit_len(&self) -> usize {
        self.bit_len
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }
}

/// Bounded read-write state for state-full LCAs. Capacity is declared in bits
/// and enforced on every write.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateBuffer {
    capacity_bits: usize,
    used_bits: usize,
    bytes: Vec<u8>,
}

/// A point-in-time copy of an LCA's state, as recorded in state traces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub bytes: Vec<u8>,
    pub used_bits: usize,
}

impl StateBuffer {
    pub fn new(capacity_bits: usize) -> Self {
        StateBuffer {
            capacity_bits,
            used_bits: 0,
            bytes: Vec::new(),
        }
    }

    pub fn capacity_bits(&self) -> usize {
        self.capacity_bits
    }

    pub fn used_bits(&self) -> usize {
        self.used_bits
    }

    pub fn is_empty(&self) -> bool {
        self.used_bits == 0
    }

    pub fn read(&self) -> &[u8] {
        &self.bytes
    }

    /// Replaces the state with `bits` bits taken from `bytes`.
    pub fn write(&mut self, bytes: &[u8], bits: usize) -> Result<(), ModelError> {
        if bits > self.capacity_bits {
            return Err(ModelError::StateCapacity {
                capacity_bits: self.capacity_bits,
                attempted_bits: bits,
            });
        }
        assert_eq!(
            bytes.len(),
            bits.div_ceil(8),
            "state payload length must match the declared bit count"
        );
        self.bytes = bytes.to_vec();
        self.used_bits = bits;
        Ok(())
    }

    pub fn snapshot(&self) -> StateSnapshot {
        StateSnapshot {
            bytes: self.bytes.clone(),
            used_bits: self.used_bits,
        }
    }

    pub fn restore(&mut self, snap: &StateSnapshot) {
        self.bytes = snap.bytes.clone();
        self.used_bits = snap.used_bits;
    }
}

/// Seed and state as visible to one query of an LCA. Stateless invocations
/// carry no state slot, and any attempted access is an error.
pub struct QueryCtx<'a> {
    seed: &'a SeedBits,
    state: Option<&'a mut StateBuffer>,
}

impl<'a> QueryCtx<'a> {
    pub fn stateless(seed: &'a SeedBits) -> Self {
        QueryCtx { seed, state: None }
    }

    pub fn with_state(seed: &'a SeedBits, state: &'a mut StateBuffer) -> Self {
        QueryCtx {
            seed,
            state: Some(state),
        }
    }

    pub fn seed(&self) -> &SeedBits {
        self.seed
    }

    pub fn state(&mut self) -> Result<&mut StateBuffer, ModelError> {
        self.state.as_deref_mut().ok_or(ModelError::StateAccess)
    }

    pub fn has_state(&self) -> bool {
        self.state.is_some()
    }
}

/// Persistent execution context of an LCA across a query stream.
pub struct LcaContext {
    pub seed: SeedBits,
    pub state: StateBuffer,
    /// Per-query probe cap; `None` defers to the algorithm's declared bound.
    pub probe_budget: Option<usize>,
}

impl LcaContext {
    /// A context sized for `alg` on an id space of `n`, with the given seed.
    pub fn for_algorithm(alg: &dyn LcaAlgorithm, n: u64, seed: SeedBits) -> Self {
        LcaContext {
            seed,
            state: StateBuffer::new(alg.state_bits(n)),
            probe_budget: None,
        }
    }
}

/// A centralised local algorithm: answers per-vertex queries through probes,
/// optionally consulting a seed and a bounded state.
///
/// Implementations must answer deterministically given (probe answers, seed,
/// state); all randomness must come from the seed. A handle with
/// `state_bits == 0` is stateless and doubles as a per-vertex probe-tree
/// family.
pub trait LcaAlgorithm: Send + Sync {
    /// Stable identifier used in registries and reports.
    fn id(&self) -> String;

    /// Declared worst-case probes per query on an id space of `n`.
    fn probe_bound(&self, n: u64) -> usize;

    /// Declared state capacity in bits (0 = stateless).
    fn state_bits(&self, _n: u64) -> usize {
        0
    }

    /// Declared seed length in bits.
    fn seed_bits(&self, _n: u64) -> usize {
        0
    }

    /// Answers one query through the session's probe interface.
    fn answer(
        &self,
        probes: &mut ProbeSession<'_>,
        query: u64,
        ctx: &mut QueryCtx<'_>,
    ) -> Result<Label, ModelError>;
}

/// A synchronous-rounds algorithm: a pure function of the radius-`r` view.
pub trait LocalAlgorithm: Send + Sync {
    /// Stable identifier used in registries and reports.
    fn id(&self) -> String;

    /// Declared round count on a graph of `n` vertices.
    fn radius(&self, n: u64) -> usize;

    /// Computes the label of `view.center` from its ball alone.
    fn evaluate(&self, view: &BallView) -> Result<Label, ModelError>;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};

    #[test]
    fn sessions_record_and_enforce_budgets() {
        let g = generate(&GraphSpec::Cycle { n: 5 }).unwrap();
        let mut oracle = GraphOracle::new(&g);
        let mut session = ProbeSession::new(&mut oracle, Some(2));
        assert_eq!(session.id_space(), 5);
        assert_eq!(session.probe(0).unwrap(), vec![1, 4]);
        assert_eq!(session.probe(3).unwrap(), vec![2, 4]);
        assert!(matches!(
            session.probe(1),
            Err(ModelError::ProbeBudgetExceeded { budget: 2 })
        ));
        let transcript = session.into_transcript();
        assert_eq!(transcript.total_probes(), 2);
        assert_eq!(transcript.entries[1].probed, 3);
    }

    #[test]
    fn out_of_range_probes_are_rejected() {
        let g = generate(&GraphSpec::Cycle { n: 4 }).unwrap();
        let mut oracle = GraphOracle::new(&g);
        let mut session = ProbeSession::new(&mut oracle, None);
        assert!(matches!(
            session.probe(4),
            Err(ModelError::ProbeOutOfRange { id: 4, id_space: 4 })
        ));
        // The failed probe is not charged against the transcript.
        assert_eq!(session.probes_used(), 0);
    }

    #[test]
    fn state_buffer_enforces_capacity() {
        let mut state = StateBuffer::new(9);
        state.write(&[0xff, 0x01], 9).unwrap();
        assert_eq!(state.used_bits(), 9);
        assert!(matches!(
            state.write(&[0, 0], 10),
            Err(ModelError::StateCapacity {
                capacity_bits: 9,
                attempted_bits: 10
            })
        ));
        let snap = state.snapshot();
        state.write(&[0x00], 3).unwrap();
        state.restore(&snap);
        assert_eq!(state.read(), &[0xff, 0x01]);
    }

    #[test]
    fn stateless_ctx_rejects_state_access() {
        let seed = SeedBits::empty();
        let mut ctx = QueryCtx::stateless(&seed);
        assert!(matches!(ctx.state(), Err(ModelError::StateAccess)));
    }

    #[test]
    fn seed_bits_mask_unused_tail() {
        let a = SeedBits::from_index(0b1111_1111, 5);
        assert_eq!(a.bytes(), &[0b0001_1111]);
        assert_eq!(a.bit_len(), 5);
        let empty = SeedBits::empty();
        assert_eq!(empty.bit_len(), 0);
        assert_eq!(empty.to_hex(), "");
    }

    #[test]
    fn canonical_bytes_distinguish_transcripts() {
        let t1 = ProbeTranscript {
            entries: vec![ProbeEntry {
                probed: 1,
                neighbors: vec![2, 3],
            }],
        };
        let t2 = ProbeTranscript {
            entries: vec![ProbeEntry {
                probed: 1,
                neighbors: vec![2],
            }],
        };
        assert_ne!(t1.canonical_bytes(), t2.canonical_bytes());
    }
}
