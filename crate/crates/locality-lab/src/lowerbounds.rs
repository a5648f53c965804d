//! Indistinguishability experiments on perturbed instance pairs.
//!
//! The gadget: from a base graph `G` on `n` vertices build two instances on
//! the shared identifier set `[2n]` — `A`, two disjoint copies of `G`, and
//! `B`, its bipartite double cover — and perturb both by swapping the ids
//! `i ↔ i+n` independently per pair with probability ½. Any probe tree whose
//! transcript stays cycle-free (probe budget below half the girth) sees
//! exactly the same transcript distribution on both, yet the two instances
//! have very different independent sets, cuts, and chromatic numbers. The
//! comparison here is exact: integer outcome counts over all `2ⁿ` swap
//! masks, no tolerances.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::algo::{BallSizeTree, ConstantLabel, SelfDegree, WalkMinTree};
use crate::graph::{
    double_cover, max_cut_size, max_independent_set_size, two_copies, GraphError, LabeledGraph,
};
use crate::models::{
    max_ball_size, GraphOracle, Label, LcaAlgorithm, ModelError, ProbeSession, ProbeTranscript,
    QueryCtx, SeedBits,
};
use crate::par;
use crate::seeding::stream_rng;
use rand::Rng;

/// Largest pair count enumerated exactly (`2^12` swap outcomes).
pub const EXACT_PAIR_LIMIT: usize = 12;

/// Largest instance (on `2n` vertices) whose optima are brute-forced.
pub const GAP_VERTEX_LIMIT: usize = 24;

const SAMPLE_BLOCKS: u64 = 16;

#[derive(Debug, Error)]
pub enum LowerBoundError {
    #[error("scale guard: {0}")]
    Scale(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The two instances on the shared id set `[2n]`, with `v ↦ (v, v+n)`.
#[derive(Debug, Clone)]
pub struct InstancePair {
    pub two_copies: LabeledGraph,
    pub double_cover: LabeledGraph,
    /// Number of swappable pairs, i.e. `n` of the base graph.
    pub pairs: usize,
}

/// Builds the disjoint-copies / double-cover pair for a base graph.
pub fn build_pair(g: &LabeledGraph) -> InstancePair {
    InstancePair {
        two_copies: two_copies(g),
        double_cover: double_cover(g),
        pairs: g.n(),
    }
}

/// The `2ⁿ` identifier perturbations: swap `i ↔ i+n` per set bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerturbationSpace {
    pairs: usize,
}

impl PerturbationSpace {
    pub fn new(pairs: usize) -> Self {
        assert!(pairs < 64, "mask is a u64");
        PerturbationSpace { pairs }
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn outcomes(&self) -> u64 {
        1 << self.pairs
    }

    /// The id assignment selected by `mask`, as a relabelling table on `2n`.
    pub fn assignment(&self, mask: u64) -> Vec<usize> {
        let n = self.pairs;
        let mut table: Vec<usize> = (0..2 * n).collect();
        for i in 0..n {
            if mask >> i & 1 == 1 {
                table.swap(i, i + n);
            }
        }
        table
    }
}

/// How to traverse the perturbation space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistributionMode {
    /// All `2ⁿ` outcomes, exact integer counts.
    Exact,
    /// Masks drawn uniformly; counts are empirical.
    Sampled { samples: u64, seed: u64 },
}

/// One support point: how often the transcript occurred, plus one decoded
/// representative (all occurrences decode identically).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptStat {
    pub count: u64,
    pub witness: ProbeTranscript,
}

/// Distribution of a probe tree's transcript over the perturbation space,
/// keyed by the transcript's canonical byte encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptDistribution {
    pub total: u64,
    pub exact: bool,
    pub support: BTreeMap<Vec<u8>, TranscriptStat>,
}

impl TranscriptDistribution {
    /// Probability of one transcript as an exact ratio `(count, total)`.
    pub fn mass(&self, key: &[u8]) -> (u64, u64) {
        (self.support.get(key).map_or(0, |s| s.count), self.total)
    }

    /// Exact distribution equality: same total, same counts on every key.
    pub fn same_exact(&self, other: &TranscriptDistribution) -> bool {
        self.total == other.total
            && self.support.len() == other.support.len()
            && self
                .support
                .iter()
                .zip(&other.support)
                .all(|((ka, sa), (kb, sb))| ka == kb && sa.count == sb.count)
    }

    /// First transcript whose mass differs, in canonical key order.
    pub fn first_difference<'a>(
        &'a self,
        other: &'a TranscriptDistribution,
    ) -> Option<(&'a Vec<u8>, &'a ProbeTranscript)> {
        let keys = self.support.keys().chain(other.support.keys());
        for key in keys {
            if self.mass(key) != other.mass(key) {
                let witness = self
                    .support
                    .get(key)
                    .or_else(|| other.support.get(key))
                    .map(|s| &s.witness)
                    .expect("key came from one of the supports");
                return Some((key, witness));
            }
        }
        None
    }

    /// Statistical distance to another distribution over the same space.
    pub fn tv_distance(&self, other: &TranscriptDistribution) -> f64 {
        let mut sum = 0.0;
        for key in self.support.keys().chain(other.support.keys()) {
            let (a, ta) = self.mass(key);
            let (b, tb) = other.mass(key);
            let diff = a as f64 / ta as f64 - b as f64 / tb as f64;
            // Chained iteration visits shared keys twice; halve twice.
            sum += diff.abs()
                / if self.support.contains_key(key) && other.support.contains_key(key) {
                    4.0
                } else {
                    2.0
                };
        }
        sum
    }
}

fn run_on_assignment(
    tree: &dyn LcaAlgorithm,
    g: &LabeledGraph,
    v: u64,
    assignment: &[usize],
    budget: usize,
) -> Result<(ProbeTranscript, Label), LowerBoundError> {
    let perturbed = g.relabel(assignment)?;
    let mut oracle = GraphOracle::new(&perturbed);
    let mut session = ProbeSession::new(&mut oracle, Some(budget));
    let seed = SeedBits::empty();
    let mut ctx = QueryCtx::stateless(&seed);
    let label = tree
        .answer(&mut session, v, &mut ctx)
        .map_err(|e| e.at_query(v))?;
    Ok((session.into_transcript(), label))
}

/// Distribution of `tree`'s transcript at query `v` over the perturbations
/// of `g`. The probe budget defaults to the tree's declared bound.
pub fn transcript_distribution(
    tree: &dyn LcaAlgorithm,
    g: &LabeledGraph,
    v: u64,
    space: &PerturbationSpace,
    budget: Option<usize>,
    mode: DistributionMode,
) -> Result<TranscriptDistribution, LowerBoundError> {
    if g.n() != 2 * space.pairs() {
        return Err(LowerBoundError::Scale(format!(
            "graph has {} vertices but the space perturbs {} pairs",
            g.n(),
            space.pairs()
        )));
    }
    let budget = budget.unwrap_or_else(|| tree.probe_bound(g.n() as u64));
    let masks: Vec<u64> = match mode {
        DistributionMode::Exact => {
            if space.pairs() > EXACT_PAIR_LIMIT {
                return Err(LowerBoundError::Scale(format!(
                    "exact mode enumerates 2^{} outcomes; limit is 2^{EXACT_PAIR_LIMIT}",
                    space.pairs()
                )));
            }
            (0..space.outcomes()).collect()
        }
        DistributionMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(LowerBoundError::Scale("sampled mode needs samples".into()));
            }
            // Fixed block split keeps the draw sequence independent of the
            // worker count.
            (0..SAMPLE_BLOCKS)
                .flat_map(|b| {
                    let lo = samples * b / SAMPLE_BLOCKS;
                    let hi = samples * (b + 1) / SAMPLE_BLOCKS;
                    let mut rng = stream_rng(seed, "perturb-block", b);
                    (lo..hi)
                        .map(move |_| rng.random_range(0..space.outcomes()))
                        .collect::<Vec<_>>()
                })
                .collect()
        }
    };

    let runs = par::try_map_range(masks.len(), |i| {
        let (transcript, _) = run_on_assignment(tree, g, v, &space.assignment(masks[i]), budget)?;
        Ok::<_, LowerBoundError>((transcript.canonical_bytes(), transcript))
    })?;
    let mut support: BTreeMap<Vec<u8>, TranscriptStat> = BTreeMap::new();
    for (key, transcript) in runs {
        support
            .entry(key)
            .or_insert_with(|| TranscriptStat {
                count: 0,
                witness: transcript,
            })
            .count += 1;
    }
    Ok(TranscriptDistribution {
        total: masks.len() as u64,
        exact: matches!(mode, DistributionMode::Exact),
        support,
    })
}

/// Expected number of vertices answering 1, as an exact ratio
/// `(count over all queries and outcomes, outcomes)`. Equal transcript
/// distributions force equal expectations, which is the averaging step that
/// turns indistinguishability into an approximation lower bound.
pub fn expected_ones(
    tree: &dyn LcaAlgorithm,
    g: &LabeledGraph,
    space: &PerturbationSpace,
    budget: Option<usize>,
) -> Result<(u64, u64), LowerBoundError> {
    if space.pairs() > EXACT_PAIR_LIMIT {
        return Err(LowerBoundError::Scale(format!(
            "exact expectation enumerates 2^{} outcomes; limit is 2^{EXACT_PAIR_LIMIT}",
            space.pairs()
        )));
    }
    let budget = budget.unwrap_or_else(|| tree.probe_bound(g.n() as u64));
    let outcomes = space.outcomes();
    let per_mask = par::try_map_range(outcomes as usize, |mask| {
        let assignment = space.assignment(mask as u64);
        let mut ones = 0u64;
        for v in 0..g.n() as u64 {
            let (_, label) = run_on_assignment(tree, g, v, &assignment, budget)?;
            ones += u64::from(label == 1);
        }
        Ok::<u64, LowerBoundError>(ones)
    })?;
    Ok((per_mask.iter().sum(), outcomes))
}

/// Outcome of comparing all per-query transcript distributions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndistinguishabilityVerdict {
    Equal,
    Distinguished(DistinguishingWitness),
}

/// A transcript with different probability under the two instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinguishingWitness {
    pub query: u64,
    pub transcript: ProbeTranscript,
    pub mass_two_copies: (u64, u64),
    pub mass_double_cover: (u64, u64),
}

/// Compares the exact transcript distributions of `tree` on the perturbed
/// copies-vs-cover pair of `g`, at every query vertex of `[2n]`.
pub fn indistinguishability_check(
    g: &LabeledGraph,
    tree: &dyn LcaAlgorithm,
    budget: usize,
) -> Result<IndistinguishabilityVerdict, LowerBoundError> {
    let pair = build_pair(g);
    let space = PerturbationSpace::new(pair.pairs);
    for v in 0..(2 * pair.pairs) as u64 {
        let da = transcript_distribution(
            tree,
            &pair.two_copies,
            v,
            &space,
            Some(budget),
            DistributionMode::Exact,
        )?;
        let db = transcript_distribution(
            tree,
            &pair.double_cover,
            v,
            &space,
            Some(budget),
            DistributionMode::Exact,
        )?;
        if !da.same_exact(&db) {
            let (key, witness) = da
                .first_difference(&db)
                .expect("unequal distributions differ somewhere");
            return Ok(IndistinguishabilityVerdict::Distinguished(
                DistinguishingWitness {
                    query: v,
                    transcript: witness.clone(),
                    mass_two_copies: da.mass(key),
                    mass_double_cover: db.mass(key),
                },
            ));
        }
    }
    Ok(IndistinguishabilityVerdict::Equal)
}

/// Exact optima of the pair, plus the ratios they imply for any solver that
/// cannot tell the instances apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub base_n: u64,
    pub vertices: u64,
    pub edges: u64,
    pub alpha_two_copies: u64,
    pub alpha_double_cover: u64,
    pub maxcut_two_copies: u64,
    pub maxcut_double_cover: u64,
}

impl GapReport {
    pub fn cut_fraction_two_copies(&self) -> (u64, u64) {
        (self.maxcut_two_copies, self.edges)
    }

    pub fn cut_fraction_double_cover(&self) -> (u64, u64) {
        (self.maxcut_double_cover, self.edges)
    }

    /// `α(A)/α(B)`: a solver blind to the difference over-reports one side.
    pub fn independence_ratio(&self) -> (u64, u64) {
        (self.alpha_two_copies, self.alpha_double_cover)
    }

    /// `χ(A) ≥ 2n/α(A)`, carried as an exact ratio.
    pub fn coloring_lower_bound(&self) -> (u64, u64) {
        (self.vertices, self.alpha_two_copies)
    }
}

/// Brute-forces independence numbers and max cuts of both instances.
pub fn gap_report(g: &LabeledGraph) -> Result<GapReport, LowerBoundError> {
    if 2 * g.n() > GAP_VERTEX_LIMIT {
        return Err(LowerBoundError::Scale(format!(
            "gap report brute-forces optima; {} vertices exceed {GAP_VERTEX_LIMIT}",
            2 * g.n()
        )));
    }
    let pair = build_pair(g);
    Ok(GapReport {
        base_n: g.n() as u64,
        vertices: 2 * g.n() as u64,
        edges: pair.two_copies.edge_count() as u64,
        alpha_two_copies: max_independent_set_size(&pair.two_copies)? as u64,
        alpha_double_cover: max_independent_set_size(&pair.double_cover)? as u64,
        maxcut_two_copies: max_cut_size(&pair.two_copies)? as u64,
        maxcut_double_cover: max_cut_size(&pair.double_cover)? as u64,
    })
}

/// The probe trees every indistinguishability sweep runs: all registered
/// shapes that fit the budget at the given degree bound.
pub fn registered_trees(budget: usize, delta: usize) -> Vec<Box<dyn LcaAlgorithm>> {
    let mut trees: Vec<Box<dyn LcaAlgorithm>> = vec![Box::new(ConstantLabel(1))];
    if budget >= 1 {
        trees.push(Box::new(SelfDegree));
    }
    for b in 1..=budget {
        trees.push(Box::new(WalkMinTree { budget: b }));
    }
    for radius in 1..=budget {
        if max_ball_size(delta, radius) <= budget {
            trees.push(Box::new(BallSizeTree { radius, delta }));
        }
    }
    trees
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};

    fn cycle(n: usize) -> LabeledGraph {
        generate(&GraphSpec::Cycle { n }).unwrap()
    }

    #[test]
    fn pair_construction_matches_cover_structure() {
        let pair = build_pair(&cycle(3));
        assert_eq!(pair.two_copies.n(), 6);
        assert_eq!(pair.two_copies.girth(), Some(3));
        assert!(!pair.two_copies.is_connected());
        // The odd cycle's double cover is the single long cycle.
        assert!(pair.double_cover.is_connected());
        assert_eq!(pair.double_cover.girth(), Some(6));

        // Even cycles are bipartite, so the cover is just two more copies.
        let pair = build_pair(&cycle(4));
        let components = |g: &LabeledGraph| {
            g.component_ids()
                .iter()
                .collect::<std::collections::BTreeSet<_>>()
                .len()
        };
        assert_eq!(components(&pair.two_copies), 2);
        assert_eq!(components(&pair.double_cover), 2);
        assert_eq!(pair.double_cover.girth(), Some(4));
    }

    #[test]
    fn zero_probe_trees_give_a_point_mass() {
        let pair = build_pair(&cycle(3));
        let space = PerturbationSpace::new(3);
        let dist = transcript_distribution(
            &ConstantLabel(1),
            &pair.two_copies,
            0,
            &space,
            None,
            DistributionMode::Exact,
        )
        .unwrap();
        assert_eq!(dist.total, 8);
        assert_eq!(dist.support.len(), 1);
        let stat = dist.support.values().next().unwrap();
        assert_eq!(stat.count, 8);
        assert_eq!(stat.witness.total_probes(), 0);
    }

    /// Hand enumeration for the single-probe tree at query 0 on the pair
    /// built from the triangle: the probe's answer is `{p(x), p(y)}` where
    /// `{x, y}` are the neighbors of `p⁻¹(0)`, so over the 8 swap masks the
    /// four sets {1,2}, {1,5}, {4,2}, {4,5} each occur twice — on both
    /// instances.
    #[test]
    fn single_probe_distribution_matches_hand_enumeration() {
        let pair = build_pair(&cycle(3));
        let space = PerturbationSpace::new(3);
        let walk = WalkMinTree { budget: 1 };
        let da = transcript_distribution(
            &walk,
            &pair.two_copies,
            0,
            &space,
            None,
            DistributionMode::Exact,
        )
        .unwrap();
        let expected: Vec<Vec<u64>> = vec![vec![1, 2], vec![1, 5], vec![4, 2], vec![4, 5]];
        assert_eq!(da.support.len(), 4);
        for answer in expected {
            let sorted = {
                let mut s = answer.clone();
                s.sort_unstable();
                s
            };
            let found = da
                .support
                .values()
                .find(|stat| stat.witness.entries[0].neighbors == sorted)
                .unwrap_or_else(|| panic!("answer {answer:?} missing"));
            assert_eq!(found.count, 2);
            assert_eq!(found.witness.entries[0].probed, 0);
        }

        let db = transcript_distribution(
            &walk,
            &pair.double_cover,
            0,
            &space,
            None,
            DistributionMode::Exact,
        )
        .unwrap();
        assert!(da.same_exact(&db));
    }

    #[test]
    fn cycle_transcripts_are_indistinguishable_below_half_girth() {
        // Girth 5; two probes stay below half of it.
        let g = cycle(5);
        for tree in registered_trees(2, 2) {
            let verdict = indistinguishability_check(&g, tree.as_ref(), 2).unwrap();
            assert_eq!(
                verdict,
                IndistinguishabilityVerdict::Equal,
                "tree {}",
                tree.id()
            );
        }
    }

    #[test]
    fn triangle_walk_distinguishes_the_double_cover() {
        let g = cycle(3);
        let walk = WalkMinTree { budget: 3 };
        let verdict = indistinguishability_check(&g, &walk, 3).unwrap();
        let IndistinguishabilityVerdict::Distinguished(witness) = verdict else {
            panic!("three probes close the triangle and must distinguish");
        };
        assert_ne!(witness.mass_two_copies.0, witness.mass_double_cover.0);

        // Stronger: the supports are disjoint, because a closed triangle
        // transcript names 3 distinct ids while any cover walk names ≥ 4.
        let pair = build_pair(&g);
        let space = PerturbationSpace::new(3);
        let da = transcript_distribution(
            &walk,
            &pair.two_copies,
            witness.query,
            &space,
            Some(3),
            DistributionMode::Exact,
        )
        .unwrap();
        let db = transcript_distribution(
            &walk,
            &pair.double_cover,
            witness.query,
            &space,
            Some(3),
            DistributionMode::Exact,
        )
        .unwrap();
        assert!(da.support.keys().all(|k| !db.support.contains_key(k)));
    }

    #[test]
    fn expectation_transfer_holds_below_half_girth() {
        /// Answers 1 iff some neighbor carries a smaller id: the simplest
        /// tree whose output genuinely depends on the perturbation.
        #[derive(Debug)]
        struct SmallerNeighbor;
        impl LcaAlgorithm for SmallerNeighbor {
            fn id(&self) -> String {
                "smaller-neighbor".into()
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
                Ok(Label::from(probes.probe(query)?.iter().any(|&w| w < query)))
            }
        }

        let pair = build_pair(&cycle(5));
        let space = PerturbationSpace::new(5);
        let a = expected_ones(&SmallerNeighbor, &pair.two_copies, &space, None).unwrap();
        let b = expected_ones(&SmallerNeighbor, &pair.double_cover, &space, None).unwrap();
        assert_eq!(a, b);
        // Sanity: the expectation is not degenerate.
        assert!(a.0 > 0 && a.0 < 10 * a.1);
    }

    #[test]
    fn gap_report_pins_cycle_values() {
        let report = gap_report(&cycle(9)).unwrap();
        assert_eq!(report.vertices, 18);
        assert_eq!(report.edges, 18);
        assert_eq!(report.alpha_two_copies, 8);
        assert_eq!(report.alpha_double_cover, 9);
        assert_eq!(report.maxcut_two_copies, 16);
        assert_eq!(report.maxcut_double_cover, 18);
        assert_eq!(report.cut_fraction_two_copies(), (16, 18));
        assert_eq!(report.cut_fraction_double_cover(), (18, 18));

        let report = gap_report(&cycle(3)).unwrap();
        assert_eq!(report.alpha_two_copies, 2);
        assert_eq!(report.alpha_double_cover, 3);
        assert_eq!(report.maxcut_two_copies, 4);
        assert_eq!(report.maxcut_double_cover, 6);
        // A triangle needs 3 colors, and the ratio 6/2 says so.
        assert_eq!(report.coloring_lower_bound(), (6, 2));

        // Bipartite base: the instances are isomorphic and all gaps vanish.
        let report = gap_report(&cycle(4)).unwrap();
        assert_eq!(report.alpha_two_copies, report.alpha_double_cover);
        assert_eq!(report.maxcut_two_copies, report.maxcut_double_cover);
        assert_eq!(report.maxcut_two_copies, report.edges);
    }

    #[test]
    fn scale_guards_reject_oversized_requests() {
        assert!(matches!(
            gap_report(&cycle(13)),
            Err(LowerBoundError::Scale(_))
        ));
        let pair = build_pair(&cycle(13));
        let space = PerturbationSpace::new(13);
        assert!(matches!(
            transcript_distribution(
                &SelfDegree,
                &pair.two_copies,
                0,
                &space,
                None,
                DistributionMode::Exact,
            ),
            Err(LowerBoundError::Scale(_))
        ));
    }

    #[test]
    fn sampled_mode_tracks_the_exact_distribution() {
        let pair = build_pair(&cycle(8));
        let space = PerturbationSpace::new(8);
        let walk = WalkMinTree { budget: 2 };
        let exact = transcript_distribution(
            &walk,
            &pair.two_copies,
            0,
            &space,
            None,
            DistributionMode::Exact,
        )
        .unwrap();
        let sampled = transcript_distribution(
            &walk,
            &pair.two_copies,
            0,
            &space,
            None,
            DistributionMode::Sampled {
                samples: 20_000,
                seed: 17,
            },
        )
        .unwrap();
        assert!(!sampled.exact);
        assert_eq!(sampled.total, 20_000);
        let tv = exact.tv_distance(&sampled);
        assert!(tv < 0.02, "sampled distribution drifted: tv = {tv}");
    }
}
