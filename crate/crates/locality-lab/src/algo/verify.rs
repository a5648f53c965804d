//! Feasibility checking of per-vertex labelings against problem definitions,
//! with exact optima attached where brute force is affordable.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{max_cut_size, max_independent_set_size, LabeledGraph, EXACT_LIMIT};
use crate::models::{Label, ModelError};

/// The problems whose solutions this crate can produce and check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemId {
    /// Proper coloring with palette `{0,1,2}`.
    CycleColoring3,
    /// Proper coloring with palette `{0,..,delta}`.
    ColoringDeltaPlusOne,
    /// Independent and dominating 0/1 labeling.
    MaximalIndependentSet,
    /// Symmetric partner labels (`-1` = unmatched) with no extendable edge.
    MaximalMatching,
    /// Exactly one vertex, the smaller middle of two 3-vertex paths, labeled 1.
    TwoPathLeader,
    /// Independent 0/1 labeling, judged by its size.
    IndependentSetValue,
    /// Arbitrary 0/1 partition, judged by its cut size.
    MaxCutValue,
}

impl ProblemId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemId::CycleColoring3 => "cycle-coloring3",
            ProblemId::ColoringDeltaPlusOne => "coloring-delta-plus-one",
            ProblemId::MaximalIndependentSet => "maximal-independent-set",
            ProblemId::MaximalMatching => "maximal-matching",
            ProblemId::TwoPathLeader => "two-path-leader",
            ProblemId::IndependentSetValue => "independent-set-value",
            ProblemId::MaxCutValue => "max-cut-value",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cycle-coloring3" => Ok(ProblemId::CycleColoring3),
            "coloring-delta-plus-one" => Ok(ProblemId::ColoringDeltaPlusOne),
            "maximal-independent-set" | "mis" => Ok(ProblemId::MaximalIndependentSet),
            "maximal-matching" => Ok(ProblemId::MaximalMatching),
            "two-path-leader" => Ok(ProblemId::TwoPathLeader),
            "independent-set-value" => Ok(ProblemId::IndependentSetValue),
            "max-cut-value" => Ok(ProblemId::MaxCutValue),
            other => Err(format!("unknown problem id `{other}`")),
        }
    }
}

/// Outcome of checking one labeling: feasibility with the first violated
/// constraint, a problem-specific objective value, and the exact optimum
/// whenever the instance is small enough to brute-force.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub problem: ProblemId,
    pub feasible: bool,
    pub reason: Option<String>,
    pub value: Option<i64>,
    pub optimum: Option<i64>,
}

impl VerifyReport {
    fn feasible(problem: ProblemId, value: Option<i64>, optimum: Option<i64>) -> Self {
        VerifyReport {
            problem,
            feasible: true,
            reason: None,
            value,
            optimum,
        }
    }

    fn infeasible(problem: ProblemId, reason: String) -> Self {
        VerifyReport {
            problem,
            feasible: false,
            reason: Some(reason),
            value: None,
            optimum: None,
        }
    }
}

/// Checks `labels` (one per vertex, in id order) against `problem` on `g`.
pub fn verify_solution(
    problem: ProblemId,
    g: &LabeledGraph,
    labels: &[Label],
) -> Result<VerifyReport, ModelError> {
    if labels.len() != g.n() {
        return Err(ModelError::LabelingMismatch {
            expected: g.n(),
            got: labels.len(),
        });
    }
    Ok(match problem {
        ProblemId::CycleColoring3 => verify_coloring(problem, g, labels, 3),
        ProblemId::ColoringDeltaPlusOne => {
            verify_coloring(problem, g, labels, g.delta() as i64 + 1)
        }
        ProblemId::MaximalIndependentSet => verify_mis(g, labels),
        ProblemId::MaximalMatching => verify_matching(g, labels),
        ProblemId::TwoPathLeader => verify_two_path_leader(g, labels),
        ProblemId::IndependentSetValue => verify_independent_set_value(g, labels),
        ProblemId::MaxCutValue => verify_max_cut_value(g, labels),
    })
}

fn verify_coloring(
    problem: ProblemId,
    g: &LabeledGraph,
    labels: &[Label],
    palette: i64,
) -> VerifyReport {
    for (v, &c) in labels.iter().enumerate() {
        if !(0..palette).contains(&c) {
            return VerifyReport::infeasible(
                problem,
                format!("vertex {v} has color {c} outside palette 0..{palette}"),
            );
        }
    }
    for (u, v) in g.edges() {
        if labels[u] == labels[v] {
            return VerifyReport::infeasible(
                problem,
                format!("edge {{{u}, {v}}} has both endpoints colored {}", labels[u]),
            );
        }
    }
    let used: BTreeSet<Label> = labels.iter().copied().collect();
    VerifyReport::feasible(problem, Some(used.len() as i64), None)
}

fn binary_violation(problem: ProblemId, labels: &[Label]) -> Option<VerifyReport> {
    labels.iter().enumerate().find_map(|(v, &x)| {
        (x != 0 && x != 1).then(|| {
            VerifyReport::infeasible(problem, format!("vertex {v} has non-binary label {x}"))
        })
    })
}

fn verify_mis(g: &LabeledGraph, labels: &[Label]) -> VerifyReport {
    let problem = ProblemId::MaximalIndependentSet;
    if let Some(bad) = binary_violation(problem, labels) {
        return bad;
    }
    for (u, v) in g.edges() {
        if labels[u] == 1 && labels[v] == 1 {
            return VerifyReport::infeasible(
                problem,
                format!("adjacent vertices {u} and {v} are both in the set"),
            );
        }
    }
    for v in 0..g.n() {
        if labels[v] == 0 && g.neighbors(v).iter().all(|&w| labels[w] == 0) {
            return VerifyReport::infeasible(
                problem,
                format!("vertex {v} is out of the set but has no neighbor in it"),
            );
        }
    }
    let size = labels.iter().filter(|&&x| x == 1).count() as i64;
    VerifyReport::feasible(problem, Some(size), exact_alpha(g))
}

fn verify_matching(g: &LabeledGraph, labels: &[Label]) -> VerifyReport {
    let problem = ProblemId::MaximalMatching;
    for (v, &m) in labels.iter().enumerate() {
        if m == -1 {
            continue;
        }
        if m < 0 || m >= g.n() as i64 {
            return VerifyReport::infeasible(
                problem,
                format!("vertex {v} names out-of-range partner {m}"),
            );
        }
        let w = m as usize;
        if !g.has_edge(v, w) {
            return VerifyReport::infeasible(
                problem,
                format!("vertex {v} names non-neighbor {w} as partner"),
            );
        }
        if labels[w] != v as i64 {
            return VerifyReport::infeasible(
                problem,
                format!("vertex {v} names partner {w}, but {w} names {}", labels[w]),
            );
        }
    }
    for (u, v) in g.edges() {
        if labels[u] == -1 && labels[v] == -1 {
            return VerifyReport::infeasible(
                problem,
                format!("edge {{{u}, {v}}} joins two unmatched vertices"),
            );
        }
    }
    let pairs = labels.iter().filter(|&&m| m != -1).count() as i64 / 2;
    VerifyReport::feasible(problem, Some(pairs), None)
}

/// A two-path instance: exactly two components that are 3-vertex paths, all
/// other vertices isolated. Returns the two middle (degree-2) vertices.
fn two_path_middles(g: &LabeledGraph) -> Result<[usize; 2], String> {
    let mut middles = Vec::new();
    let mut path_vertices = 0usize;
    for v in 0..g.n() {
        match g.degree(v) {
            0 => {}
            1 => path_vertices += 1,
            2 => {
                if g.neighbors(v).iter().any(|&w| g.degree(w) != 1) {
                    return Err(format!("vertex {v} is not the middle of a 3-vertex path"));
                }
                middles.push(v);
                path_vertices += 1;
            }
            d => return Err(format!("vertex {v} has degree {d}")),
        }
    }
    if middles.len() != 2 || path_vertices != 6 {
        return Err(format!(
            "expected two 3-vertex paths, found {} middle(s) among {} path vertices",
            middles.len(),
            path_vertices
        ));
    }
    Ok([middles[0], middles[1]])
}

fn verify_two_path_leader(g: &LabeledGraph, labels: &[Label]) -> VerifyReport {
    let problem = ProblemId::TwoPathLeader;
    let middles = match two_path_middles(g) {
        Ok(m) => m,
        Err(reason) => return VerifyReport::infeasible(problem, reason),
    };
    if let Some(bad) = binary_violation(problem, labels) {
        return bad;
    }
    let leaders: Vec<usize> = (0..g.n()).filter(|&v| labels[v] == 1).collect();
    match leaders.as_slice() {
        [leader] if middles.contains(leader) => {
            VerifyReport::feasible(problem, Some(*leader as i64), None)
        }
        [leader] => VerifyReport::infeasible(
            problem,
            format!("leader {leader} is not a middle vertex {middles:?}"),
        ),
        _ => VerifyReport::infeasible(problem, format!("{} leaders elected", leaders.len())),
    }
}

fn verify_independent_set_value(g: &LabeledGraph, labels: &[Label]) -> VerifyReport {
    let problem = ProblemId::IndependentSetValue;
    if let Some(bad) = binary_violation(problem, labels) {
        return bad;
    }
    for (u, v) in g.edges() {
        if labels[u] == 1 && labels[v] == 1 {
            return VerifyReport::infeasible(
                problem,
                format!("adjacent vertices {u} and {v} are both in the set"),
            );
        }
    }
    let size = labels.iter().filter(|&&x| x == 1).count() as i64;
    VerifyReport::feasible(problem, Some(size), exact_alpha(g))
}

fn verify_max_cut_value(g: &LabeledGraph, labels: &[Label]) -> VerifyReport {
    let problem = ProblemId::MaxCutValue;
    if let Some(bad) = binary_violation(problem, labels) {
        return bad;
    }
    let cut = g
        .edges()
        .into_iter()
        .filter(|&(u, v)| labels[u] != labels[v])
        .count() as i64;
    let optimum = (g.n() <= EXACT_LIMIT)
        .then(|| max_cut_size(g).map(|c| c as i64).ok())
        .flatten();
    VerifyReport::feasible(problem, Some(cut), optimum)
}

fn exact_alpha(g: &LabeledGraph) -> Option<i64> {
    (g.n() <= EXACT_LIMIT)
        .then(|| max_independent_set_size(g).map(|a| a as i64).ok())
        .flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};

    #[test]
    fn problem_ids_round_trip_via_strings() {
        for problem in [
            ProblemId::CycleColoring3,
            ProblemId::ColoringDeltaPlusOne,
            ProblemId::MaximalIndependentSet,
            ProblemId::MaximalMatching,
            ProblemId::TwoPathLeader,
            ProblemId::IndependentSetValue,
            ProblemId::MaxCutValue,
        ] {
            assert_eq!(problem.as_str().parse::<ProblemId>(), Ok(problem));
        }
        assert_eq!(
            "mis".parse::<ProblemId>(),
            Ok(ProblemId::MaximalIndependentSet)
        );
        assert!("no-such-problem".parse::<ProblemId>().is_err());
    }

    #[test]
    fn labeling_length_mismatch_is_an_error() {
        let g = generate(&GraphSpec::Cycle { n: 4 }).unwrap();
        let err = verify_solution(ProblemId::CycleColoring3, &g, &[0, 1, 2]).unwrap_err();
        assert!(matches!(
            err,
            ModelError::LabelingMismatch {
                expected: 4,
                got: 3
            }
        ));
    }

    #[test]
    fn coloring_checks_palette_and_properness() {
        let g = generate(&GraphSpec::Cycle { n: 4 }).unwrap();
        let good = verify_solution(ProblemId::CycleColoring3, &g, &[0, 1, 0, 1]).unwrap();
        assert!(good.feasible);
        assert_eq!(good.value, Some(2));

        let monochrome = verify_solution(ProblemId::CycleColoring3, &g, &[0, 0, 1, 2]).unwrap();
        assert!(!monochrome.feasible);
        assert!(monochrome.reason.unwrap().contains("edge {0, 1}"));

        let out_of_palette = verify_solution(ProblemId::CycleColoring3, &g, &[0, 1, 0, 3]).unwrap();
        assert!(!out_of_palette.feasible);
    }

    #[test]
    fn mis_requires_independence_and_domination() {
        let g = generate(&GraphSpec::Cycle { n: 5 }).unwrap();
        let good = verify_solution(ProblemId::MaximalIndependentSet, &g, &[1, 0, 1, 0, 0]).unwrap();
        assert!(good.feasible);
        assert_eq!(good.value, Some(2));
        assert_eq!(good.optimum, Some(2));

        let not_dominating =
            verify_solution(ProblemId::MaximalIndependentSet, &g, &[1, 0, 0, 0, 0]).unwrap();
        assert!(!not_dominating.feasible);

        let not_independent =
            verify_solution(ProblemId::MaximalIndependentSet, &g, &[1, 1, 0, 1, 0]).unwrap();
        assert!(!not_independent.feasible);
    }

    #[test]
    fn matching_requires_symmetry_and_maximality() {
        let g = generate(&GraphSpec::Cycle { n: 4 }).unwrap();
        let good = verify_solution(ProblemId::MaximalMatching, &g, &[1, 0, 3, 2]).unwrap();
        assert!(good.feasible);
        assert_eq!(good.value, Some(2));

        let asymmetric = verify_solution(ProblemId::MaximalMatching, &g, &[1, 2, 1, -1]).unwrap();
        assert!(!asymmetric.feasible);

        let extendable =
            verify_solution(ProblemId::MaximalMatching, &g, &[-1, -1, -1, -1]).unwrap();
        assert!(!extendable.feasible);
    }

    #[test]
    fn two_path_leader_wants_exactly_one_middle() {
        let g = generate(&GraphSpec::TwoPath { n: 8, seed: 11 }).unwrap();
        let [m0, m1] = two_path_middles(&g).unwrap();
        let mut labels = vec![0; 8];
        labels[m0] = 1;
        let good = verify_solution(ProblemId::TwoPathLeader, &g, &labels).unwrap();
        assert!(good.feasible, "{:?}", good.reason);
        assert_eq!(good.value, Some(m0 as i64));

        labels[m1] = 1;
        let two = verify_solution(ProblemId::TwoPathLeader, &g, &labels).unwrap();
        assert!(!two.feasible);

        let not_two_path = generate(&GraphSpec::Cycle { n: 6 }).unwrap();
        let report =
            verify_solution(ProblemId::TwoPathLeader, &not_two_path, &[1, 0, 0, 0, 0, 0]).unwrap();
        assert!(!report.feasible);
    }

    #[test]
    fn cut_value_reports_exact_optimum_on_small_graphs() {
        let g = generate(&GraphSpec::Cycle { n: 9 }).unwrap();
        let all_ones_side = verify_solution(ProblemId::MaxCutValue, &g, &[0; 9]).unwrap();
        assert!(all_ones_side.feasible);
        assert_eq!(all_ones_side.value, Some(0));
        assert_eq!(all_ones_side.optimum, Some(8));
    }
}
