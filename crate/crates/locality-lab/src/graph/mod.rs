//! Canonical labeled bounded-degree graphs.
//!
//! A [`LabeledGraph`] is a simple undirected graph on vertex ids `0..n` with a
//! declared degree bound `delta`. The adjacency representation is canonical:
//! every neighbor list is sorted ascending, symmetric, and free of loops and
//! duplicates, and no vertex exceeds `delta`. Constructors validate; the rest
//! of the crate relies on the invariants instead of re-checking them.

mod exact;
mod generate;
mod io;

pub use exact::{max_cut_size, max_independent_set_size, EXACT_LIMIT};
pub use generate::{
    double_cover, generate, sample_high_girth_regular, sample_random_regular, two_copies,
    GraphSpec, DEFAULT_ATTEMPT_BUDGET,
};
pub use io::{read_graph, write_graph};

use thiserror::Error;

/// Errors from graph construction, generation, and the file format.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {0} out of range for graph on {1} vertices")]
    VertexOutOfRange(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} has degree {degree}, exceeding the bound {delta}")]
    DegreeBound {
        vertex: usize,
        degree: usize,
        delta: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("generation budget of {budget} attempts exhausted ({reason})")]
    BudgetExhausted { budget: u32, reason: String },
    #[error("graph file parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("exact search supports at most {limit} vertices, got {n}")]
    ExactSearchTooLarge { n: usize, limit: usize },
}

/// A simple undirected graph with sorted adjacency lists and a degree bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    delta: usize,
    adj: Vec<Vec<usize>>,
}

impl LabeledGraph {
    /// Builds a graph from an edge list, canonicalizing and validating.
    pub fn from_edges(
        n: usize,
        delta: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Self::from_adjacency(delta, adj)
    }

    /// Builds a graph from raw adjacency lists, canonicalizing and validating.
    ///
    /// The lists must already be symmetric (`v ∈ adj[u]` iff `u ∈ adj[v]`);
    /// ordering is normalised here.
    pub fn from_adjacency(delta: usize, mut adj: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let n = adj.len();
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            for pair in list.windows(2) {
                if pair[0] == pair[1] {
                    return Err(GraphError::DuplicateEdge(v, pair[0]));
                }
            }
            if let Some(&max) = list.last() {
                if max >= n {
                    return Err(GraphError::VertexOutOfRange(max, n));
                }
            }
            if list.binary_search(&v).is_ok() {
                return Err(GraphError::SelfLoop(v));
            }
            if list.len() > delta {
                return Err(GraphError::DegreeBound {
                    vertex: v,
                    degree: list.len(),
                    delta,
                });
            }
        }
        let g = LabeledGraph { delta, adj };
        for v in 0..n {
            for &u in g.neighbors(v) {
                if g.adj[u].binary_search(&v).is_err() {
                    return Err(GraphError::InvalidParameter(format!(
                        "adjacency is not symmetric: {v} lists {u} but not vice versa"
                    )));
                }
            }
        }
        Ok(g)
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Declared degree bound (may exceed the realised maximum degree).
    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Degree of `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Total number of edges.
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// All edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Whether `{u, v}` is an edge.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// BFS distances from `src`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices have distances");
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Component index of every vertex; indices are assigned in order of the
    /// smallest vertex id in each component.
    pub fn component_ids(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n()];
        let mut next = 0;
        for start in 0..self.n() {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Whether the graph is connected (vacuously true when `n == 0`).
    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// The subgraph induced on `keep` (which must be sorted and in range),
    /// with vertex `keep[i]` renamed to `i`.
    pub fn induced(&self, keep: &[usize]) -> Result<LabeledGraph, GraphError> {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            if v >= self.n() {
                return Err(GraphError::VertexOutOfRange(v, self.n()));
            }
            index[v] = i;
        }
        let mut adj = vec![Vec::new(); keep.len()];
        for (i, &v) in keep.iter().enumerate() {
            for &u in &self.adj[v] {
                if index[u] != usize::MAX {
                    adj[i].push(index[u]);
                }
            }
        }
        LabeledGraph::from_adjacency(self.delta, adj)
    }

    /// Renames vertex `v` to `perm[v]`; `perm` must be a bijection on `0..n`.
    pub fn relabel(&self, perm: &[usize]) -> Result<LabeledGraph, GraphError> {
        if perm.len() != self.n() {
            return Err(GraphError::InvalidParameter(format!(
                "relabeling has {} entries for a graph on {} vertices",
                perm.len(),
                self.n()
            )));
        }
        let mut seen = vec![false; self.n()];
        for &p in perm {
            if p >= self.n() {
                return Err(GraphError::VertexOutOfRange(p, self.n()));
            }
            if seen[p] {
                return Err(GraphError::InvalidParameter(format!(
                    "relabeling maps two vertices to {p}"
                )));
            }
            seen[p] = true;
        }
        let mut adj = vec![Vec::new(); self.n()];
        for v in 0..self.n() {
            adj[perm[v]] = self.adj[v].iter().map(|&u| perm[u]).collect();
        }
        LabeledGraph::from_adjacency(self.delta, adj)
    }

    /// Length of the shortest cycle, or `None` for acyclic graphs.
    ///
    /// Runs a BFS from every vertex; the shortest cycle through the BFS root
    /// is found exactly, and minimising over roots gives the girth.
    pub fn girth(&self) -> Option<usize> {
        let n = self.n();
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        for src in 0..n {
            dist.fill(usize::MAX);
            parent.fill(usize::MAX);
            dist[src] = 0;
            let mut queue = std::collections::VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                // A cycle through vertices at distance ≥ best/2 cannot beat
                // the current best; stop expanding this root.
                if let Some(b) = best {
                    if 2 * dist[u] + 1 >= b {
                        break;
                    }
                }
                for &w in &self.adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w && parent[w] != u {
                        // Non-tree edge: closes a cycle through the root of
                        // length at most dist[u] + dist[w] + 1.
                        let len = dist[u] + dist[w] + 1;
                        if best.is_none_or(|b| len < b) {
                            best = Some(len);
                        }
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> LabeledGraph {
        generate(&GraphSpec::Cycle { n }).unwrap()
    }

    #[test]
    fn from_edges_canonicalizes_and_validates() {
        let g = LabeledGraph::from_edges(4, 2, &[(2, 1), (0, 1), (3, 2)]).unwrap();
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.neighbors(2), &[1, 3]);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2), (2, 3)]);

        assert!(matches!(
            LabeledGraph::from_edges(3, 2, &[(0, 0)]),
            Err(GraphError::SelfLoop(0))
        ));
        assert!(matches!(
            LabeledGraph::from_edges(3, 2, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            LabeledGraph::from_edges(3, 2, &[(0, 3)]),
            Err(GraphError::VertexOutOfRange(3, 3))
        ));
        assert!(matches!(
            LabeledGraph::from_edges(4, 1, &[(0, 1), (0, 2)]),
            Err(GraphError::DegreeBound { vertex: 0, .. })
        ));
    }

    #[test]
    fn asymmetric_adjacency_is_rejected() {
        let adj = vec![vec![1], vec![]];
        assert!(LabeledGraph::from_adjacency(2, adj).is_err());
    }

    #[test]
    fn bfs_distances_on_a_cycle() {
        let g = cycle(6);
        let d = g.bfs_distances(0);
        assert_eq!(
            d,
            vec![Some(0), Some(1), Some(2), Some(3), Some(2), Some(1)]
        );
    }

    #[test]
    fn girth_of_cycles_paths_and_unions() {
        assert_eq!(cycle(5).girth(), Some(5));
        assert_eq!(cycle(10).girth(), Some(10));
        let p4 = generate(&GraphSpec::Path { n: 4 }).unwrap();
        assert_eq!(p4.girth(), None);
        let union = generate(&GraphSpec::DisjointUnion {
            parts: vec![GraphSpec::Cycle { n: 7 }, GraphSpec::Cycle { n: 3 }],
        })
        .unwrap();
        assert_eq!(union.girth(), Some(3));
    }

    #[test]
    fn girth_with_chords() {
        // C6 plus a chord {0, 3} has two 4-cycles; girth 4.
        let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)];
        edges.push((0, 3));
        let g = LabeledGraph::from_edges(6, 3, &edges).unwrap();
        assert_eq!(g.girth(), Some(4));
    }

    #[test]
    fn relabel_is_an_isomorphism() {
        let g = cycle(5);
        let perm = vec![2, 0, 4, 1, 3];
        let h = g.relabel(&perm).unwrap();
        assert_eq!(h.edge_count(), g.edge_count());
        for (u, v) in g.edges() {
            assert!(h.has_edge(perm[u], perm[v]));
        }
        assert_eq!(h.girth(), Some(5));
    }

    #[test]
    fn relabel_rejects_non_bijections() {
        let g = cycle(4);
        assert!(g.relabel(&[0, 0, 1, 2]).is_err());
        assert!(g.relabel(&[0, 1, 2]).is_err());
        assert!(g.relabel(&[0, 1, 2, 4]).is_err());
    }

    #[test]
    fn component_ids_follow_smallest_member() {
        let g = generate(&GraphSpec::DisjointUnion {
            parts: vec![GraphSpec::Path { n: 2 }, GraphSpec::Cycle { n: 3 }],
        })
        .unwrap();
        assert_eq!(g.component_ids(), vec![0, 0, 1, 1, 1]);
        assert!(!g.is_connected());
        assert!(cycle(4).is_connected());
    }

    #[test]
    fn induced_subgraph_keeps_internal_edges() {
        let g = cycle(6);
        let sub = g.induced(&[0, 1, 2, 4]).unwrap();
        assert_eq!(sub.edges(), vec![(0, 1), (1, 2)]);
    }
}
