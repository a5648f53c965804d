//! Plain-text graph files.
//!
//! Line 1 is the header `n <count> delta <bound>`; every following line is one
//! edge `u v` with 0-based ids, `u < v`, in strictly increasing lexicographic
//! order. The reader rejects any deviation — wrong header shape, unordered or
//! duplicate edges, out-of-range ids, degree violations — rather than
//! normalising it, so a file that parses is already canonical.

use super::{GraphError, LabeledGraph};

/// Serialises `g` in the canonical text format (with a trailing newline).
pub fn write_graph(g: &LabeledGraph) -> String {
    let mut out = format!("n {} delta {}\n", g.n(), g.delta());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Parses the canonical text format, validating every invariant.
pub fn read_graph(text: &str) -> Result<LabeledGraph, GraphError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, delta) = match fields.as_slice() {
        ["n", n, "delta", delta] => {
            let parse = |s: &str, what: &str| {
                s.parse::<usize>().map_err(|_| GraphError::Parse {
                    line: 1,
                    message: format!("invalid {what} `{s}`"),
                })
            };
            (parse(n, "vertex count")?, parse(delta, "degree bound")?)
        }
        _ => {
            return Err(GraphError::Parse {
                line: 1,
                message: format!("expected header `n <count> delta <bound>`, got `{header}`"),
            })
        }
    };

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v] = fields.as_slice() else {
            return Err(GraphError::Parse {
                line: lineno,
                message: format!("expected `u v`, got `{line}`"),
            });
        };
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| GraphError::Parse {
                line: lineno,
                message: format!("invalid vertex id `{s}`"),
            })
        };
        let (u, v) = (parse(u)?, parse(v)?);
        if u >= v {
            return Err(GraphError::Parse {
                line: lineno,
                message: format!("edge `{u} {v}` must satisfy u < v"),
            });
        }
        if let Some(&last) = edges.last() {
            if last >= (u, v) {
                return Err(GraphError::Parse {
                    line: lineno,
                    message: format!("edge `{u} {v}` out of order after `{} {}`", last.0, last.1),
                });
            }
        }
        edges.push((u, v));
    }
    LabeledGraph::from_edges(n, delta, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};

    #[test]
    fn round_trip_is_identity() {
        let g = generate(&GraphSpec::RandomRegular {
            n: 12,
            d: 3,
            seed: 5,
        })
        .unwrap();
        let text = write_graph(&g);
        let back = read_graph(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(write_graph(&back), text);
    }

    #[test]
    fn writes_the_documented_shape() {
        let g = generate(&GraphSpec::Cycle { n: 4 }).unwrap();
        assert_eq!(write_graph(&g), "n 4 delta 2\n0 1\n0 3\n1 2\n2 3\n");
    }

    #[test]
    fn rejects_malformed_input() {
        // Wrong header shape.
        assert!(read_graph("vertices 4 delta 2\n0 1\n").is_err());
        // Reversed endpoint order.
        assert!(read_graph("n 4 delta 2\n1 0\n").is_err());
        // Out-of-order edge lines.
        assert!(read_graph("n 4 delta 2\n1 2\n0 1\n").is_err());
        // Duplicate edge.
        assert!(read_graph("n 4 delta 2\n0 1\n0 1\n").is_err());
        // Vertex id out of range.
        assert!(read_graph("n 4 delta 2\n0 9\n").is_err());
        // Degree bound violated.
        assert!(read_graph("n 4 delta 1\n0 1\n0 2\n").is_err());
        // Trailing garbage.
        assert!(read_graph("n 4 delta 2\n0 1\nhello\n").is_err());
        // Empty file.
        assert!(read_graph("").is_err());
    }

    #[test]
    fn accepts_the_empty_graph() {
        let g = read_graph("n 3 delta 0\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 0);
    }
}
