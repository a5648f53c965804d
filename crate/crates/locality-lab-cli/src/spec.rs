//! The textual graph-spec grammar shared by every command.
//!
//! ```text
//! cycle:N                  the N-cycle
//! path:N                   the N-path
//! two-path:N:SEED          two disjoint 3-vertex paths on seeded ids
//! random-regular:N:D:SEED  configuration-model D-regular graph
//! double-cover:SPEC        bipartite double cover of SPEC
//! two-copies:SPEC          disjoint union of SPEC with itself
//! union:SPEC+SPEC+…        disjoint union, ids offset left to right
//! pad:TOTAL:SPEC           SPEC padded with isolated vertices up to TOTAL
//! ```
//!
//! Prefix operators nest: `double-cover:cycle:9` or `pad:12:union:cycle:3+path:2`.

use locality_lab::graph::GraphSpec;

/// Parses the grammar above; errors name the offending fragment.
pub fn parse_graph_spec(text: &str) -> Result<GraphSpec, String> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let number = |field: &str, what: &str| -> Result<usize, String> {
        field
            .parse::<usize>()
            .map_err(|e| format!("bad {what} in `{text}`: {e}"))
    };
    let seed = |field: &str| -> Result<u64, String> {
        field
            .parse::<u64>()
            .map_err(|e| format!("bad seed in `{text}`: {e}"))
    };
    match kind {
        "cycle" => Ok(GraphSpec::Cycle {
            n: number(rest, "vertex count")?,
        }),
        "path" => Ok(GraphSpec::Path {
            n: number(rest, "vertex count")?,
        }),
        "two-path" => {
            let (n, s) = rest
                .split_once(':')
                .ok_or_else(|| format!("`{text}` wants two-path:N:SEED"))?;
            Ok(GraphSpec::TwoPath {
                n: number(n, "vertex count")?,
                seed: seed(s)?,
            })
        }
        "random-regular" => {
            let mut parts = rest.splitn(3, ':');
            let (n, d, s) = match (parts.next(), parts.next(), parts.next()) {
                (Some(n), Some(d), Some(s)) => (n, d, s),
                _ => return Err(format!("`{text}` wants random-regular:N:D:SEED")),
            };
            Ok(GraphSpec::RandomRegular {
                n: number(n, "vertex count")?,
                d: number(d, "degree")?,
                seed: seed(s)?,
            })
        }
        "double-cover" => Ok(GraphSpec::DoubleCover {
            base: Box::new(parse_graph_spec(rest)?),
        }),
        "two-copies" => Ok(GraphSpec::TwoCopies {
            base: Box::new(parse_graph_spec(rest)?),
        }),
        "union" => {
            let parts: Vec<GraphSpec> = rest
                .split('+')
                .map(parse_graph_spec)
                .collect::<Result<_, _>>()?;
            if parts.len() < 2 {
                return Err(format!("`{text}` wants union:SPEC+SPEC+…"));
            }
            Ok(GraphSpec::DisjointUnion { parts })
        }
        "pad" => {
            let (total, base) = rest
                .split_once(':')
                .ok_or_else(|| format!("`{text}` wants pad:TOTAL:SPEC"))?;
            let total = number(total, "total")?;
            Ok(GraphSpec::IsolatedPadding {
                base: Box::new(parse_graph_spec(base)?),
                total,
            })
        }
        other => Err(format!("unknown graph kind `{other}` in `{text}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use locality_lab::graph::generate;

    #[test]
    fn flat_specs_parse() {
        assert_eq!(parse_graph_spec("cycle:9"), Ok(GraphSpec::Cycle { n: 9 }));
        assert_eq!(parse_graph_spec("path:4"), Ok(GraphSpec::Path { n: 4 }));
        assert_eq!(
            parse_graph_spec("two-path:10:7"),
            Ok(GraphSpec::TwoPath { n: 10, seed: 7 })
        );
        assert_eq!(
            parse_graph_spec("random-regular:12:3:5"),
            Ok(GraphSpec::RandomRegular {
                n: 12,
                d: 3,
                seed: 5
            })
        );
    }

    #[test]
    fn operators_nest() {
        let spec = parse_graph_spec("pad:12:union:double-cover:cycle:3+path:2").unwrap();
        let g = generate(&spec).unwrap();
        assert_eq!(g.n(), 12);
        assert_eq!(g.edge_count(), 6 + 1);

        let spec = parse_graph_spec("two-copies:cycle:4").unwrap();
        assert_eq!(generate(&spec).unwrap().n(), 8);
    }

    #[test]
    fn malformed_specs_are_named() {
        for bad in [
            "cycle:x",
            "blob:3",
            "two-path:10",
            "union:cycle:3",
            "pad:cycle:3",
            "random-regular:8:2",
        ] {
            let err = parse_graph_spec(bad).unwrap_err();
            assert!(err.contains(bad.split(':').next().unwrap()), "{err}");
        }
    }
}
