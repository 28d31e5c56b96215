use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// On-disk graph encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// `n <count>` header followed by one `u v` line per edge, ascending.
    EdgeList,
    /// `{"n": .., "edges": [[u, v], ..], "covariate": [..] | null}`.
    Json,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    covariate: Option<Vec<u32>>,
}

impl Graph {
    pub fn serialize(&self, format: GraphFormat) -> Vec<u8> {
        match format {
            GraphFormat::EdgeList => self.to_edge_list().into_bytes(),
            GraphFormat::Json => self.to_json().into_bytes(),
        }
    }

    pub fn deserialize(bytes: &[u8], format: GraphFormat) -> Result<Graph> {
        let text = std::str::from_utf8(bytes).map_err(|e| {
            let offset = e.valid_up_to();
            let line = bytes[..offset].iter().filter(|&&b| b == b'\n').count() + 1;
            Error::parse(line, 0, format!("invalid UTF-8 at byte offset {offset}"))
        })?;
        match format {
            GraphFormat::EdgeList => Graph::from_edge_list(text),
            GraphFormat::Json => Graph::from_json(text),
        }
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for d in self.sorted_edges() {
            writeln!(out, "{} {}", d.u, d.v).expect("write to String");
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines().enumerate();
        let n = loop {
            let Some((i, line)) = lines.next() else {
                return Err(Error::parse(1, 1, "missing `n <count>` header"));
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some("n"), Some(count), None) => {
                    break count.parse::<usize>().map_err(|e| {
                        Error::parse(i + 1, 3, format!("bad node count `{count}`: {e}"))
                    })?;
                }
                _ => return Err(Error::parse(i + 1, 1, "expected header `n <count>`")),
            }
        };
        let mut g = Graph::empty(n).map_err(|e| Error::parse(1, 3, e.to_string()))?;
        for (i, line) in lines {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = Vec::with_capacity(2);
            for tok in line.split_whitespace() {
                let column = tok.as_ptr() as usize - line.as_ptr() as usize + 1;
                let x = tok.parse::<usize>().map_err(|e| {
                    Error::parse(line_no, column, format!("bad node index `{tok}`: {e}"))
                })?;
                fields.push((x, column));
            }
            let [(a, _), (b, col_b)] = fields[..] else {
                return Err(Error::parse(line_no, 1, "expected exactly two node indices"));
            };
            let d = super::Dyad::checked(a, b, n)
                .map_err(|e| Error::parse(line_no, col_b, e.to_string()))?;
            if g.has_edge(d) {
                return Err(Error::parse(line_no, 1, format!("duplicate edge {a} {b}")));
            }
            g.toggle(d);
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        let doc = GraphJson {
            n: self.n,
            edges: self
                .sorted_edges()
                .into_iter()
                .map(|d| [d.u as usize, d.v as usize])
                .collect(),
            covariate: self.covariate.clone(),
        };
        serde_json::to_string(&doc).expect("graph JSON is serializable")
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        let doc: GraphJson = serde_json::from_str(text)
            .map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        let mut g = Graph::from_edges(doc.n, doc.edges.iter().map(|e| (e[0], e[1])))
            .map_err(|e| Error::parse(1, 1, e.to_string()))?;
        g.set_covariate(doc.covariate)
            .map_err(|e| Error::parse(1, 1, e.to_string()))?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_edge_list() {
        let g = Graph::from_edges(3, [(1, 2), (0, 2), (0, 1)]).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "n 3\n0 1\n0 2\n1 2\n");
        assert_eq!(Graph::from_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn empty_graph_keeps_node_count() {
        let g = Graph::empty(5).unwrap();
        let bytes = g.serialize(GraphFormat::EdgeList);
        assert_eq!(bytes, b"n 5\n");
        let back = Graph::deserialize(&bytes, GraphFormat::EdgeList).unwrap();
        assert_eq!(back.node_count(), 5);
        assert_eq!(back.edge_count(), 0);
    }

    #[test]
    fn json_carries_group_labels() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)])
            .unwrap()
            .with_covariate(vec![0, 0, 1, 1])
            .unwrap();
        let text = g.to_json();
        assert!(text.contains("\"covariate\":[0,0,1,1]"));
        let back = Graph::from_json(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.covariate(), Some(&[0, 0, 1, 1][..]));
    }

    #[test]
    fn malformed_edge_list_reports_position() {
        let err = Graph::from_edge_list("n 4\n0 1\n2 x\n").unwrap_err();
        assert!(
            matches!(err, Error::Parse { line: 3, column: 3, .. }),
            "{err:?}"
        );
        let err = Graph::from_edge_list("n 4\n0 9\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let err = Graph::from_edge_list("nodes 4\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = Graph::from_edge_list("n 4\n0 1\n1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = Graph::from_json("{\"n\": 3,\n \"edges\": [[0, 1]],\n \"covariate\": nul}")
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = Graph::from_json("{\"n\": 3, \"edges\": [], \"covariate\": null, \"x\": 1}")
            .unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }
}
