//! Weighted edge lists: CSV with a `src,dst,weight` header. Lines starting
//! with `#` are comments.

use std::collections::BTreeMap;
use std::path::Path;

use feedscope_core::discovery::{WeightedDigraph, WeightedEdge, WeightedNode};
use feedscope_core::dsl::{Digraph, Edge, GraphNode, VarKind};

use crate::CliError;

/// A static graph read from an edge list. Nodes are numbered in order of
/// first appearance.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeList {
    pub nodes: Vec<String>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl EdgeList {
    /// The search graph. With `start` only that node is a search start point;
    /// otherwise every node is.
    pub fn weighted(&self, start: Option<&str>) -> WeightedDigraph {
        let nodes = self
            .nodes
            .iter()
            .map(|n| WeightedNode {
                name: n.clone(),
                is_stock: start.is_none_or(|s| s == n),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|&(src, dst, weight)| WeightedEdge { src, dst, weight })
            .collect();
        WeightedDigraph::new(nodes, edges).expect("checked while parsing")
    }

    /// The same graph as a dependency graph, every node treated as a stock.
    pub fn digraph(&self) -> Digraph {
        Digraph {
            nodes: self
                .nodes
                .iter()
                .map(|n| GraphNode {
                    name: n.clone(),
                    kind: VarKind::Stock,
                })
                .collect(),
            edges: self.edges.iter().map(|&(src, dst, _)| Edge { src, dst }).collect(),
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.2).collect()
    }
}

/// 1-based character column where field `field` starts on `line`.
fn column(line: &str, field: usize) -> usize {
    line.split(',')
        .take(field)
        .map(|f| f.chars().count() + 1)
        .sum::<usize>()
        + 1
}

pub fn parse_edges(path: &Path, text: &str) -> Result<EdgeList, CliError> {
    let lines: Vec<&str> = text.lines().collect();
    let raw = |line: usize| lines.get(line.saturating_sub(1)).copied().unwrap_or("");
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let located = |line: usize, field: usize, msg: String| CliError::located(path, line, column(raw(line), field), msg);
    let csv_error = |e: csv::Error| {
        let line = e.position().map_or(1, |p| p.line() as usize);
        located(line, 0, e.to_string())
    };

    let header = reader.headers().map_err(csv_error)?.clone();
    let header_line = reader.position().line().max(1) as usize;
    let mut out = EdgeList {
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    if header.is_empty() {
        return Ok(out);
    }
    let names: Vec<&str> = header.iter().collect();
    if names != ["src", "dst", "weight"] {
        // the reader has consumed the header; find its source line
        let line = lines
            .iter()
            .position(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map_or(header_line, |i| i + 1);
        return Err(located(
            line,
            0,
            format!("expected header src,dst,weight, found {}", names.join(",")),
        ));
    }

    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(located(
                line,
                0,
                format!("expected 3 fields (src,dst,weight), found {}", record.len()),
            ));
        }
        let mut node = |field: usize| -> Result<usize, CliError> {
            let name = &record[field];
            if name.is_empty() {
                return Err(located(line, field, "empty node name".into()));
            }
            let next = index.len();
            Ok(*index.entry(name.to_string()).or_insert_with(|| {
                out.nodes.push(name.to_string());
                next
            }))
        };
        let src = node(0)?;
        let dst = node(1)?;
        let weight: f64 = record[2]
            .parse()
            .map_err(|_| located(line, 2, format!("weight '{}' is not a number", &record[2])))?;
        if !weight.is_finite() {
            return Err(located(line, 2, format!("weight '{}' is not finite", &record[2])));
        }
        if let Some(first) = seen.insert((src, dst), line) {
            return Err(located(
                line,
                0,
                format!(
                    "duplicate edge {} -> {} (first on line {first})",
                    &record[0], &record[1]
                ),
            ));
        }
        out.edges.push((src, dst, weight));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<EdgeList, String> {
        parse_edges(Path::new("g.csv"), text).map_err(|e| e.to_string())
    }

    #[test]
    fn reads_edges_in_order() {
        let g = parse("# comment\nsrc,dst,weight\na,b,1.5\n b , a , -2\n").unwrap();
        assert_eq!(g.nodes, vec!["a", "b"]);
        assert_eq!(g.edges, vec![(0, 1, 1.5), (1, 0, -2.0)]);
        let w = g.weighted(Some("b"));
        assert!(!w.nodes[0].is_stock && w.nodes[1].is_stock);
    }

    #[test]
    fn empty_inputs_give_empty_graphs() {
        assert_eq!(parse("").unwrap().edges.len(), 0);
        assert_eq!(parse("src,dst,weight\n").unwrap().edges.len(), 0);
        assert_eq!(parse("# nothing\n").unwrap().edges.len(), 0);
    }

    #[test]
    fn errors_are_located() {
        assert_eq!(
            parse("src,dst,weight\na,b,1\nb,c,heavy\n").unwrap_err(),
            "g.csv:3:5: error: weight 'heavy' is not a number"
        );
        assert_eq!(
            parse("# c\nsrc,dst,weight\na,b\n").unwrap_err(),
            "g.csv:3:1: error: expected 3 fields (src,dst,weight), found 2"
        );
        assert_eq!(
            parse("from,to,w\n").unwrap_err(),
            "g.csv:1:1: error: expected header src,dst,weight, found from,to,w"
        );
        assert_eq!(
            parse("src,dst,weight\na,b,1\na,b,2\n").unwrap_err(),
            "g.csv:3:1: error: duplicate edge a -> b (first on line 2)"
        );
        assert_eq!(
            parse("src,dst,weight\na,,1\n").unwrap_err(),
            "g.csv:2:3: error: empty node name"
        );
        assert!(parse("src,dst,weight\na,b,inf\n").unwrap_err().contains("not finite"));
    }
}
