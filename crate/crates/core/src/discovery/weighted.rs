use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dsl::Digraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedNode {
    pub name: String,
    /// Search start points for the strongest-path pass.
    pub is_stock: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedEdge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// How outbound edges are ordered for the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutboundOrder {
    /// Descending `|weight|`; equal magnitudes keep edge order.
    #[default]
    ByMagnitude,
    /// Edge order as given.
    AsGiven,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("edge {src} -> {dst} has non-finite weight {weight}")]
    NonFinite { src: String, dst: String, weight: f64 },
    #[error("duplicate edge {src} -> {dst}")]
    Duplicate { src: String, dst: String },
    #[error("edge refers to node {0} which does not exist")]
    NoSuchNode(usize),
}

/// A static directed graph with one signed weight per edge.
///
/// Zero-weight edges are kept in [`edges`](Self::edges) but left out of the
/// outbound lists, so no search ever follows them.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedDigraph {
    pub nodes: Vec<WeightedNode>,
    pub edges: Vec<WeightedEdge>,
    outbound: Vec<Vec<usize>>,
    order: OutboundOrder,
}

impl WeightedDigraph {
    pub fn new(nodes: Vec<WeightedNode>, edges: Vec<WeightedEdge>) -> Result<Self, GraphError> {
        let n = nodes.len();
        let mut seen = Vec::with_capacity(edges.len());
        for e in &edges {
            if e.src >= n {
                return Err(GraphError::NoSuchNode(e.src));
            }
            if e.dst >= n {
                return Err(GraphError::NoSuchNode(e.dst));
            }
            if !e.weight.is_finite() {
                return Err(GraphError::NonFinite {
                    src: nodes[e.src].name.clone(),
                    dst: nodes[e.dst].name.clone(),
                    weight: e.weight,
                });
            }
            seen.push((e.src, e.dst));
        }
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::Duplicate {
                src: nodes[w[0].0].name.clone(),
                dst: nodes[w[0].1].name.clone(),
            });
        }

        let mut g = WeightedDigraph {
            outbound: vec![Vec::new(); n],
            nodes,
            edges,
            order: OutboundOrder::ByMagnitude,
        };
        g.rebuild_outbound();
        Ok(g)
    }

    /// The dependency graph of a model with `weights` aligned to its edges.
    /// Stocks are the search start points.
    pub fn from_digraph(graph: &Digraph, weights: &[f64]) -> Result<Self, GraphError> {
        let nodes = graph
            .nodes
            .iter()
            .map(|n| WeightedNode {
                name: n.name.clone(),
                is_stock: n.kind == crate::dsl::VarKind::Stock,
            })
            .collect();
        let edges = graph
            .edges
            .iter()
            .zip(weights)
            .map(|(e, &weight)| WeightedEdge {
                src: e.src,
                dst: e.dst,
                weight,
            })
            .collect();
        Self::new(nodes, edges)
    }

    /// Replaces every edge weight (aligned with [`edges`](Self::edges)) and
    /// re-sorts the outbound lists.
    pub fn set_weights(&mut self, weights: &[f64]) -> Result<(), GraphError> {
        for (e, &w) in self.edges.iter_mut().zip(weights) {
            if !w.is_finite() {
                return Err(GraphError::NonFinite {
                    src: self.nodes[e.src].name.clone(),
                    dst: self.nodes[e.dst].name.clone(),
                    weight: w,
                });
            }
            e.weight = w;
        }
        self.rebuild_outbound();
        Ok(())
    }

    pub fn with_order(mut self, order: OutboundOrder) -> Self {
        self.order = order;
        self.rebuild_outbound();
        self
    }

    pub fn order(&self) -> OutboundOrder {
        self.order
    }

    fn rebuild_outbound(&mut self) {
        for list in &mut self.outbound {
            list.clear();
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.weight != 0.0 {
                self.outbound[e.src].push(i);
            }
        }
        if self.order == OutboundOrder::ByMagnitude {
            let edges = &self.edges;
            for list in &mut self.outbound {
                // stable, so ties keep edge order
                list.sort_by(|&a, &b| edges[b].weight.abs().total_cmp(&edges[a].weight.abs()));
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Indices into [`edges`](Self::edges) of the nonzero edges leaving `node`,
    /// in search order.
    pub fn outbound(&self, node: usize) -> &[usize] {
        &self.outbound[node]
    }

    pub fn successors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.outbound[node].iter().map(|&e| self.edges[e].dst)
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn name(&self, node: usize) -> &str {
        &self.nodes[node].name
    }

    /// Weight of the nonzero edge `src -> dst`, if any.
    pub fn weight(&self, src: usize, dst: usize) -> Option<f64> {
        self.outbound[src]
            .iter()
            .map(|&e| &self.edges[e])
            .find(|e| e.dst == dst)
            .map(|e| e.weight)
    }
}
