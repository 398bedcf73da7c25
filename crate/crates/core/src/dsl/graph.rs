use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{Model, VarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphNode {
    pub name: String,
    pub kind: VarKind,
}

/// Causal dependency graph. Node `i` is model variable `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<Edge>,
}

impl Digraph {
    pub fn edge_index(&self, src: usize, dst: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.src == src && e.dst == dst)
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn name(&self, node: usize) -> &str {
        &self.nodes[node].name
    }

    pub fn is_stock(&self, node: usize) -> bool {
        self.nodes[node].kind == VarKind::Stock
    }

    /// Outbound adjacency lists holding edge indices, in edge order.
    pub fn outbound(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.src].push(i);
        }
        out
    }
}

/// Builds the dependency graph of a resolved model.
///
/// Edges run from every variable referenced in an Aux/Flow equation to that
/// variable, and from every attached flow to its stock. Stock initial values
/// and Const equations contribute no edges. Edges are ordered by declaration
/// order of the destination, then first occurrence of the source (for stocks:
/// inflows, then outflows).
pub fn dependency_graph(model: &Model) -> Digraph {
    let nodes: Vec<GraphNode> = model
        .variables
        .iter()
        .map(|v| GraphNode {
            name: v.name.clone(),
            kind: v.kind,
        })
        .collect();
    let index: BTreeMap<&str, usize> = model
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let lookup = |name: &str| index.get(name).copied();

    let mut edges = Vec::new();
    for (dst, var) in model.variables.iter().enumerate() {
        match var.kind {
            VarKind::Aux | VarKind::Flow => {
                for name in var.expr.references() {
                    if let Some(src) = lookup(name) {
                        edges.push(Edge { src, dst });
                    }
                }
            }
            VarKind::Stock => {
                for flow in var.inflows.iter().chain(&var.outflows) {
                    if let Some(src) = lookup(flow) {
                        edges.push(Edge { src, dst });
                    }
                }
            }
            VarKind::Const => {}
        }
    }
    Digraph { nodes, edges }
}
