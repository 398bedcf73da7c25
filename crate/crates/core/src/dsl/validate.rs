use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::ast::{Model, VarKind};
use super::graph::dependency_graph;
use super::Diagnostic;
use crate::discovery::scc::strongly_connected_components;

/// Semantic checks on a parsed model. An empty result means the model can be
/// simulated: every feedback cycle passes through a stock, Const equations
/// depend only on Consts, and stock initial values form no cycle.
pub fn validate(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let index: BTreeMap<&str, usize> = model
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let kind_of = |name: &str| index.get(name).map(|&i| model.variables[i].kind);

    if let Err(e) = model.run_spec.steps() {
        out.push(Diagnostic::error(Default::default(), format!("{e}")));
    }

    for var in &model.variables {
        for (name, span) in var.expr.reference_spans() {
            match (var.kind, kind_of(name)) {
                (_, None) => out.push(Diagnostic::error(span, format!("unresolved reference {name}"))),
                (VarKind::Aux | VarKind::Flow, Some(_)) if name == var.name => {
                    out.push(Diagnostic::error(span, format!("{} refers to itself", var.name)))
                }
                (VarKind::Const, Some(k)) if k != VarKind::Const => out.push(Diagnostic::error(
                    span,
                    format!("constant {} may only refer to constants, not {name}", var.name),
                )),
                (VarKind::Stock, Some(VarKind::Aux | VarKind::Flow)) => out.push(Diagnostic::error(
                    span,
                    format!(
                        "initial value of stock {} may only refer to constants and stocks, not {name}",
                        var.name
                    ),
                )),
                _ => {}
            }
        }
    }

    // Instantaneous dependencies: Const->Const, Stock->Stock (initial values),
    // and Aux/Flow equations. Flow->stock wiring is excluded because stocks
    // integrate; any cycle left over is an algebraic loop.
    let n = model.variables.len();
    let mut deps: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for (dst, var) in model.variables.iter().enumerate() {
        for name in var.expr.references() {
            if let Some(&src) = index.get(name) {
                let instantaneous = match var.kind {
                    VarKind::Aux | VarKind::Flow => src != dst && model.variables[src].kind != VarKind::Stock,
                    VarKind::Const => model.variables[src].kind == VarKind::Const,
                    VarKind::Stock => model.variables[src].kind == VarKind::Stock,
                };
                if instantaneous {
                    deps[src].push(dst);
                }
            }
        }
    }
    let components = strongly_connected_components(n, |_| true, |v| deps[v].iter().copied());
    let mut cyclic: Vec<Vec<usize>> = components
        .into_iter()
        .filter(|c| c.len() > 1 || deps[c[0]].contains(&c[0]))
        .collect();
    cyclic.sort();
    for members in cyclic {
        let names: Vec<&str> = members.iter().map(|&i| model.variables[i].name.as_str()).collect();
        let first = &model.variables[members[0]];
        let what = match first.kind {
            VarKind::Const => "circular constant definitions",
            VarKind::Stock => "circular stock initial values",
            _ => "algebraic loop",
        };
        out.push(Diagnostic::error(first.span, format!("{what}: {}", names.join(", "))));
    }

    out.sort_by_key(|d| d.span);
    out
}

/// Every cycle of the dependency graph contains a stock.
pub fn every_cycle_has_stock(model: &Model) -> bool {
    let g = dependency_graph(model);
    let out = g.outbound();
    let non_stock = |v: usize| g.nodes[v].kind != VarKind::Stock;
    strongly_connected_components(g.nodes.len(), non_stock, |v| out[v].iter().map(|&e| g.edges[e].dst))
        .iter()
        .all(|c| c.len() == 1 && !out[c[0]].iter().any(|&e| g.edges[e].dst == c[0]))
}
