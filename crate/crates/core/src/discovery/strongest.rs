//! The strongest-path loop search.
//!
//! From each stock (the TARGET) a depth-first walk carries the product of the
//! link scores along its path. A variable is expanded only when reached with a
//! larger magnitude than on any earlier visit in the same pass, and a walk
//! that returns to TARGET records the loop. Arriving at any other variable on
//! the current path ends that branch; the loop it closes belongs to another
//! stock's search.

use alloc::vec;
use alloc::vec::Vec;

use super::{FoundAt, LoopCatalog, WeightedDigraph};

/// Counters accumulated over one or more passes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PassStats {
    /// Variables tested (each call of the visit check).
    pub visits: u64,
    /// Variables expanded after passing the best-score test.
    pub expansions: u64,
    /// Loops closed at TARGET, including ones already in the registry.
    pub loops_closed: u64,
    /// Expansions whose carried magnitude exceeded the parent's.
    pub score_increases: u64,
}

struct Frame {
    node: usize,
    score: f64,
    next: usize,
}

/// One pass over every stock of `g`, adding new loops to `registry` with
/// `found_at`. Outbound lists are walked in `g`'s order, which is descending
/// `|weight|` unless the graph was built otherwise.
pub fn strongest_path_pass(g: &WeightedDigraph, registry: &mut LoopCatalog, found_at: FoundAt, stats: &mut PassStats) {
    let n = g.node_count();
    let mut best = vec![0.0f64; n];
    let mut visiting = vec![false; n];
    let mut path: Vec<usize> = Vec::new();
    let mut frames: Vec<Frame> = Vec::new();
    let mut names: Vec<&str> = Vec::new();

    for target in (0..n).filter(|&v| g.nodes[v].is_stock) {
        // the walk starts by testing TARGET itself with score 1
        let mut pending = Some((target, 1.0f64, 1.0f64));
        loop {
            if let Some((v, score, parent)) = pending.take() {
                stats.visits += 1;
                if visiting[v] {
                    if v == target {
                        stats.loops_closed += 1;
                        names.clear();
                        names.extend(path.iter().map(|&u| g.name(u)));
                        registry
                            .insert(&names, score, found_at)
                            .expect("the path never repeats a node");
                    }
                } else if score.abs() > best[v] {
                    best[v] = score.abs();
                    visiting[v] = true;
                    path.push(v);
                    frames.push(Frame {
                        node: v,
                        score,
                        next: 0,
                    });
                    stats.expansions += 1;
                    if score.abs() > parent.abs() {
                        stats.score_increases += 1;
                    }
                }
            }
            let Some(top) = frames.last_mut() else {
                break;
            };
            let out = g.outbound(top.node);
            if top.next < out.len() {
                let edge = &g.edges[out[top.next]];
                top.next += 1;
                pending = Some((edge.dst, top.score * edge.weight, top.score));
            } else {
                visiting[top.node] = false;
                path.pop();
                frames.pop();
            }
        }
    }
}
