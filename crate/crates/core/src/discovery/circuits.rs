//! Johnson's elementary circuit enumeration, run inside each strongly
//! connected component and driven by explicit stacks.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::scc::strongly_connected_components;
use super::{FoundAt, LoopCatalog, Provenance, WeightedDigraph};

struct Search<'g> {
    g: &'g WeightedDigraph,
    /// node -> itself while inside the searched node set, NONE otherwise
    member: Vec<usize>,
    blocked: Vec<bool>,
    blocked_by: Vec<BTreeSet<usize>>,
    cap: usize,
    catalog: LoopCatalog,
}

const NONE: usize = usize::MAX;

impl Search<'_> {
    fn in_scope(&self, node: usize) -> bool {
        self.member[node] != NONE
    }

    fn unblock(&mut self, node: usize) {
        let mut work = vec![node];
        while let Some(u) = work.pop() {
            if !self.blocked[u] {
                continue;
            }
            self.blocked[u] = false;
            work.extend(core::mem::take(&mut self.blocked_by[u]));
        }
    }

    fn record(&mut self, path: &[usize]) -> bool {
        if self.catalog.len() == self.cap {
            self.catalog.overflow = true;
            return false;
        }
        let n = path.len();
        let mut score = 1.0;
        for i in 0..n {
            score *= self.g.weight(path[i], path[(i + 1) % n]).unwrap_or(0.0);
        }
        let names: Vec<&str> = path.iter().map(|&v| self.g.name(v)).collect();
        self.catalog
            .insert(&names, score, FoundAt::Static)
            .expect("paths never repeat a node");
        true
    }

    /// All circuits through `s` within the scoped nodes. Returns false once
    /// the cap is exceeded.
    fn circuits_from(&mut self, s: usize) -> bool {
        // (node, next outbound position, found a circuit below)
        let mut frames: Vec<(usize, usize, bool)> = vec![(s, 0, false)];
        let mut path = vec![s];
        self.blocked[s] = true;
        while let Some(frame) = frames.last_mut() {
            let (v, pos) = (frame.0, frame.1);
            let out = self.g.outbound(v);
            if pos < out.len() {
                frame.1 += 1;
                let w = self.g.edges[out[pos]].dst;
                if !self.in_scope(w) {
                    continue;
                }
                if w == s {
                    frame.2 = true;
                    if !self.record(&path) {
                        return false;
                    }
                } else if !self.blocked[w] {
                    self.blocked[w] = true;
                    path.push(w);
                    frames.push((w, 0, false));
                }
                continue;
            }
            let found = frame.2;
            frames.pop();
            path.pop();
            if found {
                self.unblock(v);
            } else {
                for &e in self.g.outbound(v) {
                    let w = self.g.edges[e].dst;
                    if self.in_scope(w) {
                        self.blocked_by[w].insert(v);
                    }
                }
            }
            if let Some(parent) = frames.last_mut() {
                parent.2 |= found;
            }
        }
        true
    }
}

/// Every elementary circuit over the nonzero edges of `g`, each scored by the
/// signed product of its weights and found at [`FoundAt::Static`].
///
/// Stops after `cap` circuits; if another exists the catalog comes back with
/// `overflow` set.
pub fn enumerate_loops(g: &WeightedDigraph, cap: usize) -> LoopCatalog {
    let n = g.node_count();
    let mut search = Search {
        g,
        member: vec![NONE; n],
        blocked: vec![false; n],
        blocked_by: vec![BTreeSet::new(); n],
        cap,
        catalog: LoopCatalog::new(Provenance::Exhaustive),
    };

    let has_self_loop = |v: usize| g.successors(v).any(|w| w == v);
    // Work list of node sets still holding unsearched circuits.
    let mut work: Vec<Vec<usize>> = strongly_connected_components(n, |_| true, |v| g.successors(v))
        .into_iter()
        .filter(|c| c.len() > 1 || has_self_loop(c[0]))
        .collect();
    work.reverse();

    while let Some(component) = work.pop() {
        // the smallest node anchors this round; circuits through it are
        // found here, the rest of the component is searched again without it
        let s = component[0];
        for &v in &component {
            search.member[v] = v;
            search.blocked[v] = false;
            search.blocked_by[v].clear();
        }
        let complete = search.circuits_from(s);
        for &v in &component {
            search.member[v] = NONE;
        }
        if !complete {
            break;
        }

        let rest = &component[1..];
        for &v in rest {
            search.member[v] = v;
        }
        let member = &search.member;
        let inner = strongly_connected_components(
            n,
            |v| member[v] != NONE,
            move |v| g.successors(v).filter(move |&w| member[w] != NONE),
        );
        for &v in rest {
            search.member[v] = NONE;
        }
        for c in inner.into_iter().rev() {
            if c.len() > 1 || has_self_loop(c[0]) {
                work.push(c);
            }
        }
    }
    search.catalog
}
