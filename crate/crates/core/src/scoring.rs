//! Link scores: how much of an output's change over one step is explained by
//! the change in one of its inputs, signed by the direction of influence.
//!
//! For an edge `x -> z` into an Aux/Flow `z` at step `k >= 1`:
//!
//! 1. IF nodes in `z`'s equation are fixed to the arms recorded when `z(t_k)`
//!    was computed. If `x` no longer occurs, the score is 0.
//! 2. `dz = z(t_k) - z(t_{k-1})`, and `dxz` is the equation evaluated with `x`
//!    at `t_k` and every other input at `t_{k-1}`, minus the equation with all
//!    inputs at `t_{k-1}`. The score is `|dxz / dz| * sign(dxz * dx)`.
//!
//! For a flow `f` attached to stock `S` the score is `|f(t_{k-1}) * dt / dS|`,
//! positive for inflows and negative for outflows.
//!
//! Any zero change (`dz`, `dx` or `dS`) scores 0, as does every edge at `t_0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::dsl::{dependency_graph, Digraph, Model, VarKind};
use crate::sim::eval::{self, gated_references, Branch, Branches, Inputs};
use crate::sim::{Replayer, RunResult};

/// Signed score of every dependency edge at every time `t_0..=t_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkScoreSeries {
    pub graph: Digraph,
    pub times: Vec<f64>,
    /// `scores[edge][k]`, aligned with `graph.edges`.
    pub scores: Vec<Vec<f64>>,
}

impl LinkScoreSeries {
    /// Number of steps `n`; scores exist for `k = 0..=n`.
    pub fn steps(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    pub fn edge_by_name(&self, src: &str, dst: &str) -> Option<usize> {
        let s = self.graph.node_index(src)?;
        let d = self.graph.node_index(dst)?;
        self.graph.edge_index(s, d)
    }

    pub fn series(&self, src: &str, dst: &str) -> Option<&[f64]> {
        self.edge_by_name(src, dst).map(|e| self.scores[e].as_slice())
    }

    /// A one-step series carrying fixed `weights`, for graphs that have no
    /// simulation behind them.
    pub fn constant(graph: Digraph, weights: &[f64]) -> Self {
        LinkScoreSeries {
            times: vec![0.0, 1.0],
            scores: weights.iter().map(|&w| vec![0.0, w]).collect(),
            graph,
        }
    }

    /// Scores of all edges at step `k`.
    pub fn at(&self, k: usize) -> Vec<f64> {
        self.scores.iter().map(|s| s[k]).collect()
    }
}

struct Mixed<'a> {
    values: &'a [Vec<f64>],
    k: usize,
    /// the one input taken at `t_k`; everything else is at `t_{k-1}`
    changed: Option<usize>,
    time: f64,
    dt: f64,
}

impl Inputs for Mixed<'_> {
    fn value(&self, var: usize) -> f64 {
        if Some(var) == self.changed {
            self.values[var][self.k]
        } else {
            self.values[var][self.k - 1]
        }
    }
    fn time(&self) -> f64 {
        self.time
    }
    fn dt(&self) -> f64 {
        self.dt
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn finite_or_zero(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        0.0
    }
}

struct Scorer<'m> {
    model: &'m Model,
    graph: Digraph,
    replay: Replayer,
    /// +1 inflow / -1 outflow for flow->stock edges, 0 otherwise
    flow_sign: Vec<f64>,
}

impl<'m> Scorer<'m> {
    fn new(model: &'m Model) -> Self {
        let graph = dependency_graph(model);
        let flow_sign = graph
            .edges
            .iter()
            .map(|e| {
                let dst = &model.variables[e.dst];
                if dst.kind != VarKind::Stock {
                    0.0
                } else if dst.inflows.iter().any(|f| *f == model.variables[e.src].name) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        Scorer {
            model,
            graph,
            replay: Replayer::new(model),
            flow_sign,
        }
    }

    fn step(&self, run: &RunResult, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.graph.edges.len()];
        if k == 0 {
            return out;
        }
        let values = &run.values;
        let dt = run.spec.dt;
        let mut gated: Vec<Option<Vec<usize>>> = vec![None; self.model.variables.len()];

        for (i, e) in self.graph.edges.iter().enumerate() {
            let (x, z) = (e.src, e.dst);
            if self.model.variables[z].kind == VarKind::Stock {
                let ds = values[z][k] - values[z][k - 1];
                if ds != 0.0 {
                    let contribution = self.flow_sign[i] * values[x][k - 1] * dt;
                    out[i] = finite_or_zero((contribution / ds).abs() * self.flow_sign[i]);
                }
                continue;
            }

            let trace: &[Branch] = run.branch_trace.at(z, k);
            let refs = gated[z].get_or_insert_with(|| {
                let mut r = Vec::new();
                gated_references(self.replay.root(z), trace, &mut r);
                r
            });
            if !refs.contains(&x) {
                continue;
            }
            let dz = values[z][k] - values[z][k - 1];
            let dx = values[x][k] - values[x][k - 1];
            if dz == 0.0 || dx == 0.0 {
                continue;
            }
            let inputs = |changed| Mixed {
                values,
                k,
                changed,
                time: run.times[k - 1],
                dt,
            };
            let root = self.replay.root(z);
            let base = eval::eval(root, &inputs(None), &mut Branches::Replay(trace));
            let moved = eval::eval(root, &inputs(Some(x)), &mut Branches::Replay(trace));
            if let (Ok(base), Ok(moved)) = (base, moved) {
                let dxz = moved - base;
                out[i] = finite_or_zero((dxz / dz).abs() * sign(dxz) * sign(dx));
            }
        }
        out
    }
}

/// Scores of every dependency edge (in [`dependency_graph`] order) at step
/// `k` of `run`.
pub fn link_score_step(model: &Model, run: &RunResult, k: usize) -> Vec<f64> {
    Scorer::new(model).step(run, k)
}

/// Link scores for every step of `run`.
pub fn score_all(model: &Model, run: &RunResult) -> LinkScoreSeries {
    let scorer = Scorer::new(model);
    let n = run.steps();
    let mut scores = vec![vec![0.0; n + 1]; scorer.graph.edges.len()];
    for k in 1..=n {
        for (row, s) in scores.iter_mut().zip(scorer.step(run, k)) {
            row[k] = s;
        }
    }
    LinkScoreSeries {
        graph: scorer.graph,
        times: run.times.clone(),
        scores,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompositeMode {
    /// Largest magnitude over the run, signed like that observation.
    Max,
    /// Mean magnitude over steps `1..=n`, signed by the majority of nonzero
    /// observations (ties positive).
    Avg,
}

/// One static weight per edge summarizing a whole run.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeWeights {
    pub mode: CompositeMode,
    pub weights: Vec<f64>,
}

pub fn composite_scores(series: &LinkScoreSeries, mode: CompositeMode) -> CompositeWeights {
    let n = series.steps();
    let weights = series
        .scores
        .iter()
        .map(|s| match mode {
            CompositeMode::Max => {
                let mut best = 0.0f64;
                for &v in s {
                    // strict: the earliest maximum keeps its sign
                    if v.abs() > best.abs() {
                        best = v;
                    }
                }
                best
            }
            CompositeMode::Avg => {
                if n == 0 {
                    return 0.0;
                }
                let active = &s[1..];
                let mean = active.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
                let positive = active.iter().filter(|&&v| v > 0.0).count();
                let negative = active.iter().filter(|&&v| v < 0.0).count();
                if negative > positive {
                    -mean
                } else {
                    mean
                }
            }
        })
        .collect();
    CompositeWeights { mode, weights }
}
