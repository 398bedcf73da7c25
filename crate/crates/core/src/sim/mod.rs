//! Fixed-step Euler simulation.

pub(crate) mod eval;

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::dsl::{Model, Span, VarKind};
pub use crate::dsl::{RunSpec, RunSpecError};
pub use eval::Branch;
use eval::{compile_model, Branches, Equation, Fault, FaultKind, Inputs, Node};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("{span}: division by zero in {variable} at step {step} (time {time})")]
    DivisionByZero {
        variable: String,
        step: usize,
        time: f64,
        span: Span,
    },
    #[error("{span}: {variable} is not finite at step {step} (time {time})")]
    NonFinite {
        variable: String,
        step: usize,
        time: f64,
        span: Span,
    },
    #[error("invalid run spec: {0}")]
    RunSpec(#[from] RunSpecError),
}

/// IF decisions for every equation at every evaluated step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchTrace {
    if_counts: Vec<usize>,
    // per variable: `steps * if_count` decisions, step-major
    decisions: Vec<Vec<Branch>>,
}

impl BranchTrace {
    /// Decisions for `var`'s IF nodes (pre-order) when evaluated at step `k`.
    pub fn at(&self, var: usize, k: usize) -> &[Branch] {
        let n = self.if_counts[var];
        &self.decisions[var][k * n..(k + 1) * n]
    }

    pub fn if_count(&self, var: usize) -> usize {
        self.if_counts[var]
    }
}

/// Every variable at every time `t_0..=t_n`.
///
/// Aux and Flow values at `t_k` are computed from stocks at `t_k`; stocks at
/// `t_{k+1}` integrate the flows of `t_k`. Branch decisions are recorded for
/// steps `0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub spec: RunSpec,
    pub names: Vec<String>,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub branch_trace: BranchTrace,
}

impl RunResult {
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i].as_slice())
    }
}

/// Topological order of Aux/Flow variables under instantaneous dependencies,
/// ties broken by declaration order. Stocks and Consts are excluded.
pub fn evaluation_order(model: &Model) -> Vec<usize> {
    let graph = crate::dsl::dependency_graph(model);
    let n = model.variables.len();
    let computed = |i: usize| matches!(model.variables[i].kind, VarKind::Aux | VarKind::Flow);
    let mut indegree = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &graph.edges {
        if computed(e.src) && computed(e.dst) && e.src != e.dst {
            indegree[e.dst] += 1;
            succ[e.src].push(e.dst);
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n)
        .filter(|&i| computed(i) && indegree[i] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::new();
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &w in &succ[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(Reverse(w));
            }
        }
    }
    order
}

/// Names in evaluation order.
pub fn evaluation_order_names(model: &Model) -> Vec<&str> {
    evaluation_order(model)
        .into_iter()
        .map(|i| model.variables[i].name.as_str())
        .collect()
}

/// Order for one-time evaluation: Consts and stock initial values, each after
/// the Consts/stocks it references.
fn initial_order(model: &Model) -> Vec<usize> {
    let n = model.variables.len();
    let fixed = |i: usize| matches!(model.variables[i].kind, VarKind::Const | VarKind::Stock);
    let mut indegree = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (dst, var) in model.variables.iter().enumerate() {
        if !fixed(dst) {
            continue;
        }
        for name in var.expr.references() {
            if let Some(src) = model.index_of(name) {
                if fixed(src) {
                    indegree[dst] += 1;
                    succ[src].push(dst);
                }
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| fixed(i) && indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::new();
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &w in &succ[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(Reverse(w));
            }
        }
    }
    order
}

struct StepInputs<'a> {
    values: &'a [Vec<f64>],
    k: usize,
    time: f64,
    dt: f64,
}

impl Inputs for StepInputs<'_> {
    fn value(&self, var: usize) -> f64 {
        self.values[var][self.k]
    }
    fn time(&self) -> f64 {
        self.time
    }
    fn dt(&self) -> f64 {
        self.dt
    }
}

/// Runs `model` over `spec`. The model must have passed validation.
pub fn simulate(model: &Model, spec: &RunSpec) -> Result<RunResult, SimError> {
    let steps = spec.steps()?;
    let eqs = compile_model(model);
    let nvars = model.variables.len();
    let mut values: Vec<Vec<f64>> = vec![vec![0.0; steps + 1]; nvars];
    let if_counts: Vec<usize> = eqs.iter().map(|e| e.if_count).collect();
    let mut decisions: Vec<Vec<Branch>> = if_counts
        .iter()
        .map(|&c| vec![Branch::Unreached; c * (steps + 1)])
        .collect();
    let times: Vec<f64> = (0..=steps).map(|k| spec.time(k)).collect();

    let fault = |f: Fault, var: usize, k: usize| {
        let variable = model.variables[var].name.clone();
        let time = times[k];
        match f.kind {
            FaultKind::DivisionByZero => SimError::DivisionByZero {
                variable,
                step: k,
                time,
                span: f.span,
            },
            FaultKind::NonFinite => SimError::NonFinite {
                variable,
                step: k,
                time,
                span: f.span,
            },
        }
    };
    let check = |v: f64, var: usize, k: usize| -> Result<f64, SimError> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(fault(
                Fault {
                    kind: FaultKind::NonFinite,
                    span: eqs[var].span,
                },
                var,
                k,
            ))
        }
    };

    // Consts and initial stocks, computed once, held in column 0.
    for var in initial_order(model) {
        let inputs = StepInputs {
            values: &values,
            k: 0,
            time: times[0],
            dt: spec.dt,
        };
        let trace = &mut decisions[var][..if_counts[var]];
        let v = eval::eval(&eqs[var].root, &inputs, &mut Branches::Record(trace)).map_err(|f| fault(f, var, 0))?;
        values[var][0] = check(v, var, 0)?;
    }
    for (i, var) in model.variables.iter().enumerate() {
        if var.kind == VarKind::Const {
            let c = values[i][0];
            values[i].fill(c);
        }
    }

    let order = evaluation_order(model);
    let attachments: Vec<(usize, Vec<usize>, Vec<usize>)> = model
        .variables
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_stock())
        .map(|(i, v)| {
            let idx = |names: &[String]| -> Vec<usize> { names.iter().filter_map(|n| model.index_of(n)).collect() };
            (i, idx(&v.inflows), idx(&v.outflows))
        })
        .collect();

    for k in 0..=steps {
        for &var in &order {
            let inputs = StepInputs {
                values: &values,
                k,
                time: times[k],
                dt: spec.dt,
            };
            let n = if_counts[var];
            let trace = &mut decisions[var][k * n..(k + 1) * n];
            let v = eval::eval(&eqs[var].root, &inputs, &mut Branches::Record(trace)).map_err(|f| fault(f, var, k))?;
            values[var][k] = check(v, var, k)?;
        }
        if k == steps {
            break;
        }
        for (stock, inflows, outflows) in &attachments {
            let inflow: f64 = inflows.iter().map(|&f| values[f][k]).sum();
            let outflow: f64 = outflows.iter().map(|&f| values[f][k]).sum();
            let next = values[*stock][k] + spec.dt * (inflow - outflow);
            values[*stock][k + 1] = check(next, *stock, k + 1)?;
        }
    }

    Ok(RunResult {
        spec: *spec,
        names: model.names(),
        times,
        values,
        branch_trace: BranchTrace { if_counts, decisions },
    })
}

/// Evaluates the compiled equation of `var` with an arbitrary input mix,
/// replaying the branches recorded at step `k`.
pub(crate) struct Replayer {
    pub(crate) eqs: Vec<Equation>,
}

impl Replayer {
    pub(crate) fn new(model: &Model) -> Self {
        Replayer {
            eqs: compile_model(model),
        }
    }

    pub(crate) fn root(&self, var: usize) -> &Node {
        &self.eqs[var].root
    }
}
