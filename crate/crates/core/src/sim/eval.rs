//! Equations compiled to index-addressed trees, plus the evaluators used by the
//! simulator (recording IF branches), link scoring (replaying them) and gain
//! analysis (symbolic partial derivatives).

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::dsl::{BinOp, Builtin, Expr, ExprKind, Model, Span};

/// Which arm of an IF node was taken at a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Then,
    Else,
    /// The node sits inside an arm that was not taken, so it was not evaluated.
    Unreached,
}

#[derive(Clone, Debug)]
pub(crate) enum Node {
    Num(f64),
    Var(usize),
    Dt,
    Time,
    Neg(Box<Node>),
    Not(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>, Span),
    If {
        id: usize,
        cond: Box<Node>,
        then: Box<Node>,
        other: Box<Node>,
    },
    Call(Builtin, Vec<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum FaultKind {
    DivisionByZero,
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Fault {
    pub kind: FaultKind,
    pub span: Span,
}

/// Values visible to an equation.
pub(crate) trait Inputs {
    fn value(&self, var: usize) -> f64;
    fn time(&self) -> f64;
    fn dt(&self) -> f64;
}

/// A compiled equation. IF nodes are numbered in pre-order.
#[derive(Clone, Debug)]
pub(crate) struct Equation {
    pub root: Node,
    pub if_count: usize,
    pub span: Span,
}

pub(crate) fn compile_model(model: &Model) -> Vec<Equation> {
    let index: BTreeMap<&str, usize> = model
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    model
        .variables
        .iter()
        .map(|v| {
            let mut ifs = 0;
            let root = compile(&v.expr, &index, &mut ifs);
            Equation {
                root,
                if_count: ifs,
                span: v.span,
            }
        })
        .collect()
}

fn compile(e: &Expr, index: &BTreeMap<&str, usize>, ifs: &mut usize) -> Node {
    let sub = |e: &Expr, ifs: &mut usize| Box::new(compile(e, index, ifs));
    match &e.kind {
        ExprKind::Num(v) => Node::Num(*v),
        // names are resolved before compilation
        ExprKind::Var(name) => Node::Var(index[name.as_str()]),
        ExprKind::Dt => Node::Dt,
        ExprKind::Time => Node::Time,
        ExprKind::Neg(a) => Node::Neg(sub(a, ifs)),
        ExprKind::Not(a) => Node::Not(sub(a, ifs)),
        ExprKind::Binary(op, a, b) => {
            let a = sub(a, ifs);
            let b = sub(b, ifs);
            Node::Bin(*op, a, b, e.span)
        }
        ExprKind::If(c, t, o) => {
            let id = *ifs;
            *ifs += 1;
            let cond = sub(c, ifs);
            let then = sub(t, ifs);
            let other = sub(o, ifs);
            Node::If { id, cond, then, other }
        }
        ExprKind::Call(f, args) => Node::Call(*f, args.iter().map(|a| compile(a, index, ifs)).collect()),
    }
}

fn truth(v: f64) -> f64 {
    if v != 0.0 {
        1.0
    } else {
        0.0
    }
}

/// How IF nodes pick their arm.
pub(crate) enum Branches<'a> {
    /// Evaluate the condition and write the decision.
    Record(&'a mut [Branch]),
    /// Use previously recorded decisions.
    Replay(&'a [Branch]),
}

impl Branches<'_> {
    fn decide(&mut self, id: usize, cond: impl FnOnce(&mut Self) -> Result<f64, Fault>) -> Result<Branch, Fault> {
        match self {
            Branches::Replay(trace) => Ok(trace[id]),
            Branches::Record(_) => {
                let c = cond(self)?;
                let b = if c != 0.0 { Branch::Then } else { Branch::Else };
                if let Branches::Record(trace) = self {
                    trace[id] = b;
                }
                Ok(b)
            }
        }
    }
}

pub(crate) fn eval(node: &Node, inputs: &impl Inputs, branches: &mut Branches<'_>) -> Result<f64, Fault> {
    let v = match node {
        Node::Num(v) => *v,
        Node::Var(i) => inputs.value(*i),
        Node::Dt => inputs.dt(),
        Node::Time => inputs.time(),
        Node::Neg(a) => -eval(a, inputs, branches)?,
        Node::Not(a) => 1.0 - truth(eval(a, inputs, branches)?),
        Node::Bin(op, a, b, span) => {
            let x = eval(a, inputs, branches)?;
            let y = eval(b, inputs, branches)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(Fault {
                            kind: FaultKind::DivisionByZero,
                            span: *span,
                        });
                    }
                    x / y
                }
                BinOp::Lt => truth_of(x < y),
                BinOp::Gt => truth_of(x > y),
                BinOp::Le => truth_of(x <= y),
                BinOp::Ge => truth_of(x >= y),
                BinOp::Eq => truth_of(x == y),
                BinOp::Ne => truth_of(x != y),
                BinOp::And => truth_of(x != 0.0 && y != 0.0),
                BinOp::Or => truth_of(x != 0.0 || y != 0.0),
            }
        }
        Node::If { id, cond, then, other } => match branches.decide(*id, |b| eval(cond, inputs, b))? {
            Branch::Then => eval(then, inputs, branches)?,
            Branch::Else => eval(other, inputs, branches)?,
            Branch::Unreached => unreachable!("replayed IF node was never evaluated"),
        },
        Node::Call(f, args) => {
            let mut acc: Option<f64> = None;
            for a in args {
                let x = eval(a, inputs, branches)?;
                acc = Some(match (f, acc) {
                    (Builtin::Abs, _) => x.abs(),
                    (_, None) => x,
                    (Builtin::Min, Some(m)) => m.min(x),
                    (Builtin::Max, Some(m)) => m.max(x),
                });
            }
            acc.unwrap_or(0.0)
        }
    };
    Ok(v)
}

fn truth_of(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Variables that occur in the equation once every IF is replaced by its
/// recorded arm. Condition-only variables are not included.
pub(crate) fn gated_references(node: &Node, trace: &[Branch], out: &mut Vec<usize>) {
    match node {
        Node::Var(i) => {
            if !out.contains(i) {
                out.push(*i);
            }
        }
        Node::Num(_) | Node::Dt | Node::Time => {}
        Node::Neg(a) | Node::Not(a) => gated_references(a, trace, out),
        Node::Bin(_, a, b, _) => {
            gated_references(a, trace, out);
            gated_references(b, trace, out);
        }
        Node::If { id, then, other, .. } => match trace[*id] {
            Branch::Then => gated_references(then, trace, out),
            Branch::Else => gated_references(other, trace, out),
            Branch::Unreached => {}
        },
        Node::Call(_, args) => args.iter().for_each(|a| gated_references(a, trace, out)),
    }
}

/// Partial derivative of the gated equation with respect to `var`, evaluated
/// at `inputs`. Comparisons and logic are piecewise constant, so their
/// derivative is 0; MIN/MAX differentiate through the selected argument.
pub(crate) fn partial(node: &Node, var: usize, inputs: &impl Inputs, trace: &[Branch]) -> Result<f64, Fault> {
    let value = |n: &Node| eval(n, inputs, &mut Branches::Replay(trace));
    let d = |n: &Node| partial(n, var, inputs, trace);
    Ok(match node {
        Node::Num(_) | Node::Dt | Node::Time | Node::Not(_) => 0.0,
        Node::Var(i) => truth_of(*i == var),
        Node::Neg(a) => -d(a)?,
        Node::Bin(op, a, b, span) => match op {
            BinOp::Add => d(a)? + d(b)?,
            BinOp::Sub => d(a)? - d(b)?,
            BinOp::Mul => d(a)? * value(b)? + value(a)? * d(b)?,
            BinOp::Div => {
                let v = value(b)?;
                if v == 0.0 {
                    return Err(Fault {
                        kind: FaultKind::DivisionByZero,
                        span: *span,
                    });
                }
                (d(a)? * v - value(a)? * d(b)?) / (v * v)
            }
            _ => 0.0,
        },
        Node::If { id, then, other, .. } => match trace[*id] {
            Branch::Then => d(then)?,
            Branch::Else => d(other)?,
            Branch::Unreached => 0.0,
        },
        Node::Call(Builtin::Abs, args) => {
            let x = value(&args[0])?;
            let s = if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                0.0
            };
            s * d(&args[0])?
        }
        Node::Call(f, args) => {
            let mut best: Option<(f64, &Node)> = None;
            for a in args {
                let x = value(a)?;
                let better = match (f, best) {
                    (_, None) => true,
                    (Builtin::Min, Some((m, _))) => x < m,
                    (_, Some((m, _))) => x > m,
                };
                if better {
                    best = Some((x, a));
                }
            }
            match best {
                Some((_, a)) => d(a)?,
                None => 0.0,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;
    use alloc::vec;

    struct Fixed<'a>(&'a [f64]);
    impl Inputs for Fixed<'_> {
        fn value(&self, var: usize) -> f64 {
            self.0[var]
        }
        fn time(&self) -> f64 {
            3.0
        }
        fn dt(&self) -> f64 {
            0.5
        }
    }

    fn compiled(src: &str) -> Vec<Equation> {
        compile_model(&parse_model(src).unwrap().model)
    }

    #[test]
    fn logic_is_zero_or_one() {
        let eq = compiled("CONST x = 2\nAUX a = (x > 1) + (x AND 0) + NOT x + (3 OR 0) + (x <> 2)");
        let mut trace = [];
        let v = eval(&eq[1].root, &Fixed(&[2.0, 0.0]), &mut Branches::Record(&mut trace)).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn if_records_taken_arm_only() {
        let eq = compiled("CONST x = 2\nAUX a = IF x > 5 THEN (IF x THEN 1 ELSE 2) ELSE 1 / (x - 2) * 0 + TIME * DT");
        assert_eq!(eq[1].if_count, 2);
        let mut trace = vec![Branch::Unreached; 2];
        let err = eval(&eq[1].root, &Fixed(&[2.0, 0.0]), &mut Branches::Record(&mut trace)).unwrap_err();
        assert_eq!(err.kind, FaultKind::DivisionByZero);
        let mut trace = vec![Branch::Unreached; 2];
        let v = eval(&eq[1].root, &Fixed(&[3.0, 0.0]), &mut Branches::Record(&mut trace)).unwrap();
        assert_eq!(v, 1.5);
        assert_eq!(trace, vec![Branch::Else, Branch::Unreached]);
    }

    #[test]
    fn min_max_abs() {
        let eq = compiled("CONST x = 2\nAUX a = MIN(x, 4, -1) + MAX(x, 4) * ABS(-x)");
        let v = eval(&eq[1].root, &Fixed(&[2.0, 0.0]), &mut Branches::Record(&mut [])).unwrap();
        assert_eq!(v, 7.0);
    }

    #[test]
    fn gated_references_skip_untaken_arms_and_conditions() {
        let eq = compiled("CONST x = 1\nCONST y = 1\nCONST z = 1\nAUX a = IF z > 0 THEN x ELSE y");
        let mut out = Vec::new();
        gated_references(&eq[3].root, &[Branch::Else], &mut out);
        assert_eq!(out, vec![1]);
    }

    #[test]
    fn partials_match_hand_derivatives() {
        let eq = compiled("CONST x = 1\nCONST y = 1\nAUX a = x * y / (x + 1) - ABS(-3 * y) + MAX(x, 2 * y)");
        let inputs = Fixed(&[2.0, 5.0, 0.0]);
        // d/dx: y/(x+1) - x*y/(x+1)^2 + 0 (MAX picks 2y = 10)
        let dx = partial(&eq[2].root, 0, &inputs, &[]).unwrap();
        assert!((dx - (5.0 / 3.0 - 10.0 / 9.0)).abs() < 1e-15);
        // d/dy: x/(x+1) - 3 + 2
        let dy = partial(&eq[2].root, 1, &inputs, &[]).unwrap();
        assert!((dy - (2.0 / 3.0 - 1.0)).abs() < 1e-15);
    }
}
