use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Position of a token in the model source, 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub const fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Eq => "=",
            BinOp::Ne => "<>",
            BinOp::And => "AND",
            BinOp::Or => "OR",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge | BinOp::Eq | BinOp::Ne
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Min,
    Max,
    Abs,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Min => "MIN",
            Builtin::Max => "MAX",
            Builtin::Abs => "ABS",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Num(f64),
    Var(String),
    Dt,
    Time,
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(Builtin, Vec<Expr>),
}

/// An equation tree. Equality compares structure only; spans are diagnostic
/// metadata and are ignored.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn num(value: f64) -> Self {
        Expr::new(ExprKind::Num(value), Span::default())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Var(name.into()), Span::default())
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Expr)) {
        visit(self);
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Var(_) | ExprKind::Dt | ExprKind::Time => {}
            ExprKind::Neg(e) | ExprKind::Not(e) => e.walk(visit),
            ExprKind::Binary(_, l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            ExprKind::If(c, t, e) => {
                c.walk(visit);
                t.walk(visit);
                e.walk(visit);
            }
            ExprKind::Call(_, args) => args.iter().for_each(|a| a.walk(visit)),
        }
    }

    /// Distinct referenced variable names, in order of first occurrence.
    pub fn references(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.walk(&mut |e| {
            if let ExprKind::Var(name) = &e.kind {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
        });
        out
    }

    /// Variable references together with their source locations, in order.
    pub fn reference_spans(&self) -> Vec<(&str, Span)> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let ExprKind::Var(name) = &e.kind {
                out.push((name.as_str(), e.span));
            }
        });
        out
    }

    pub fn if_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |e| {
            if matches!(e.kind, ExprKind::If(..)) {
                n += 1;
            }
        });
        n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Stock,
    Flow,
    Aux,
    Const,
}

impl VarKind {
    pub fn keyword(self) -> &'static str {
        match self {
            VarKind::Stock => "STOCK",
            VarKind::Flow => "FLOW",
            VarKind::Aux => "AUX",
            VarKind::Const => "CONST",
        }
    }
}

/// A declared model variable. For stocks, `expr` is the initial value.
#[derive(Clone, Debug)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub expr: Expr,
    pub inflows: Vec<String>,
    pub outflows: Vec<String>,
    pub span: Span,
}

impl PartialEq for Variable {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.kind == other.kind
            && self.expr == other.expr
            && self.inflows == other.inflows
            && self.outflows == other.outflows
    }
}

impl Variable {
    pub fn is_stock(&self) -> bool {
        self.kind == VarKind::Stock
    }
}

/// Time axis of an Euler run, in model time units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSpec {
    pub start: f64,
    pub stop: f64,
    pub dt: f64,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            start: 0.0,
            stop: 100.0,
            dt: 1.0,
        }
    }
}

impl RunSpec {
    pub fn new(start: f64, stop: f64, dt: f64) -> Result<Self, RunSpecError> {
        let spec = RunSpec { start, stop, dt };
        spec.steps().map(|_| spec)
    }

    /// Number of Euler steps `n = (stop - start) / dt`.
    pub fn steps(&self) -> Result<usize, RunSpecError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.dt.is_finite()) {
            return Err(RunSpecError::NonFinite);
        }
        if self.dt <= 0.0 {
            return Err(RunSpecError::NonPositiveDt);
        }
        if self.stop <= self.start {
            return Err(RunSpecError::EmptyInterval);
        }
        let ratio = (self.stop - self.start) / self.dt;
        let rounded = round(ratio);
        if (ratio - rounded).abs() > 1e-9 * rounded.max(1.0) {
            return Err(RunSpecError::FractionalSteps);
        }
        Ok(rounded as usize)
    }

    /// `t_k = start + k * dt`.
    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.dt
    }
}

fn round(x: f64) -> f64 {
    // x is finite and positive here
    let floor = x as u64 as f64;
    if x - floor >= 0.5 {
        floor + 1.0
    } else {
        floor
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RunSpecError {
    #[error("run spec values must be finite")]
    NonFinite,
    #[error("DT must be positive")]
    NonPositiveDt,
    #[error("STOP must be greater than START")]
    EmptyInterval,
    #[error("(STOP - START) / DT must be a whole number of steps")]
    FractionalSteps,
}

/// A parsed model: declared variables in source order plus the run spec.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub variables: Vec<Variable>,
    pub run_spec: RunSpec,
}

impl Model {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn stocks(&self) -> impl Iterator<Item = &Variable> {
        self.variables.iter().filter(|v| v.is_stock())
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }
}
