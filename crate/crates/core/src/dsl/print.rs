//! Source rendering. Parsing the output of `Display` yields a structurally
//! identical model.

use core::fmt::{self, Write};

use super::ast::{BinOp, Expr, ExprKind, Model, VarKind, Variable};

const PREC_IF: u8 = 0;
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_CMP: u8 = 3;
const PREC_ADD: u8 = 4;
const PREC_MUL: u8 = 5;
const PREC_UNARY: u8 = 6;
const PREC_ATOM: u8 = 7;

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::If(..) => PREC_IF,
        ExprKind::Binary(op, ..) => binop_prec(*op),
        ExprKind::Neg(_) | ExprKind::Not(_) => PREC_UNARY,
        _ => PREC_ATOM,
    }
}

fn binop_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Or => PREC_OR,
        BinOp::And => PREC_AND,
        BinOp::Add | BinOp::Sub => PREC_ADD,
        BinOp::Mul | BinOp::Div => PREC_MUL,
        _ => PREC_CMP,
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
    let prec = precedence(e);
    let paren = prec < min_prec;
    if paren {
        f.write_char('(')?;
    }
    match &e.kind {
        ExprKind::Num(v) => write!(f, "{v}")?,
        ExprKind::Var(name) => f.write_str(name)?,
        ExprKind::Dt => f.write_str("DT")?,
        ExprKind::Time => f.write_str("TIME")?,
        ExprKind::Neg(inner) => {
            f.write_char('-')?;
            write_expr(inner, f, PREC_UNARY)?;
        }
        ExprKind::Not(inner) => {
            f.write_str("NOT ")?;
            write_expr(inner, f, PREC_UNARY)?;
        }
        ExprKind::Binary(op, lhs, rhs) => {
            // comparisons do not chain, so both sides need a tighter operand
            let (lmin, rmin) = if op.is_comparison() {
                (PREC_ADD, PREC_ADD)
            } else {
                (prec, prec + 1)
            };
            write_expr(lhs, f, lmin)?;
            write!(f, " {} ", op.symbol())?;
            write_expr(rhs, f, rmin)?;
        }
        ExprKind::If(c, t, other) => {
            f.write_str("IF ")?;
            write_expr(c, f, PREC_IF)?;
            f.write_str(" THEN ")?;
            write_expr(t, f, PREC_IF)?;
            f.write_str(" ELSE ")?;
            write_expr(other, f, PREC_IF)?;
        }
        ExprKind::Call(func, args) => {
            write!(f, "{}(", func.name())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_expr(a, f, PREC_IF)?;
            }
            f.write_char(')')?;
        }
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f, PREC_IF)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} = {}", self.kind.keyword(), self.name, self.expr)?;
        if self.kind == VarKind::Stock {
            f.write_str(" {")?;
            if !self.inflows.is_empty() {
                write!(f, " inflow: {}", self.inflows.join(", "))?;
            }
            if !self.outflows.is_empty() {
                write!(f, " outflow: {}", self.outflows.join(", "))?;
            }
            f.write_str(" }")?;
        }
        Ok(())
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spec = &self.run_spec;
        writeln!(f, "SPEC START = {} STOP = {} DT = {}", spec.start, spec.stop, spec.dt)?;
        for var in &self.variables {
            writeln!(f, "{var}")?;
        }
        Ok(())
    }
}
