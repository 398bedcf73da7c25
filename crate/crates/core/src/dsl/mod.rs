//! The model language: parsing, printing, validation and the causal graph.
//!
//! One statement per line, `#` starts a comment:
//!
//! ```text
//! SPEC START = 1 STOP = 11 DT = 1
//! FLOW Flow_1 = IF Stock_2 > 50 THEN Stock_2/DT ELSE Stock_1/DT
//! STOCK Stock_1 = 1 { inflow: Flow_1 }
//! ```
//!
//! Keywords are case-insensitive, identifiers are case-sensitive.

mod ast;
mod graph;
mod lexer;
mod parser;
mod print;
mod validate;

use alloc::string::String;
use core::fmt;

pub use ast::{BinOp, Builtin, Expr, ExprKind, Model, RunSpec, RunSpecError, Span, VarKind, Variable};
pub use graph::{dependency_graph, Digraph, Edge, GraphNode};
pub use lexer::is_reserved;
pub use parser::{parse_model, Parsed};
pub use validate::{every_cycle_has_stock, validate};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A located message about model source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            span,
            message: message.into(),
        }
    }

    pub fn warning(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            span,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {level}: {}", self.span, self.message)
    }
}

/// Parses and validates in one go, returning the model only if it is fit to
/// simulate. Warnings are dropped.
pub fn load_model(text: &str) -> Result<Model, alloc::vec::Vec<Diagnostic>> {
    let parsed = parse_model(text)?;
    let problems = validate(&parsed.model);
    if problems.iter().any(Diagnostic::is_error) {
        Err(problems)
    } else {
        Ok(parsed.model)
    }
}

#[cfg(test)]
pub(crate) mod tests;
