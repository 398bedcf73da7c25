use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{BinOp, Builtin, Expr, ExprKind, Model, RunSpec, Span, VarKind, Variable};
use super::lexer::{tokenize, Keyword, Tok, Token};
use super::Diagnostic;

/// A successfully parsed model plus any non-fatal warnings.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub model: Model,
    pub warnings: Vec<Diagnostic>,
}

/// Parses model source text.
///
/// Returns every error found (lexical, syntax, duplicate names, unresolved
/// references, bad stock wiring); a flow attached to no stock is only a warning.
pub fn parse_model(text: &str) -> Result<Parsed, Vec<Diagnostic>> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        errors: Vec::new(),
    };
    let (variables, spec) = parser.model();
    let mut errors = parser.errors;

    let run_spec = match spec {
        Some((spec, span)) => match spec.steps() {
            Ok(_) => spec,
            Err(e) => {
                errors.push(Diagnostic::error(span, format!("{e}")));
                spec
            }
        },
        None => RunSpec::default(),
    };

    let model = Model { variables, run_spec };
    let warnings = resolve(&model, &mut errors);
    if errors.is_empty() {
        Ok(Parsed { model, warnings })
    } else {
        errors.sort_by_key(|d| d.span);
        Err(errors)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<Diagnostic>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        self.eat(&Tok::Kw(kw))
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        Diagnostic::error(
            self.span(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expect_kw(&mut self, kw: Keyword, wanted: &str) -> PResult<()> {
        self.expect(Tok::Kw(kw), wanted).map(|_| ())
    }

    /// Matches a contextual word such as `START` or `inflow`.
    fn eat_word(&mut self, word: &str) -> bool {
        if let Tok::Ident(s) = self.peek() {
            if s.eq_ignore_ascii_case(word) {
                self.bump();
                return true;
            }
        }
        false
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok((name, span))
            }
            Tok::Kw(_) => Err(Diagnostic::error(
                self.span(),
                format!("{} is reserved and cannot be used as a name", self.peek().describe()),
            )),
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn skip_line(&mut self) {
        while !matches!(self.peek(), Tok::Newline | Tok::Eof) {
            self.bump();
        }
    }

    fn model(&mut self) -> (Vec<Variable>, Option<(RunSpec, Span)>) {
        let mut variables = Vec::new();
        let mut spec: Option<(RunSpec, Span)> = None;
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Newline => {
                    self.bump();
                    continue;
                }
                _ => {}
            }
            let span = self.span();
            let result = if self.eat_kw(Keyword::Spec) {
                self.spec_line().map(|s| {
                    if spec.is_some() {
                        self.errors.push(Diagnostic::error(span, "duplicate SPEC line"));
                    } else {
                        spec = Some((s, span));
                    }
                })
            } else {
                self.variable_line().map(|v| variables.push(v))
            };
            let result = result.and_then(|_| match self.peek() {
                Tok::Newline | Tok::Eof => Ok(()),
                _ => Err(self.unexpected("end of line")),
            });
            if let Err(d) = result {
                self.errors.push(d);
                self.skip_line();
            }
        }
        (variables, spec)
    }

    fn spec_line(&mut self) -> PResult<RunSpec> {
        let value = |p: &mut Parser, word: &str| -> PResult<f64> {
            if !p.eat_word(word) && !(word == "DT" && p.eat_kw(Keyword::Dt)) {
                return Err(p.unexpected(word));
            }
            p.expect(Tok::Eq, "`=`")?;
            let negative = p.eat(&Tok::Minus);
            match p.peek() {
                Tok::Num(v) => {
                    let v = *v;
                    p.bump();
                    Ok(if negative { -v } else { v })
                }
                _ => Err(p.unexpected("number")),
            }
        };
        let start = value(self, "START")?;
        let stop = value(self, "STOP")?;
        let dt = value(self, "DT")?;
        Ok(RunSpec { start, stop, dt })
    }

    fn variable_line(&mut self) -> PResult<Variable> {
        let kind = match self.peek() {
            Tok::Kw(Keyword::Const) => VarKind::Const,
            Tok::Kw(Keyword::Aux) => VarKind::Aux,
            Tok::Kw(Keyword::Flow) => VarKind::Flow,
            Tok::Kw(Keyword::Stock) => VarKind::Stock,
            _ => return Err(self.unexpected("SPEC, CONST, AUX, FLOW or STOCK")),
        };
        self.bump();
        let (name, span) = self.ident()?;
        self.expect(Tok::Eq, "`=`")?;
        let expr = self.expr()?;
        let mut inflows = Vec::new();
        let mut outflows = Vec::new();
        if kind == VarKind::Stock {
            self.expect(Tok::LBrace, "`{` with the stock's flows")?;
            loop {
                if self.eat_word("inflow") {
                    self.expect(Tok::Colon, "`:`")?;
                    inflows.extend(self.id_list()?);
                } else if self.eat_word("outflow") {
                    self.expect(Tok::Colon, "`:`")?;
                    outflows.extend(self.id_list()?);
                } else {
                    break;
                }
            }
            self.expect(Tok::RBrace, "`inflow:`, `outflow:` or `}`")?;
        }
        Ok(Variable {
            name,
            kind,
            expr,
            inflows,
            outflows,
            span,
        })
    }

    fn id_list(&mut self) -> PResult<Vec<String>> {
        let mut out = vec_one(self.ident()?.0);
        while self.eat(&Tok::Comma) {
            out.push(self.ident()?.0);
        }
        Ok(out)
    }

    fn expr(&mut self) -> PResult<Expr> {
        let span = self.span();
        if self.eat_kw(Keyword::If) {
            let cond = self.expr()?;
            self.expect_kw(Keyword::Then, "THEN")?;
            let then = self.expr()?;
            self.expect_kw(Keyword::Else, "ELSE")?;
            let other = self.expr()?;
            return Ok(Expr::new(
                ExprKind::If(Box::new(cond), Box::new(then), Box::new(other)),
                span,
            ));
        }
        self.or()
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut lhs = self.and()?;
        while let Tok::Kw(Keyword::Or) = self.peek() {
            let span = self.bump().span;
            let rhs = self.and()?;
            lhs = binary(BinOp::Or, lhs, rhs, span);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut lhs = self.cmp()?;
        while let Tok::Kw(Keyword::And) = self.peek() {
            let span = self.bump().span;
            let rhs = self.cmp()?;
            lhs = binary(BinOp::And, lhs, rhs, span);
        }
        Ok(lhs)
    }

    fn cmp(&mut self) -> PResult<Expr> {
        let lhs = self.add()?;
        let op = match self.peek() {
            Tok::Lt => BinOp::Lt,
            Tok::Gt => BinOp::Gt,
            Tok::Le => BinOp::Le,
            Tok::Ge => BinOp::Ge,
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            _ => return Ok(lhs),
        };
        let span = self.bump().span;
        let rhs = self.add()?;
        Ok(binary(op, lhs, rhs, span))
    }

    fn add(&mut self) -> PResult<Expr> {
        let mut lhs = self.mul()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.mul()?;
            lhs = binary(op, lhs, rhs, span);
        }
    }

    fn mul(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs, span);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        if self.eat(&Tok::Minus) {
            let inner = self.unary()?;
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), span));
        }
        if self.eat_kw(Keyword::Not) {
            let inner = self.unary()?;
            return Ok(Expr::new(ExprKind::Not(Box::new(inner)), span));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::new(ExprKind::Num(v), span))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::new(ExprKind::Var(name), span))
            }
            Tok::Kw(Keyword::Dt) => {
                self.bump();
                Ok(Expr::new(ExprKind::Dt, span))
            }
            Tok::Kw(Keyword::Time) => {
                self.bump();
                Ok(Expr::new(ExprKind::Time, span))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Kw(kw @ (Keyword::Min | Keyword::Max | Keyword::Abs)) => {
                self.bump();
                let func = match kw {
                    Keyword::Min => Builtin::Min,
                    Keyword::Max => Builtin::Max,
                    _ => Builtin::Abs,
                };
                self.expect(Tok::LParen, "`(`")?;
                let mut args = vec_one(self.expr()?);
                while self.eat(&Tok::Comma) {
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                if func == Builtin::Abs && args.len() != 1 {
                    return Err(Diagnostic::error(
                        span,
                        format!("ABS takes exactly one argument, found {}", args.len()),
                    ));
                }
                Ok(Expr::new(ExprKind::Call(func, args), span))
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr, span: Span) -> Expr {
    Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
}

fn vec_one<T>(item: T) -> Vec<T> {
    let mut v = Vec::with_capacity(4);
    v.push(item);
    v
}

/// Name resolution and stock wiring checks. Pushes errors, returns warnings.
fn resolve(model: &Model, errors: &mut Vec<Diagnostic>) -> Vec<Diagnostic> {
    let mut warnings = Vec::new();
    let mut seen: BTreeMap<&str, &Variable> = BTreeMap::new();
    for var in &model.variables {
        if let Some(first) = seen.get(var.name.as_str()) {
            errors.push(Diagnostic::error(
                var.span,
                format!("duplicate name {} (first declared at {})", var.name, first.span),
            ));
        } else {
            seen.insert(&var.name, var);
        }
    }

    let mut attached: BTreeMap<&str, usize> = BTreeMap::new();
    for var in &model.variables {
        for (name, span) in var.expr.reference_spans() {
            if !seen.contains_key(name) {
                errors.push(Diagnostic::error(span, format!("unresolved reference {name}")));
            }
        }
        let mut local: Vec<&str> = Vec::new();
        for flow in var.inflows.iter().chain(&var.outflows) {
            match seen.get(flow.as_str()) {
                None => errors.push(Diagnostic::error(
                    var.span,
                    format!("unresolved reference {flow} in flows of stock {}", var.name),
                )),
                Some(v) if v.kind != VarKind::Flow => errors.push(Diagnostic::error(
                    var.span,
                    format!("{flow} is attached to stock {} but is not a FLOW", var.name),
                )),
                Some(_) => {
                    *attached.entry(flow.as_str()).or_default() += 1;
                }
            }
            if local.contains(&flow.as_str()) {
                errors.push(Diagnostic::error(
                    var.span,
                    format!("flow {flow} is attached to stock {} more than once", var.name),
                ));
            }
            local.push(flow);
        }
    }

    for var in &model.variables {
        if var.kind == VarKind::Flow && !attached.contains_key(var.name.as_str()) {
            warnings.push(Diagnostic::warning(
                var.span,
                format!("flow {} is not attached to any stock", var.name),
            ));
        }
    }
    warnings
}
