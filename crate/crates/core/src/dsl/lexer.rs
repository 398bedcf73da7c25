use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::Span;
use super::Diagnostic;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Keyword {
    If,
    Then,
    Else,
    And,
    Or,
    Not,
    Min,
    Max,
    Abs,
    Dt,
    Time,
    Const,
    Aux,
    Flow,
    Stock,
    Spec,
}

impl Keyword {
    fn lookup(word: &str) -> Option<Keyword> {
        const TABLE: [(&str, Keyword); 16] = [
            ("IF", Keyword::If),
            ("THEN", Keyword::Then),
            ("ELSE", Keyword::Else),
            ("AND", Keyword::And),
            ("OR", Keyword::Or),
            ("NOT", Keyword::Not),
            ("MIN", Keyword::Min),
            ("MAX", Keyword::Max),
            ("ABS", Keyword::Abs),
            ("DT", Keyword::Dt),
            ("TIME", Keyword::Time),
            ("CONST", Keyword::Const),
            ("AUX", Keyword::Aux),
            ("FLOW", Keyword::Flow),
            ("STOCK", Keyword::Stock),
            ("SPEC", Keyword::Spec),
        ];
        TABLE
            .iter()
            .find(|(kw, _)| kw.eq_ignore_ascii_case(word))
            .map(|&(_, k)| k)
    }
}

/// Returns true if `word` cannot be used as an identifier.
pub fn is_reserved(word: &str) -> bool {
    Keyword::lookup(word).is_some()
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    Ident(String),
    Kw(Keyword),
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    LParen,
    RParen,
    Comma,
    LBrace,
    RBrace,
    Colon,
    Newline,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Kw(k) => format!("keyword {k:?}").to_uppercase(),
            Tok::Newline => String::from("end of line"),
            Tok::Eof => String::from("end of input"),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::Eq => "=",
            Tok::Ne => "<>",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Colon => ":",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits source text into tokens. Newlines are significant; `#` starts a
/// comment running to the end of the line.
pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let mut chars = src.char_indices().peekable();
    let mut line = 1u32;
    let mut line_start = 0usize;

    while let Some(&(pos, c)) = chars.peek() {
        let span = Span::new(line, (src[line_start..pos].chars().count() + 1) as u32);
        match c {
            '\n' => {
                chars.next();
                tokens.push(Token {
                    tok: Tok::Newline,
                    span,
                });
                line += 1;
                line_start = pos + 1;
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            c if c.is_ascii_digit() || c == '.' => {
                let end = scan_number(src, pos);
                let text = &src[pos..end];
                match text.parse::<f64>() {
                    Ok(v) if v.is_finite() => tokens.push(Token { tok: Tok::Num(v), span }),
                    _ => errors.push(Diagnostic::error(span, format!("invalid number literal `{text}`"))),
                }
                while chars.peek().is_some_and(|&(p, _)| p < end) {
                    chars.next();
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = pos;
                while let Some(&(p, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        end = p + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let word = &src[pos..end];
                let tok = match Keyword::lookup(word) {
                    Some(k) => Tok::Kw(k),
                    None => Tok::Ident(String::from(word)),
                };
                tokens.push(Token { tok, span });
            }
            _ => {
                chars.next();
                let next = chars.peek().map(|&(_, c)| c);
                let (tok, two) = match (c, next) {
                    ('<', Some('=')) => (Some(Tok::Le), true),
                    ('<', Some('>')) => (Some(Tok::Ne), true),
                    ('>', Some('=')) => (Some(Tok::Ge), true),
                    ('<', _) => (Some(Tok::Lt), false),
                    ('>', _) => (Some(Tok::Gt), false),
                    ('=', _) => (Some(Tok::Eq), false),
                    ('+', _) => (Some(Tok::Plus), false),
                    ('-', _) => (Some(Tok::Minus), false),
                    ('*', _) => (Some(Tok::Star), false),
                    ('/', _) => (Some(Tok::Slash), false),
                    ('(', _) => (Some(Tok::LParen), false),
                    (')', _) => (Some(Tok::RParen), false),
                    (',', _) => (Some(Tok::Comma), false),
                    ('{', _) => (Some(Tok::LBrace), false),
                    ('}', _) => (Some(Tok::RBrace), false),
                    (':', _) => (Some(Tok::Colon), false),
                    _ => (None, false),
                };
                if two {
                    chars.next();
                }
                match tok {
                    Some(tok) => tokens.push(Token { tok, span }),
                    None => errors.push(Diagnostic::error(span, format!("unexpected character `{c}`"))),
                }
            }
        }
    }
    let col = (src[line_start..].chars().count() + 1) as u32;
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col),
    });

    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}

/// End offset of a numeric literal `digits [. digits] [(e|E) [+|-] digits]`.
fn scan_number(src: &str, start: usize) -> usize {
    let bytes = src.as_bytes();
    let mut i = start;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}
