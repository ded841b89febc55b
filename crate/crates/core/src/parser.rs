//! Concrete syntax.
//!
//! Expressions use an infix grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | power                 -- `-e` reads as `0 - e`
//! power   := primary ('^' NAT)?
//! primary := NUMBER | IDENT | '@' IDENT | '(' expr ')' | '(' '-' NUMBER ')'
//!          | 'quote' '(' expr ')' | 'eval' '(' expr ':' TYPE ')'
//!          | 'not' '(' expr ')' | 'syneq' '(' expr ',' expr ')'
//!          | 'opd' '(' expr ',' expr ')'
//! NUMBER  := DIGITS ('/' DIGITS)?
//! TYPE    := 'real' | 'syn' | 'bool'
//! ```
//!
//! `(-3)` is the literal for a negative constant; every other leading minus
//! is subtraction from zero. Juxtaposition is not multiplication.
//!
//! Syntax values use constructor terms such as `plus(var(s_x),con(s_3))`.

use std::fmt;

use thiserror::Error;

use crate::expr::{ConstName, Expr, TypeTag, VarName, MAX_EXPONENT};
use crate::rational::Rational;
use crate::syntax::SynValue;

/// Byte range `[start, end)` into the parsed input.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }

    fn at(offset: usize) -> Self {
        SourceSpan::new(offset, offset)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("exponent must be a natural number literal")]
    ExponentNotNatural,
    #[error("exponent {0} exceeds the maximum of {MAX_EXPONENT}")]
    ExponentTooLarge(String),
    #[error("invalid numeric literal: {0}")]
    BadLiteral(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("unknown type `{0}` (expected real, syn or bool)")]
    UnknownType(String),
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("constructor `{name}` takes {expected} argument(s), found {found}")]
    Arity { name: String, expected: usize, found: usize },
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("syntax error at offset {}: {kind}", span.start)]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(span: SourceSpan, kind: ParseErrorKind) -> Self {
        ParseError { span, kind }
    }

    /// Renders the error with the offending input and a caret line.
    pub fn render(&self, input: &str) -> String {
        let width = (self.span.end - self.span.start).max(1);
        format!(
            "{self}\n  {input}\n  {}{}",
            " ".repeat(input[..self.span.start].chars().count()),
            "^".repeat(width)
        )
    }
}

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Ident(String),
    Number(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Colon,
    Comma,
    At,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::At => f.write_str("`@`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b':' => Some(Tok::Colon),
            b',' => Some(Tok::Comma),
            b'@' => Some(Tok::At),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push((tok, SourceSpan::new(start, i)));
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'/' {
                i += 1;
                if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                    return Err(ParseError::new(
                        SourceSpan::new(start, i),
                        ParseErrorKind::BadLiteral("`/` must join two digit sequences".into()),
                    ));
                }
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push((Tok::Number(text[start..i].to_string()), SourceSpan::new(start, i)));
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), SourceSpan::new(start, i)));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ParseError::new(
                SourceSpan::new(start, start + ch.len_utf8()),
                ParseErrorKind::UnexpectedChar(ch),
            ));
        }
    }
    out.push((Tok::End, SourceSpan::at(text.len())));
    Ok(out)
}

struct ExprParser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.pos + ahead).map(|(t, _)| t)
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let tok = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::new(
            self.span(),
            ParseErrorKind::Unexpected {
                expected: expected.to_string(),
                found: self.peek().to_string(),
            },
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::mul(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::sub(Expr::constant(0), self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (tok, span) = self.bump();
        let digits = match tok {
            Tok::Number(s) if !s.contains('/') => s,
            _ => return Err(ParseError::new(span, ParseErrorKind::ExponentNotNatural)),
        };
        let n = match digits.parse::<u64>() {
            Ok(n) if n <= u64::from(MAX_EXPONENT) => n as u32,
            _ => return Err(ParseError::new(span, ParseErrorKind::ExponentTooLarge(digits))),
        };
        // `^` is right associative, so `a^2^3` would need `2^3` as an exponent.
        if *self.peek() == Tok::Caret {
            return Err(ParseError::new(self.span(), ParseErrorKind::ExponentNotNatural));
        }
        Ok(Expr::pow(base, n))
    }

    fn number(text: &str, span: SourceSpan) -> Result<Rational, ParseError> {
        text.parse::<Rational>()
            .map_err(|e| ParseError::new(span, ParseErrorKind::BadLiteral(e.to_string())))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Number(text) => {
                let (_, span) = self.bump();
                Ok(Expr::Const(Self::number(&text, span)?))
            }
            Tok::At => {
                self.bump();
                let (tok, span) = self.bump();
                match tok {
                    Tok::Ident(name) => Ok(Expr::NamedConst(
                        ConstName::new(name).expect("lexer produced a valid identifier"),
                    )),
                    found => Err(ParseError::new(
                        span,
                        ParseErrorKind::Unexpected {
                            expected: "constant name after `@`".into(),
                            found: found.to_string(),
                        },
                    )),
                }
            }
            Tok::LParen => {
                if let (Some(Tok::Minus), Some(Tok::Number(text)), Some(Tok::RParen)) =
                    (self.peek_at(1), self.peek_at(2), self.peek_at(3))
                {
                    let text = text.clone();
                    let span = self.toks[self.pos + 2].1;
                    self.pos += 4;
                    return Ok(Expr::Const(-Self::number(&text, span)?));
                }
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let (_, span) = self.bump();
                if *self.peek() == Tok::LParen {
                    self.call(&name, span)
                } else {
                    Ok(Expr::Var(VarName::new(name).expect("lexer produced a valid identifier")))
                }
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn call(&mut self, name: &str, span: SourceSpan) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen)?;
        let out = match name {
            "quote" => Expr::quote(self.expr()?),
            "not" => Expr::not(self.expr()?),
            "eval" => {
                let inner = self.expr()?;
                self.expect(Tok::Colon)?;
                let (tok, ty_span) = self.bump();
                let ty = match &tok {
                    Tok::Ident(t) => TypeTag::from_keyword(t).ok_or_else(|| {
                        ParseError::new(ty_span, ParseErrorKind::UnknownType(t.clone()))
                    })?,
                    _ => {
                        return Err(ParseError::new(
                            ty_span,
                            ParseErrorKind::Unexpected {
                                expected: "type".into(),
                                found: tok.to_string(),
                            },
                        ))
                    }
                };
                Expr::eval(inner, ty)
            }
            "syneq" | "opd" => {
                let a = self.expr()?;
                self.expect(Tok::Comma)?;
                let b = self.expr()?;
                if name == "syneq" {
                    Expr::syn_eq(a, b)
                } else {
                    Expr::opd(a, b)
                }
            }
            _ => {
                return Err(ParseError::new(
                    span,
                    ParseErrorKind::UnknownFunction(name.to_string()),
                ))
            }
        };
        self.expect(Tok::RParen)?;
        Ok(out)
    }
}

/// Parses an infix expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = ExprParser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(e)
}

/// One entry of a corpus file.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    /// 1-based line number.
    pub line: usize,
    pub source: String,
    pub parsed: Result<Expr, ParseError>,
}

/// Parses a newline-delimited corpus. `#` starts a comment running to the
/// end of the line; blank lines are skipped.
pub fn parse_corpus(text: &str) -> Vec<CorpusEntry> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let source = line.split('#').next().unwrap_or("").trim();
            if source.is_empty() {
                return None;
            }
            Some(CorpusEntry {
                line: i + 1,
                source: source.to_string(),
                parsed: parse_expr(source),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Printing

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Infix {
    Add,
    Sub,
    Mul,
}

/// How a node prints. Shared by [`Expr`] and the differentiation engine's
/// terms, which add a pending-derivative node.
pub(crate) enum Layout<'a, T> {
    Var(&'a str),
    Const(&'a Rational),
    Infix(Infix, &'a T, &'a T),
    Pow(&'a T, u32),
    /// `prefix inner suffix`, e.g. `quote(` .. `)`.
    Wrap(String, &'a T, String),
    /// `name(a, b)`.
    Call2(&'static str, &'a T, &'a T),
    Leaf(String),
}

pub(crate) trait Printable: Sized {
    fn layout(&self) -> Layout<'_, Self>;
}

impl Printable for Expr {
    fn layout(&self) -> Layout<'_, Self> {
        match self {
            Expr::Var(v) => Layout::Var(v.as_str()),
            Expr::Const(c) => Layout::Const(c),
            Expr::Add(a, b) => Layout::Infix(Infix::Add, a, b),
            Expr::Sub(a, b) => Layout::Infix(Infix::Sub, a, b),
            Expr::Mul(a, b) => Layout::Infix(Infix::Mul, a, b),
            Expr::Pow(a, n) => Layout::Pow(a, *n),
            Expr::Quote(a) => Layout::Wrap("quote(".into(), a, ")".into()),
            Expr::Eval(a, t) => Layout::Wrap("eval(".into(), a, format!(" : {t})")),
            Expr::Not(a) => Layout::Wrap("not(".into(), a, ")".into()),
            Expr::NamedConst(c) => Layout::Leaf(format!("@{c}")),
            Expr::SynEq(a, b) => Layout::Call2("syneq", a, b),
            Expr::Opd(a, b) => Layout::Call2("opd", a, b),
        }
    }
}

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_FRACTION: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence<T: Printable>(node: &T) -> u8 {
    match node.layout() {
        Layout::Infix(Infix::Add | Infix::Sub, ..) => PREC_SUM,
        Layout::Infix(Infix::Mul, ..) => PREC_PRODUCT,
        Layout::Pow(..) => PREC_POW,
        Layout::Const(c) if !c.is_negative() && !c.is_integer() => PREC_FRACTION,
        _ => PREC_ATOM,
    }
}

/// Appends `node`, wrapped in parentheses when its precedence is below `min`.
/// Returns whether parentheses were added.
fn write_operand<T: Printable>(out: &mut String, node: &T, min: u8) -> bool {
    let wrap = precedence(node) < min;
    if wrap {
        out.push('(');
    }
    write_node(out, node);
    if wrap {
        out.push(')');
    }
    wrap
}

pub(crate) fn write_node<T: Printable>(out: &mut String, node: &T) {
    match node.layout() {
        Layout::Var(v) => out.push_str(v),
        Layout::Const(c) if c.is_negative() => {
            out.push('(');
            out.push_str(&c.to_string());
            out.push(')');
        }
        Layout::Const(c) => out.push_str(&c.to_string()),
        Layout::Infix(op @ (Infix::Add | Infix::Sub), a, b) => {
            write_operand(out, a, PREC_SUM);
            out.push_str(if op == Infix::Add { " + " } else { " - " });
            write_operand(out, b, PREC_SUM + 1);
        }
        Layout::Infix(Infix::Mul, a, b) => {
            // `*` is tight unless one side had to be parenthesized.
            let mut lhs = String::new();
            let mut rhs = String::new();
            let wrapped = write_operand(&mut lhs, a, PREC_PRODUCT)
                | write_operand(&mut rhs, b, PREC_PRODUCT + 1);
            out.push_str(&lhs);
            out.push_str(if wrapped { " * " } else { "*" });
            out.push_str(&rhs);
        }
        Layout::Pow(a, n) => {
            write_operand(out, a, PREC_ATOM);
            out.push('^');
            out.push_str(&n.to_string());
        }
        Layout::Wrap(prefix, a, suffix) => {
            out.push_str(&prefix);
            write_node(out, a);
            out.push_str(&suffix);
        }
        Layout::Call2(name, a, b) => {
            out.push_str(name);
            out.push('(');
            write_node(out, a);
            out.push_str(", ");
            write_node(out, b);
            out.push(')');
        }
        Layout::Leaf(s) => out.push_str(&s),
    }
}

/// Minimal-parenthesis infix rendering. Does not simplify.
pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_node(&mut out, e);
    out
}

// ---------------------------------------------------------------------------
// Syntax values

struct SynParser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> SynParser<'a> {
    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn found(&self) -> String {
        match self.text[self.pos..].chars().next() {
            Some(c) => format!("`{c}`"),
            None => "end of input".into(),
        }
    }

    fn error_here(&self, expected: &str) -> ParseError {
        ParseError::new(
            SourceSpan::new(self.pos, (self.pos + 1).min(self.text.len())),
            ParseErrorKind::Unexpected { expected: expected.into(), found: self.found() },
        )
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error_here(&format!("`{c}`")))
        }
    }

    /// Consumes a maximal run of characters matching `pred`.
    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> (&'a str, SourceSpan) {
        self.skip_ws();
        let start = self.pos;
        let len = self.text[start..]
            .find(|c: char| !pred(c))
            .unwrap_or(self.text.len() - start);
        self.pos += len;
        (&self.text[start..self.pos], SourceSpan::new(start, self.pos))
    }

    fn s_prefixed(&mut self, what: &str) -> Result<(&'a str, SourceSpan), ParseError> {
        self.skip_ws();
        if !self.text[self.pos..].starts_with("s_") {
            return Err(self.error_here(&format!("`s_`-prefixed {what}")));
        }
        self.pos += 2;
        let (body, span) = self.take_while(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '/'));
        Ok((body, SourceSpan::new(span.start - 2, span.end)))
    }

    fn value(&mut self) -> Result<SynValue, ParseError> {
        let (name, name_span) = self.take_while(|c| c.is_ascii_alphabetic());
        if name.is_empty() {
            return Err(self.error_here("constructor"));
        }
        let arity = match name {
            "con" | "var" => 1,
            "plus" | "minus" | "times" | "power" => 2,
            _ => {
                return Err(ParseError::new(
                    name_span,
                    ParseErrorKind::UnknownConstructor(name.to_string()),
                ))
            }
        };
        self.expect('(')?;
        let args_start = self.pos;
        let arity_error = |found: usize, end: usize| {
            ParseError::new(
                SourceSpan::new(args_start, end),
                ParseErrorKind::Arity { name: name.to_string(), expected: arity, found },
            )
        };
        let value = match name {
            "con" => {
                let (lit, span) = self.s_prefixed("rational")?;
                let c = lit
                    .parse::<Rational>()
                    .map_err(|e| ParseError::new(span, ParseErrorKind::BadLiteral(e.to_string())))?;
                SynValue::Con(c)
            }
            "var" => {
                let (ident, span) = self.s_prefixed("identifier")?;
                let v = VarName::new(ident).map_err(|_| {
                    ParseError::new(span, ParseErrorKind::BadLiteral(format!("invalid identifier `{ident}`")))
                })?;
                SynValue::Var(v)
            }
            "power" => {
                let base = self.value()?;
                if !self.eat(',') {
                    return Err(arity_error(1, self.pos));
                }
                let (digits, span) = self.take_while(|c| c.is_ascii_digit() || c == '-' || c == '/');
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(ParseError::new(span, ParseErrorKind::ExponentNotNatural));
                }
                let n = match digits.parse::<u64>() {
                    Ok(n) if n <= u64::from(MAX_EXPONENT) => n as u32,
                    _ => {
                        return Err(ParseError::new(
                            span,
                            ParseErrorKind::ExponentTooLarge(digits.to_string()),
                        ))
                    }
                };
                SynValue::Power(Box::new(base), n)
            }
            _ => {
                let a = self.value()?;
                if !self.eat(',') {
                    return Err(arity_error(1, self.pos));
                }
                let b = self.value()?;
                let (a, b) = (Box::new(a), Box::new(b));
                match name {
                    "plus" => SynValue::Plus(a, b),
                    "minus" => SynValue::Minus(a, b),
                    _ => SynValue::Times(a, b),
                }
            }
        };
        if self.eat(',') {
            return Err(arity_error(arity + 1, self.pos));
        }
        self.expect(')')?;
        Ok(value)
    }
}

/// Parses a syntax value in constructor form:
/// `con(s_Q) | var(s_IDENT) | plus(S,S) | minus(S,S) | times(S,S) | power(S,NAT)`.
pub fn parse_synvalue(text: &str) -> Result<SynValue, ParseError> {
    let mut p = SynParser { text, pos: 0 };
    let v = p.value()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error_here("end of input"));
    }
    Ok(v)
}

/// Constructor form with no whitespace, e.g. `plus(var(s_x),con(s_3))`.
pub fn print_synvalue(s: &SynValue) -> String {
    fn go(s: &SynValue, out: &mut String) {
        let bin = |name: &str, a: &SynValue, b: &SynValue, out: &mut String| {
            out.push_str(name);
            out.push('(');
            go(a, out);
            out.push(',');
            go(b, out);
            out.push(')');
        };
        match s {
            SynValue::Con(c) => {
                out.push_str("con(s_");
                out.push_str(&c.to_string());
                out.push(')');
            }
            SynValue::Var(v) => {
                out.push_str("var(s_");
                out.push_str(v.as_str());
                out.push(')');
            }
            SynValue::Plus(a, b) => bin("plus", a, b, out),
            SynValue::Minus(a, b) => bin("minus", a, b, out),
            SynValue::Times(a, b) => bin("times", a, b, out),
            SynValue::Power(a, n) => {
                out.push_str("power(");
                go(a, out);
                out.push(',');
                out.push_str(&n.to_string());
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    go(s, &mut out);
    out
}
