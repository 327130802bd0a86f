//! Expression strings to rational functions and back.
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' integer)?
//! base   := integer | identifier | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`. There is no
//! implicit multiplication and exponents are non-negative integer literals;
//! write `1/x` for `x^-1`. In flow mode the identifiers `t` and `tp`
//! (standing for `t'`) are also accepted.

pub mod files;

use std::fmt;

use num::BigInt;
use thiserror::Error;

use crate::arith::{ArithError, BigRat, RatFunc, VarContext};

/// Grammar summary printed by the command line front end.
pub const GRAMMAR: &str = "\
expr   := term (('+' | '-') term)*
term   := unary (('*' | '/') unary)*
unary  := '-' unary | factor
factor := base ('^' integer)?
base   := integer | identifier | '(' expr ')'

Precedence: ^  >  unary -  >  * /  >  + -   (so -x^2 means -(x^2)).
No implicit multiplication: write 2*x, not 2x.
Exponents are non-negative integer literals: write 1/x, not x^-1.
Rational constants are written with division: 2/3*x.
Flow expressions may also use t and tp (tp stands for t').";

const MAX_DEPTH: usize = 256;
const MAX_EXPONENT: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Plain,
    /// Also binds `t` and `tp`; values live in [`VarContext::flow_extension`].
    Flow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprAst {
    Integer(BigInt),
    Variable(String),
    Neg(Box<ExprAst>),
    Sum(Box<ExprAst>, Box<ExprAst>),
    Difference(Box<ExprAst>, Box<ExprAst>),
    Product(Box<ExprAst>, Box<ExprAst>),
    Quotient(Box<ExprAst>, Box<ExprAst>),
    Power(Box<ExprAst>, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("division by zero in expression")]
    DivisionByZero,
    #[error(transparent)]
    Arith(ArithError),
}

impl From<ArithError> for ExprError {
    fn from(e: ArithError) -> Self {
        match e {
            ArithError::DivisionByZero => ExprError::DivisionByZero,
            other => ExprError::Arith(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(s) | Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn tokenize(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Int(input[start..i].to_string())));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(input[start..i].to_string())));
        } else if b"+-*/^()".contains(&c) {
            out.push((i, Tok::Sym(c as char)));
            i += 1;
        } else {
            let ch = input[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                position: i,
                expected: "a number, identifier, operator or parenthesis".into(),
                found: format!("`{ch}`"),
            });
        }
    }
    out.push((input.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    ctx: &'a VarContext,
    mode: Mode,
    depth: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            position: self.offset(),
            expected: expected.into(),
            found: self.peek().to_string(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("shallower nesting"));
        }
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = ExprAst::Sum(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = ExprAst::Difference(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = ExprAst::Product(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = ExprAst::Quotient(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ExprAst, ParseError> {
        let mut negations = 0usize;
        while self.peek() == &Tok::Sym('-') {
            self.bump();
            negations += 1;
        }
        let mut f = self.factor()?;
        for _ in 0..negations {
            f = ExprAst::Neg(Box::new(f));
        }
        Ok(f)
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.base()?;
        if self.peek() != &Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Int(s) => {
                let k = s.parse::<u32>().ok().filter(|&k| k <= MAX_EXPONENT);
                let Some(k) = k else {
                    return Err(self.error(&format!("an exponent of at most {MAX_EXPONENT}")));
                };
                self.bump();
                Ok(ExprAst::Power(Box::new(base), k))
            }
            _ => Err(self.error("a non-negative integer exponent")),
        }
    }

    fn base(&mut self) -> Result<ExprAst, ParseError> {
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                Ok(ExprAst::Integer(s.parse().expect("digits")))
            }
            Tok::Ident(name) => {
                let known = self.ctx.index_of(&name).is_some()
                    || (self.mode == Mode::Flow && (name == "t" || name == "tp"));
                if !known {
                    let expected = if name == "t" || name == "tp" {
                        "a declared variable (`t`/`tp` are only allowed in flow expressions)"
                    } else {
                        "a declared variable"
                    };
                    return Err(self.error(expected));
                }
                self.bump();
                Ok(ExprAst::Variable(name))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != &Tok::Sym(')') {
                    return Err(self.error("`)`"));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.error("a number, identifier or `(`")),
        }
    }
}

/// Parses `input` against `ctx`.
pub fn parse(input: &str, ctx: &VarContext, mode: Mode) -> Result<ExprAst, ParseError> {
    let toks = tokenize(input)?;
    let mut p = Parser { toks, pos: 0, ctx, mode, depth: 0 };
    if p.peek() == &Tok::End {
        return Err(p.error("an expression"));
    }
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

/// The context that values of `mode` live in.
pub fn target_context(ctx: &VarContext, mode: Mode) -> VarContext {
    match mode {
        Mode::Plain => ctx.clone(),
        Mode::Flow => ctx.flow_extension(),
    }
}

/// Evaluates an AST to an exact rational function in `ctx` (plain mode) or
/// its flow extension (flow mode).
pub fn eval(ast: &ExprAst, ctx: &VarContext, mode: Mode) -> Result<RatFunc, ExprError> {
    let target = target_context(ctx, mode);
    eval_in(ast, &target)
}

fn eval_in(ast: &ExprAst, ctx: &VarContext) -> Result<RatFunc, ExprError> {
    Ok(match ast {
        ExprAst::Integer(n) => RatFunc::constant(ctx, BigRat::from_integer(n.clone())),
        ExprAst::Variable(name) => {
            let i = ctx.index_of(name).ok_or_else(|| {
                ExprError::Arith(ArithError::InvalidContext(format!("unbound `{name}`")))
            })?;
            RatFunc::var(ctx, i)
        }
        ExprAst::Neg(a) => -eval_in(a, ctx)?,
        ExprAst::Sum(a, b) => eval_in(a, ctx)?.checked_add(&eval_in(b, ctx)?)?,
        ExprAst::Difference(a, b) => eval_in(a, ctx)?.checked_sub(&eval_in(b, ctx)?)?,
        ExprAst::Product(a, b) => eval_in(a, ctx)?.checked_mul(&eval_in(b, ctx)?)?,
        ExprAst::Quotient(a, b) => eval_in(a, ctx)?.checked_div(&eval_in(b, ctx)?)?,
        ExprAst::Power(a, k) => eval_in(a, ctx)?.pow(*k as i64)?,
    })
}

/// `eval(parse(input))`.
pub fn parse_ratfunc(input: &str, ctx: &VarContext, mode: Mode) -> Result<RatFunc, ExprError> {
    let ast = parse(input, ctx, mode)?;
    eval(&ast, ctx, mode)
}

/// Canonical string form of a value.
pub fn render(f: &RatFunc) -> String {
    f.to_string()
}
