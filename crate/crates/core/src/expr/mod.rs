//! Arithmetic expressions in `t` and delayed-state symbols.
//!
//! Right-hand sides, delays, initial functions and moduli in problem files are written in
//! this language. A state symbol `z<j>_<i>` denotes component `i` of the state evaluated at
//! the `j`-th delayed time, so `-z1_1 + 0.5 * z2_1` reads
//! `-x_1(g_1(t)) + 0.5 x_1(g_2(t))`. See `docs/GRAMMAR.md` for the full grammar.

mod ast;
mod diff;
mod eval;
mod lipschitz;
mod parser;

use std::fmt;

pub use ast::{BinOp, Expr, Func, Node, Pos};
pub use diff::time_derivative;
pub use eval::EvalEnv;
pub use lipschitz::{estimate_lipschitz, sampled_modulus, DomainBox, LipschitzConfig};
pub use parser::parse;

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    BadNumber(String),
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    UnexpectedEnd {
        expected: &'static str,
    },
    UnclosedParen {
        open: Pos,
    },
    UnmatchedClose,
    UnknownIdentifier(String),
    Arity {
        func: &'static str,
        expected: usize,
        found: usize,
    },
    SymbolOutOfRange {
        block: usize,
        comp: usize,
        blocks: usize,
        dim: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Pos,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, pos: Pos) -> Self {
        ParseError { kind, pos }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.pos)?;
        match &self.kind {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number `{s}`"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "expected {expected}, found end of input")
            }
            ParseErrorKind::UnclosedParen { open } => {
                write!(f, "unbalanced parentheses: `(` opened at {open} is never closed")
            }
            ParseErrorKind::UnmatchedClose => {
                write!(f, "unbalanced parentheses: `)` without matching `(`")
            }
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
            ParseErrorKind::Arity {
                func,
                expected,
                found,
            } => write!(f, "`{func}` takes {expected} argument(s), got {found}"),
            ParseErrorKind::SymbolOutOfRange {
                block,
                comp,
                blocks,
                dim,
            } => write!(
                f,
                "symbol z{block}_{comp} out of range (available: blocks 1..={blocks}, components 1..={dim})"
            ),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalErrorKind {
    LogDomain(f64),
    SqrtDomain(f64),
    DivisionNonFinite { numerator: f64, denominator: f64 },
    NonFinite(f64),
    StateOutOfRange { block: usize, comp: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub pos: Pos,
    /// Time at which the failing evaluation happened, when known.
    pub t: Option<f64>,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "evaluation error at {}", self.pos)?;
        if let Some(t) = self.t {
            write!(f, " (t = {t})")?;
        }
        f.write_str(": ")?;
        match &self.kind {
            EvalErrorKind::LogDomain(x) => write!(f, "log of nonpositive value {x}"),
            EvalErrorKind::SqrtDomain(x) => write!(f, "sqrt of negative value {x}"),
            EvalErrorKind::DivisionNonFinite {
                numerator,
                denominator,
            } => write!(f, "division {numerator} / {denominator} is not finite"),
            EvalErrorKind::NonFinite(x) => write!(f, "non-finite result {x}"),
            EvalErrorKind::StateOutOfRange { block, comp } => {
                write!(f, "state symbol z{block}_{comp} is not bound here")
            }
        }
    }
}

impl std::error::Error for EvalError {}
