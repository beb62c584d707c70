//! Lexer and recursive-descent parser.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" unary)?
//! primary := number | "t" | "pi" | state | func "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! `^` binds tighter than unary minus and associates to the right, so `-2^2` is `-4`
//! and `2^3^2` is `2^9`.

use super::ast::{BinOp, Expr, Func, Node, Pos};
use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1u32, 1u32);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, pos));
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text
                .parse::<f64>()
                .map_err(|_| ParseError::new(ParseErrorKind::BadNumber(text.clone()), pos))?;
            col += (i - start) as u32;
            out.push((Tok::Num(value), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            out.push((Tok::Ident(text), pos));
            continue;
        }
        return Err(ParseError::new(ParseErrorKind::UnexpectedChar(c), pos));
    }
    out.push((Tok::End, Pos { line, column: col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    /// Positions of currently open `(`.
    open: Vec<Pos>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let tok = self.peek();
        let kind = match tok {
            Tok::RParen if self.open.is_empty() => ParseErrorKind::UnmatchedClose,
            Tok::End if !self.open.is_empty() => {
                let open = *self.open.last().unwrap();
                return ParseError::new(ParseErrorKind::UnclosedParen { open }, open);
            }
            Tok::End => ParseErrorKind::UnexpectedEnd { expected },
            other => ParseErrorKind::UnexpectedToken {
                found: other.describe(),
                expected,
            },
        };
        ParseError::new(kind, self.pos())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let (_, pos) = self.bump();
            let rhs = self.term()?;
            lhs = Expr::new(Node::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let (_, pos) = self.bump();
            let rhs = self.unary()?;
            lhs = Expr::new(Node::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            let (_, pos) = self.bump();
            let inner = self.unary()?;
            return Ok(Expr::new(Node::Neg(Box::new(inner)), pos));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            let (_, pos) = self.bump();
            let exp = self.unary()?;
            return Ok(Expr::new(
                Node::Binary(BinOp::Pow, Box::new(base), Box::new(exp)),
                pos,
            ));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::new(Node::Num(v), pos))
            }
            Tok::LParen => {
                self.bump();
                self.open.push(pos);
                let inner = self.expr()?;
                self.close()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                self.identifier(name, pos)
            }
            _ => Err(self.unexpected("an operand")),
        }
    }

    fn close(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            self.open.pop();
            Ok(())
        } else {
            Err(self.unexpected("`)`"))
        }
    }

    fn identifier(&mut self, name: String, pos: Pos) -> Result<Expr, ParseError> {
        if name == "t" {
            return Ok(Expr::new(Node::Time, pos));
        }
        if name == "pi" {
            return Ok(Expr::new(Node::Num(std::f64::consts::PI), pos));
        }
        if let Some((block, comp)) = state_symbol(&name) {
            return Ok(Expr::new(Node::State { block, comp }, pos));
        }
        let Some(func) = Func::from_name(&name) else {
            return Err(ParseError::new(
                ParseErrorKind::UnknownIdentifier(name),
                pos,
            ));
        };
        if *self.peek() != Tok::LParen {
            return Err(self.unexpected("`(` after function name"));
        }
        let open = self.pos();
        self.bump();
        self.open.push(open);
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.close()?;
        if args.len() != func.arity() {
            return Err(ParseError::new(
                ParseErrorKind::Arity {
                    func: func.name(),
                    expected: func.arity(),
                    found: args.len(),
                },
                pos,
            ));
        }
        Ok(Expr::new(Node::Call(func, args), pos))
    }
}

/// Recognises `z<j>_<i>` with positive integer indices.
fn state_symbol(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix('z')?;
    let (b, c) = rest.split_once('_')?;
    let all_digits = |s: &str| !s.is_empty() && s.bytes().all(|d| d.is_ascii_digit());
    if !all_digits(b) || !all_digits(c) {
        return None;
    }
    let (block, comp) = (b.parse().ok()?, c.parse().ok()?);
    (block >= 1 && comp >= 1).then_some((block, comp))
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    if toks.len() == 1 {
        return Err(ParseError::new(ParseErrorKind::Empty, toks[0].1));
    }
    let mut p = Parser {
        toks,
        at: 0,
        open: Vec::new(),
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::EvalEnv;

    fn val(src: &str) -> f64 {
        parse(src).unwrap().eval(&EvalEnv::time_only(0.0)).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(val("1 + 2 * 3"), 7.0);
        assert_eq!(val("(1 + 2) * 3"), 9.0);
        assert_eq!(val("8 / 4 / 2"), 1.0);
        assert_eq!(val("10 - 4 - 3"), 3.0);
        assert_eq!(val("-2^2"), -4.0);
        assert_eq!(val("2^-1"), 0.5);
        assert_eq!(val("-3 * -2"), 6.0);
    }

    #[test]
    fn power_is_right_associative() {
        let chained = parse("2^3^2").unwrap();
        let explicit = parse("2^(3^2)").unwrap();
        assert_eq!(chained, explicit);
        assert_eq!(val("2^3^2"), val("2^(3^2)"));
        assert_eq!(val("2^3^2"), 512.0);
        assert_ne!(val("2^3^2"), val("(2^3)^2"));
    }

    #[test]
    fn numbers_and_symbols() {
        assert_eq!(val("1.5e2"), 150.0);
        assert_eq!(val(".25"), 0.25);
        assert_eq!(val("2E-1"), 0.2);
        assert_eq!(val("pi"), std::f64::consts::PI);
        assert_eq!(parse("z12_3").unwrap(), Expr::state(12, 3));
        assert_eq!(parse(" t\n - 1 ").unwrap(), parse("t-1").unwrap());
    }

    #[test]
    fn positioned_errors() {
        let cases: &[(&str, u32, u32)] = &[
            ("1 + $", 1, 5),
            ("(1 + 2", 1, 1),
            ("1 + 2)", 1, 6),
            ("foo(1)", 1, 1),
            ("sin(1, 2)", 1, 1),
            ("max(1)", 1, 1),
            ("1 +", 1, 4),
            ("exp 1", 1, 5),
            ("z0_1", 1, 1),
            ("2 3", 1, 3),
            ("1\n+ $", 2, 3),
            ("", 1, 1),
        ];
        for &(src, line, column) in cases {
            let err = parse(src).expect_err(src);
            assert_eq!(
                (err.pos.line, err.pos.column),
                (line, column),
                "{src}: {err}"
            );
            assert!(
                err.to_string().starts_with(&format!("{line}:{column}:")),
                "{err}"
            );
        }
    }

    #[test]
    fn error_kinds() {
        assert!(matches!(
            parse("(1").unwrap_err().kind,
            ParseErrorKind::UnclosedParen { .. }
        ));
        assert!(matches!(
            parse("1)").unwrap_err().kind,
            ParseErrorKind::UnmatchedClose
        ));
        assert!(matches!(
            parse("q").unwrap_err().kind,
            ParseErrorKind::UnknownIdentifier(_)
        ));
        assert!(matches!(
            parse("min(1,2,3)").unwrap_err().kind,
            ParseErrorKind::Arity { found: 3, .. }
        ));
        assert!(matches!(
            parse("1 # 2").unwrap_err().kind,
            ParseErrorKind::UnexpectedChar('#')
        ));
    }

    #[test]
    fn printer_round_trips() {
        for src in [
            "-z1_1",
            "2^3^2",
            "(2^3)^2",
            "(-2)^2",
            "-2^2",
            "a",
            "1 - (2 - 3)",
            "1 - 2 - 3",
            "1 / (2 * 3)",
            "-(1 + t) * z2_1",
            "max(sin(t), -cos(t ^ 2)) / sqrt(abs(t) + 1e-7)",
            "2 ^ -t",
            "2 ^ (t * 3)",
            "--t",
        ] {
            let Ok(e) = parse(src) else { continue };
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }
}
