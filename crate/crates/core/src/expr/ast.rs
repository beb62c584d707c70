use std::fmt;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn prec(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => PREC_ADD,
            BinOp::Mul | BinOp::Div => PREC_MUL,
            BinOp::Pow => PREC_POW,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Sqrt,
    Min,
    Max,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Abs,
        Func::Sqrt,
        Func::Min,
        Func::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Time,
    /// `z<block>_<comp>`, both 1-based.
    State {
        block: usize,
        comp: usize,
    },
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// A parsed expression. Equality compares structure only; positions are ignored.
#[derive(Debug, Clone)]
pub struct Expr {
    pub node: Node,
    pub pos: Pos,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

impl Expr {
    pub fn new(node: Node, pos: Pos) -> Self {
        Expr { node, pos }
    }

    pub fn num(v: f64) -> Self {
        Expr::new(Node::Num(v), Pos::default())
    }

    pub fn time() -> Self {
        Expr::new(Node::Time, Pos::default())
    }

    pub fn state(block: usize, comp: usize) -> Self {
        Expr::new(Node::State { block, comp }, Pos::default())
    }

    pub fn neg(e: Expr) -> Self {
        Expr::new(Node::Neg(Box::new(e)), Pos::default())
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::new(Node::Binary(op, Box::new(l), Box::new(r)), Pos::default())
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Self {
        Expr::new(Node::Call(f, args), Pos::default())
    }

    /// Largest `(block, comp)` indices referenced, if any state symbol occurs.
    pub fn max_symbol(&self) -> Option<(usize, usize)> {
        let mut acc: Option<(usize, usize)> = None;
        self.visit(&mut |e| {
            if let Node::State { block, comp } = e.node {
                let (b, c) = acc.unwrap_or((0, 0));
                acc = Some((b.max(block), c.max(comp)));
            }
        });
        acc
    }

    pub fn uses_state(&self) -> bool {
        self.max_symbol().is_some()
    }

    /// Fails with a positioned error on the first `z<j>_<i>` with `j > blocks` or `i > dim`.
    pub fn check_symbols(&self, blocks: usize, dim: usize) -> Result<(), super::ParseError> {
        let mut bad = None;
        self.visit(&mut |e| {
            if bad.is_some() {
                return;
            }
            if let Node::State { block, comp } = e.node {
                if block > blocks || comp > dim {
                    bad = Some(super::ParseError::new(
                        super::ParseErrorKind::SymbolOutOfRange {
                            block,
                            comp,
                            blocks,
                            dim,
                        },
                        e.pos,
                    ));
                }
            }
        });
        bad.map_or(Ok(()), Err)
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match &self.node {
            Node::Neg(e) => e.visit(f),
            Node::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Node::Call(_, args) => args.iter().for_each(|a| a.visit(f)),
            Node::Num(_) | Node::Time | Node::State { .. } => {}
        }
    }

    fn prec(&self) -> u8 {
        match &self.node {
            Node::Num(v) if *v < 0.0 || v.is_sign_negative() => PREC_UNARY,
            Node::Neg(_) => PREC_UNARY,
            Node::Binary(op, _, _) => op.prec(),
            _ => PREC_ATOM,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let paren = self.prec() < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match &self.node {
            Node::Num(v) => write!(f, "{v:?}")?,
            Node::Time => f.write_str("t")?,
            Node::State { block, comp } => write!(f, "z{block}_{comp}")?,
            Node::Neg(e) => {
                f.write_str("-")?;
                e.fmt_at(f, PREC_UNARY)?;
            }
            Node::Binary(op, l, r) => {
                let p = op.prec();
                let (lp, rp) = match op {
                    BinOp::Pow => (PREC_ATOM, PREC_UNARY),
                    _ => (p, p + 1),
                };
                l.fmt_at(f, lp)?;
                write!(f, " {} ", op.symbol())?;
                r.fmt_at(f, rp)?;
            }
            Node::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.fmt_at(f, 0)?;
                }
                f.write_str(")")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

/// Prints with the minimum parentheses needed to parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
