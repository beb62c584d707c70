use super::ast::{BinOp, Expr, Func, Node};
use super::{EvalError, EvalErrorKind};

/// Values available to an expression: the time and the flattened delayed states.
#[derive(Debug, Clone, Copy)]
pub struct EvalEnv<'a> {
    pub t: f64,
    /// Block `j` (1-based) occupies `state[(j - 1) * dim..j * dim]`.
    pub state: &'a [f64],
    pub dim: usize,
}

impl<'a> EvalEnv<'a> {
    pub fn new(t: f64, state: &'a [f64], dim: usize) -> Self {
        EvalEnv { t, state, dim }
    }

    pub fn time_only(t: f64) -> EvalEnv<'static> {
        EvalEnv {
            t,
            state: &[],
            dim: 0,
        }
    }

    fn lookup(&self, block: usize, comp: usize) -> Option<f64> {
        if comp == 0 || comp > self.dim || block == 0 {
            return None;
        }
        self.state.get((block - 1) * self.dim + comp - 1).copied()
    }
}

impl Expr {
    /// Evaluates in IEEE double precision. Any non-finite intermediate is reported as an
    /// error carrying the position of the node that produced it.
    pub fn eval(&self, env: &EvalEnv<'_>) -> Result<f64, EvalError> {
        let fail = |kind| EvalError {
            kind,
            pos: self.pos,
            t: Some(env.t),
        };
        let v = match &self.node {
            Node::Num(v) => *v,
            Node::Time => env.t,
            Node::State { block, comp } => env.lookup(*block, *comp).ok_or_else(|| {
                fail(EvalErrorKind::StateOutOfRange {
                    block: *block,
                    comp: *comp,
                })
            })?,
            Node::Neg(e) => -e.eval(env)?,
            Node::Binary(op, l, r) => {
                let a = l.eval(env)?;
                let b = r.eval(env)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        let q = a / b;
                        if !q.is_finite() {
                            return Err(fail(EvalErrorKind::DivisionNonFinite {
                                numerator: a,
                                denominator: b,
                            }));
                        }
                        q
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
            Node::Call(func, args) => {
                let x = args[0].eval(env)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(fail(EvalErrorKind::LogDomain(x)));
                        }
                        x.ln()
                    }
                    Func::Abs => x.abs(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(fail(EvalErrorKind::SqrtDomain(x)));
                        }
                        x.sqrt()
                    }
                    Func::Min => x.min(args[1].eval(env)?),
                    Func::Max => x.max(args[1].eval(env)?),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(fail(EvalErrorKind::NonFinite(v)))
        }
    }
}
