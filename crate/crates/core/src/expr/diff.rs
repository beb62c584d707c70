use super::{BinOp, Expr, Func, Node};

/// Symbolic `d/dt` of an expression in `t` alone.
///
/// `None` when the expression mentions a state symbol or uses one of the non-smooth
/// functions `abs`, `min`, `max`.
pub fn time_derivative(e: &Expr) -> Option<Expr> {
    Some(match &e.node {
        Node::Num(_) => Expr::num(0.0),
        Node::Time => Expr::num(1.0),
        Node::State { .. } => return None,
        Node::Neg(u) => neg(time_derivative(u)?),
        Node::Binary(op, l, r) => {
            let (l, r) = (l.as_ref(), r.as_ref());
            let (dl, dr) = (time_derivative(l)?, time_derivative(r)?);
            match op {
                BinOp::Add => add(dl, dr),
                BinOp::Sub => sub(dl, dr),
                BinOp::Mul => add(mul(dl, r.clone()), mul(l.clone(), dr)),
                BinOp::Div => div(
                    sub(mul(dl, r.clone()), mul(l.clone(), dr)),
                    Expr::binary(BinOp::Pow, r.clone(), Expr::num(2.0)),
                ),
                BinOp::Pow if is_zero(&dr) => mul(
                    mul(
                        r.clone(),
                        Expr::binary(BinOp::Pow, l.clone(), sub(r.clone(), Expr::num(1.0))),
                    ),
                    dl,
                ),
                BinOp::Pow => mul(
                    e.clone(),
                    add(
                        mul(dr, Expr::call(Func::Log, vec![l.clone()])),
                        div(mul(r.clone(), dl), l.clone()),
                    ),
                ),
            }
        }
        Node::Call(f, args) => {
            let u = &args[0];
            let du = time_derivative(u)?;
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, vec![u.clone()]),
                Func::Cos => neg(Expr::call(Func::Sin, vec![u.clone()])),
                Func::Exp => e.clone(),
                Func::Log => div(Expr::num(1.0), u.clone()),
                Func::Sqrt => div(Expr::num(0.5), e.clone()),
                Func::Abs | Func::Min | Func::Max => return None,
            };
            mul(outer, du)
        }
    })
}

fn is_zero(e: &Expr) -> bool {
    matches!(e.node, Node::Num(v) if v == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e.node, Node::Num(v) if v == 1.0)
}

fn neg(e: Expr) -> Expr {
    if is_zero(&e) {
        e
    } else {
        Expr::neg(e)
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (is_zero(&a), is_zero(&b)) {
        (true, _) => b,
        (_, true) => a,
        _ => Expr::binary(BinOp::Add, a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (is_zero(&a), is_zero(&b)) {
        (_, true) => a,
        (true, _) => neg(b),
        _ => Expr::binary(BinOp::Sub, a, b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        Expr::num(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::binary(BinOp::Mul, a, b)
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_one(&b) {
        a
    } else {
        Expr::binary(BinOp::Div, a, b)
    }
}
