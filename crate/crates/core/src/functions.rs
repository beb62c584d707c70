//! Function objects used to describe problems.
//!
//! Every user-supplied ingredient of a problem (delays, right-hand side, initial function,
//! moduli) is a trait object so that DSL expressions, closures and tabulated data can be
//! mixed freely. All of them are `Send + Sync` and evaluation never mutates shared state.

use std::fmt;
use std::sync::Arc;

use crate::expr::{EvalEnv, EvalError, Expr};

/// A scalar function of time.
pub trait TimeFunction: Send + Sync {
    fn eval(&self, t: f64) -> Result<f64, EvalError>;

    /// Short human-readable form, recorded in reports.
    fn describe(&self) -> String {
        "<function>".to_string()
    }
}

/// A vector-valued function of time, such as an initial function.
pub trait VectorFn: Send + Sync {
    fn dim(&self) -> usize;
    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<(), EvalError>;
}

/// A right-hand side `f(t, z_1, ..., z_m)` with `z_j` in `R^block_dim`.
///
/// `z` is passed flattened: block `j` (0-based) occupies `z[j * block_dim..(j + 1) * block_dim]`.
pub trait VectorField: Send + Sync {
    fn out_dim(&self) -> usize;
    fn block_dim(&self) -> usize;
    fn blocks(&self) -> usize;
    fn eval_into(&self, t: f64, z: &[f64], out: &mut [f64]) -> Result<(), EvalError>;
}

pub type ScalarFn = Arc<dyn TimeFunction>;
pub type VecFn = Arc<dyn VectorFn>;
pub type Field = Arc<dyn VectorField>;

#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl TimeFunction for Constant {
    fn eval(&self, _t: f64) -> Result<f64, EvalError> {
        Ok(self.0)
    }

    fn describe(&self) -> String {
        format!("{}", self.0)
    }
}

pub fn constant(value: f64) -> ScalarFn {
    Arc::new(Constant(value))
}

struct FnTime<F>(F);

impl<F> TimeFunction for FnTime<F>
where
    F: Fn(f64) -> f64 + Send + Sync,
{
    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        Ok((self.0)(t))
    }
}

/// Wraps a closure as a [`TimeFunction`].
pub fn time_fn<F>(f: F) -> ScalarFn
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    Arc::new(FnTime(f))
}

impl TimeFunction for Expr {
    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        Expr::eval(self, &EvalEnv::time_only(t))
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

/// Piecewise-linear interpolation of tabulated samples, held constant outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Tabulated {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> crate::Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(crate::Error::Contract(format!(
                "tabulated function needs equally many times and values (got {} and {})",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(crate::Error::Contract(
                "tabulated times must be strictly increasing".into(),
            ));
        }
        Ok(Tabulated { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        let (a, b) = (self.times[i], self.times[i + 1]);
        let w = (t - a) / (b - a);
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }
}

impl TimeFunction for Tabulated {
    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        Ok(self.value_at(t))
    }

    fn describe(&self) -> String {
        format!("tabulated({} samples)", self.times.len())
    }
}

/// Pointwise sum of two scalar functions.
pub(crate) struct SumFn(pub ScalarFn, pub ScalarFn);

impl TimeFunction for SumFn {
    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        Ok(self.0.eval(t)? + self.1.eval(t)?)
    }

    fn describe(&self) -> String {
        format!("({}) + ({})", self.0.describe(), self.1.describe())
    }
}

struct FnVector<F> {
    dim: usize,
    f: F,
}

impl<F> VectorFn for FnVector<F>
where
    F: Fn(f64, &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<(), EvalError> {
        (self.f)(t, out);
        Ok(())
    }
}

/// Wraps a closure as a [`VectorFn`] of dimension `dim`.
pub fn vector_fn<F>(dim: usize, f: F) -> VecFn
where
    F: Fn(f64, &mut [f64]) + Send + Sync + 'static,
{
    Arc::new(FnVector { dim, f })
}

/// One scalar function per component.
pub struct Stacked(pub Vec<ScalarFn>);

impl VectorFn for Stacked {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<(), EvalError> {
        for (o, f) in out.iter_mut().zip(&self.0) {
            *o = f.eval(t)?;
        }
        Ok(())
    }
}

/// A vector of expressions in `t` only.
#[derive(Debug, Clone)]
pub struct ExprVector(pub Vec<Expr>);

impl VectorFn for ExprVector {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<(), EvalError> {
        let env = EvalEnv::time_only(t);
        for (o, e) in out.iter_mut().zip(&self.0) {
            *o = e.eval(&env)?;
        }
        Ok(())
    }
}

/// A right-hand side given by one expression per output component.
#[derive(Debug, Clone)]
pub struct ExprField {
    exprs: Vec<Expr>,
    blocks: usize,
    block_dim: usize,
}

impl ExprField {
    /// Binds `exprs` to `blocks` delayed arguments of dimension `block_dim`, rejecting any
    /// `z<j>_<i>` symbol outside that range.
    pub fn new(
        exprs: Vec<Expr>,
        blocks: usize,
        block_dim: usize,
    ) -> Result<Self, crate::expr::ParseError> {
        for e in &exprs {
            e.check_symbols(blocks, block_dim)?;
        }
        Ok(ExprField {
            exprs,
            blocks,
            block_dim,
        })
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.exprs
    }
}

impl VectorField for ExprField {
    fn out_dim(&self) -> usize {
        self.exprs.len()
    }

    fn block_dim(&self) -> usize {
        self.block_dim
    }

    fn blocks(&self) -> usize {
        self.blocks
    }

    fn eval_into(&self, t: f64, z: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let env = EvalEnv::new(t, z, self.block_dim);
        for (o, e) in out.iter_mut().zip(&self.exprs) {
            *o = e.eval(&env)?;
        }
        Ok(())
    }
}

struct FnField<F> {
    out_dim: usize,
    block_dim: usize,
    blocks: usize,
    f: F,
}

impl<F> VectorField for FnField<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Send + Sync,
{
    fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn block_dim(&self) -> usize {
        self.block_dim
    }

    fn blocks(&self) -> usize {
        self.blocks
    }

    fn eval_into(&self, t: f64, z: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        (self.f)(t, z, out);
        Ok(())
    }
}

/// Wraps a closure as a square right-hand side: `dim` outputs, `blocks` arguments in `R^dim`.
pub fn field_fn<F>(dim: usize, blocks: usize, f: F) -> Field
where
    F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
{
    Arc::new(FnField {
        out_dim: dim,
        block_dim: dim,
        blocks,
        f,
    })
}

/// Like [`field_fn`] with independent output and block dimensions.
pub fn field_fn_shaped<F>(out_dim: usize, block_dim: usize, blocks: usize, f: F) -> Field
where
    F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
{
    Arc::new(FnField {
        out_dim,
        block_dim,
        blocks,
        f,
    })
}

impl fmt::Debug for dyn TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TimeFunction({})", self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_interpolates_and_clamps() {
        let tab = Tabulated::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(tab.value_at(-1.0), 0.0);
        assert_eq!(tab.value_at(0.5), 1.0);
        assert_eq!(tab.value_at(2.0), 1.0);
        assert_eq!(tab.value_at(5.0), 0.0);
        assert!(Tabulated::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn expr_field_rejects_out_of_range_symbols() {
        let e = crate::expr::parse("z2_1").unwrap();
        assert!(ExprField::new(vec![e.clone()], 1, 1).is_err());
        assert!(ExprField::new(vec![e], 2, 1).is_ok());
    }
}
