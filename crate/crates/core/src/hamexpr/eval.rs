use thiserror::Error;

use super::{ComplexScalar, Exponent, Expr, ParamSet, Var};
use crate::canon::PhaseState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-integer power {exponent} of {base} (base must be a non-negative real)")]
    InvalidPower { base: ComplexScalar, exponent: f64 },
    #[error("exponent evaluated to the non-real value {0}")]
    NonRealExponent(ComplexScalar),
}

fn power(base: ComplexScalar, exponent: f64) -> Result<ComplexScalar, EvalError> {
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        let n = exponent as i32;
        if n < 0 && base == ComplexScalar::new(0.0, 0.0) {
            return Err(EvalError::DivisionByZero);
        }
        return Ok(base.powi(n));
    }
    if base.im != 0.0 || base.re < 0.0 {
        return Err(EvalError::InvalidPower { base, exponent });
    }
    if base.re == 0.0 && exponent < 0.0 {
        return Err(EvalError::DivisionByZero);
    }
    Ok(ComplexScalar::new(base.re.powf(exponent), 0.0))
}

pub(super) fn eval(
    e: &Expr,
    s: &PhaseState,
    params: &ParamSet,
) -> Result<ComplexScalar, EvalError> {
    let ev = |x: &Expr| eval(x, s, params);
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Var(Var::Q) => s.q.into(),
        Expr::Var(Var::P) => s.p.into(),
        Expr::Var(Var::T) => s.t.into(),
        Expr::Param(name) => params
            .lookup(name)
            .ok_or_else(|| EvalError::UnboundParameter(name.clone()))?
            .into(),
        Expr::Neg(a) => -ev(a)?,
        Expr::Add(a, b) => ev(a)? + ev(b)?,
        Expr::Sub(a, b) => ev(a)? - ev(b)?,
        Expr::Mul(a, b) => ev(a)? * ev(b)?,
        Expr::Div(a, b) => {
            let den = ev(b)?;
            if den.re == 0.0 && den.im == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            ev(a)? / den
        }
        Expr::Pow(a, Exponent::Rational(r)) => {
            let base = ev(a)?;
            if r.is_integer() {
                power(base, *r.numer() as f64)?
            } else {
                power(base, *r.numer() as f64 / *r.denom() as f64)?
            }
        }
        Expr::Pow(a, Exponent::Symbolic(x)) => {
            let exponent = ev(x)?;
            if exponent.im != 0.0 {
                return Err(EvalError::NonRealExponent(exponent));
            }
            power(ev(a)?, exponent.re)?
        }
        Expr::Sin(a) => ev(a)?.sin(),
        Expr::Cos(a) => ev(a)?.cos(),
        Expr::Exp(a) => ev(a)?.exp(),
    })
}
