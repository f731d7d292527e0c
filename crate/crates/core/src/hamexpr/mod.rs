//! Symbolic expressions over the phase variables `q`, `p`, `t`, named
//! parameters and the imaginary unit.
//!
//! Expressions are immutable trees. They can be parsed from text, rendered
//! back, differentiated exactly, simplified into a canonical sum-of-products
//! form and evaluated to a complex number at a real phase state.

mod diff;
mod eval;
mod params;
mod parse;
mod render;
mod simplify;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;

pub use eval::EvalError;
pub use params::{ParamError, ParamSet};
pub use parse::{parse, ParseError, ParseErrorKind};

/// Complex scalar used for every complex value in the crate.
pub type ComplexScalar = num_complex::Complex64;

/// Rational exponent.
pub type Rational = Ratio<i64>;

/// Imaginary unit.
pub const I: ComplexScalar = ComplexScalar::new(0.0, 1.0);

/// The three phase-space variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Q,
    P,
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::Q => "q",
            Var::P => "p",
            Var::T => "t",
        }
    }
}

/// Exponent of a power node.
///
/// `Symbolic` exponents may reference parameters but never `q`, `p` or `t`;
/// the parser enforces this.
#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    Rational(Rational),
    Symbolic(Box<Expr>),
}

impl Exponent {
    pub fn int(n: i64) -> Self {
        Exponent::Rational(Rational::from_integer(n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(ComplexScalar),
    Var(Var),
    Param(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn real(x: f64) -> Self {
        Expr::Const(ComplexScalar::new(x, 0.0))
    }

    pub fn constant(c: ComplexScalar) -> Self {
        Expr::Const(c)
    }

    pub fn zero() -> Self {
        Expr::real(0.0)
    }

    pub fn one() -> Self {
        Expr::real(1.0)
    }

    pub fn i() -> Self {
        Expr::Const(I)
    }

    pub fn q() -> Self {
        Expr::Var(Var::Q)
    }

    pub fn p() -> Self {
        Expr::Var(Var::P)
    }

    pub fn t() -> Self {
        Expr::Var(Var::T)
    }

    pub fn param(name: impl Into<String>) -> Self {
        Expr::Param(name.into())
    }

    pub fn powi(self, n: i64) -> Self {
        Expr::Pow(Box::new(self), Exponent::int(n))
    }

    pub fn pow(self, exponent: Exponent) -> Self {
        Expr::Pow(Box::new(self), exponent)
    }

    pub fn sin(self) -> Self {
        Expr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Self {
        Expr::Cos(Box::new(self))
    }

    pub fn exp(self) -> Self {
        Expr::Exp(Box::new(self))
    }

    pub fn as_const(&self) -> Option<ComplexScalar> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.re == 0.0 && c.im == 0.0)
    }

    /// Immediate children, exponent expressions included.
    fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => vec![],
            Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => vec![a],
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => vec![a, b],
            Expr::Pow(a, Exponent::Rational(_)) => vec![a],
            Expr::Pow(a, Exponent::Symbolic(e)) => vec![a, e],
        }
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Var(w) => *w == v,
            _ => self.children().into_iter().any(|c| c.depends_on(v)),
        }
    }

    /// True when the expression contains none of `q`, `p`, `t`.
    pub fn is_phase_constant(&self) -> bool {
        !(self.depends_on(Var::Q) || self.depends_on(Var::P) || self.depends_on(Var::T))
    }

    pub fn free_params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        if let Expr::Param(name) = self {
            out.insert(name.clone());
        }
        for c in self.children() {
            c.collect_params(out);
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }

    /// Rebuilds the tree bottom-up, letting `f` replace leaves.
    fn map_leaves(&self, f: &impl Fn(&Expr) -> Option<Expr>) -> Expr {
        if let Some(e) = f(self) {
            return e;
        }
        let un = |a: &Expr| Box::new(a.map_leaves(f));
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(un(a)),
            Expr::Sin(a) => Expr::Sin(un(a)),
            Expr::Cos(a) => Expr::Cos(un(a)),
            Expr::Exp(a) => Expr::Exp(un(a)),
            Expr::Add(a, b) => Expr::Add(un(a), un(b)),
            Expr::Sub(a, b) => Expr::Sub(un(a), un(b)),
            Expr::Mul(a, b) => Expr::Mul(un(a), un(b)),
            Expr::Div(a, b) => Expr::Div(un(a), un(b)),
            Expr::Pow(a, Exponent::Rational(r)) => Expr::Pow(un(a), Exponent::Rational(*r)),
            Expr::Pow(a, Exponent::Symbolic(e)) => Expr::Pow(un(a), Exponent::Symbolic(un(e))),
        }
    }

    /// Substitutes `with` for every occurrence of variable `v`.
    pub fn substitute(&self, v: Var, with: &Expr) -> Expr {
        self.map_leaves(&|e| match e {
            Expr::Var(w) if *w == v => Some(with.clone()),
            _ => None,
        })
    }

    /// Replaces every parameter bound in `params` by its value and
    /// simplifies. Unbound parameters stay symbolic.
    pub fn bind(&self, params: &ParamSet) -> Expr {
        self.map_leaves(&|e| match e {
            Expr::Param(name) => params.lookup(name).map(Expr::real),
            _ => None,
        })
        .simplify()
    }

    /// Complex conjugate, valid because every variable and parameter is real.
    pub fn conj(&self) -> Expr {
        self.map_leaves(&|e| match e {
            Expr::Const(c) => Some(Expr::Const(c.conj())),
            _ => None,
        })
    }

    /// Real part, `(e + conj e)/2`, simplified.
    pub fn re_part(&self) -> Expr {
        ((self.clone() + self.conj()) * Expr::real(0.5)).simplify()
    }

    /// Imaginary part, `(e - conj e)/(2i)`, simplified.
    pub fn im_part(&self) -> Expr {
        ((self.clone() - self.conj()) * Expr::Const(ComplexScalar::new(0.0, -0.5))).simplify()
    }

    /// Exact partial derivative with respect to `v`, simplified.
    pub fn differentiate(&self, v: Var) -> Expr {
        diff::derivative(self, v).simplify()
    }

    /// Value-preserving rewrite into canonical sum-of-products form.
    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    /// Folds constant subtrees without reordering anything else.
    pub fn canonical(&self) -> Expr {
        simplify::fold_constants(self)
    }

    pub fn eval(
        &self,
        state: &crate::canon::PhaseState,
        params: &ParamSet,
    ) -> Result<ComplexScalar, EvalError> {
        eval::eval(self, state, params)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render(self))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl std::ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Exact rational value of an expression built from integer literals and
/// `+ - * /` and integer powers.
pub(crate) fn as_rational(e: &Expr) -> Option<Rational> {
    use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub};
    match e {
        Expr::Const(c) => {
            if c.im != 0.0 || c.re.fract() != 0.0 || c.re.abs() > 9.0e15 {
                None
            } else {
                Some(Rational::from_integer(c.re as i64))
            }
        }
        Expr::Neg(a) => as_rational(a).map(|r| -r),
        Expr::Add(a, b) => as_rational(a)?.checked_add(&as_rational(b)?),
        Expr::Sub(a, b) => as_rational(a)?.checked_sub(&as_rational(b)?),
        Expr::Mul(a, b) => as_rational(a)?.checked_mul(&as_rational(b)?),
        Expr::Div(a, b) => {
            let d = as_rational(b)?;
            if d == Rational::from_integer(0) {
                None
            } else {
                as_rational(a)?.checked_div(&d)
            }
        }
        Expr::Pow(a, Exponent::Rational(r)) if r.is_integer() => {
            let base = as_rational(a)?;
            let n = *r.numer();
            if n.unsigned_abs() > 64 || (n < 0 && base == Rational::from_integer(0)) {
                return None;
            }
            let mut acc = Rational::from_integer(1);
            for _ in 0..n.unsigned_abs() {
                acc = acc.checked_mul(&base)?;
            }
            Some(if n < 0 { acc.recip() } else { acc })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conj_twice_is_identity() {
        let e = parse("i*alpha0*(p^2/(2*m) + k*q^2/2) + (3 - 2*i)*q").unwrap();
        assert_eq!(e.conj().conj(), e);
    }

    #[test]
    fn re_and_im_parts_split_constants() {
        let e = parse("p/m + i*beta0*p").unwrap();
        assert_eq!(e.re_part(), parse("p/m").unwrap().simplify());
        assert_eq!(e.im_part(), parse("beta0*p").unwrap().simplify());
    }

    #[test]
    fn free_params_and_dependencies() {
        let e = parse("p^(n+1)*beta0 + sin(t)").unwrap();
        let names: Vec<_> = e.free_params().into_iter().collect();
        assert_eq!(names, vec!["beta0", "n"]);
        assert!(e.depends_on(Var::P));
        assert!(e.depends_on(Var::T));
        assert!(!e.depends_on(Var::Q));
    }

    #[test]
    fn rational_detection() {
        let r = |s: &str| as_rational(&parse(s).unwrap());
        assert_eq!(r("1/2"), Some(Rational::new(1, 2)));
        assert_eq!(r("-(3-1)^2"), Some(Rational::from_integer(-4)));
        assert_eq!(r("2.5"), None);
        assert_eq!(r("1/0"), None);
    }
}
