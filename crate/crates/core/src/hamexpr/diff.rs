use super::{Exponent, Expr, Rational, Var};

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Raw derivative; callers simplify.
pub(super) fn derivative(e: &Expr, v: Var) -> Expr {
    match e {
        Expr::Const(_) | Expr::Param(_) => Expr::zero(),
        Expr::Var(w) => {
            if *w == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Neg(a) => -derivative(a, v),
        Expr::Add(a, c) => derivative(a, v) + derivative(c, v),
        Expr::Sub(a, c) => derivative(a, v) - derivative(c, v),
        Expr::Mul(a, c) => derivative(a, v) * (**c).clone() + (**a).clone() * derivative(c, v),
        Expr::Div(a, c) => {
            (derivative(a, v) * (**c).clone() - (**a).clone() * derivative(c, v))
                / (**c).clone().powi(2)
        }
        Expr::Pow(base, exp) => {
            let (factor, lowered) = match exp {
                Exponent::Rational(r) => (
                    Expr::real(*r.numer() as f64 / *r.denom() as f64),
                    Exponent::Rational(r - Rational::from_integer(1)),
                ),
                Exponent::Symbolic(s) => (
                    (**s).clone(),
                    Exponent::Symbolic(b((**s).clone() - Expr::one())),
                ),
            };
            factor * Expr::Pow(base.clone(), lowered) * derivative(base, v)
        }
        Expr::Sin(a) => Expr::Cos(a.clone()) * derivative(a, v),
        Expr::Cos(a) => -(Expr::Sin(a.clone()) * derivative(a, v)),
        Expr::Exp(a) => Expr::Exp(a.clone()) * derivative(a, v),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn d(s: &str, v: Var) -> Expr {
        parse(s).unwrap().differentiate(v)
    }

    fn s(text: &str) -> Expr {
        parse(text).unwrap().simplify()
    }

    #[test]
    fn power_rule() {
        assert_eq!(d("k*q^2/2", Var::Q), s("k*q"));
        assert_eq!(d("p^2/(2*m)", Var::P), s("p/m"));
        assert_eq!(d("q^(1/2)", Var::Q), s("0.5*q^(-1/2)"));
        assert_eq!(d("p^(n+1)/(n+1)", Var::P), s("p^n"));
    }

    #[test]
    fn product_and_chain_rules() {
        assert_eq!(d("sin(q)*p", Var::Q), s("cos(q)*p"));
        assert_eq!(d("exp(2*t)", Var::T), s("2*exp(2*t)"));
        assert_eq!(d("cos(q*p)", Var::P), s("-q*sin(q*p)"));
        assert_eq!(d("q/p", Var::P), s("-q/p^2"));
    }

    #[test]
    fn constants_and_other_variables() {
        assert!(d("k*m + i", Var::Q).is_zero());
        assert!(d("sin(p)", Var::Q).is_zero());
        assert_eq!(d("t*q", Var::T), s("q"));
    }
}
