use super::{Exponent, Expr};

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => ADD,
        Expr::Mul(..) | Expr::Div(..) => MUL,
        Expr::Neg(_) => NEG,
        Expr::Pow(..) => POW,
        Expr::Const(c) if c.im != 0.0 || c.re.is_sign_negative() => ADD,
        _ => ATOM,
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn constant(c: num_complex::Complex64) -> String {
    if c.im == 0.0 {
        num(c.re)
    } else {
        let imag = if c.im == 1.0 {
            "i".to_string()
        } else if c.im == -1.0 {
            "-i".to_string()
        } else if c.im < 0.0 {
            format!("-{}*i", num(-c.im))
        } else {
            format!("{}*i", num(c.im))
        };
        if c.re == 0.0 && !c.re.is_sign_negative() {
            imag
        } else if let Some(rest) = imag.strip_prefix('-') {
            format!("{} - {rest}", num(c.re))
        } else {
            format!("{} + {imag}", num(c.re))
        }
    }
}

fn wrap(e: &Expr, min: u8, out: &mut String) {
    if prec(e) < min {
        out.push('(');
        write(e, out);
        out.push(')');
    } else {
        write(e, out);
    }
}

fn write(e: &Expr, out: &mut String) {
    match e {
        Expr::Const(c) => out.push_str(&constant(*c)),
        Expr::Var(v) => out.push_str(v.name()),
        Expr::Param(name) => out.push_str(name),
        Expr::Neg(a) => {
            out.push('-');
            wrap(a, NEG, out);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            wrap(a, ADD, out);
            out.push_str(if matches!(e, Expr::Add(..)) {
                " + "
            } else {
                " - "
            });
            wrap(b, MUL, out);
        }
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            wrap(a, MUL, out);
            out.push(if matches!(e, Expr::Mul(..)) { '*' } else { '/' });
            wrap(b, NEG, out);
        }
        Expr::Pow(a, exp) => {
            wrap(a, ATOM, out);
            out.push('^');
            match exp {
                Exponent::Rational(r) if r.is_integer() && *r.numer() >= 0 => {
                    out.push_str(&r.numer().to_string())
                }
                Exponent::Rational(r) if r.is_integer() => {
                    out.push_str(&format!("({})", r.numer()))
                }
                Exponent::Rational(r) => out.push_str(&format!("({}/{})", r.numer(), r.denom())),
                Exponent::Symbolic(s) => wrap(s, ATOM, out),
            }
        }
        Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
            out.push_str(match e {
                Expr::Sin(_) => "sin(",
                Expr::Cos(_) => "cos(",
                _ => "exp(",
            });
            write(a, out);
            out.push(')');
        }
    }
}

/// Renders with the minimum parentheses needed for `parse` to rebuild the
/// same tree (up to constant folding).
pub(super) fn render(e: &Expr) -> String {
    let mut out = String::new();
    write(e, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;

    fn rt(s: &str) -> String {
        parse(s).unwrap().to_string()
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(rt("p^2/(2*m) + k*q^2/2"), "p^2/(2.0*m) + k*q^2/2.0");
        assert_eq!(rt("q - (p - t)"), "q - (p - t)");
        assert_eq!(rt("-(q*p)"), "-(q*p)");
        assert_eq!(rt("(-q)^2"), "(-q)^2");
        assert_eq!(rt("(q^2)^3"), "(q^2)^3");
        assert_eq!(rt("q^(1/2) + p^(-1)"), "q^(1/2) + p^(-1)");
        assert_eq!(rt("p^(n+1)"), "p^(n + 1.0)");
        assert_eq!(rt("sin(q)*exp(-t)"), "sin(q)*exp(-t)");
    }

    #[test]
    fn complex_constants_reparse() {
        let e = super::super::Expr::Const(num_complex::Complex64::new(-1.5, -2.0));
        assert_eq!(e.to_string(), "-1.5 - 2.0*i");
        assert_eq!(parse(&e.to_string()).unwrap().canonical(), e);
    }
}
