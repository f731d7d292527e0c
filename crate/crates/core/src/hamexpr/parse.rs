//! Recursive-descent parser.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```

use std::fmt;

use thiserror::Error;

use super::{as_rational, Exponent, Expr, Var};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    UnexpectedEnd {
        expected: &'static str,
    },
    UnknownFunction(String),
    InvalidNumber(String),
    VariableExponent,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "expected {expected}, found `{found}`")
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "expected {expected}, found end of input")
            }
            ParseErrorKind::UnknownFunction(name) => write!(f, "unknown function `{name}`"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number `{s}`"),
            ParseErrorKind::VariableExponent => {
                write!(f, "exponent must not depend on q, p or t")
            }
        }
    }
}

/// Syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

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
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(x) => write!(f, "{x}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Slash => f.write_str("/"),
            Tok::Caret => f.write_str("^"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, start)),
            '-' => out.push((Tok::Minus, start)),
            '*' => out.push((Tok::Star, start)),
            '/' => out.push((Tok::Slash, start)),
            '^' => out.push((Tok::Caret, start)),
            '(' => out.push((Tok::LParen, start)),
            ')' => out.push((Tok::RParen, start)),
            '0'..='9' | '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // Exponent marker only when digits follow.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    kind: ParseErrorKind::InvalidNumber(text.to_string()),
                    position: start,
                })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or(c);
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(ch),
                    position: start,
                });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn error(&self, expected: &'static str) -> ParseError {
        let kind = match self.peek() {
            Some(t) => ParseErrorKind::UnexpectedToken {
                found: t.to_string(),
                expected,
            },
            None => ParseErrorKind::UnexpectedEnd { expected },
        };
        ParseError {
            kind,
            position: self.offset(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = lhs + self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = lhs * self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs = lhs / self.unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.offset();
        let exponent = self.unary()?;
        if !exponent.is_phase_constant() {
            return Err(ParseError {
                kind: ParseErrorKind::VariableExponent,
                position: at,
            });
        }
        let exponent = match as_rational(&exponent) {
            Some(r) => Exponent::Rational(r),
            None => Exponent::Symbolic(Box::new(exponent)),
        };
        Ok(base.pow(exponent))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(x)) => Ok(Expr::real(x)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    let f: fn(Expr) -> Expr = match name.as_str() {
                        "sin" => Expr::sin,
                        "cos" => Expr::cos,
                        "exp" => Expr::exp,
                        _ => {
                            return Err(ParseError {
                                kind: ParseErrorKind::UnknownFunction(name),
                                position: at,
                            })
                        }
                    };
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(f(arg));
                }
                Ok(match name.as_str() {
                    "q" => Expr::Var(Var::Q),
                    "p" => Expr::Var(Var::P),
                    "t" => Expr::Var(Var::T),
                    "i" => Expr::i(),
                    "sin" | "cos" | "exp" => {
                        return Err(ParseError {
                            kind: ParseErrorKind::UnexpectedToken {
                                found: name,
                                expected: "operand",
                            },
                            position: at,
                        })
                    }
                    _ => Expr::Param(name),
                })
            }
            _ => {
                self.pos -= 1;
                Err(self.error("operand"))
            }
        }
    }
}

/// Parses expression source text.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let e = parser.expr()?;
    if parser.peek().is_some() {
        return Err(parser.error("operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::super::Rational;
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn atoms() {
        assert_eq!(p("q"), Expr::q());
        assert_eq!(p("i"), Expr::i());
        assert_eq!(p("kappa0"), Expr::param("kappa0"));
        assert_eq!(p("2.5e-3"), Expr::real(2.5e-3));
        assert_eq!(p("1E2"), Expr::real(100.0));
    }

    #[test]
    fn harmonic_hamiltonian() {
        let e = p("p^2/(2*m) + k*q^2/2");
        let expected = Expr::p().powi(2) / (Expr::real(2.0) * Expr::param("m"))
            + Expr::param("k") * Expr::q().powi(2) / Expr::real(2.0);
        assert_eq!(e, expected);
    }

    #[test]
    fn imaginary_top_factor() {
        let e = p("i*(alpha0)*(p^2/(2*m)+k*q^2/2)");
        match e {
            Expr::Mul(lhs, _) => assert_eq!(*lhs, Expr::i() * Expr::param("alpha0")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        // unary minus is looser than ^
        assert_eq!(p("-q^2"), -(Expr::q().powi(2)));
        // ...but tighter than +
        assert_eq!(p("-q+p"), -Expr::q() + Expr::p());
        // ^ is right associative
        assert_eq!(p("q^2^3"), Expr::q().powi(8));
        assert_eq!(p("q^-1"), Expr::q().powi(-1));
        assert_eq!(p("q - p - t"), (Expr::q() - Expr::p()) - Expr::t());
        assert_eq!(p("q / p * t"), (Expr::q() / Expr::p()) * Expr::t());
        assert_eq!(
            p("q^(1/2)"),
            Expr::q().pow(Exponent::Rational(Rational::new(1, 2)))
        );
    }

    #[test]
    fn symbolic_exponent() {
        let e = p("p^(n+1)");
        assert_eq!(
            e,
            Expr::p().pow(Exponent::Symbolic(Box::new(
                Expr::param("n") + Expr::real(1.0)
            )))
        );
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("q + * p").unwrap_err();
        assert_eq!(err.position, 4);
        let err = parse("tan(q)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownFunction("tan".into()));
        assert_eq!(err.position, 0);
        let err = parse("(q + p").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnexpectedEnd { .. }));
        assert_eq!(err.position, 6);
        let err = parse("q $ p").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('$'));
        assert_eq!(
            parse("q^p").unwrap_err().kind,
            ParseErrorKind::VariableExponent
        );
        assert!(parse("q p").is_err());
        assert!(parse("").is_err());
        assert!(parse("sin + q").is_err());
    }
}
