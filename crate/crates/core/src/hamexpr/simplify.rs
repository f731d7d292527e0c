//! Canonical sum-of-products rewriting.
//!
//! An expression is flattened into a list of terms `c * f1^e1 * f2^e2 ...`
//! where `c` is a complex constant and each `fi` is an atomic factor (a
//! variable, a parameter, a function application or an unexpanded sum).
//! Terms with identical factor lists are merged, factors with identical
//! bases and rational exponents are merged, and the result is rebuilt in a
//! deterministic order.

use std::collections::BTreeMap;

use super::render::render;
use super::{as_rational, ComplexScalar, Exponent, Expr, Rational};
use crate::canon::PhaseState;

type Factor = (Expr, Exponent);

#[derive(Debug, Clone)]
struct Term {
    coeff: ComplexScalar,
    factors: Vec<Factor>,
}

type Sum = Vec<Term>;

const EXPAND_MAX_POWER: i64 = 4;
const EXPAND_MAX_TERMS: usize = 6;

fn one() -> Rational {
    Rational::from_integer(1)
}

fn is_zero(c: ComplexScalar) -> bool {
    c.re == 0.0 && c.im == 0.0
}

fn factor_key(f: &Factor) -> String {
    render(&Expr::Pow(Box::new(f.0.clone()), f.1.clone()))
}

fn base_key(f: &Factor) -> String {
    render(&f.0)
}

fn term_key(t: &Term) -> String {
    t.factors
        .iter()
        .map(factor_key)
        .collect::<Vec<_>>()
        .join("*")
}

fn atom(e: Expr) -> Sum {
    vec![Term {
        coeff: 1.0.into(),
        factors: vec![(e, Exponent::Rational(one()))],
    }]
}

fn constant(c: ComplexScalar) -> Sum {
    if is_zero(c) {
        vec![]
    } else {
        vec![Term {
            coeff: c,
            factors: vec![],
        }]
    }
}

fn negate(s: Sum) -> Sum {
    s.into_iter()
        .map(|t| Term {
            coeff: -t.coeff,
            factors: t.factors,
        })
        .collect()
}

fn collect(terms: Sum) -> Sum {
    let mut groups: BTreeMap<String, Term> = BTreeMap::new();
    for t in terms {
        let key = term_key(&t);
        match groups.get_mut(&key) {
            Some(existing) => existing.coeff += t.coeff,
            None => {
                groups.insert(key, t);
            }
        }
    }
    groups.into_values().filter(|t| !is_zero(t.coeff)).collect()
}

fn merge_factors(a: &[Factor], b: &[Factor]) -> Vec<Factor> {
    let mut out: Vec<Factor> = a.to_vec();
    for f in b {
        let bk = base_key(f);
        let slot = out.iter_mut().find(|g| {
            matches!((&g.1, &f.1), (Exponent::Rational(_), Exponent::Rational(_)))
                && base_key(g) == bk
        });
        match (slot, &f.1) {
            (Some(g), Exponent::Rational(r)) => {
                if let Exponent::Rational(existing) = &mut g.1 {
                    *existing += r;
                }
            }
            _ => out.push(f.clone()),
        }
    }
    out.retain(|f| !matches!(&f.1, Exponent::Rational(r) if *r.numer() == 0));
    out.sort_by_key(factor_key);
    out
}

fn product(a: &Sum, b: &Sum) -> Sum {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(Term {
                coeff: x.coeff * y.coeff,
                factors: merge_factors(&x.factors, &y.factors),
            });
        }
    }
    collect(out)
}

fn neg_exponent(e: &Exponent) -> Exponent {
    match e {
        Exponent::Rational(r) => Exponent::Rational(-r),
        Exponent::Symbolic(s) => normalize_exponent(&-(**s).clone()),
    }
}

fn reciprocal(s: Sum) -> Sum {
    if s.len() == 1 {
        let t = &s[0];
        let factors = t
            .factors
            .iter()
            .map(|(b, e)| (b.clone(), neg_exponent(e)))
            .collect::<Vec<_>>();
        return vec![Term {
            coeff: ComplexScalar::new(1.0, 0.0) / t.coeff,
            factors: merge_factors(&[], &factors),
        }];
    }
    atom_pow(rebuild(&s), Exponent::int(-1))
}

fn atom_pow(base: Expr, e: Exponent) -> Sum {
    vec![Term {
        coeff: 1.0.into(),
        factors: vec![(base, e)],
    }]
}

/// Simplifies a symbolic exponent, turning integral constants into rationals.
fn normalize_exponent(s: &Expr) -> Exponent {
    let simplified = simplify(s);
    if let Some(r) = as_rational(&simplified) {
        return Exponent::Rational(r);
    }
    Exponent::Symbolic(Box::new(simplified))
}

fn power(base: Sum, e: Exponent) -> Sum {
    match e {
        Exponent::Rational(r) => {
            if *r.numer() == 0 {
                return constant(1.0.into());
            }
            if base.is_empty() {
                return if r > Rational::from_integer(0) {
                    vec![]
                } else {
                    atom_pow(Expr::zero(), Exponent::Rational(r))
                };
            }
            if base.len() == 1 {
                let t = &base[0];
                if r.is_integer() {
                    let n = *r.numer();
                    if n.unsigned_abs() <= i32::MAX as u64 {
                        let factors = t
                            .factors
                            .iter()
                            .map(|(b, e)| {
                                let e = match e {
                                    Exponent::Rational(x) => Exponent::Rational(x * r),
                                    Exponent::Symbolic(s) => {
                                        normalize_exponent(&((**s).clone() * Expr::real(n as f64)))
                                    }
                                };
                                (b.clone(), e)
                            })
                            .collect::<Vec<_>>();
                        return vec![Term {
                            coeff: t.coeff.powi(n as i32),
                            factors: merge_factors(&[], &factors),
                        }];
                    }
                }
                if t.factors.is_empty() && t.coeff.im == 0.0 && t.coeff.re > 0.0 {
                    let x = *r.numer() as f64 / *r.denom() as f64;
                    return constant(t.coeff.re.powf(x).into());
                }
                if is_unit_atom(t) {
                    return atom_pow(t.factors[0].0.clone(), Exponent::Rational(r));
                }
            }
            if r.is_integer()
                && *r.numer() > 1
                && *r.numer() <= EXPAND_MAX_POWER
                && base.len() <= EXPAND_MAX_TERMS
            {
                let mut acc = base.clone();
                for _ in 1..*r.numer() {
                    acc = product(&acc, &base);
                }
                return acc;
            }
            atom_pow(rebuild(&base), Exponent::Rational(r))
        }
        Exponent::Symbolic(s) => {
            if base.len() == 1 && is_unit_atom(&base[0]) {
                return atom_pow(base[0].factors[0].0.clone(), Exponent::Symbolic(s));
            }
            atom_pow(rebuild(&base), Exponent::Symbolic(s))
        }
    }
}

/// A bare atom with coefficient one and exponent one.
fn is_unit_atom(t: &Term) -> bool {
    t.coeff == ComplexScalar::new(1.0, 0.0)
        && t.factors.len() == 1
        && matches!(&t.factors[0].1, Exponent::Rational(r) if *r == one())
}

fn function(a: &Expr, make: fn(Expr) -> Expr) -> Sum {
    let arg = simplify(a);
    if let Some(c) = arg.as_const() {
        if let Ok(v) = make(Expr::Const(c)).eval(&PhaseState::default(), &Default::default()) {
            return constant(v);
        }
    }
    atom(make(arg))
}

/// Sums free of `q`, `p`, `t` are kept whole so that they can cancel
/// against themselves as factors, e.g. `(n+1)/(n+1)`.
fn atomize_constant_sum(e: &Expr, s: Sum) -> Sum {
    if s.len() > 1 && e.is_phase_constant() {
        atom(rebuild(&s))
    } else {
        s
    }
}

/// Flattens a chain of `+`, `-` and negations before anything is atomized.
fn sum_terms(e: &Expr) -> Sum {
    match e {
        Expr::Add(a, b) => {
            let mut s = sum_terms(a);
            s.extend(sum_terms(b));
            s
        }
        Expr::Sub(a, b) => {
            let mut s = sum_terms(a);
            s.extend(negate(sum_terms(b)));
            s
        }
        Expr::Neg(a) => negate(sum_terms(a)),
        _ => to_sum(e),
    }
}

fn to_sum(e: &Expr) -> Sum {
    match e {
        Expr::Const(c) => constant(*c),
        Expr::Var(_) | Expr::Param(_) => atom(e.clone()),
        Expr::Neg(a) => negate(to_sum(a)),
        Expr::Add(..) | Expr::Sub(..) => atomize_constant_sum(e, collect(sum_terms(e))),
        Expr::Mul(a, b) => product(&to_sum(a), &to_sum(b)),
        Expr::Div(a, b) => product(&to_sum(a), &reciprocal(to_sum(b))),
        Expr::Pow(a, Exponent::Rational(r)) => power(to_sum(a), Exponent::Rational(*r)),
        Expr::Pow(a, Exponent::Symbolic(s)) => power(to_sum(a), normalize_exponent(s)),
        Expr::Sin(a) => function(a, Expr::sin),
        Expr::Cos(a) => function(a, Expr::cos),
        Expr::Exp(a) => function(a, Expr::exp),
    }
}

fn factor_expr(base: &Expr, e: &Exponent) -> Expr {
    match e {
        Exponent::Rational(r) if *r == one() => base.clone(),
        _ => Expr::Pow(Box::new(base.clone()), e.clone()),
    }
}

fn product_of(items: Vec<Expr>) -> Option<Expr> {
    items.into_iter().reduce(|acc, x| acc * x)
}

/// Returns the term as (is_negative, magnitude expression).
fn term_expr(t: &Term) -> (bool, Expr) {
    let mut numer = Vec::new();
    let mut denom = Vec::new();
    for (base, e) in &t.factors {
        match e {
            Exponent::Rational(r) if *r < Rational::from_integer(0) => {
                denom.push(factor_expr(base, &Exponent::Rational(-r)))
            }
            _ => numer.push(factor_expr(base, e)),
        }
    }
    let negative = t.coeff.im == 0.0 && t.coeff.re < 0.0;
    let c = if negative { -t.coeff } else { t.coeff };
    let unit = c == ComplexScalar::new(1.0, 0.0);
    let numer = match (product_of(numer), unit) {
        (Some(n), true) => n,
        (Some(n), false) => Expr::Const(c) * n,
        (None, _) => Expr::Const(c),
    };
    let expr = match product_of(denom) {
        Some(d) => numer / d,
        None => numer,
    };
    (negative, expr)
}

fn rebuild(s: &Sum) -> Expr {
    let mut parts: Vec<(bool, Expr)> = s
        .iter()
        .map(|t| {
            if t.factors.is_empty() && s.len() == 1 {
                (false, Expr::Const(t.coeff))
            } else {
                term_expr(t)
            }
        })
        .collect();
    // lead with a positive term when there is one
    if let Some(first) = parts.iter().position(|(neg, _)| !neg) {
        let lead = parts.remove(first);
        parts.insert(0, lead);
    }
    let mut acc: Option<Expr> = None;
    for (negative, mag) in parts {
        acc = Some(match (acc, negative) {
            (None, false) => mag,
            (None, true) => -mag,
            (Some(a), false) => a + mag,
            (Some(a), true) => a - mag,
        });
    }
    acc.unwrap_or_else(Expr::zero)
}

pub(super) fn simplify(e: &Expr) -> Expr {
    rebuild(&to_sum(e))
}

/// Evaluates every subtree built only from constants.
pub(super) fn fold_constants(e: &Expr) -> Expr {
    let f = |x: &Expr| Box::new(fold_constants(x));
    let folded = match e {
        Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => return e.clone(),
        Expr::Neg(a) => Expr::Neg(f(a)),
        Expr::Add(a, b) => Expr::Add(f(a), f(b)),
        Expr::Sub(a, b) => Expr::Sub(f(a), f(b)),
        Expr::Mul(a, b) => Expr::Mul(f(a), f(b)),
        Expr::Div(a, b) => Expr::Div(f(a), f(b)),
        Expr::Sin(a) => Expr::Sin(f(a)),
        Expr::Cos(a) => Expr::Cos(f(a)),
        Expr::Exp(a) => Expr::Exp(f(a)),
        Expr::Pow(a, Exponent::Rational(r)) => Expr::Pow(f(a), Exponent::Rational(*r)),
        Expr::Pow(a, Exponent::Symbolic(s)) => {
            let s = fold_constants(s);
            let exp = match as_rational(&s) {
                Some(r) => Exponent::Rational(r),
                None => Exponent::Symbolic(Box::new(s)),
            };
            Expr::Pow(f(a), exp)
        }
    };
    let constant_children = match &folded {
        Expr::Pow(_, Exponent::Symbolic(_)) => false,
        _ => folded.children().iter().all(|c| c.as_const().is_some()),
    };
    if constant_children {
        if let Ok(v) = folded.eval(&PhaseState::default(), &Default::default()) {
            return Expr::Const(v);
        }
    }
    folded
}
