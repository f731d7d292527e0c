//! Brute-force commutators over words in `q̂`, `p̂`.
//!
//! Operators are noncommutative polynomials; products concatenate words and
//! every `p̂q̂` is rewritten as `q̂p̂ − iℏ` until the result is normal ordered.
//! Coefficients are read off the classical symbols by evaluation, so this
//! path shares nothing with the `LinOp` engine.

use std::collections::BTreeMap;

use crate::canon::PhaseState;
use crate::hamexpr::{ComplexScalar, EvalError, Expr, ParamSet, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Q,
    P,
}

pub type Word = Vec<Letter>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<Word, ComplexScalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn term(word: Word, c: ComplexScalar) -> Self {
        let mut p = Poly::zero();
        p.add_term(word, c);
        p
    }

    fn add_term(&mut self, word: Word, c: ComplexScalar) {
        *self
            .terms
            .entry(word)
            .or_insert(ComplexScalar::new(0.0, 0.0)) += c;
    }

    pub fn add(&self, other: &Poly, sign: f64) -> Poly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), *c * sign);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_term(w, ca * cb);
            }
        }
        out
    }

    /// Rewrites every `p̂q̂` pair until all words read `q̂…q̂p̂…p̂`.
    pub fn normal_order(&self, hbar: f64) -> Poly {
        let mut pending: Vec<(Word, ComplexScalar)> =
            self.terms.iter().map(|(w, c)| (w.clone(), *c)).collect();
        let mut out = Poly::zero();
        while let Some((w, c)) = pending.pop() {
            match w.windows(2).position(|x| x == [Letter::P, Letter::Q]) {
                None => out.add_term(w, c),
                Some(i) => {
                    let mut swapped = w.clone();
                    swapped.swap(i, i + 1);
                    pending.push((swapped, c));
                    let mut contracted = w[..i].to_vec();
                    contracted.extend_from_slice(&w[i + 2..]);
                    pending.push((contracted, -I * hbar * c));
                }
            }
        }
        out
    }

    pub fn scalar(&self) -> ComplexScalar {
        self.terms.get(&Vec::new()).copied().unwrap_or_default()
    }

    /// Largest coefficient magnitude on a non-empty word.
    pub fn operator_residue(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(w, _)| !w.is_empty())
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn dagger(&self) -> Poly {
        let mut out = Poly::zero();
        for (w, c) in &self.terms {
            let mut r = w.clone();
            r.reverse();
            out.add_term(r, c.conj());
        }
        out
    }
}

/// `AB − BA`, normal ordered.
pub fn commutator(a: &Poly, b: &Poly, hbar: f64) -> Poly {
    a.mul(b).add(&b.mul(a), -1.0).normal_order(hbar)
}

/// Reads an affine classical symbol into a word polynomial by sampling it
/// at the origin and the two unit points.
pub fn quantize_affine(symbol: &Expr, params: &ParamSet) -> Result<Poly, EvalError> {
    let f = |q: f64, p: f64| symbol.eval(&PhaseState::new(q, p, 0.0), params);
    let c0 = f(0.0, 0.0)?;
    let cq = f(1.0, 0.0)? - c0;
    let cp = f(0.0, 1.0)? - c0;
    Ok(Poly::term(vec![], c0)
        .add(&Poly::term(vec![Letter::Q], cq), 1.0)
        .add(&Poly::term(vec![Letter::P], cp), 1.0))
}
