//! Inner and symplectic products on the complex plane and on `R²`, and the
//! Poisson bracket built from them.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::canon::{PhaseState, PhaseVec2};
use crate::hamexpr::{ComplexScalar, EvalError, Expr, ParamSet, Var};

/// `(z, w) = Re[z w̄]`.
pub fn inner(z: ComplexScalar, w: ComplexScalar) -> f64 {
    (z * w.conj()).re
}

/// `Ω(z, w) = Re[z i w̄] = -Im[z w̄]`.
pub fn omega_c(z: ComplexScalar, w: ComplexScalar) -> f64 {
    -(z * w.conj()).im
}

/// `Ω(u, v) = uᵀ J v`.
pub fn omega_vec(u: PhaseVec2, v: PhaseVec2) -> f64 {
    u.dot(v.j())
}

/// `(u, v) = uᵀ v`.
pub fn inner_vec(u: PhaseVec2, v: PhaseVec2) -> f64 {
    u.dot(v)
}

fn real_partials(f: &Expr, s: &PhaseState, params: &ParamSet) -> Result<(f64, f64), EvalError> {
    Ok((
        f.differentiate(Var::Q).eval(s, params)?.re,
        f.differentiate(Var::P).eval(s, params)?.re,
    ))
}

/// `{F, G} = κ₀ (F_q G_p - F_p G_q)` for real `F`, `G`.
pub fn poisson(f: &Expr, g: &Expr, s: &PhaseState, params: &ParamSet) -> Result<f64, EvalError> {
    let (fq, fp) = real_partials(f, s, params)?;
    let (gq, gp) = real_partials(g, s, params)?;
    Ok(params.kappa0() * (fq * gp - fp * gq))
}

/// `-Ω(dF, dG)` with the dual vectors `dF = (F_p, κ₀F_q)`.
pub fn poisson_matrix(
    f: &Expr,
    g: &Expr,
    s: &PhaseState,
    params: &ParamSet,
) -> Result<f64, EvalError> {
    let k0 = params.kappa0();
    let (fq, fp) = real_partials(f, s, params)?;
    let (gq, gp) = real_partials(g, s, params)?;
    Ok(-omega_vec(
        PhaseVec2::new(fp, k0 * fq),
        PhaseVec2::new(gp, k0 * gq),
    ))
}

/// Dual field of a real function, `z_dF = (F_p + κ₀F_q i)/√2`.
pub fn dual_field(f: &Expr, s: &PhaseState, params: &ParamSet) -> Result<ComplexScalar, EvalError> {
    let (fq, fp) = real_partials(f, s, params)?;
    Ok(ComplexScalar::new(fp, params.kappa0() * fq) * FRAC_1_SQRT_2)
}

/// `-Ω(z_dF, z_dG)` on the complex plane.
///
/// With the `1/√2` normalization of the dual field this equals
/// `{F, G}/2`.
pub fn poisson_complex(
    f: &Expr,
    g: &Expr,
    s: &PhaseState,
    params: &ParamSet,
) -> Result<f64, EvalError> {
    Ok(-omega_c(
        dual_field(f, s, params)?,
        dual_field(g, s, params)?,
    ))
}

/// `Ω(u, Ω(z, w)) + Ω(z, Ω(w, u)) + Ω(w, Ω(u, z))`, the inner values
/// re-embedded as real complex numbers.
pub fn jacobi_residual(u: ComplexScalar, z: ComplexScalar, w: ComplexScalar) -> f64 {
    jacobi_residual_with(omega_c, u, z, w)
}

pub fn jacobi_residual_with(
    omega: fn(ComplexScalar, ComplexScalar) -> f64,
    u: ComplexScalar,
    z: ComplexScalar,
    w: ComplexScalar,
) -> f64 {
    let r = |x: f64| ComplexScalar::new(x, 0.0);
    omega(u, r(omega(z, w))) + omega(z, r(omega(w, u))) + omega(w, r(omega(u, z)))
}

/// `(i/2)([z, w̄] - [z̄, w])` for commuting scalars; always zero.
pub fn classical_commutator_identity(z: ComplexScalar, w: ComplexScalar) -> f64 {
    let comm = |a: ComplexScalar, b: ComplexScalar| a * b - b * a;
    let v = ComplexScalar::new(0.0, 0.5) * (comm(z, w.conj()) - comm(z.conj(), w));
    v.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamexpr::{parse, I};

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    #[test]
    fn inner_product_examples() {
        assert_eq!(inner(c(1.0, 0.0), I), 0.0);
        let z = c(0.3, -1.7);
        assert!((inner(z, z) - z.norm_sqr()).abs() < 1e-15);
        assert_eq!(inner(c(1.0, 1.0), c(1.0, -1.0)), 0.0);
    }

    #[test]
    fn symplectic_product_examples() {
        assert_eq!(omega_c(c(1.0, 0.0), I), 1.0);
        let z = c(0.3, -1.7);
        assert_eq!(omega_c(z, z), 0.0);
        assert_eq!(
            omega_vec(PhaseVec2::new(1.0, 0.0), PhaseVec2::new(0.0, 1.0)),
            1.0
        );
        let u = PhaseVec2::new(2.0, -3.0);
        assert_eq!(omega_vec(u, u), 0.0);
    }

    #[test]
    fn vector_and_complex_forms_share_layout() {
        let u = PhaseVec2::new(0.4, -1.3);
        let v = PhaseVec2::new(2.2, 0.7);
        let a = omega_vec(u, v);
        let b = omega_c(u.to_complex(), v.to_complex());
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn poisson_brackets() {
        let s = PhaseState::new(0.3, -0.8, 0.0);
        let q = parse("q").unwrap();
        let p = parse("p").unwrap();
        for k0 in [0.5, 1.0, 2.0] {
            let params = ParamSet::new().with("kappa0", k0);
            assert_eq!(poisson(&q, &p, &s, &params).unwrap(), k0);
            assert_eq!(poisson_matrix(&q, &p, &s, &params).unwrap(), k0);
            assert!((poisson_complex(&q, &p, &s, &params).unwrap() - k0 / 2.0).abs() < 1e-15);
        }
        let params = ParamSet::new().with("m", 1.2).with("k", 0.3);
        let h = parse("p^2/(2*m) + k*q^2/2").unwrap();
        assert_eq!(poisson(&h, &h, &s, &params).unwrap(), 0.0);
        let f = parse("q^2*p + sin(p)").unwrap();
        let fg = poisson(&f, &h, &s, &params).unwrap();
        let gf = poisson(&h, &f, &s, &params).unwrap();
        assert!((fg + gf).abs() < 1e-15);
    }

    #[test]
    fn jacobi_and_classical_identity() {
        assert_eq!(jacobi_residual(c(1.0, 0.0), I, c(1.0, 1.0)), 0.0);
        assert_eq!(jacobi_residual(c(0.5, 2.0), c(-1.0, 0.3), c(4.0, 0.0)), 0.0);
        assert_eq!(
            classical_commutator_identity(c(1.5, -2.0), c(0.2, 0.9)),
            0.0
        );
        assert_eq!(classical_commutator_identity(c(0.0, 0.0), c(0.0, 0.0)), 0.0);
    }
}
