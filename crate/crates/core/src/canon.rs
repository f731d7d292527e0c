//! Canonical dynamics of a complex Hamiltonian `H + iK` in one degree of
//! freedom.
//!
//! With `H_x = Re ∂ℋ/∂x` and `K_x = Im ∂ℋ/∂x` the flow is
//!
//! ```text
//! q' =  H_p - κ₀ K_q
//! p' = -H_q - K_p / κ₀
//! ```
//!
//! which is the usual Hamilton system when `K` is constant. The phase point is
//! carried by `z = (κ₀ p + i q)/√2` and the dual field is
//! `z_dℋ = [H_p - κ₀K_q + (κ₀H_q + K_p) i]/√2`, with `ż = i z_dℋ`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamexpr::{
    parse, ComplexScalar, EvalError, Expr, ParamError, ParamSet, ParseError, Var, I,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CanonError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Domain(&'static str),
}

/// One-degree-of-freedom phase point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseState {
    pub q: f64,
    pub p: f64,
    pub t: f64,
}

impl PhaseState {
    pub fn new(q: f64, p: f64, t: f64) -> Self {
        PhaseState { q, p, t }
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite() && self.t.is_finite()
    }
}

/// Complex Hamiltonian with its partial derivatives cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    expr: Expr,
    dq: Expr,
    dp: Expr,
    dt: Expr,
}

impl Hamiltonian {
    pub fn new(expr: Expr) -> Self {
        let dq = expr.differentiate(Var::Q);
        let dp = expr.differentiate(Var::P);
        let dt = expr.differentiate(Var::T);
        Hamiltonian { expr, dq, dp, dt }
    }

    pub fn parse(src: &str) -> Result<Self, ParseError> {
        Ok(Self::new(parse(src)?))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Cached `∂ℋ/∂v`.
    pub fn partial(&self, v: Var) -> &Expr {
        match v {
            Var::Q => &self.dq,
            Var::P => &self.dp,
            Var::T => &self.dt,
        }
    }

    /// Parameters that must be bound to evaluate the flow.
    pub fn required_params(&self) -> Vec<String> {
        let mut names = self.expr.free_params();
        names.insert("kappa0".to_string());
        names.into_iter().collect()
    }

    /// True when the imaginary part `K` has vanishing `q` and `p` partials.
    pub fn is_real(&self, params: &ParamSet) -> bool {
        self.dq.im_part().bind(params).is_zero() && self.dp.im_part().bind(params).is_zero()
    }

    pub fn substituted(&self, params: &ParamSet) -> Hamiltonian {
        Hamiltonian::new(self.expr.bind(params))
    }
}

/// Two-component real vector in the layout `(κ₀ṗ, q̇)` or `(H_p, κ₀H_q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseVec2(pub [f64; 2]);

/// The 2×2 symplectic matrix.
pub const J: [[f64; 2]; 2] = [[0.0, 1.0], [-1.0, 0.0]];

pub fn mat_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn transpose(a: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

impl PhaseVec2 {
    pub fn new(a: f64, b: f64) -> Self {
        PhaseVec2([a, b])
    }

    /// `J v`.
    pub fn j(self) -> Self {
        let [a, b] = self.0;
        PhaseVec2([J[0][0] * a + J[0][1] * b, J[1][0] * a + J[1][1] * b])
    }

    pub fn dot(self, other: Self) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1]
    }

    pub fn scale(self, s: f64) -> Self {
        PhaseVec2([self.0[0] * s, self.0[1] * s])
    }

    /// Complex number with the same components, `a + i b`.
    pub fn to_complex(self) -> ComplexScalar {
        ComplexScalar::new(self.0[0], self.0[1])
    }
}

/// Evaluated `(H_q, K_q, H_p, K_p)`.
fn split_partials(
    h: &Hamiltonian,
    s: &PhaseState,
    params: &ParamSet,
) -> Result<(f64, f64, f64, f64), EvalError> {
    let dq = h.dq.eval(s, params)?;
    let dp = h.dp.eval(s, params)?;
    Ok((dq.re, dq.im, dp.re, dp.im))
}

/// Generalized Hamilton equations, `(q̇, ṗ)`.
pub fn eom(h: &Hamiltonian, s: &PhaseState, params: &ParamSet) -> Result<(f64, f64), EvalError> {
    let k0 = params.kappa0();
    let (hq, kq, hp, kp) = split_partials(h, s, params)?;
    Ok((hp - k0 * kq, -hq - kp / k0))
}

/// Hamilton equations for real `H` alone, `(H_p, -H_q)`.
pub fn eom_real(
    h: &Hamiltonian,
    s: &PhaseState,
    params: &ParamSet,
) -> Result<(f64, f64), EvalError> {
    let hq = h.dq.eval(s, params)?.re;
    let hp = h.dp.eval(s, params)?.re;
    Ok((hp, -hq))
}

pub fn to_z(s: &PhaseState, params: &ParamSet) -> ComplexScalar {
    ComplexScalar::new(params.kappa0() * s.p, s.q) / SQRT_2
}

pub fn from_z(z: ComplexScalar, t: f64, params: &ParamSet) -> PhaseState {
    PhaseState::new(z.im * SQRT_2, z.re * SQRT_2 / params.kappa0(), t)
}

/// `z` velocity from `(q̇, ṗ)`.
pub fn z_velocity(qdot: f64, pdot: f64, kappa0: f64) -> ComplexScalar {
    ComplexScalar::new(kappa0 * pdot, qdot) / SQRT_2
}

/// Dual field `z_dℋ`.
pub fn z_dh(
    h: &Hamiltonian,
    s: &PhaseState,
    params: &ParamSet,
) -> Result<ComplexScalar, EvalError> {
    let k0 = params.kappa0();
    let (hq, kq, hp, kp) = split_partials(h, s, params)?;
    Ok(ComplexScalar::new(hp - k0 * kq, k0 * hq + kp) / SQRT_2)
}

/// `z_ℋ = i z_dℋ`, the velocity of `z`.
pub fn z_h(h: &Hamiltonian, s: &PhaseState, params: &ParamSet) -> Result<ComplexScalar, EvalError> {
    Ok(I * z_dh(h, s, params)?)
}

/// Matrix form `Z_H = -J dH` with `dH = (H_p, κ₀H_q)`. Real Hamiltonians only.
pub fn matrix_field(
    h: &Hamiltonian,
    s: &PhaseState,
    params: &ParamSet,
) -> Result<(PhaseVec2, PhaseVec2), CanonError> {
    if !h.is_real(params) {
        return Err(CanonError::Domain(
            "matrix formulation requires a real Hamiltonian (constant imaginary part)",
        ));
    }
    let k0 = params.kappa0();
    let hq = h.dq.eval(s, params)?.re;
    let hp = h.dp.eval(s, params)?.re;
    let dh = PhaseVec2::new(hp, k0 * hq);
    Ok((dh.j().scale(-1.0), dh))
}

fn kappa0() -> Expr {
    Expr::param("kappa0")
}

/// Symbolic `q̇`.
pub fn qdot_expr(h: &Hamiltonian) -> Expr {
    (h.dp.re_part() - kappa0() * h.dq.im_part()).simplify()
}

/// Symbolic `ṗ`.
pub fn pdot_expr(h: &Hamiltonian) -> Expr {
    (-h.dq.re_part() - h.dp.im_part() / kappa0()).simplify()
}

/// Symbolic `z_dℋ`.
pub fn z_dh_expr(h: &Hamiltonian) -> Expr {
    let re = h.dp.re_part() - kappa0() * h.dq.im_part();
    let im = kappa0() * h.dq.re_part() + h.dp.im_part();
    ((re + Expr::i() * im) * Expr::real(std::f64::consts::FRAC_1_SQRT_2)).simplify()
}

fn chain(e: &Expr, qdot: &Expr, pdot: &Expr) -> Expr {
    (e.differentiate(Var::T)
        + e.differentiate(Var::Q) * qdot.clone()
        + e.differentiate(Var::P) * pdot.clone())
    .simplify()
}

/// `∂e/∂t + e_q q̇ + e_p ṗ` with the flow substituted symbolically.
pub fn total_time_derivative(e: &Expr, h: &Hamiltonian) -> Expr {
    chain(e, &qdot_expr(h), &pdot_expr(h))
}

/// Analytic derivatives of the flow at one state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rates {
    pub qdot: f64,
    pub pdot: f64,
    pub qddot: f64,
    pub pddot: f64,
}

/// A Hamiltonian bound to a parameter set, with every expression the
/// integrator and the geometry need precomputed.
#[derive(Debug, Clone)]
pub struct Flow {
    hamiltonian: Hamiltonian,
    params: ParamSet,
    bound: Hamiltonian,
    qdot: Expr,
    pdot: Expr,
    qddot: Expr,
    pddot: Expr,
    zdh: Expr,
    zdh_dot: Expr,
    zdh_ddot: Expr,
}

impl Flow {
    pub fn new(hamiltonian: Hamiltonian, params: ParamSet) -> Result<Self, CanonError> {
        params.validate()?;
        for name in hamiltonian.required_params() {
            params.require(&name)?;
        }
        let bound = hamiltonian.substituted(&params);
        let qdot = qdot_expr(&hamiltonian).bind(&params);
        let pdot = pdot_expr(&hamiltonian).bind(&params);
        let qddot = chain(&qdot, &qdot, &pdot);
        let pddot = chain(&pdot, &qdot, &pdot);
        let zdh = z_dh_expr(&hamiltonian).bind(&params);
        let zdh_dot = chain(&zdh, &qdot, &pdot);
        let zdh_ddot = chain(&zdh_dot, &qdot, &pdot);
        Ok(Flow {
            hamiltonian,
            params,
            bound,
            qdot,
            pdot,
            qddot,
            pddot,
            zdh,
            zdh_dot,
            zdh_ddot,
        })
    }

    pub fn parse(src: &str, params: ParamSet) -> Result<Self, CanonError> {
        Self::new(Hamiltonian::parse(src)?, params)
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn kappa0(&self) -> f64 {
        self.params.kappa0()
    }

    pub fn qdot_expr(&self) -> &Expr {
        &self.qdot
    }

    pub fn pdot_expr(&self) -> &Expr {
        &self.pdot
    }

    pub fn z_dh_expr(&self) -> &Expr {
        &self.zdh
    }

    pub fn z_dh_dot_expr(&self) -> &Expr {
        &self.zdh_dot
    }

    pub fn z_dh_ddot_expr(&self) -> &Expr {
        &self.zdh_ddot
    }

    fn real(&self, e: &Expr, s: &PhaseState) -> Result<f64, EvalError> {
        Ok(e.eval(s, &self.params)?.re)
    }

    /// `(q̇, ṗ)` from the split partials.
    pub fn eom(&self, s: &PhaseState) -> Result<(f64, f64), EvalError> {
        eom(&self.bound, s, &self.params)
    }

    pub fn rates(&self, s: &PhaseState) -> Result<Rates, EvalError> {
        let (qdot, pdot) = self.eom(s)?;
        Ok(Rates {
            qdot,
            pdot,
            qddot: self.real(&self.qddot, s)?,
            pddot: self.real(&self.pddot, s)?,
        })
    }

    pub fn value(&self, s: &PhaseState) -> Result<ComplexScalar, EvalError> {
        self.bound.expr.eval(s, &self.params)
    }

    pub fn z_dh(&self, s: &PhaseState) -> Result<ComplexScalar, EvalError> {
        z_dh(&self.bound, s, &self.params)
    }

    /// `(z_dℋ, ż_dℋ, z̈_dℋ)` at `s`.
    pub fn z_dh_jet(
        &self,
        s: &PhaseState,
    ) -> Result<(ComplexScalar, ComplexScalar, ComplexScalar), EvalError> {
        Ok((
            self.zdh.eval(s, &self.params)?,
            self.zdh_dot.eval(s, &self.params)?,
            self.zdh_ddot.eval(s, &self.params)?,
        ))
    }

    /// `(z, ż, z̈)` at `s`.
    pub fn z_jet(
        &self,
        s: &PhaseState,
    ) -> Result<(ComplexScalar, ComplexScalar, ComplexScalar), EvalError> {
        let k0 = self.kappa0();
        let r = self.rates(s)?;
        Ok((
            to_z(s, &self.params),
            z_velocity(r.qdot, r.pdot, k0),
            z_velocity(r.qddot, r.pddot, k0),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HARMONIC: &str = "p^2/(2*m) + k*q^2/2";
    const IMAGINARY: &str = "i*alpha0*(p^2/(2*m) + k*q^2/2)";
    const ATTENUATED: &str = "p^2/(2*m) + k*q^2/2 + i*beta0/(n+1)*p^(n+1)";

    fn unit() -> ParamSet {
        ParamSet::new().with("m", 1.0).with("k", 1.0)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn harmonic_equations_of_motion() {
        let h = Hamiltonian::parse(HARMONIC).unwrap();
        let (qd, pd) = eom(&h, &PhaseState::new(1.0, 0.0, 0.0), &unit()).unwrap();
        assert_eq!((qd, pd), (0.0, -1.0));
    }

    #[test]
    fn imaginary_equations_of_motion() {
        let h = Hamiltonian::parse(IMAGINARY).unwrap();
        let params = unit().with("alpha0", 1.0);
        let (qd, pd) = eom(&h, &PhaseState::new(1.0, 1.0, 0.0), &params).unwrap();
        assert_eq!((qd, pd), (-1.0, -1.0));
    }

    #[test]
    fn attenuated_momentum_equation() {
        let h = Hamiltonian::parse(ATTENUATED).unwrap();
        let params = ParamSet::new()
            .with("m", 1.3)
            .with("k", 0.7)
            .with("beta0", 0.4)
            .with("n", 1.0)
            .with("kappa0", 2.0);
        for &(q, p) in &[(0.3, -1.2), (2.0, 0.5), (-1.0, 3.0)] {
            let (qd, pd) = eom(&h, &PhaseState::new(q, p, 0.0), &params).unwrap();
            assert!(close(qd, p / 1.3, 1e-15));
            assert!(close(pd, -0.7 * q - 0.4 / 2.0 * p, 1e-15));
        }
    }

    #[test]
    fn z_map_examples() {
        let z = to_z(&PhaseState::new(1.0, 0.0, 0.0), &ParamSet::new());
        assert_eq!(z, ComplexScalar::new(0.0, 1.0 / SQRT_2));
        let z = to_z(
            &PhaseState::new(0.0, 1.0, 0.0),
            &ParamSet::new().with("kappa0", 2.0),
        );
        assert!((z - ComplexScalar::new(SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dual_field_closed_forms() {
        let (q, p) = (0.7, -0.3);
        let s = PhaseState::new(q, p, 0.0);
        let (m, k, k0, a0, b0) = (1.5, 0.8, 1.7, 0.6, 0.25);
        let base = ParamSet::new().with("m", m).with("k", k).with("kappa0", k0);

        let h = Hamiltonian::parse(HARMONIC).unwrap();
        let want = ComplexScalar::new(p / m, k0 * k * q) / SQRT_2;
        assert!((z_dh(&h, &s, &base).unwrap() - want).norm() < 1e-15);

        let h = Hamiltonian::parse(IMAGINARY).unwrap();
        let want = ComplexScalar::new(-k0 * k * q, p / m) * (a0 / SQRT_2);
        let params = base.clone().with("alpha0", a0);
        assert!((z_dh(&h, &s, &params).unwrap() - want).norm() < 1e-15);

        let h = Hamiltonian::parse(ATTENUATED).unwrap();
        for n in 1..=3 {
            let params = base.clone().with("beta0", b0).with("n", n as f64);
            let want = ComplexScalar::new(p / m, k0 * k * q + b0 * p.powi(n)) / SQRT_2;
            assert!((z_dh(&h, &s, &params).unwrap() - want).norm() < 1e-15);
        }
    }

    #[test]
    fn z_h_agrees_with_z_velocity() {
        let h = Hamiltonian::parse(HARMONIC).unwrap();
        let s = PhaseState::new(1.0, 0.0, 0.0);
        let zh = z_h(&h, &s, &unit()).unwrap();
        assert!((zh - ComplexScalar::new(-1.0 / SQRT_2, 0.0)).norm() < 1e-15);
        let c = Hamiltonian::parse("3 + 2*i").unwrap();
        assert_eq!(z_h(&c, &s, &unit()).unwrap(), ComplexScalar::new(0.0, 0.0));
    }

    #[test]
    fn matrix_field_layout_and_domain() {
        let h = Hamiltonian::parse(HARMONIC).unwrap();
        let (zh, dh) = matrix_field(&h, &PhaseState::new(0.0, 1.0, 0.0), &unit()).unwrap();
        assert_eq!(dh, PhaseVec2::new(1.0, 0.0));
        assert_eq!(zh, PhaseVec2::new(0.0, 1.0));
        let h = Hamiltonian::parse(IMAGINARY).unwrap();
        let err = matrix_field(&h, &PhaseState::default(), &unit().with("alpha0", 1.0));
        assert!(matches!(err, Err(CanonError::Domain(_))));
        // a constant imaginary offset keeps the flow real
        let h = Hamiltonian::parse("p^2/2 + q^2/2 + 3*i").unwrap();
        assert!(matrix_field(&h, &PhaseState::default(), &unit()).is_ok());
    }

    #[test]
    fn symplectic_matrix_identities() {
        let jj = mat_mul(&J, &J);
        assert_eq!(jj, [[-1.0, 0.0], [0.0, -1.0]]);
        let jt = transpose(&J);
        assert_eq!(mat_mul(&jt, &J), [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(jt, [[-J[0][0], -J[0][1]], [-J[1][0], -J[1][1]]]);
    }

    #[test]
    fn total_derivative_of_harmonic_dual_field() {
        let h = Hamiltonian::parse(HARMONIC).unwrap();
        let zd = total_time_derivative(&z_dh_expr(&h), &h);
        let expected = parse("-(k/m)/2^(1/2)*(q - kappa0*p*i)").unwrap().simplify();
        let params = ParamSet::new()
            .with("m", 1.7)
            .with("k", 0.4)
            .with("kappa0", 0.8);
        for &(q, p) in &[(0.2, 0.9), (-1.1, 0.4)] {
            let s = PhaseState::new(q, p, 0.0);
            let a = zd.eval(&s, &params).unwrap();
            let b = expected.eval(&s, &params).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
        assert!(total_time_derivative(&Expr::real(4.0), &h).is_zero());
    }

    #[test]
    fn total_derivative_of_attenuated_dual_field_matches_reference_form() {
        let h = Hamiltonian::parse(ATTENUATED).unwrap();
        let params = ParamSet::new()
            .with("m", 1.3)
            .with("k", 0.7)
            .with("beta0", 0.4)
            .with("n", 1.0)
            .with("kappa0", 1.6);
        let zd = total_time_derivative(&z_dh_expr(&h).bind(&params), &h.substituted(&params));
        let (m, k, b, k0) = (1.3, 0.7, 0.4, 1.6);
        let w2 = k / m;
        for &(q, p) in &[(0.2, 0.9), (-1.1, 0.4), (2.0, -3.0)] {
            let got = zd.eval(&PhaseState::new(q, p, 0.0), &params).unwrap();
            let re = -w2 * q - b / (m * k0) * p;
            let im = k0 * ((w2 - b * b / (k0 * k0)) * p - b * k / k0 * q);
            let want = ComplexScalar::new(re, im) / SQRT_2;
            assert!((got - want).norm() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn energy_is_a_first_integral_of_real_flows() {
        let h = Hamiltonian::parse("p^2/(2*m) + k*q^2/2 + q^4/4").unwrap();
        let dh = total_time_derivative(h.expr(), &h).bind(&unit());
        assert!(dh.is_zero(), "{dh}");
    }

    #[test]
    fn flow_reports_missing_parameters() {
        let err = Flow::parse(HARMONIC, ParamSet::new().with("k", 1.0)).unwrap_err();
        assert_eq!(err, CanonError::Param(ParamError::Missing("m".into())));
    }
}
