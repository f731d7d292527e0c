//! Built-in systems: the harmonic oscillator, the pure imaginary oscillator
//! and the attenuated oscillator, with closed-form solutions where they
//! exist.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::canon::{CanonError, Flow, PhaseState};
use crate::hamexpr::{ComplexScalar, ParamError, ParamSet};

pub const HARMONIC: &str = "p^2/(2*m) + k*q^2/2";
pub const IMAGINARY: &str = "i*alpha0*(p^2/(2*m) + k*q^2/2)";
pub const ATTENUATED: &str = "p^2/(2*m) + k*q^2/2 + i*beta0/(n+1)*p^(n+1)";

pub const NAMES: [&str; 3] = ["harmonic", "imaginary", "attenuated"];

/// Relative width of the repeated-root band in `Λ²`.
pub const CRITICAL_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}` (expected harmonic, imaginary or attenuated)")]
    Unknown(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Canon(#[from] CanonError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Harmonic,
    Imaginary,
    Attenuated,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Harmonic => "harmonic",
            Kind::Imaginary => "imaginary",
            Kind::Attenuated => "attenuated",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, ScenarioError> {
        match name {
            "harmonic" => Ok(Kind::Harmonic),
            "imaginary" => Ok(Kind::Imaginary),
            "attenuated" => Ok(Kind::Attenuated),
            other => Err(ScenarioError::Unknown(other.to_string())),
        }
    }

    pub fn source(self) -> &'static str {
        match self {
            Kind::Harmonic => HARMONIC,
            Kind::Imaginary => IMAGINARY,
            Kind::Attenuated => ATTENUATED,
        }
    }

    pub fn defaults(self) -> ParamSet {
        let base = ParamSet::new().with("m", 1.0).with("k", 1.0);
        match self {
            Kind::Harmonic => base,
            Kind::Imaginary => base.with("alpha0", 1.0),
            Kind::Attenuated => base.with("beta0", 0.1).with("n", 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Decaying,
    Growing,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    Periodic,
    Decaying,
    Forcing,
    Frozen,
    Overdamped { trend: Trend, lambda_sq: f64 },
    Critical { trend: Trend, lambda_sq: f64 },
    Oscillatory { trend: Trend, lambda_sq: f64 },
    NumericOnly,
}

/// Roots of `r² + (β₀/κ₀) r + ω² = 0`.
pub fn characteristic_roots(beta0: f64, kappa0: f64, omega: f64) -> [ComplexScalar; 2] {
    let b = beta0 / kappa0;
    let c = omega * omega;
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let big = -0.5 * (b + b.signum() * s);
        if big == 0.0 {
            return [ComplexScalar::new(0.0, 0.0); 2];
        }
        let (r1, r2) = (big, c / big);
        let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        [hi.into(), lo.into()]
    } else {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        [ComplexScalar::new(re, im), ComplexScalar::new(re, -im)]
    }
}

/// `Λ² = (β₀/2κ₀)² − ω²`.
pub fn lambda_sq(beta0: f64, kappa0: f64, omega: f64) -> f64 {
    (beta0 / (2.0 * kappa0)).powi(2) - omega * omega
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Solution {
    Harmonic {
        omega: f64,
        m: f64,
    },
    Imaginary {
        rate_q: f64,
        rate_p: f64,
    },
    Distinct {
        r1: f64,
        r2: f64,
        a: f64,
        b: f64,
        m: f64,
    },
    Repeated {
        r: f64,
        a: f64,
        b: f64,
        m: f64,
    },
    Oscillatory {
        lambda: ComplexScalar,
        c: ComplexScalar,
        m: f64,
    },
}

/// Closed-form state with its exact time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormPoint {
    pub state: PhaseState,
    pub qdot: f64,
    pub pdot: f64,
    pub qddot: f64,
    pub pddot: f64,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    kind: Kind,
    params: ParamSet,
    initial: PhaseState,
    flow: Flow,
    regime: Regime,
    solution: Option<Solution>,
}

impl Scenario {
    /// `overrides` are laid over the scenario defaults.
    pub fn new(
        kind: Kind,
        overrides: &ParamSet,
        initial: PhaseState,
    ) -> Result<Self, ScenarioError> {
        let params = kind.defaults().merged(overrides);
        params.validate()?;
        let m = params.require("m")?;
        let k = params.require("k")?;
        if k <= 0.0 {
            return Err(ParamError::Invalid {
                name: "k".into(),
                value: k,
                reason: "must be positive for the built-in oscillators",
            }
            .into());
        }
        let omega = params.omega()?;
        let k0 = params.kappa0();
        let flow = Flow::parse(kind.source(), params.clone())?;
        let (q0, p0) = (initial.q, initial.p);
        let (regime, solution) = match kind {
            Kind::Harmonic => (Regime::Periodic, Some(Solution::Harmonic { omega, m })),
            Kind::Imaginary => {
                let a0 = params.require("alpha0")?;
                let regime = if a0 > 0.0 {
                    Regime::Decaying
                } else if a0 < 0.0 {
                    Regime::Forcing
                } else {
                    Regime::Frozen
                };
                let sol = Solution::Imaginary {
                    rate_q: -a0 * k0 * k,
                    rate_p: -a0 / (m * k0),
                };
                (regime, Some(sol))
            }
            Kind::Attenuated => {
                let b0 = params.require("beta0")?;
                let n = params.require("n")?;
                if n != 1.0 {
                    (Regime::NumericOnly, None)
                } else {
                    let lsq = lambda_sq(b0, k0, omega);
                    let scale = (b0 / (2.0 * k0)).powi(2).max(omega * omega);
                    let roots = characteristic_roots(b0, k0, omega);
                    let qd0 = p0 / m;
                    let lead = roots[0].re.max(roots[1].re);
                    let trend = if lead < 0.0 {
                        Trend::Decaying
                    } else if lead > 0.0 {
                        Trend::Growing
                    } else {
                        Trend::Neutral
                    };
                    if lsq.abs() <= CRITICAL_REL_TOL * scale {
                        let r = 0.5 * (roots[0].re + roots[1].re);
                        let sol = Solution::Repeated {
                            r,
                            a: q0,
                            b: qd0 - r * q0,
                            m,
                        };
                        (
                            Regime::Critical {
                                trend,
                                lambda_sq: lsq,
                            },
                            Some(sol),
                        )
                    } else if lsq > 0.0 {
                        let (r1, r2) = (roots[0].re, roots[1].re);
                        let a = (qd0 - r2 * q0) / (r1 - r2);
                        let sol = Solution::Distinct {
                            r1,
                            r2,
                            a,
                            b: q0 - a,
                            m,
                        };
                        (
                            Regime::Overdamped {
                                trend,
                                lambda_sq: lsq,
                            },
                            Some(sol),
                        )
                    } else {
                        let lambda = roots[0];
                        let c = ComplexScalar::new(q0, -(qd0 - lambda.re * q0) / lambda.im);
                        let sol = Solution::Oscillatory { lambda, c, m };
                        (
                            Regime::Oscillatory {
                                trend,
                                lambda_sq: lsq,
                            },
                            Some(sol),
                        )
                    }
                }
            }
        };
        Ok(Scenario {
            kind,
            params,
            initial,
            flow,
            regime,
            solution,
        })
    }

    pub fn by_name(
        name: &str,
        overrides: &ParamSet,
        initial: PhaseState,
    ) -> Result<Self, ScenarioError> {
        Self::new(Kind::from_name(name)?, overrides, initial)
    }

    pub fn harmonic(overrides: &ParamSet, initial: PhaseState) -> Result<Self, ScenarioError> {
        Self::new(Kind::Harmonic, overrides, initial)
    }

    pub fn imaginary(overrides: &ParamSet, initial: PhaseState) -> Result<Self, ScenarioError> {
        Self::new(Kind::Imaginary, overrides, initial)
    }

    pub fn attenuated(overrides: &ParamSet, initial: PhaseState) -> Result<Self, ScenarioError> {
        Self::new(Kind::Attenuated, overrides, initial)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn source(&self) -> &'static str {
        self.kind.source()
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn initial(&self) -> PhaseState {
        self.initial
    }

    pub fn flow(&self) -> &Flow {
        &self.flow
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn omega(&self) -> f64 {
        self.params.omega().unwrap_or(0.0)
    }

    /// `2π/ω` for the periodic and oscillatory cases.
    pub fn period(&self) -> Option<f64> {
        match self.solution? {
            Solution::Harmonic { omega, .. } => Some(2.0 * PI / omega),
            Solution::Oscillatory { lambda, .. } => Some(2.0 * PI / lambda.im.abs()),
            _ => None,
        }
    }

    /// Harmonic amplitude `R` and phase `φ` with `q = R cos(ω(t−t₀) + φ)`.
    pub fn amplitude(&self) -> Option<(f64, f64)> {
        match self.solution? {
            Solution::Harmonic { omega, m } => {
                let (q0, s0) = (self.initial.q, self.initial.p / (m * omega));
                Some((q0.hypot(s0), (-s0).atan2(q0)))
            }
            _ => None,
        }
    }

    pub fn has_closed_form(&self) -> bool {
        self.solution.is_some()
    }

    pub fn closed_form(&self, t: f64) -> Option<ClosedFormPoint> {
        let tau = t - self.initial.t;
        let (q0, p0) = (self.initial.q, self.initial.p);
        let point = |q: f64, p: f64, [qdot, pdot, qddot, pddot]: [f64; 4]| ClosedFormPoint {
            state: PhaseState::new(q, p, t),
            qdot,
            pdot,
            qddot,
            pddot,
        };
        Some(match self.solution? {
            Solution::Harmonic { omega, m } => {
                let (c, s) = ((omega * tau).cos(), (omega * tau).sin());
                let q = q0 * c + p0 / (m * omega) * s;
                let p = p0 * c - m * omega * q0 * s;
                let w2 = omega * omega;
                point(q, p, [p / m, -m * w2 * q, -w2 * q, -w2 * p])
            }
            Solution::Imaginary { rate_q, rate_p } => {
                let q = q0 * (rate_q * tau).exp();
                let p = p0 * (rate_p * tau).exp();
                point(
                    q,
                    p,
                    [
                        rate_q * q,
                        rate_p * p,
                        rate_q * rate_q * q,
                        rate_p * rate_p * p,
                    ],
                )
            }
            Solution::Distinct { r1, r2, a, b, m } => {
                let (e1, e2) = ((r1 * tau).exp(), (r2 * tau).exp());
                let q = a * e1 + b * e2;
                let qd = a * r1 * e1 + b * r2 * e2;
                let qdd = a * r1 * r1 * e1 + b * r2 * r2 * e2;
                let qddd = a * r1.powi(3) * e1 + b * r2.powi(3) * e2;
                point(q, m * qd, [qd, m * qdd, qdd, m * qddd])
            }
            Solution::Repeated { r, a, b, m } => {
                let e = (r * tau).exp();
                let u = a + b * tau;
                let q = u * e;
                let qd = (b + r * u) * e;
                let qdd = (2.0 * r * b + r * r * u) * e;
                let qddd = (3.0 * r * r * b + r.powi(3) * u) * e;
                point(q, m * qd, [qd, m * qdd, qdd, m * qddd])
            }
            Solution::Oscillatory { lambda, c, m } => {
                let e = (lambda * tau).exp() * c;
                let q = e.re;
                let qd = (lambda * e).re;
                let qdd = (lambda * lambda * e).re;
                let qddd = (lambda.powi(3) * e).re;
                point(q, m * qd, [qd, m * qdd, qdd, m * qddd])
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(sc: &Scenario, t: f64) -> f64 {
        let cf = sc.closed_form(t).unwrap();
        let r = sc.flow().rates(&cf.state).unwrap();
        [
            cf.qdot - r.qdot,
            cf.pdot - r.pdot,
            cf.qddot - r.qddot,
            cf.pddot - r.pddot,
        ]
        .iter()
        .fold(0.0, |acc: f64, x| acc.max(x.abs()))
    }

    #[test]
    fn harmonic_quarter_period() {
        let sc = Scenario::harmonic(&ParamSet::new(), PhaseState::new(1.0, 0.0, 0.0)).unwrap();
        let cf = sc.closed_form(PI / 2.0).unwrap().state;
        assert!(cf.q.abs() < 1e-15);
        assert!((cf.p + 1.0).abs() < 1e-15);
        assert!((sc.period().unwrap() - 2.0 * PI).abs() < 1e-15);
        let (r, phi) = sc.amplitude().unwrap();
        assert_eq!((r, phi), (1.0, 0.0));
    }

    #[test]
    fn imaginary_closed_form_and_regimes() {
        let params = ParamSet::new().with("k", 0.5).with("kappa0", 2.0);
        let sc = Scenario::imaginary(&params, PhaseState::new(1.0, 1.0, 0.0)).unwrap();
        assert_eq!(sc.regime(), Regime::Decaying);
        assert!((sc.closed_form(1.0).unwrap().state.q - (-1.0f64).exp()).abs() < 1e-15);
        let frozen = Scenario::imaginary(
            &ParamSet::new().with("alpha0", 0.0),
            PhaseState::new(1.0, 1.0, 0.0),
        )
        .unwrap();
        assert_eq!(frozen.regime(), Regime::Frozen);
        assert_eq!(frozen.closed_form(3.0).unwrap().state.q, 1.0);
        let forcing = Scenario::imaginary(
            &ParamSet::new().with("alpha0", -1.0),
            PhaseState::new(1.0, 1.0, 0.0),
        )
        .unwrap();
        assert_eq!(forcing.regime(), Regime::Forcing);
    }

    #[test]
    fn attenuated_regime_labels() {
        let s0 = PhaseState::new(1.0, 0.0, 0.0);
        let osc =
            Scenario::attenuated(&ParamSet::new().with("beta0", 1.0).with("k", 4.0), s0).unwrap();
        assert!(matches!(
            osc.regime(),
            Regime::Oscillatory {
                trend: Trend::Decaying,
                ..
            }
        ));
        let crit = Scenario::attenuated(&ParamSet::new().with("beta0", 2.0), s0).unwrap();
        assert!(matches!(crit.regime(), Regime::Critical { .. }));
        let over = Scenario::attenuated(&ParamSet::new().with("beta0", 3.0), s0).unwrap();
        assert!(matches!(
            over.regime(),
            Regime::Overdamped {
                trend: Trend::Decaying,
                ..
            }
        ));
        let grow = Scenario::attenuated(&ParamSet::new().with("beta0", -0.5), s0).unwrap();
        assert!(matches!(
            grow.regime(),
            Regime::Oscillatory {
                trend: Trend::Growing,
                ..
            }
        ));
        let quad = Scenario::attenuated(&ParamSet::new().with("n", 2.0), s0).unwrap();
        assert_eq!(quad.regime(), Regime::NumericOnly);
        assert!(quad.closed_form(1.0).is_none());
    }

    #[test]
    fn characteristic_roots_satisfy_polynomial() {
        for &(b, k0, w) in &[
            (1.0, 1.0, 2.0),
            (3.0, 1.0, 1.0),
            (2.0, 1.0, 1.0),
            (-0.4, 0.5, 1.5),
        ] {
            for r in characteristic_roots(b, k0, w) {
                let v = r * r + r * (b / k0) + w * w;
                assert!(v.norm() < 1e-13, "{b} {k0} {w}: {v}");
            }
        }
    }

    #[test]
    fn closed_forms_solve_the_flow() {
        let s0 = PhaseState::new(0.8, -0.3, 0.5);
        let cases = [
            Scenario::harmonic(&ParamSet::new().with("m", 2.0).with("k", 3.0), s0),
            Scenario::imaginary(&ParamSet::new().with("alpha0", 0.3).with("kappa0", 1.7), s0),
            Scenario::attenuated(&ParamSet::new().with("beta0", 0.7).with("kappa0", 1.3), s0),
            Scenario::attenuated(&ParamSet::new().with("beta0", 2.0), s0),
            Scenario::attenuated(&ParamSet::new().with("beta0", 5.0).with("m", 1.5), s0),
        ];
        for sc in cases {
            let sc = sc.unwrap();
            let cf = sc.closed_form(s0.t).unwrap().state;
            assert!((cf.q - s0.q).abs() < 1e-15 && (cf.p - s0.p).abs() < 1e-15);
            for i in 0..50 {
                let t = s0.t + 0.2 * i as f64;
                assert!(residual(&sc, t) < 1e-9, "{} at {t}", sc.name());
            }
        }
    }

    #[test]
    fn attenuated_without_damping_is_harmonic() {
        let s0 = PhaseState::new(1.0, 0.4, 0.0);
        let h = Scenario::harmonic(&ParamSet::new(), s0).unwrap();
        let a = Scenario::attenuated(&ParamSet::new().with("beta0", 0.0), s0).unwrap();
        for i in 0..20 {
            let t = 0.37 * i as f64;
            let (x, y) = (
                h.closed_form(t).unwrap().state,
                a.closed_form(t).unwrap().state,
            );
            assert!((x.q - y.q).abs() < 1e-14 && (x.p - y.p).abs() < 1e-14);
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        let err = Scenario::by_name("damped", &ParamSet::new(), PhaseState::default()).unwrap_err();
        assert_eq!(err, ScenarioError::Unknown("damped".into()));
        assert!(Scenario::by_name(
            "harmonic",
            &ParamSet::new().with("m", -1.0),
            PhaseState::default()
        )
        .is_err());
    }
}
