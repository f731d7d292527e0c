//! Run configuration: an optional TOML/JSON file overlaid by flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::canon::{Flow, Hamiltonian, PhaseState};
use crate::curvegeo::Curve;
use crate::hamexpr::ParamSet;
use crate::scenarios::{Kind, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Rk4,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveName {
    Z,
    Zdh,
}

impl CurveName {
    pub fn curve(self) -> Curve {
        match self {
            CurveName::Z => Curve::Z,
            CurveName::Zdh => Curve::ZdH,
        }
    }
}

/// Partial configuration, as read from a file or collected from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigLayer {
    pub scenario: Option<String>,
    pub hamiltonian: Option<String>,
    pub params: BTreeMap<String, f64>,
    pub q0: Option<f64>,
    pub p0: Option<f64>,
    pub t0: Option<f64>,
    pub t_end: Option<f64>,
    pub method: Option<MethodName>,
    pub step: Option<f64>,
    pub steps: Option<usize>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub samples: Option<usize>,
    pub curve: Option<CurveName>,
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|x| x.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }

    /// `other` wins wherever it is set; parameter maps merge per key.
    pub fn overlay(mut self, other: ConfigLayer) -> ConfigLayer {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            scenario,
            hamiltonian,
            q0,
            p0,
            t0,
            t_end,
            method,
            step,
            steps,
            rel_tol,
            abs_tol,
            max_step,
            samples,
            curve,
            csv,
            report
        );
        self.params.extend(other.params);
        self
    }
}

/// Fully resolved configuration. Serialized into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: Option<String>,
    pub hamiltonian: String,
    pub params: BTreeMap<String, f64>,
    pub q0: f64,
    pub p0: f64,
    pub t0: f64,
    pub t_end: f64,
    pub method: MethodName,
    pub step: Option<f64>,
    pub steps: Option<usize>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub samples: Option<usize>,
    pub curve: CurveName,
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

/// A resolved run: its config plus the objects built from it.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub flow: Flow,
    pub scenario: Option<Scenario>,
}

impl Resolved {
    pub fn initial(&self) -> PhaseState {
        PhaseState::new(self.config.q0, self.config.p0, self.config.t0)
    }

    pub fn period(&self) -> Option<f64> {
        self.scenario.as_ref().and_then(Scenario::period)
    }
}

pub const DEFAULT_RK4_STEPS: usize = 1000;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_REL_TOL: f64 = 1e-11;
pub const DEFAULT_ABS_TOL: f64 = 1e-13;
pub const DEFAULT_SPAN: f64 = 10.0;

fn params_of(map: &BTreeMap<String, f64>) -> Result<ParamSet, CliError> {
    let mut out = ParamSet::empty();
    for (k, v) in map {
        out.set(k, *v)
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(out)
}

/// Resolves a layer into a runnable configuration.
///
/// The default span is one period for periodic scenarios and
/// `DEFAULT_SPAN` otherwise.
pub fn resolve(layer: ConfigLayer) -> Result<Resolved, CliError> {
    if layer.scenario.is_some() && layer.hamiltonian.is_some() {
        return Err(CliError::Config(
            "give either a scenario or an inline Hamiltonian, not both".into(),
        ));
    }
    let overrides = params_of(&layer.params)?;
    let q0 = layer.q0.unwrap_or(1.0);
    let p0 = layer.p0.unwrap_or(0.0);
    let t0 = layer.t0.unwrap_or(0.0);
    let initial = PhaseState::new(q0, p0, t0);
    let (scenario, flow, hamiltonian) = match &layer.hamiltonian {
        Some(src) => {
            let h = Hamiltonian::parse(src)
                .map_err(|e| CliError::Config(format!("hamiltonian: {e}")))?;
            let params = ParamSet::new().merged(&overrides);
            let flow = Flow::new(h, params).map_err(|e| CliError::Config(e.to_string()))?;
            (None, flow, src.clone())
        }
        None => {
            let name = layer.scenario.as_deref().unwrap_or("harmonic");
            let kind = Kind::from_name(name).map_err(|e| CliError::Config(e.to_string()))?;
            let sc = Scenario::new(kind, &overrides, initial)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let flow = sc.flow().clone();
            (Some(sc), flow, kind.source().to_string())
        }
    };
    let period = scenario.as_ref().and_then(Scenario::period);
    let t_end = layer.t_end.unwrap_or(t0 + period.unwrap_or(DEFAULT_SPAN));
    if !t_end.is_finite() || t_end < t0 {
        return Err(CliError::Config(format!(
            "t_end = {t_end} must be finite and not before t0 = {t0}"
        )));
    }
    for (name, v) in [("q0", q0), ("p0", p0), ("t0", t0)] {
        if !v.is_finite() {
            return Err(CliError::Config(format!("{name} = {v} must be finite")));
        }
    }
    let method = layer.method.unwrap_or(MethodName::Adaptive);
    let (step, steps, rel_tol, abs_tol, samples) = match method {
        MethodName::Rk4 => {
            if layer.step.is_some() && layer.steps.is_some() {
                return Err(CliError::Config(
                    "give rk4 `step` or `steps`, not both".into(),
                ));
            }
            let steps = match layer.step {
                Some(h) if !(h > 0.0 && h.is_finite()) => {
                    return Err(CliError::Config(format!("step = {h} must be positive")))
                }
                Some(h) => ((t_end - t0) / h).round().max(0.0) as usize,
                None => layer.steps.unwrap_or(DEFAULT_RK4_STEPS),
            };
            let step = if steps == 0 {
                layer.step.unwrap_or(0.0)
            } else {
                (t_end - t0) / steps as f64
            };
            (Some(step), Some(steps), None, None, layer.samples)
        }
        MethodName::Adaptive => (
            None,
            None,
            Some(layer.rel_tol.unwrap_or(DEFAULT_REL_TOL)),
            Some(layer.abs_tol.unwrap_or(DEFAULT_ABS_TOL)),
            Some(layer.samples.unwrap_or(DEFAULT_SAMPLES)),
        ),
    };
    let mut params = BTreeMap::new();
    for (k, v) in flow.params().iter() {
        params.insert(k.to_string(), v);
    }
    let config = RunConfig {
        scenario: scenario.as_ref().map(|s| s.name().to_string()),
        hamiltonian,
        params,
        q0,
        p0,
        t0,
        t_end,
        method,
        step,
        steps,
        rel_tol,
        abs_tol,
        max_step: layer.max_step,
        samples,
        curve: layer.curve.unwrap_or(CurveName::Z),
        csv: layer.csv,
        report: layer.report,
    };
    Ok(Resolved {
        config,
        flow,
        scenario,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: ConfigLayer =
            toml::from_str("scenario = \"attenuated\"\nq0 = 2.0\n[params]\nbeta0 = 0.5\nk = 2.0\n")
                .unwrap();
        let mut flags = ConfigLayer {
            q0: Some(3.0),
            ..Default::default()
        };
        flags.params.insert("beta0".into(), 0.25);
        let r = resolve(file.overlay(flags)).unwrap();
        assert_eq!(r.config.q0, 3.0);
        assert_eq!(r.config.params["beta0"], 0.25);
        assert_eq!(r.config.params["k"], 2.0);
        assert_eq!(r.config.scenario.as_deref(), Some("attenuated"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<ConfigLayer>("bogus = 1").is_err());
    }

    #[test]
    fn missing_parameter_is_named() {
        let layer = ConfigLayer {
            hamiltonian: Some("p^2/(2*m)".into()),
            ..Default::default()
        };
        let err = resolve(layer).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains('m'), "{err}");
    }

    #[test]
    fn periodic_default_span_is_one_period() {
        let layer = ConfigLayer {
            params: [("k".to_string(), 4.0)].into(),
            ..Default::default()
        };
        let r = resolve(layer).unwrap();
        assert!((r.config.t_end - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn rk4_step_sets_count() {
        let layer = ConfigLayer {
            method: Some(MethodName::Rk4),
            step: Some(0.01),
            t_end: Some(1.0),
            ..Default::default()
        };
        let r = resolve(layer).unwrap();
        assert_eq!(r.config.steps, Some(100));
    }
}
