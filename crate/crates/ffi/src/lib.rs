//! C ABI over `cxmech`.
//!
//! Objects cross the boundary as opaque handles created by `cx_*_new`,
//! `cx_*_parse` or `cx_integrate_*` and released with the matching
//! `cx_*_free`. Every fallible call returns a `CxStatus`; on failure the
//! message is kept per thread and read back with `cx_last_error_message`.
//! Results are written through out-pointers only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cxmech::canon::{Flow, PhaseState};
use cxmech::curvegeo::{curve_sample, Curve};
use cxmech::hamexpr::ParamSet;
use cxmech::odeint::{integrate_adaptive, integrate_rk4, AdaptiveOptions, Trajectory};
use cxmech::quantop::{quantum_energy, scenario_commutators, Bracket, QuantError};
use cxmech::scenarios::{Scenario, ScenarioError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Param = 4,
    Eval = 5,
    Integration = 6,
    Nonlinear = 7,
    Singular = 8,
    Panic = 9,
}

/// Geometry curve selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CxCurve {
    Z = 0,
    Zdh = 1,
}

/// Commutator selector, in report order.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CxBracket {
    ZdagZ = 0,
    ZZdotdag = 1,
    ZdotdagZddot = 2,
    ZdotZddotdag = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CxSample {
    pub t: f64,
    pub q: f64,
    pub p: f64,
    pub qdot: f64,
    pub pdot: f64,
}

pub struct CxParams(ParamSet);

pub struct CxFlow(Flow);

pub struct CxTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(CxStatus, String);

impl Failure {
    fn new(status: CxStatus, msg: impl ToString) -> Self {
        Failure(status, msg.to_string())
    }
}

type Res<T> = Result<T, Failure>;

fn guard(f: impl FnOnce() -> Res<()>) -> CxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CxStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CxStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Res<&'a str> {
    if s.is_null() {
        return Err(Failure::new(
            CxStatus::NullPointer,
            format!("{what} is null"),
        ));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::new(CxStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(h: *const T, what: &str) -> Res<&'a T> {
    h.as_ref()
        .ok_or_else(|| Failure::new(CxStatus::NullPointer, format!("{what} handle is null")))
}

fn out<T>(p: *mut T, what: &str) -> Res<*mut T> {
    if p.is_null() {
        Err(Failure::new(
            CxStatus::NullPointer,
            format!("output `{what}` is null"),
        ))
    } else {
        Ok(p)
    }
}

fn scenario_failure(e: ScenarioError) -> Failure {
    match e {
        ScenarioError::Unknown(_) => Failure::new(CxStatus::InvalidArgument, e),
        ScenarioError::Param(_) => Failure::new(CxStatus::Param, e),
        ScenarioError::Canon(_) => Failure::new(CxStatus::Param, e),
    }
}

fn quant_failure(e: QuantError) -> Failure {
    match e {
        QuantError::Nonlinear { .. }
        | QuantError::NonlinearFlow(_)
        | QuantError::TimeDependent(_) => Failure::new(CxStatus::Nonlinear, e),
        QuantError::Eval(_) => Failure::new(CxStatus::Eval, e),
        _ => Failure::new(CxStatus::Param, e),
    }
}

unsafe fn params_or_default(params: *const CxParams) -> ParamSet {
    params.as_ref().map_or_else(ParamSet::new, |p| p.0.clone())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full message length
/// excluding the terminator; 0 when there is no message.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cx_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// New parameter set with `kappa0 = hbar = 1`.
#[no_mangle]
pub extern "C" fn cx_params_new() -> *mut CxParams {
    Box::into_raw(Box::new(CxParams(ParamSet::new())))
}

/// # Safety
/// `params` must be null or a handle from `cx_params_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cx_params_free(params: *mut CxParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// # Safety
/// `params` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cx_params_set(
    params: *mut CxParams,
    name: *const c_char,
    value: f64,
) -> CxStatus {
    guard(|| {
        let p = params
            .as_mut()
            .ok_or_else(|| Failure::new(CxStatus::NullPointer, "params handle is null"))?;
        let name = text(name, "name")?;
        p.0.set(name, value)
            .map_err(|e| Failure::new(CxStatus::Param, e))
    })
}

/// Value used during evaluation, including derived `omega`.
///
/// # Safety
/// `params` must be a live handle, `name` NUL-terminated, `value` writable.
#[no_mangle]
pub unsafe extern "C" fn cx_params_get(
    params: *const CxParams,
    name: *const c_char,
    value: *mut f64,
) -> CxStatus {
    guard(|| {
        let p = handle(params, "params")?;
        let name = text(name, "name")?;
        let value = out(value, "value")?;
        let v = p.0.lookup(name).ok_or_else(|| {
            Failure::new(CxStatus::Param, format!("parameter `{name}` is not bound"))
        })?;
        *value = v;
        Ok(())
    })
}

/// Parses a Hamiltonian and binds it to `params` (null for defaults).
///
/// # Safety
/// `source` must be NUL-terminated; `params` null or live; `flow` writable.
#[no_mangle]
pub unsafe extern "C" fn cx_flow_parse(
    source: *const c_char,
    params: *const CxParams,
    flow: *mut *mut CxFlow,
) -> CxStatus {
    guard(|| {
        let src = text(source, "source")?;
        let flow = out(flow, "flow")?;
        let f = Flow::parse(src, params_or_default(params)).map_err(|e| {
            let status = match e {
                cxmech::canon::CanonError::Parse(_) => CxStatus::Parse,
                _ => CxStatus::Param,
            };
            Failure::new(status, e)
        })?;
        *flow = Box::into_raw(Box::new(CxFlow(f)));
        Ok(())
    })
}

/// Flow of a named scenario (`harmonic`, `imaginary`, `attenuated`) with
/// `params` overriding its defaults.
///
/// # Safety
/// As for `cx_flow_parse`.
#[no_mangle]
pub unsafe extern "C" fn cx_flow_from_scenario(
    name: *const c_char,
    params: *const CxParams,
    flow: *mut *mut CxFlow,
) -> CxStatus {
    guard(|| {
        let name = text(name, "name")?;
        let flow = out(flow, "flow")?;
        let sc = scenario(name, params)?;
        *flow = Box::into_raw(Box::new(CxFlow(sc.flow().clone())));
        Ok(())
    })
}

unsafe fn scenario(name: &str, params: *const CxParams) -> Res<Scenario> {
    let overrides = params
        .as_ref()
        .map(|p| p.0.clone())
        .unwrap_or_else(ParamSet::empty);
    Scenario::by_name(name, &overrides, PhaseState::new(1.0, 0.0, 0.0)).map_err(scenario_failure)
}

/// # Safety
/// `flow` must be null or a live flow handle.
#[no_mangle]
pub unsafe extern "C" fn cx_flow_free(flow: *mut CxFlow) {
    if !flow.is_null() {
        drop(Box::from_raw(flow));
    }
}

/// Generalized Hamilton equations at `(q, p, t)`.
///
/// # Safety
/// `flow` must be live; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn cx_flow_eom(
    flow: *const CxFlow,
    q: f64,
    p: f64,
    t: f64,
    qdot: *mut f64,
    pdot: *mut f64,
) -> CxStatus {
    guard(|| {
        let f = handle(flow, "flow")?;
        let (qdot, pdot) = (out(qdot, "qdot")?, out(pdot, "pdot")?);
        let (a, b) =
            f.0.eom(&PhaseState::new(q, p, t))
                .map_err(|e| Failure::new(CxStatus::Eval, e))?;
        *qdot = a;
        *pdot = b;
        Ok(())
    })
}

/// Dual field `z_dH` at `(q, p, t)`.
///
/// # Safety
/// `flow` must be live; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn cx_flow_z_dh(
    flow: *const CxFlow,
    q: f64,
    p: f64,
    t: f64,
    re: *mut f64,
    im: *mut f64,
) -> CxStatus {
    guard(|| {
        let f = handle(flow, "flow")?;
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let z =
            f.0.z_dh(&PhaseState::new(q, p, t))
                .map_err(|e| Failure::new(CxStatus::Eval, e))?;
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Curvature of the selected curve at one state. Returns `CX_STATUS_SINGULAR`
/// where the curve is stationary.
///
/// # Safety
/// `flow` must be live; `kappa` writable.
#[no_mangle]
pub unsafe extern "C" fn cx_curvature(
    flow: *const CxFlow,
    q: f64,
    p: f64,
    t: f64,
    curve: CxCurve,
    kappa: *mut f64,
) -> CxStatus {
    guard(|| {
        let f = handle(flow, "flow")?;
        let kappa = out(kappa, "kappa")?;
        let curve = match curve {
            CxCurve::Z => Curve::Z,
            CxCurve::Zdh => Curve::ZdH,
        };
        let s = curve_sample(&f.0, &PhaseState::new(q, p, t), curve)
            .map_err(|e| Failure::new(CxStatus::Eval, e))?;
        *kappa = s.kappa.ok_or_else(|| {
            Failure::new(CxStatus::Singular, format!("stationary point at t = {t}"))
        })?;
        Ok(())
    })
}

fn store(traj: *mut *mut CxTrajectory, tr: Trajectory) {
    // SAFETY: callers checked `traj` for null
    unsafe { *traj = Box::into_raw(Box::new(CxTrajectory(tr))) };
}

/// Fixed-step RK4: `nsteps` steps of size `step` from `(q0, p0, t0)`.
///
/// # Safety
/// `flow` must be live; `traj` writable.
#[no_mangle]
pub unsafe extern "C" fn cx_integrate_rk4(
    flow: *const CxFlow,
    q0: f64,
    p0: f64,
    t0: f64,
    step: f64,
    nsteps: usize,
    traj: *mut *mut CxTrajectory,
) -> CxStatus {
    guard(|| {
        let f = handle(flow, "flow")?;
        let traj = out(traj, "trajectory")?;
        let tr = integrate_rk4(&f.0, PhaseState::new(q0, p0, t0), step, nsteps)
            .map_err(|e| Failure::new(CxStatus::Integration, e))?;
        store(traj, tr);
        Ok(())
    })
}

/// Adaptive Dormand–Prince integration up to `t_end`.
///
/// # Safety
/// `flow` must be live; `traj` writable.
#[no_mangle]
pub unsafe extern "C" fn cx_integrate_adaptive(
    flow: *const CxFlow,
    q0: f64,
    p0: f64,
    t0: f64,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
    traj: *mut *mut CxTrajectory,
) -> CxStatus {
    guard(|| {
        let f = handle(flow, "flow")?;
        let traj = out(traj, "trajectory")?;
        let tr = integrate_adaptive(
            &f.0,
            PhaseState::new(q0, p0, t0),
            t_end,
            AdaptiveOptions::new(rel_tol, abs_tol),
        )
        .map_err(|e| Failure::new(CxStatus::Integration, e))?;
        store(traj, tr);
        Ok(())
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn cx_trajectory_len(traj: *const CxTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `traj` must be live; `sample` writable.
#[no_mangle]
pub unsafe extern "C" fn cx_trajectory_sample(
    traj: *const CxTrajectory,
    index: usize,
    sample: *mut CxSample,
) -> CxStatus {
    guard(|| {
        let t = handle(traj, "trajectory")?;
        let sample = out(sample, "sample")?;
        let s = t.0.samples().get(index).ok_or_else(|| {
            Failure::new(
                CxStatus::InvalidArgument,
                format!("index {index} out of range ({} samples)", t.0.len()),
            )
        })?;
        *sample = CxSample {
            t: s.state.t,
            q: s.state.q,
            p: s.state.p,
            qdot: s.rates.qdot,
            pdot: s.rates.pdot,
        };
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn cx_trajectory_free(traj: *mut CxTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Quantum energy of a named scenario under its recipe.
///
/// # Safety
/// `name` NUL-terminated; `params` null or live; `energy` writable.
#[no_mangle]
pub unsafe extern "C" fn cx_quantum_energy(
    name: *const c_char,
    params: *const CxParams,
    energy: *mut f64,
) -> CxStatus {
    guard(|| {
        let name = text(name, "name")?;
        let energy = out(energy, "energy")?;
        let sc = scenario(name, params)?;
        *energy = quantum_energy(&sc).map_err(quant_failure)?.value;
        Ok(())
    })
}

/// Engine value of one scenario commutator.
///
/// # Safety
/// `name` NUL-terminated; `params` null or live; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn cx_commutator(
    name: *const c_char,
    params: *const CxParams,
    bracket: CxBracket,
    re: *mut f64,
    im: *mut f64,
) -> CxStatus {
    guard(|| {
        let name = text(name, "name")?;
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let sc = scenario(name, params)?;
        let b = match bracket {
            CxBracket::ZdagZ => Bracket::ZdagZ,
            CxBracket::ZZdotdag => Bracket::ZZdotdag,
            CxBracket::ZdotdagZddot => Bracket::ZdotdagZddot,
            CxBracket::ZdotZddotdag => Bracket::ZdotZddotdag,
        };
        let rep = scenario_commutators(&sc).map_err(quant_failure)?;
        let v = rep.entry(b).engine;
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}
