//! Plane-curve geometry of `z(t)` or `z_dℋ(t)`.
//!
//! Curvature is `κ = Im[z̄̇ z̈]/|ż|³`; in phase variables for the `z` curve this
//! is `κ₀(q̈ṗ − p̈q̇)/(2|ż|³)`. The Frenet frame is `T = ż/|ż|`, `N = iT`.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::canon::{Flow, PhaseState};
use crate::hamexpr::{ComplexScalar, EvalError, I};
use crate::odeint::{rk4_shift, Trajectory};
use crate::symplec::omega_c;

/// Speeds below this are treated as stationary points.
pub const STATIONARY_SPEED: f64 = 1e-150;

/// Relative closure tolerance, scaled by `max(1, diameter)`.
pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("stationary point at t = {t}: curvature is undefined")]
    Singular { t: f64 },
    #[error("curve is not closed: endpoint gap {gap:e} exceeds {tol:e}")]
    OpenCurve { gap: f64, tol: f64 },
    #[error("curve is not convex: curvature changes sign")]
    NonConvex,
    #[error("energy needs a non-zero frequency")]
    ZeroFrequency,
    #[error("at least {0} samples are required")]
    TooFewSamples(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Curve {
    Z,
    ZdH,
}

impl Curve {
    pub fn jet(
        self,
        flow: &Flow,
        s: &PhaseState,
    ) -> Result<(ComplexScalar, ComplexScalar, ComplexScalar), EvalError> {
        match self {
            Curve::Z => flow.z_jet(s),
            Curve::ZdH => flow.z_dh_jet(s),
        }
    }

    /// Velocity alone.
    pub fn velocity(self, flow: &Flow, s: &PhaseState) -> Result<ComplexScalar, EvalError> {
        Ok(self.jet(flow, s)?.1)
    }
}

/// `κ₀(q̈ṗ − p̈q̇)/(2|ż|³)`.
pub fn curvature(qd: f64, pd: f64, qdd: f64, pdd: f64, kappa0: f64) -> Result<f64, GeoError> {
    let speed = (((kappa0 * pd).powi(2) + qd * qd) / 2.0).sqrt();
    if !(speed > STATIONARY_SPEED) {
        return Err(GeoError::Singular { t: f64::NAN });
    }
    Ok(kappa0 * (qdd * pd - pdd * qd) / (2.0 * speed.powi(3)))
}

/// Generic plane-curve curvature `Im[z̄̇ z̈]/|ż|³`.
pub fn curvature_oracle(zd: ComplexScalar, zdd: ComplexScalar) -> Result<f64, GeoError> {
    let speed = zd.norm();
    if !(speed > STATIONARY_SPEED) {
        return Err(GeoError::Singular { t: f64::NAN });
    }
    Ok((zd.conj() * zdd).im / speed.powi(3))
}

fn at(t: f64) -> impl Fn(GeoError) -> GeoError {
    move |e| match e {
        GeoError::Singular { .. } => GeoError::Singular { t },
        other => other,
    }
}

/// Unit tangent derivative `d/dt(ż/|ż|)` from `ż`, `z̈`.
fn tangent_rate(zd: ComplexScalar, zdd: ComplexScalar) -> ComplexScalar {
    let v = zd.norm();
    let vdot = (zd.conj() * zdd).re / v;
    (zdd * v - zd * vdot) / (v * v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub t: f64,
    pub z: ComplexScalar,
    pub zd: ComplexScalar,
    pub zdd: ComplexScalar,
    /// `None` at stationary points.
    pub tangent: Option<ComplexScalar>,
    pub normal: Option<ComplexScalar>,
    pub kappa: Option<f64>,
    /// Cumulative arc length.
    pub s: f64,
}

impl CurveSample {
    pub fn from_jet(t: f64, z: ComplexScalar, zd: ComplexScalar, zdd: ComplexScalar) -> Self {
        let kappa = curvature_oracle(zd, zdd).ok();
        let tangent = kappa.map(|_| zd / zd.norm());
        CurveSample {
            t,
            z,
            zd,
            zdd,
            tangent,
            normal: tangent.map(|tt| I * tt),
            kappa,
            s: 0.0,
        }
    }

    pub fn speed(&self) -> f64 {
        self.zd.norm()
    }

    /// `d|ż|/dt`.
    pub fn speed_rate(&self) -> f64 {
        let v = self.speed();
        if v == 0.0 {
            0.0
        } else {
            (self.zd.conj() * self.zdd).re / v
        }
    }
}

pub fn curve_sample(flow: &Flow, s: &PhaseState, curve: Curve) -> Result<CurveSample, EvalError> {
    let (z, zd, zdd) = curve.jet(flow, s)?;
    Ok(CurveSample::from_jet(s.t, z, zd, zdd))
}

/// Samples along a trajectory with cumulative arc length filled in.
pub fn curve_samples(
    flow: &Flow,
    traj: &Trajectory,
    curve: Curve,
) -> Result<Vec<CurveSample>, EvalError> {
    let mut out: Vec<CurveSample> = Vec::with_capacity(traj.len());
    for smp in traj.samples() {
        let mut cs = curve_sample(flow, &smp.state, curve)?;
        if let Some(prev) = out.last() {
            let h = cs.t - prev.t;
            // two-point Hermite rule on |ż|
            let seg = h / 2.0 * (prev.speed() + cs.speed())
                + h * h / 12.0 * (prev.speed_rate() - cs.speed_rate());
            cs.s = prev.s + seg;
        }
        out.push(cs);
    }
    Ok(out)
}

/// `|d/dt(ż/|ż|) − iκż|` with analytic inputs.
pub fn frenet_residual(sample: &CurveSample) -> Result<f64, GeoError> {
    let kappa = sample.kappa.ok_or(GeoError::Singular { t: sample.t })?;
    Ok((tangent_rate(sample.zd, sample.zdd) - I * kappa * sample.zd).norm())
}

/// Residuals of `T_t = |ż|κN` and `N_t = −|ż|κT`.
pub fn frame_derivative_residuals(sample: &CurveSample) -> Result<(f64, f64), GeoError> {
    let kappa = sample.kappa.ok_or(GeoError::Singular { t: sample.t })?;
    let (tt, nn) = (sample.tangent.unwrap(), sample.normal.unwrap());
    let v = sample.speed();
    let t_rate = tangent_rate(sample.zd, sample.zdd);
    let n_rate = I * t_rate;
    Ok((
        (t_rate - nn * (v * kappa)).norm(),
        (n_rate + tt * (v * kappa)).norm(),
    ))
}

/// Curvature from a central difference of the unit tangent, with the
/// neighbouring states obtained by short RK4 shifts of the flow.
pub fn fd_curvature(
    flow: &Flow,
    s: &PhaseState,
    curve: Curve,
    delta: f64,
) -> Result<f64, GeoError> {
    let unit = |st: &PhaseState| -> Result<ComplexScalar, GeoError> {
        let v = curve.velocity(flow, st)?;
        if !(v.norm() > STATIONARY_SPEED) {
            return Err(GeoError::Singular { t: st.t });
        }
        Ok(v / v.norm())
    };
    let fwd = rk4_shift(flow, *s, delta, 8)?;
    let back = rk4_shift(flow, *s, -delta, 8)?;
    let t0 = unit(s)?;
    let rate = (unit(&fwd)? - unit(&back)?) / (2.0 * delta);
    let v = curve.velocity(flow, s)?.norm();
    Ok((t0.conj() * rate).im / v)
}

/// Composite Simpson on a non-uniform grid; an odd interval count closes
/// with the three-point rule over the last interval.
pub fn simpson(t: &[f64], f: &[f64]) -> f64 {
    let n = t.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
    }
    let intervals = n - 1;
    let paired = intervals - intervals % 2;
    let mut sum = 0.0;
    let mut i = 0;
    while i < paired {
        let h0 = t[i + 1] - t[i];
        let h1 = t[i + 2] - t[i + 1];
        let hs = h0 + h1;
        sum += hs / 6.0
            * ((2.0 - h1 / h0) * f[i]
                + hs * hs / (h0 * h1) * f[i + 1]
                + (2.0 - h0 / h1) * f[i + 2]);
        i += 2;
    }
    if intervals % 2 == 1 {
        let h0 = t[n - 2] - t[n - 3];
        let h1 = t[n - 1] - t[n - 2];
        let alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        let eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        sum += alpha * f[n - 1] + beta * f[n - 2] - eta * f[n - 3];
    }
    sum
}

/// `ℓ = ∫|ż| dt`.
pub fn arc_length(samples: &[CurveSample]) -> f64 {
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let f: Vec<f64> = samples.iter().map(|s| s.speed()).collect();
    simpson(&t, &f)
}

pub fn diameter(samples: &[CurveSample]) -> f64 {
    let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for s in samples {
        lo_re = lo_re.min(s.z.re);
        hi_re = hi_re.max(s.z.re);
        lo_im = lo_im.min(s.z.im);
        hi_im = hi_im.max(s.z.im);
    }
    if samples.is_empty() {
        0.0
    } else {
        (hi_re - lo_re).hypot(hi_im - lo_im)
    }
}

/// Endpoint gap and the tolerance it is held to.
pub fn closure(samples: &[CurveSample]) -> (f64, f64) {
    match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => ((b.z - a.z).norm(), CLOSURE_TOL * diameter(samples).max(1.0)),
        _ => (0.0, CLOSURE_TOL),
    }
}

/// `𝒜 = |½∮Im[z̄ dz]|` by Simpson in time.
pub fn enclosed_area(samples: &[CurveSample]) -> Result<f64, GeoError> {
    if samples.len() < 3 {
        return Err(GeoError::TooFewSamples(3));
    }
    let (gap, tol) = closure(samples);
    if gap > tol {
        return Err(GeoError::OpenCurve { gap, tol });
    }
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let f: Vec<f64> = samples
        .iter()
        .map(|s| 0.5 * (s.z.conj() * s.zd).im)
        .collect();
    Ok(simpson(&t, &f).abs())
}

/// Polygon area of the sampled points.
pub fn shoelace_area(points: &[ComplexScalar]) -> f64 {
    let n = points.len();
    let mut twice = 0.0;
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        twice += a.re * b.im - b.re * a.im;
    }
    0.5 * twice.abs()
}

/// Area in the `(q, p)` plane enclosed by a `z` curve of area `area_z`.
pub fn phase_plane_area(area_z: f64, kappa0: f64) -> f64 {
    2.0 * area_z / kappa0
}

fn refine_extremum(samples: &[CurveSample], i: usize) -> f64 {
    let k = samples[i].kappa.unwrap();
    if i == 0 || i + 1 >= samples.len() {
        return k;
    }
    let (a, c) = (&samples[i - 1], &samples[i + 1]);
    let (Some(ka), Some(kc)) = (a.kappa, c.kappa) else {
        return k;
    };
    let (x0, x1, x2) = (a.t, samples[i].t, c.t);
    let d1 = (k - ka) / (x1 - x0);
    let d2 = (kc - k) / (x2 - x1);
    let curv = (d2 - d1) / (x2 - x0);
    if curv == 0.0 {
        return k;
    }
    // vertex of the interpolating parabola
    let xv = 0.5 * (x0 + x1) - d1 / (2.0 * curv);
    if !(x0..=x2).contains(&xv) {
        return k;
    }
    ka + d1 * (xv - x0) + curv * (xv - x0) * (xv - x1)
}

/// Sampled curvature extremes with quadratic refinement; `None` when no
/// sample has a defined curvature.
pub fn kappa_extremes(samples: &[CurveSample]) -> Option<(f64, f64)> {
    let defined: Vec<usize> = (0..samples.len())
        .filter(|&i| samples[i].kappa.is_some())
        .collect();
    let kv = |i: usize| samples[i].kappa.unwrap();
    let imin = *defined.iter().min_by(|&&a, &&b| kv(a).total_cmp(&kv(b)))?;
    let imax = *defined.iter().max_by(|&&a, &&b| kv(a).total_cmp(&kv(b)))?;
    let lo = refine_extremum(samples, imin).min(kv(imin));
    let hi = refine_extremum(samples, imax).max(kv(imax));
    Some((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryReport {
    pub curve: Curve,
    pub samples: Vec<CurveSample>,
    pub singular_samples: usize,
    pub arc_length: f64,
    pub closed: bool,
    pub closure_gap: f64,
    /// `None` for open curves.
    pub area: Option<f64>,
    pub area_note: Option<String>,
    pub period: Option<f64>,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub energy: Option<f64>,
}

impl GeometryReport {
    pub fn build(
        flow: &Flow,
        traj: &Trajectory,
        curve: Curve,
        period: Option<f64>,
    ) -> Result<Self, GeoError> {
        let samples = curve_samples(flow, traj, curve)?;
        let singular_samples = samples.iter().filter(|s| s.kappa.is_none()).count();
        let (gap, tol) = closure(&samples);
        let closed = samples.len() >= 3 && gap <= tol;
        let (area, area_note) = match enclosed_area(&samples) {
            Ok(a) => (Some(a), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let extremes = kappa_extremes(&samples);
        let energy = energy_symplectic(flow, &traj.first().state).ok();
        Ok(GeometryReport {
            curve,
            arc_length: arc_length(&samples),
            singular_samples,
            closed,
            closure_gap: gap,
            area,
            area_note,
            period,
            kappa_min: extremes.map(|e| e.0),
            kappa_max: extremes.map(|e| e.1),
            energy,
            samples,
        })
    }

    pub fn is_convex(&self) -> bool {
        match (self.kappa_min, self.kappa_max) {
            (Some(lo), Some(hi)) => self.singular_samples == 0 && (lo > 0.0 || hi < 0.0),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsVerdict {
    pub arc_length: f64,
    pub area: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub length_lower: f64,
    pub length_upper: f64,
    pub area_lower: f64,
    pub area_upper: f64,
    pub length_ok: bool,
    pub area_ok: bool,
    /// Outcome of the transposed ordering `2π/κ_min ≤ ℓ ≤ 2π/κ_max`.
    pub transposed_length_ok: bool,
    pub transposed_area_ok: bool,
    pub constant_curvature: bool,
    /// `κℓ − 2π` for constant-curvature curves.
    pub kappa_length_residual: Option<f64>,
    pub pass: bool,
}

/// Slack on the isoperimetric-type inequalities.
pub const BOUNDS_SLACK: f64 = 1e-9;

/// Length and area bounds for a closed convex curve, using `|κ|`.
pub fn bounds_check(report: &GeometryReport) -> Result<BoundsVerdict, GeoError> {
    if !report.closed {
        let (gap, tol) = closure(&report.samples);
        return Err(GeoError::OpenCurve { gap, tol });
    }
    if !report.is_convex() {
        return Err(GeoError::NonConvex);
    }
    let area = report.area.ok_or(GeoError::OpenCurve {
        gap: report.closure_gap,
        tol: CLOSURE_TOL,
    })?;
    let (a, b) = (
        report.kappa_min.unwrap().abs(),
        report.kappa_max.unwrap().abs(),
    );
    let (km, kmax) = (a.min(b), a.max(b));
    let ell = report.arc_length;
    let le = |x: f64, y: f64| x <= y * (1.0 + BOUNDS_SLACK);
    let (ll, lu) = (2.0 * PI / kmax, 2.0 * PI / km);
    let (al, au) = (PI / (kmax * kmax), PI / (km * km));
    let length_ok = le(ll, ell) && le(ell, lu);
    let area_ok = le(al, area) && le(area, au);
    let transposed_length_ok = le(lu, ell) && le(ell, ll);
    let transposed_area_ok = le(au, area) && le(area, al);
    let constant_curvature = (kmax - km) <= 1e-6 * kmax;
    let kappa_length_residual = constant_curvature.then_some(0.5 * (km + kmax) * ell - 2.0 * PI);
    Ok(BoundsVerdict {
        arc_length: ell,
        area,
        kappa_min: km,
        kappa_max: kmax,
        length_lower: ll,
        length_upper: lu,
        area_lower: al,
        area_upper: au,
        length_ok,
        area_ok,
        transposed_length_ok,
        transposed_area_ok,
        constant_curvature,
        kappa_length_residual,
        pass: length_ok && area_ok,
    })
}

/// `E = Ω(ż_dℋ, z̈_dℋ)/(κ₀ω²)`.
pub fn energy_symplectic(flow: &Flow, s: &PhaseState) -> Result<f64, GeoError> {
    let omega = flow.params().omega().map_err(|_| GeoError::ZeroFrequency)?;
    if omega == 0.0 || !omega.is_finite() {
        return Err(GeoError::ZeroFrequency);
    }
    let (_, zd, zdd) = flow.z_dh_jet(s)?;
    Ok(omega_c(zd, zdd) / (flow.kappa0() * omega * omega))
}

/// `|κ − κ₀E/|ż_dℋ|³| / |κ|` with `κ` the curvature of the `z_dℋ` curve.
pub fn curvature_energy_check(flow: &Flow, s: &PhaseState, energy: f64) -> Result<f64, GeoError> {
    let (_, zd, zdd) = flow.z_dh_jet(s)?;
    let kappa = curvature_oracle(zd, zdd).map_err(at(s.t))?;
    let predicted = flow.kappa0() * energy / zd.norm().powi(3);
    let scale = kappa.abs().max(predicted.abs());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((kappa - predicted).abs() / scale)
}

/// Second-order Frenet–Taylor prediction of `z(t₀ + Δ)`.
pub fn taylor_predict(sample: &CurveSample, delta: f64) -> Result<ComplexScalar, GeoError> {
    let kappa = sample.kappa.ok_or(GeoError::Singular { t: sample.t })?;
    let (tt, nn) = (sample.tangent.unwrap(), sample.normal.unwrap());
    let v = sample.speed();
    Ok(sample.z
        + tt * (delta * v)
        + (tt * sample.speed_rate() + nn * (v * v * kappa)) * (delta * delta / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamexpr::ParamSet;
    use crate::odeint::{integrate_rk4, linspace};

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    fn circle(n: usize, r: f64) -> Vec<CurveSample> {
        linspace(0.0, 2.0 * PI, n)
            .into_iter()
            .map(|t| {
                let e = c(t.cos(), t.sin());
                CurveSample::from_jet(t, e * r, I * e * r, -e * r)
            })
            .collect()
    }

    #[test]
    fn oracle_examples() {
        assert!((curvature_oracle(I, c(-1.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(curvature_oracle(c(1.0, 1.0), c(0.0, 0.0)).unwrap(), 0.0);
        assert!(matches!(
            curvature_oracle(c(0.0, 0.0), I),
            Err(GeoError::Singular { .. })
        ));
        assert_eq!(curvature(1.0, 0.0, 0.0, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn phase_formula_matches_oracle() {
        for &(qd, pd, qdd, pdd, k0) in &[(0.3, -1.1, 0.7, 0.2, 1.0), (1.0, 2.0, -3.0, 0.5, 0.5)] {
            let a = curvature(qd, pd, qdd, pdd, k0).unwrap();
            let zd = c(k0 * pd, qd) / 2f64.sqrt();
            let zdd = c(k0 * pdd, qdd) / 2f64.sqrt();
            let b = curvature_oracle(zd, zdd).unwrap();
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn time_reversal_flips_sign() {
        let (zd, zdd) = (c(0.4, -0.9), c(1.3, 0.2));
        assert_eq!(
            curvature_oracle(-zd, zdd).unwrap(),
            -curvature_oracle(zd, zdd).unwrap()
        );
    }

    #[test]
    fn circle_geometry() {
        let s = circle(400, 2.0);
        assert!((arc_length(&s) - 4.0 * PI).abs() < 1e-8);
        assert!((enclosed_area(&s).unwrap() - 4.0 * PI).abs() < 1e-8);
        for x in &s {
            assert!((x.kappa.unwrap() - 0.5).abs() < 1e-15);
            assert!(frenet_residual(x).unwrap() < 1e-14);
        }
        let pts: Vec<_> = s[..s.len() - 1].iter().map(|x| x.z).collect();
        assert!((shoelace_area(&pts) - 4.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn simpson_handles_odd_interval_counts() {
        let t: Vec<f64> = (0..8).map(|i| (i as f64 * 0.3).powf(1.2)).collect();
        let f: Vec<f64> = t.iter().map(|x| x * x).collect();
        let exact = t[7].powi(3) / 3.0;
        assert!((simpson(&t, &f) - exact).abs() < 1e-12);
        assert!((simpson(&t[..7], &f[..7]) - t[6].powi(3) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn open_curve_is_rejected() {
        let line: Vec<_> = linspace(0.0, 1.0, 10)
            .into_iter()
            .map(|t| CurveSample::from_jet(t, c(t, t), c(1.0, 1.0), c(0.0, 0.0)))
            .collect();
        assert!(matches!(
            enclosed_area(&line),
            Err(GeoError::OpenCurve { .. })
        ));
        let p = CurveSample::from_jet(0.0, c(1.0, 1.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(arc_length(&[p, CurveSample { t: 1.0, ..p }]), 0.0);
    }

    #[test]
    fn taylor_is_exact_at_zero_and_straight_lines() {
        let s = CurveSample::from_jet(0.0, c(1.0, 2.0), c(0.5, 0.5), c(0.1, 0.1));
        assert_eq!(taylor_predict(&s, 0.0).unwrap(), s.z);
        let d = 0.3;
        let exact = s.z + s.zd * d + s.zdd * (d * d / 2.0);
        assert!((taylor_predict(&s, d).unwrap() - exact).norm() < 1e-15);
        assert_eq!(s.kappa.unwrap(), 0.0);
    }

    #[test]
    fn harmonic_flow_geometry() {
        let flow = Flow::parse(
            "p^2/(2*m) + k*q^2/2",
            ParamSet::new().with("m", 1.0).with("k", 1.0),
        )
        .unwrap();
        let n = 2000;
        let tr = integrate_rk4(
            &flow,
            PhaseState::new(1.0, 0.0, 0.0),
            2.0 * PI / n as f64,
            n,
        )
        .unwrap();
        let rep = GeometryReport::build(&flow, &tr, Curve::Z, Some(2.0 * PI)).unwrap();
        assert!(rep.closed);
        let r = 1.0 / 2f64.sqrt();
        assert!((rep.arc_length - 2.0 * PI * r).abs() < 1e-8);
        assert!((rep.area.unwrap() - PI * r * r).abs() < 1e-8);
        let v = bounds_check(&rep).unwrap();
        assert!(v.pass && v.constant_curvature);
        assert!(v.kappa_length_residual.unwrap().abs() < 1e-6);
        assert!((rep.energy.unwrap() - 0.5).abs() < 1e-15);
        let s = tr.samples()[123].state;
        let a = fd_curvature(&flow, &s, Curve::Z, 1e-4).unwrap();
        assert!((a - 2f64.sqrt()).abs() < 1e-6);
        assert!(curvature_energy_check(&flow, &s, 0.5).unwrap() < 1e-12);
    }
}
