//! Characteristic flow of the Wigner function under an arbitrary `ω(t)`:
//!
//! `dx/dt = (ω̇/2ω) x − ω y`, `dy/dt = ω x − (ω̇/2ω) y`.
//!
//! A sudden change `ω₀ → ω₁` reduces to `jump_map(ω₁/ω₀)`; a slow one to a
//! pure rotation.

use serde::Deserialize;

use crate::error::{domain, ensure_positive, Error, Result};
use crate::symplectic::{PhasePoint, SymplecticMap2};

/// A positive angular frequency on `[t_start, t_end]`.
pub trait FrequencyProfile {
    fn omega(&self, t: f64) -> f64;
    fn omega_dot(&self, t: f64) -> f64;
    fn t_start(&self) -> f64;
    fn t_end(&self) -> f64;
    /// Upper bound of `ω` on the interval, used for step control.
    fn omega_max(&self) -> f64;
    /// Interior times where `ω̇` may jump. The integrator stops on each.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantFrequency {
    omega: f64,
    t_start: f64,
    t_end: f64,
}

impl ConstantFrequency {
    pub fn new(omega: f64, t_start: f64, t_end: f64) -> Result<Self> {
        ensure_positive("omega", omega)?;
        check_interval(t_start, t_end)?;
        Ok(Self {
            omega,
            t_start,
            t_end,
        })
    }
}

impl FrequencyProfile for ConstantFrequency {
    fn omega(&self, _t: f64) -> f64 {
        self.omega
    }
    fn omega_dot(&self, _t: f64) -> f64 {
        0.0
    }
    fn t_start(&self) -> f64 {
        self.t_start
    }
    fn t_end(&self) -> f64 {
        self.t_end
    }
    fn omega_max(&self) -> f64 {
        self.omega
    }
}

fn check_interval(t_start: f64, t_end: f64) -> Result<()> {
    if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
        return Err(domain(format!("need finite t_start < t_end, got [{t_start}, {t_end}]")));
    }
    Ok(())
}

/// `ω(t)` linear between knots `(t_i, ω_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProfileDoc {
    Bare(Vec<[f64; 2]>),
    Wrapped { knots: Vec<[f64; 2]> },
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(domain("a piecewise-linear profile needs at least two knots"));
        }
        for (i, (t, w)) in knots.iter().enumerate() {
            if !t.is_finite() {
                return Err(domain(format!("knot {i}: time {t} is not finite")));
            }
            if !(w.is_finite() && *w > 0.0) {
                return Err(domain(format!("knot {i}: omega must be > 0, got {w}")));
            }
        }
        if let Some(i) = knots.windows(2).position(|p| p[1].0 <= p[0].0) {
            return Err(domain(format!("knot times must increase strictly (knot {})", i + 1)));
        }
        Ok(Self { knots })
    }

    /// `ω₀ → ω₁` linearly over `[0, tau]`.
    pub fn linear_ramp(omega0: f64, omega1: f64, tau: f64) -> Result<Self> {
        ensure_positive("tau", tau)?;
        Self::new(vec![(0.0, omega0), (tau, omega1)])
    }

    /// Parses `[[t, ω], ...]` or `{"knots": [[t, ω], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProfileDoc = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("profile at line {} column {}: {e}", e.line(), e.column()))
        })?;
        let knots = match doc {
            ProfileDoc::Bare(k) | ProfileDoc::Wrapped { knots: k } => k,
        };
        Self::new(knots.into_iter().map(|[t, w]| (t, w)).collect())
            .map_err(|e| Error::Parse(format!("profile: {e}")))
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn segment(&self, t: f64) -> usize {
        let idx = self.knots.partition_point(|k| k.0 <= t);
        idx.clamp(1, self.knots.len() - 1) - 1
    }
}

impl FrequencyProfile for PiecewiseLinear {
    fn omega(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (t0, w0) = self.knots[i];
        let (t1, w1) = self.knots[i + 1];
        w0 + (w1 - w0) * (t - t0) / (t1 - t0)
    }
    fn omega_dot(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (t0, w0) = self.knots[i];
        let (t1, w1) = self.knots[i + 1];
        (w1 - w0) / (t1 - t0)
    }
    fn t_start(&self) -> f64 {
        self.knots[0].0
    }
    fn t_end(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }
    fn omega_max(&self) -> f64 {
        self.knots.iter().map(|k| k.1).fold(0.0, f64::max)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.knots[1..self.knots.len() - 1].iter().map(|k| k.0).collect()
    }
}

/// Profile given by closures for `ω` and `ω̇`.
pub struct FnProfile<W, D> {
    omega: W,
    omega_dot: D,
    t_start: f64,
    t_end: f64,
    omega_max: f64,
}

impl<W: Fn(f64) -> f64, D: Fn(f64) -> f64> FnProfile<W, D> {
    pub fn new(omega: W, omega_dot: D, t_start: f64, t_end: f64, omega_max: f64) -> Result<Self> {
        check_interval(t_start, t_end)?;
        ensure_positive("omega_max", omega_max)?;
        Ok(Self {
            omega,
            omega_dot,
            t_start,
            t_end,
            omega_max,
        })
    }
}

impl<W: Fn(f64) -> f64, D: Fn(f64) -> f64> FrequencyProfile for FnProfile<W, D> {
    fn omega(&self, t: f64) -> f64 {
        (self.omega)(t)
    }
    fn omega_dot(&self, t: f64) -> f64 {
        (self.omega_dot)(t)
    }
    fn t_start(&self) -> f64 {
        self.t_start
    }
    fn t_end(&self) -> f64 {
        self.t_end
    }
    fn omega_max(&self) -> f64 {
        self.omega_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-13,
            max_steps: 20_000_000,
        }
    }
}

/// Largest `dt_max · max ω` accepted.
pub const MAX_PHASE_PER_STEP: f64 = 0.1;

/// Recommended `dt_max` for a profile.
pub fn default_dt_max(profile: &dyn FrequencyProfile) -> f64 {
    0.5 * MAX_PHASE_PER_STEP / profile.omega_max()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
}

impl Trajectory {
    pub fn final_point(&self) -> PhasePoint {
        *self.points.last().expect("trajectory holds the initial point")
    }
}

pub fn integrate_characteristics(
    profile: &dyn FrequencyProfile,
    p0: PhasePoint,
    dt_max: f64,
) -> Result<Trajectory> {
    integrate_characteristics_with(profile, p0, dt_max, OdeOptions::default())
}

pub fn integrate_characteristics_with(
    profile: &dyn FrequencyProfile,
    p0: PhasePoint,
    dt_max: f64,
    opts: OdeOptions,
) -> Result<Trajectory> {
    let mut times = vec![profile.t_start()];
    let mut points = vec![p0];
    integrate(profile, [p0.x, p0.y], dt_max, opts, |t, y| {
        times.push(t);
        points.push(PhasePoint { x: y[0], y: y[1] });
    })?;
    Ok(Trajectory { times, points })
}

/// Linear flow map over the whole profile, from the images of `(1, 0)` and
/// `(0, 1)`. Returned without renormalization so `det_drift` measures the
/// integration error.
pub fn flow_map(profile: &dyn FrequencyProfile, dt_max: f64) -> Result<SymplecticMap2> {
    flow_map_with(profile, dt_max, OdeOptions::default())
}

pub fn flow_map_with(
    profile: &dyn FrequencyProfile,
    dt_max: f64,
    opts: OdeOptions,
) -> Result<SymplecticMap2> {
    let y = integrate(profile, [1.0, 0.0, 0.0, 1.0], dt_max, opts, |_, _| {})?;
    Ok(SymplecticMap2::from_entries_unchecked(y[0], y[2], y[1], y[3]))
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates one or two phase points (`N = 2` or `4`) across every segment
/// between breakpoints, calling `on_step` after each accepted step.
fn integrate<const N: usize, F: FnMut(f64, &[f64; N])>(
    profile: &dyn FrequencyProfile,
    y0: [f64; N],
    dt_max: f64,
    opts: OdeOptions,
    mut on_step: F,
) -> Result<[f64; N]> {
    ensure_positive("dt_max", dt_max)?;
    let wmax = profile.omega_max();
    ensure_positive("omega_max", wmax)?;
    if dt_max * wmax >= MAX_PHASE_PER_STEP {
        return Err(domain(format!(
            "dt_max * max(omega) = {} must stay below {MAX_PHASE_PER_STEP}",
            dt_max * wmax
        )));
    }
    let (t0, t1) = (profile.t_start(), profile.t_end());
    // Catch a non-positive frequency before the step control chases the
    // ω̇/ω singularity it produces.
    let samples = ((t1 - t0) / dt_max).ceil().min(1e7) as usize;
    for i in 0..=samples {
        let t = t0 + (t1 - t0) * i as f64 / samples.max(1) as f64;
        let w = profile.omega(t);
        if !(w > 0.0) || !w.is_finite() {
            return Err(domain(format!("omega({t}) = {w} is not positive")));
        }
    }
    let mut edges = vec![t0];
    edges.extend(profile.breakpoints().into_iter().filter(|b| *b > t0 && *b < t1));
    edges.push(t1);

    let mut y = y0;
    let mut steps = 0usize;
    for seg in edges.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        // ω̇ is sampled just inside the segment so a kink at either end
        // never leaks into this segment's slope.
        let nudge = 1e-12 * (b - a);
        let rhs = |t: f64, y: &[f64; N]| -> Result<[f64; N]> {
            let w = profile.omega(t);
            if !(w > 0.0) || !w.is_finite() {
                return Err(domain(format!("omega({t}) = {w} is not positive")));
            }
            let g = 0.5 * profile.omega_dot(t.clamp(a + nudge, b - nudge)) / w;
            let mut out = [0.0; N];
            for k in (0..N).step_by(2) {
                out[k] = g * y[k] - w * y[k + 1];
                out[k + 1] = w * y[k] - g * y[k + 1];
            }
            Ok(out)
        };

        let mut t = a;
        let mut h = dt_max.min(b - a);
        let mut k1 = rhs(t, &y)?;
        while t < b {
            if steps >= opts.max_steps {
                return Err(Error::Numerical {
                    what: "characteristic integration step budget",
                    achieved: t,
                    wanted: b,
                });
            }
            let last = t + h >= b;
            let h_try = if last { b - t } else { h };
            let mut k = [[0.0; N]; 7];
            k[0] = k1;
            for stage in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(stage) {
                    let aij = A[stage][j];
                    if aij != 0.0 {
                        for i in 0..N {
                            ys[i] += h_try * aij * kj[i];
                        }
                    }
                }
                k[stage] = rhs(t + C[stage] * h_try, &ys)?;
            }
            let mut y5 = y;
            let mut err = 0.0f64;
            for i in 0..N {
                let mut d5 = 0.0;
                let mut d4 = 0.0;
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                y5[i] = y[i] + h_try * d5;
                let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((h_try * (d5 - d4)).abs() / scale);
            }
            steps += 1;
            if err <= 1.0 {
                t = if last { b } else { t + h_try };
                y = y5;
                k1 = k[6];
                on_step(t, &y);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h_try * factor).min(dt_max);
            if h < 1e-15 * (b - a).max(1.0) {
                return Err(Error::Numerical {
                    what: "characteristic integration step size",
                    achieved: h,
                    wanted: opts.rtol,
                });
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{decompose_squeezing, jump_map};
    use std::f64::consts::PI;

    #[test]
    fn constant_frequency_rotates() {
        let prof = ConstantFrequency::new(1.0, 0.0, PI / 2.0).unwrap();
        let traj = integrate_characteristics(&prof, PhasePoint { x: 1.0, y: 0.0 }, 0.05).unwrap();
        let p = traj.final_point();
        assert!(p.x.abs() < 1e-9 && (p.y - 1.0).abs() < 1e-9, "{p:?}");
        assert_eq!(traj.times[0], 0.0);
        assert_eq!(*traj.times.last().unwrap(), PI / 2.0);
    }

    #[test]
    fn sudden_ramp_is_a_jump() {
        let prof = PiecewiseLinear::linear_ramp(1.0, 2.0, 1e-4).unwrap();
        let p = integrate_characteristics(&prof, PhasePoint { x: 1.0, y: 1.0 }, 1e-5)
            .unwrap()
            .final_point();
        assert!((p.x - 2f64.sqrt()).abs() < 5e-4 && (p.y - 0.5f64.sqrt()).abs() < 5e-4, "{p:?}");
        let m = flow_map(&prof, 1e-5).unwrap();
        assert!(m.max_abs_diff(&jump_map(2.0).unwrap()) < 5e-4);
    }

    #[test]
    fn slow_ramp_does_not_squeeze() {
        let prof = PiecewiseLinear::linear_ramp(1.0, 2.0, 1e3).unwrap();
        let m = flow_map(&prof, 0.04).unwrap();
        assert!(m.det_drift() < 1e-7, "{}", m.det_drift());
        let d = decompose_squeezing(&m.renormalized().unwrap()).unwrap();
        assert!(d.s_eff < 1.01, "{}", d.s_eff);
    }

    #[test]
    fn kinked_profile_preserves_area() {
        let prof = PiecewiseLinear::new(vec![(0.0, 1.0), (0.7, 3.0), (1.5, 0.5), (4.0, 2.0)]).unwrap();
        let m = flow_map(&prof, 0.01).unwrap();
        assert!(m.det_drift() < 1e-9);
    }

    #[test]
    fn closure_profile_and_errors() {
        let prof = FnProfile::new(|t: f64| 1.0 + 0.5 * t.sin(), |t: f64| 0.5 * t.cos(), 0.0, 10.0, 1.5).unwrap();
        let m = flow_map(&prof, 0.05).unwrap();
        assert!(m.det_drift() < 1e-9);
        assert!(flow_map(&prof, 0.1).is_err());
        let bad = FnProfile::new(|t: f64| 1.0 - t, |_| -1.0, 0.0, 2.0, 1.0).unwrap();
        assert!(matches!(flow_map(&bad, 0.05), Err(Error::Domain(_))));
    }

    #[test]
    fn profile_parsing() {
        let p = PiecewiseLinear::from_json("[[0, 1], [1, 2], [3, 2]]").unwrap();
        assert_eq!(p.knots().len(), 3);
        assert_eq!(p.breakpoints(), vec![1.0]);
        assert_eq!(p.omega(0.5), 1.5);
        assert_eq!(p.omega_dot(2.0), 0.0);
        let w = PiecewiseLinear::from_json(r#"{"knots": [[0, 1], [2, 3]]}"#).unwrap();
        assert_eq!(w.omega_max(), 3.0);
        assert!(matches!(PiecewiseLinear::from_json("[[0, 1], [0, 2]]"), Err(Error::Parse(_))));
        assert!(matches!(PiecewiseLinear::from_json("[[0, 1], [1, -2]]"), Err(Error::Parse(_))));
        assert!(matches!(PiecewiseLinear::from_json("[[0, 1],\n [1, 2"), Err(Error::Parse(_))));
    }
}
