//! Squeezed thermal states: Wigner functions and energy-level occupations.
//!
//! Units are ħ = k_B = 1, so a state is fixed by `x = ω/T`, the squeezing
//! parameter `s` and the axis angle `θ`. Occupations never depend on `θ`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure_finite, ensure_positive, Error, Result};
use crate::precise::{Fixed, FixedContext};
use crate::quadrature::{gauss_hermite, gauss_hermite_2d, MAX_HERMITE_ORDER};
use crate::special::{bessel_i0_scaled, laguerre_scaled, KahanSum};
use crate::symplectic::PhasePoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedThermalState {
    omega_over_t: f64,
    s: f64,
    theta: f64,
}

impl SqueezedThermalState {
    pub fn new(omega_over_t: f64, s: f64, theta: f64) -> Result<Self> {
        ensure_positive("omega_over_t", omega_over_t)?;
        ensure_positive("s", s)?;
        ensure_finite("theta", theta)?;
        Ok(Self {
            omega_over_t,
            s,
            theta,
        })
    }

    /// Unsqueezed thermal state.
    pub fn thermal(omega_over_t: f64) -> Result<Self> {
        Self::new(omega_over_t, 1.0, 0.0)
    }

    /// State with `s = 1 + ε`.
    pub fn from_epsilon(omega_over_t: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(domain(format!("epsilon must be finite and >= 0, got {epsilon}")));
        }
        Self::new(omega_over_t, 1.0 + epsilon, 0.0)
    }

    pub fn omega_over_t(&self) -> f64 {
        self.omega_over_t
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_s(&self, s: f64) -> Result<Self> {
        Self::new(self.omega_over_t, s, self.theta)
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.omega_over_t, self.s, theta)
    }

    /// `κ = tanh(ω/2T) = 1/(1 + 2n̄)`.
    pub fn kappa(&self) -> f64 {
        (0.5 * self.omega_over_t).tanh()
    }

    pub fn nbar(&self) -> f64 {
        1.0 / self.omega_over_t.exp_m1()
    }

    /// `max(s, 1/s)`; occupations are symmetric under `s → 1/s`.
    pub fn folded_s(&self) -> f64 {
        self.s.max(1.0 / self.s)
    }

    /// `ε = |s − 1|`.
    pub fn epsilon(&self) -> f64 {
        (self.s - 1.0).abs()
    }

    /// `⟨n⟩ = n̄ + (2n̄ + 1)(s + 1/s − 2)/4`.
    pub fn mean_photon_number(&self) -> f64 {
        let nb = self.nbar();
        nb + (2.0 * nb + 1.0) * (self.s + 1.0 / self.s - 2.0) / 4.0
    }

    /// Asymptotic ratio `p_{n+1}/p_n`. The occupation generating function is
    /// `∝ [(1 − λ₁z)(1 − λ₂z)]^{−1/2}` with `λ₁ = (1 − κs)/(1 + κs)` and
    /// `λ₂ = (1 − κ/s)/(1 + κ/s)`, so the tail decays like `max|λᵢ|ⁿ`.
    pub fn tail_ratio(&self) -> f64 {
        let (l1, l2) = self.generating_roots();
        l1.abs().max(l2.abs())
    }

    pub(crate) fn generating_roots(&self) -> (f64, f64) {
        let k = self.kappa();
        let s = self.s;
        ((1.0 - k * s) / (1.0 + k * s), (1.0 - k / s) / (1.0 + k / s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedCoherentParams {
    pub s: f64,
    pub theta: f64,
    pub x0: f64,
    pub y0: f64,
}

impl SqueezedCoherentParams {
    pub fn new(s: f64, theta: f64, x0: f64, y0: f64) -> Result<Self> {
        ensure_positive("s", s)?;
        ensure_finite("theta", theta)?;
        ensure_finite("x0", x0)?;
        ensure_finite("y0", y0)?;
        Ok(Self { s, theta, x0, y0 })
    }
}

pub fn nbar(omega_over_t: f64) -> Result<f64> {
    if !(omega_over_t > 0.0) {
        return Err(domain(format!("omega_over_t must be > 0, got {omega_over_t}")));
    }
    Ok(1.0 / omega_over_t.exp_m1())
}

/// `(1 − e^{−x}) e^{−n x}`.
pub fn pn_equilibrium(omega_over_t: f64, n: usize) -> f64 {
    -(-omega_over_t).exp_m1() * (-(n as f64) * omega_over_t).exp()
}

/// Level `N₀ = 2T/ω − 1/2` where the small-squeezing change of `p_n` flips sign.
pub fn boundary_level(omega_over_t: f64) -> f64 {
    2.0 / omega_over_t - 0.5
}

/// Default truncation `max(60, ⌈12 T/ω⌉)`.
pub fn default_n_max(omega_over_t: f64) -> usize {
    let by_temp = (12.0 / omega_over_t).ceil();
    if by_temp.is_finite() {
        (by_temp as usize).max(60)
    } else {
        60
    }
}

pub fn wigner_coherent(x0: f64, y0: f64, pt: PhasePoint) -> f64 {
    let (dx, dy) = (pt.x - x0, pt.y - y0);
    2.0 / PI * (-2.0 * (dx * dx + dy * dy)).exp()
}

pub fn wigner_thermal(nbar: f64, pt: PhasePoint) -> f64 {
    let c = 1.0 + 2.0 * nbar;
    2.0 / PI / c * (-2.0 * pt.radius_squared() / c).exp()
}

pub fn wigner_squeezed_coherent(params: &SqueezedCoherentParams, pt: PhasePoint) -> f64 {
    let (dx, dy) = (pt.x - params.x0, pt.y - params.y0);
    let (sn, cs) = params.theta.sin_cos();
    let u = dx * cs + dy * sn;
    let v = dy * cs - dx * sn;
    2.0 / PI * (-2.0 * params.s * u * u - 2.0 / params.s * v * v).exp()
}

pub fn wigner_squeezed_thermal(state: &SqueezedThermalState, pt: PhasePoint) -> f64 {
    // 1/(1 + 2n̄) = κ keeps the κ → 1 vacuum limit exact.
    let k = state.kappa();
    let (sn, cs) = state.theta.sin_cos();
    let u = pt.x * cs + pt.y * sn;
    let v = pt.y * cs - pt.x * sn;
    2.0 / PI * k * (-2.0 * k * (state.s * u * u + v * v / state.s)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupationMethod {
    Exact,
    WignerIntegral,
    Approx,
}

/// Occupations `p_0 ..= p_{n_max}` with the missing mass kept as `tail`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationDistribution {
    p: Vec<f64>,
    tail: f64,
    method: OccupationMethod,
    /// Asymptotic ratio of successive occupations beyond the cut, if known.
    tail_ratio: Option<f64>,
}

const NEGATIVE_SLACK: f64 = 1e-9;

impl OccupationDistribution {
    /// Checks `p_n ∈ [0, 1]` up to roundoff and `tail ≥ −1e−9`.
    pub fn new(p: Vec<f64>, method: OccupationMethod) -> Result<Self> {
        if p.is_empty() {
            return Err(domain("distribution needs at least one level"));
        }
        for (n, v) in p.iter().enumerate() {
            if !v.is_finite() || *v < -NEGATIVE_SLACK || *v > 1.0 + NEGATIVE_SLACK {
                return Err(Error::Consistency(format!("p_{n} = {v} is not a probability")));
            }
        }
        let total: KahanSum = p.iter().copied().collect();
        let tail = 1.0 - total.value();
        if tail < -NEGATIVE_SLACK {
            return Err(Error::Consistency(format!("probabilities sum to {} > 1", total.value())));
        }
        Ok(Self {
            p,
            tail,
            method,
            tail_ratio: None,
        })
    }

    pub(crate) fn with_tail_ratio(mut self, ratio: f64) -> Self {
        self.tail_ratio = Some(ratio);
        self
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn n_max(&self) -> usize {
        self.p.len() - 1
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn method(&self) -> OccupationMethod {
        self.method
    }

    pub fn tail_ratio(&self) -> Option<f64> {
        self.tail_ratio
    }

    pub fn mean(&self) -> f64 {
        self.p
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .collect::<KahanSum>()
            .value()
    }

    /// Geometric estimate of the mass beyond `n_max`, from the last level
    /// and the asymptotic ratio. Falls back to the stored `tail`.
    pub fn geometric_tail(&self) -> f64 {
        match self.tail_ratio {
            Some(r) if r < 1.0 => {
                let last = *self.p.last().unwrap_or(&0.0);
                last.max(0.0) * r / (1.0 - r)
            }
            _ => self.tail.max(0.0),
        }
    }
}

// ---------------------------------------------------------------------------
// Exact occupations
// ---------------------------------------------------------------------------

/// Limits for the exact evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Largest level accepted.
    pub n_cap: usize,
    /// Bits of accuracy required in the final sum, after cancellation.
    pub target_bits: u64,
    /// Refuse to work with more fractional bits than this.
    pub max_working_bits: u64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            n_cap: 2000,
            target_bits: 80,
            max_working_bits: 1 << 16,
        }
    }
}

/// One exactly evaluated level with its cancellation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub p: f64,
    /// `log₂(Σ|terms| / |p|)`, the bits lost to cancellation.
    pub cancellation_bits: f64,
    /// Fractional bits carried by the evaluation.
    pub working_bits: u64,
}

impl ExactValue {
    /// Bound on the absolute error of `p`, before rounding to `f64`.
    pub fn abs_error_bound(&self) -> f64 {
        let digits_left = self.working_bits as f64 - self.cancellation_bits - 24.0;
        (self.p.abs().max(f64::MIN_POSITIVE)) * 2f64.powf(-digits_left.max(0.0))
    }
}

pub fn pn_exact(state: &SqueezedThermalState, n: usize) -> Result<f64> {
    Ok(pn_exact_detailed(state, n, ExactOptions::default())?.p)
}

pub fn pn_exact_detailed(
    state: &SqueezedThermalState,
    n: usize,
    opts: ExactOptions,
) -> Result<ExactValue> {
    let all = pn_exact_batch(state, n, opts)?;
    Ok(all[n])
}

/// Exact `p_0 ..= p_{n_max}` as a distribution.
pub fn pn_exact_distribution(
    state: &SqueezedThermalState,
    n_max: usize,
) -> Result<OccupationDistribution> {
    let values = pn_exact_batch(state, n_max, ExactOptions::default())?;
    let p = values.iter().map(|v| v.p).collect();
    Ok(OccupationDistribution::new(p, OccupationMethod::Exact)?.with_tail_ratio(state.tail_ratio()))
}

/// Exact occupations for every level up to `n_max`.
///
/// With `s ≥ 1`, `r = 2/(1 + κ/s)` and `z = −κ(s − 1/s)/(1 + κ/s) ≤ 0`,
///
/// `p_n = κ Σ_q (−1)^q C(n, q) r^{n+1−q} ₂F₁(1/2, n+1−q; 1; z)`.
///
/// Euler's transform turns each `₂F₁` into `(1 − z)^{1/2 − m} P_m(z)` with
/// `P_m` a terminating sum of positive terms, so
///
/// `p_n = κ √(1 − z) Σ_q (−1)^q C(n, q) g^{n+1−q} P_{n+1−q}(z)`, `g = r/(1 − z)`.
///
/// The alternating sum cancels roughly `n log₂(1 + r)` bits, so it runs in
/// fixed point with enough fractional bits to survive that loss.
pub fn pn_exact_batch(
    state: &SqueezedThermalState,
    n_max: usize,
    opts: ExactOptions,
) -> Result<Vec<ExactValue>> {
    if n_max > opts.n_cap {
        return Err(Error::Precision(format!(
            "level {n_max} exceeds the exact-evaluation cap {}",
            opts.n_cap
        )));
    }
    let k = state.kappa();
    let s = state.folded_s();
    let r = 2.0 / (1.0 + k / s);
    let z = -k * (s - 1.0 / s) / (1.0 + k / s);

    // Largest term is about (1 + r)^n r; add guard bits for truncation noise.
    let mag_bits = (n_max as f64 + 1.0) * (1.0 + r).log2() + 2.0;
    let guard = 32 + (n_max as f64 + 2.0).log2().ceil() as u64 * 2;
    let bits = mag_bits.ceil() as u64 + opts.target_bits + guard;
    if bits > opts.max_working_bits {
        return Err(Error::Precision(format!(
            "level {n_max} needs {bits} working bits, limit is {}",
            opts.max_working_bits
        )));
    }

    let ctx = FixedContext::new(bits);
    let one = ctx.one();
    let kf = ctx.from_f64(k);
    let sf = ctx.from_f64(s);
    let ks = ctx.div(&kf, &sf);
    let inv_s = ctx.div(&one, &sf);
    let denom = one.add(&ks);
    let rf = ctx.div(&ctx.from_int(2), &denom);
    let zf = ctx.div(&ctx.mul(&kf, &sf.sub(&inv_s)), &denom).neg();
    let one_minus_z = one.sub(&zf);
    let g = ctx.div(&rf, &one_minus_z);

    // t[m] = g^m P_m(z) for m = 1 ..= n_max + 1.
    let mut t = Vec::with_capacity(n_max + 2);
    t.push(ctx.zero());
    let mut gpow = one.clone();
    for m in 1..=n_max + 1 {
        gpow = ctx.mul(&gpow, &g);
        t.push(ctx.mul(&gpow, &half_poly(&ctx, m, &zf)));
    }

    let prefactor = k * (1.0 - z).sqrt();
    let mut row: Vec<BigInt> = vec![BigInt::from(1)];
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            row.push(BigInt::from(1));
            for q in (1..n).rev() {
                let prev = row[q - 1].clone();
                row[q] += prev;
            }
        }
        let mut sum = ctx.zero();
        let mut abs_sum = ctx.zero();
        for (q, c) in row.iter().enumerate() {
            let term = t[n + 1 - q].mul_int(c);
            abs_sum.add_assign(&term.abs());
            if q % 2 == 0 {
                sum.add_assign(&term);
            } else {
                sum.sub_assign(&term);
            }
        }
        let p = prefactor * ctx.to_f64(&sum);
        let cancellation_bits = (ctx.log2_abs(&abs_sum) - ctx.log2_abs(&sum)).max(0.0);
        out.push(ExactValue {
            p,
            cancellation_bits: if cancellation_bits.is_finite() {
                cancellation_bits
            } else {
                bits as f64
            },
            working_bits: bits,
        });
    }
    Ok(out)
}

/// `P_m(z) = Σ_{j<m} (1/2)_j (1 − m)_j / (j!)² z^j`, every term ≥ 0 for `z ≤ 0`.
fn half_poly(ctx: &FixedContext, m: usize, z: &Fixed) -> Fixed {
    let mut term = ctx.one();
    let mut acc = ctx.one();
    for j in 0..m.saturating_sub(1) {
        let (j, m) = (j as i64, m as i64);
        term = ctx
            .mul(&term, z)
            .mul_i64((2 * j + 1) * (j + 1 - m))
            .div_i64(2 * (j + 1) * (j + 1));
        acc.add_assign(&term);
    }
    acc
}

/// First level above which the small-squeezing change of `p_n` turns
/// positive, located from exact occupations at `s = 1 + probe_epsilon`.
/// Returned as a real number by linear interpolation of the change.
pub fn empirical_crossing_level(omega_over_t: f64, probe_epsilon: f64) -> Result<f64> {
    ensure_positive("probe_epsilon", probe_epsilon)?;
    let state = SqueezedThermalState::from_epsilon(omega_over_t, probe_epsilon)?;
    let n_scan = (4.0 / omega_over_t).ceil() as usize + 10;
    let p = pn_exact_batch(&state, n_scan, ExactOptions::default())?;
    let mut prev = None;
    for (n, v) in p.iter().enumerate() {
        let d = v.p - pn_equilibrium(omega_over_t, n);
        if let Some((pn, pd)) = prev {
            if pd < 0.0 && d >= 0.0 {
                let frac = pd / (pd - d);
                return Ok(pn as f64 + frac);
            }
        }
        prev = Some((n, d));
    }
    Err(Error::Numerical {
        what: "occupation sign change search",
        achieved: n_scan as f64,
        wanted: 0.0,
    })
}

// ---------------------------------------------------------------------------
// Phase-space quadrature
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Agreement required between two successive orders.
    pub tol: f64,
    pub max_order: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_order: MAX_HERMITE_ORDER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureValue {
    pub p: f64,
    pub order: usize,
    /// Difference between the last two orders.
    pub achieved: f64,
}

pub const WIGNER_INTEGRAL_MAX_LEVEL: usize = 200;

pub fn pn_wigner_integral(state: &SqueezedThermalState, n: usize) -> Result<f64> {
    Ok(pn_wigner_integral_detailed(state, n, QuadratureOptions::default())?.p)
}

/// `p_n = 2(−1)ⁿ ∫∫ e^{−2r²} L_n(4r²) W(x, y) dx dy` in the principal axes
/// of `W`.
///
/// There `W ∝ e^{−2κ(s u² + v²/s)}`, so after the substitution
/// `ξ = u√a/2, η = v√b/2` with `a = 2 + 2κs`, `b = 2 + 2κ/s` the integrand is
/// `e^{−ξ²−η²}` times a polynomial of degree `2n`, integrated exactly by an
/// `(n + 1)`-point Gauss–Hermite rule. Orders still increase until two agree.
pub fn pn_wigner_integral_detailed(
    state: &SqueezedThermalState,
    n: usize,
    opts: QuadratureOptions,
) -> Result<QuadratureValue> {
    check_level(n)?;
    let k = state.kappa();
    let s = state.s;
    let a = 2.0 + 2.0 * k * s;
    let b = 2.0 + 2.0 * k / s;
    let pre = 4.0 * k / (PI * (a * b).sqrt()) * if n % 2 == 0 { 1.0 } else { -1.0 };
    let eval = |order: usize| -> f64 {
        let rule = gauss_hermite(order);
        // Weight and Laguerre damping recombined in log space; t/2 ≤ ξ² + η².
        let mut acc = KahanSum::new();
        for (xi, wi) in rule.nodes.iter().zip(&rule.weights) {
            if *wi == 0.0 {
                continue;
            }
            for (eta, wj) in rule.nodes.iter().zip(&rule.weights) {
                if *wj == 0.0 {
                    continue;
                }
                let t = 4.0 * (xi * xi / a + eta * eta / b);
                let lifted = (wi.ln() + wj.ln() + 0.5 * t).exp();
                acc.add(lifted * laguerre_scaled(n, t));
            }
        }
        pre * acc.value()
    };
    let first = (n / 2 + 4).max(8);
    let step = (n / 4 + 2).max(4);
    adapt(eval, first, step, opts, "principal-axis Gauss-Hermite quadrature")
}

/// Second quadrature scheme: a Cartesian Gauss–Hermite product rule matched
/// to the isotropic envelope `e^{−(2 + 2κ min(s, 1/s)) r²}`, evaluating `W`
/// directly at the rotated point. Used to cross-check the principal-axis rule.
pub fn pn_wigner_integral_cartesian(
    state: &SqueezedThermalState,
    n: usize,
    opts: QuadratureOptions,
) -> Result<QuadratureValue> {
    check_level(n)?;
    let k = state.kappa();
    let lambda = 2.0 + 2.0 * k * state.s.min(1.0 / state.s);
    let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
    let f = |x: f64, y: f64| {
        let t = 4.0 * (x * x + y * y);
        sign * laguerre_scaled(n, t) * wigner_squeezed_thermal(state, PhasePoint { x, y })
    };
    let eval = |order: usize| gauss_hermite_2d(f, (0.0, 0.0), lambda, order);
    adapt(eval, n + 8, 8, opts, "cartesian Gauss-Hermite quadrature")
}

fn check_level(n: usize) -> Result<()> {
    if n > WIGNER_INTEGRAL_MAX_LEVEL {
        return Err(domain(format!(
            "quadrature oracle supports n <= {WIGNER_INTEGRAL_MAX_LEVEL}, got {n}"
        )));
    }
    Ok(())
}

fn adapt<F: Fn(usize) -> f64>(
    eval: F,
    first: usize,
    step: usize,
    opts: QuadratureOptions,
    what: &'static str,
) -> Result<QuadratureValue> {
    let max_order = opts.max_order.min(MAX_HERMITE_ORDER);
    let mut order = first.min(max_order);
    let mut prev = eval(order);
    let mut achieved = f64::INFINITY;
    while order < max_order {
        let next_order = (order + step).min(max_order);
        let cur = eval(next_order);
        achieved = (cur - prev).abs();
        order = next_order;
        prev = cur;
        if achieved <= opts.tol {
            return Ok(QuadratureValue {
                p: cur,
                order,
                achieved,
            });
        }
    }
    Err(Error::Numerical {
        what,
        achieved,
        wanted: opts.tol,
    })
}

// ---------------------------------------------------------------------------
// Small-squeezing approximation
// ---------------------------------------------------------------------------

/// Below this `ω/T` the approximation uses the argument `(ω ε/T)(n + 1/2)`.
pub const APPROX_SMALL_RATIO: f64 = 0.05;

/// `κε` beyond which the Bessel approximation is not expected to hold.
pub const APPROX_SOFT_LIMIT: f64 = 0.3;

const APPROX_MAX_TERMS: usize = 2_000_000;

/// Whether `κε` is inside the range the approximation was built for.
pub fn approx_in_range(state: &SqueezedThermalState) -> bool {
    state.kappa() * state.epsilon() < APPROX_SOFT_LIMIT
}

fn approx_argument(state: &SqueezedThermalState, n: usize) -> f64 {
    let x = state.omega_over_t;
    let eps = state.epsilon();
    let nf = n as f64;
    if x < APPROX_SMALL_RATIO {
        x * eps * (nf + 0.5)
    } else {
        let k = state.kappa();
        k * eps * (nf / (1.0 - k) + (nf + 1.0) / (1.0 + k))
    }
}

/// `p_n^eq I₀(z_n)` without overflow.
fn approx_weight(state: &SqueezedThermalState, n: usize) -> Result<f64> {
    let z = approx_argument(state, n);
    let log_eq = (-(-state.omega_over_t).exp_m1()).ln() - n as f64 * state.omega_over_t;
    Ok((log_eq + z).exp() * bessel_i0_scaled(z)?)
}

/// Normalization `C = Σ_{n≥0} p_n^eq I₀(z_n)`, summed until the terms
/// become negligible. Requires the weights to decay.
fn approx_normalization(state: &SqueezedThermalState) -> Result<f64> {
    let x = state.omega_over_t;
    let eps = state.epsilon();
    // z_n grows like n·ε·x (small-ratio form) or n·ε·sinh x (full form).
    let growth = if x < APPROX_SMALL_RATIO {
        x * eps
    } else {
        eps * x.sinh()
    };
    if growth >= x {
        return Err(domain(format!(
            "approximate occupations are not normalizable for omega_over_t={x}, epsilon={eps}"
        )));
    }
    let mut acc = KahanSum::new();
    let mut last = f64::INFINITY;
    for n in 0..APPROX_MAX_TERMS {
        let w = approx_weight(state, n)?;
        acc.add(w);
        if w < last && w < 1e-18 * acc.value() {
            return Ok(acc.value());
        }
        last = w;
    }
    Err(Error::Numerical {
        what: "approximate occupation normalization",
        achieved: last,
        wanted: 1e-18,
    })
}

pub fn pn_approx(state: &SqueezedThermalState, n: usize) -> Result<f64> {
    Ok(approx_weight(state, n)? / approx_normalization(state)?)
}

pub fn pn_approx_distribution(
    state: &SqueezedThermalState,
    n_max: usize,
) -> Result<OccupationDistribution> {
    let c = approx_normalization(state)?;
    let p = (0..=n_max)
        .map(|n| approx_weight(state, n).map(|w| w / c))
        .collect::<Result<Vec<_>>>()?;
    OccupationDistribution::new(p, OccupationMethod::Approx)
}

/// Exact occupations by the quadrature oracle, as a distribution.
pub fn pn_wigner_distribution(
    state: &SqueezedThermalState,
    n_max: usize,
) -> Result<OccupationDistribution> {
    let p = (0..=n_max)
        .map(|n| pn_wigner_integral(state, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(OccupationDistribution::new(p, OccupationMethod::WignerIntegral)?
        .with_tail_ratio(state.tail_ratio()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn st(x: f64, s: f64) -> SqueezedThermalState {
        SqueezedThermalState::new(x, s, 0.0).unwrap()
    }

    #[test]
    fn nbar_examples() {
        assert_relative_eq!(nbar(2f64.ln()).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(nbar(0.2).unwrap(), 4.5166555661269945284, max_relative = 1e-14);
        assert_eq!(nbar(f64::INFINITY).unwrap(), 0.0);
        assert!(nbar(0.0).is_err());
        assert!(nbar(-1.0).is_err());
    }

    #[test]
    fn equilibrium_and_boundary_examples() {
        assert_relative_eq!(pn_equilibrium(1.0, 2), (1.0 - (-1f64).exp()) * (-2f64).exp());
        assert_relative_eq!(pn_equilibrium(1.0, 2), 0.08555, epsilon = 1e-5);
        assert_eq!(boundary_level(0.2), 9.5);
        assert_eq!(boundary_level(0.4), 4.5);
        assert_eq!(boundary_level(4.0), 0.0);
        assert_eq!(default_n_max(0.2), 60);
        assert_eq!(default_n_max(0.1), 120);
    }

    #[test]
    fn wigner_examples() {
        let p = SqueezedCoherentParams::new(1.0, 0.3, 0.5, -0.2).unwrap();
        assert_relative_eq!(wigner_squeezed_coherent(&p, PhasePoint { x: 0.5, y: -0.2 }), 2.0 / PI);
        for &(x, y) in &[(0.1, 0.9), (-1.2, 0.4), (2.0, 2.0)] {
            let pt = PhasePoint { x, y };
            assert_relative_eq!(
                wigner_squeezed_coherent(&p, pt),
                wigner_coherent(0.5, -0.2, pt),
                max_relative = 1e-14
            );
            let th = st(0.7, 1.0);
            assert_relative_eq!(
                wigner_squeezed_thermal(&th, pt),
                wigner_thermal(th.nbar(), pt),
                max_relative = 1e-13
            );
        }
        let th = st(0.2, 1.4);
        let origin = wigner_squeezed_thermal(&th, PhasePoint { x: 0.0, y: 0.0 });
        assert_relative_eq!(origin, 2.0 / PI / (1.0 + 2.0 * th.nbar()), max_relative = 1e-13);
    }

    #[test]
    fn wigner_normalization() {
        let th = SqueezedThermalState::new(0.4, 1.8, 0.7).unwrap();
        let lam = 2.0 * th.kappa() / 1.8;
        let total = gauss_hermite_2d(|x, y| wigner_squeezed_thermal(&th, PhasePoint { x, y }), (0.0, 0.0), lam, 120);
        assert!((total - 1.0).abs() < 1e-8, "{total}");
        let p = SqueezedCoherentParams::new(0.5, 1.1, 0.3, -0.8).unwrap();
        let total = gauss_hermite_2d(|x, y| wigner_squeezed_coherent(&p, PhasePoint { x, y }), (0.3, -0.8), 1.0, 120);
        assert!((total - 1.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn exact_references() {
        let cases = [
            (0.4, 1.5, 5, 0.045215080274712065458),
            (0.2, 1.3, 10, 0.024608750438706673527),
            (1.0, 1.7, 3, 0.041775838847360098756),
            (0.2, 1.7, 30, 0.001261004024745703927),
            (0.2, 1.1, 100, 7.3966623271919885949e-10),
        ];
        for (x, s, n, want) in cases {
            let got = pn_exact(&st(x, s), n).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn exact_reduces_to_boltzmann() {
        for &x in &[0.2, 1.0, 3.0] {
            let p = pn_exact_batch(&st(x, 1.0), 40, ExactOptions::default()).unwrap();
            for (n, v) in p.iter().enumerate() {
                assert!((v.p - pn_equilibrium(x, n)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn squeezed_vacuum_has_even_support() {
        let p = pn_exact_batch(&st(60.0, 2.0), 12, ExactOptions::default()).unwrap();
        for (n, v) in p.iter().enumerate() {
            if n % 2 == 1 {
                assert!(v.p.abs() < 1e-15, "p_{n} = {}", v.p);
            } else {
                assert!(v.p > 0.0);
            }
        }
    }

    #[test]
    fn exact_respects_caps() {
        let tight = ExactOptions {
            n_cap: 10,
            ..ExactOptions::default()
        };
        assert!(matches!(pn_exact_batch(&st(0.2, 1.3), 11, tight), Err(Error::Precision(_))));
        let tiny = ExactOptions {
            max_working_bits: 100,
            ..ExactOptions::default()
        };
        assert!(matches!(pn_exact_batch(&st(0.2, 1.3), 50, tiny), Err(Error::Precision(_))));
    }

    #[test]
    fn exact_matches_generating_recurrence() {
        let state = st(0.3, 1.6);
        let (l1, l2) = state.generating_roots();
        let k = state.kappa();
        let s = state.s();
        let p0 = 2.0 * k / ((1.0 + k * s) * (1.0 + k / s)).sqrt();
        let mut rec = vec![p0, p0 * 0.5 * (l1 + l2)];
        for n in 1..80 {
            let nf = n as f64;
            let next = ((l1 + l2) * (nf + 0.5) * rec[n] - l1 * l2 * nf * rec[n - 1]) / (nf + 1.0);
            rec.push(next);
        }
        let exact = pn_exact_batch(&state, 80, ExactOptions::default()).unwrap();
        for n in 0..=80 {
            assert_relative_eq!(exact[n].p, rec[n], max_relative = 1e-12);
        }
    }

    #[test]
    fn quadrature_matches_exact() {
        for &(x, s, n) in &[(0.4, 1.5, 5), (0.2, 1.3, 10), (1.0, 0.6, 7), (0.2, 1.7, 30)] {
            let state = st(x, s);
            let e = pn_exact(&state, n).unwrap();
            let q = pn_wigner_integral(&state, n).unwrap();
            assert!((e - q).abs() < 1e-9, "x={x} s={s} n={n}: {e} vs {q}");
        }
    }

    #[test]
    fn quadrature_schemes_agree() {
        let state = SqueezedThermalState::new(0.4, 1.5, 0.9).unwrap();
        let a = pn_wigner_integral(&state, 5).unwrap();
        let b = pn_wigner_integral_cartesian(&state, 5, QuadratureOptions::default()).unwrap();
        assert!((a - b.p).abs() < 1e-8, "{a} vs {}", b.p);
    }

    #[test]
    fn quadrature_vacuum_and_thermal() {
        let vac = st(50.0, 1.0);
        assert!((pn_wigner_integral(&vac, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(pn_wigner_integral(&vac, 1).unwrap().abs() < 1e-12);
        let th = st(0.4, 1.0);
        for n in 0..15 {
            assert!((pn_wigner_integral(&th, n).unwrap() - pn_equilibrium(0.4, n)).abs() < 1e-9);
        }
        assert!(pn_wigner_integral(&th, 201).is_err());
    }

    #[test]
    fn approx_examples() {
        let eq = st(0.2, 1.0);
        for n in [0, 3, 17] {
            assert_relative_eq!(pn_approx(&eq, n).unwrap(), pn_equilibrium(0.2, n), max_relative = 1e-14);
        }
        let state = st(0.2, 1.1);
        let a = pn_approx(&state, 10).unwrap();
        let e = pn_exact(&state, 10).unwrap();
        assert!((a / e - 1.0).abs() < 0.02, "{a} vs {e}");
        assert!(approx_in_range(&state));
        let dist = pn_approx_distribution(&state, 400).unwrap();
        assert!(dist.tail().abs() < 1e-12);
        assert!(pn_approx(&st(1.0, 3.0), 2).is_err());
    }

    #[test]
    fn distribution_bookkeeping() {
        let state = st(0.4, 1.3);
        let d = pn_exact_distribution(&state, default_n_max(0.4)).unwrap();
        assert_eq!(d.n_max(), 60);
        assert_eq!(d.method(), OccupationMethod::Exact);
        assert!((d.tail() - d.geometric_tail()).abs() < 1e-7);
        assert!(OccupationDistribution::new(vec![0.7, 0.6], OccupationMethod::Exact).is_err());
        assert!(OccupationDistribution::new(vec![], OccupationMethod::Exact).is_err());
        assert!(OccupationDistribution::new(vec![0.5, -0.1], OccupationMethod::Exact).is_err());
    }

    #[test]
    fn mean_photon_number_matches_sum() {
        let state = st(0.5, 1.4);
        let d = pn_exact_distribution(&state, 300).unwrap();
        assert_relative_eq!(d.mean(), state.mean_photon_number(), max_relative = 1e-10);
    }

    #[test]
    fn empirical_crossing_sits_between_boundary_neighbours() {
        let c = empirical_crossing_level(0.2, 0.02).unwrap();
        assert!(c > 9.0 && c < 10.0, "{c}");
        let c = empirical_crossing_level(0.4, 0.02).unwrap();
        assert!(c > 4.0 && c < 5.0, "{c}");
    }
}
