//! Energy entropy of occupation distributions and the heat released by
//! squeezing a thermal state. Entropies are in nats; heats in units of `T`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure_positive, Error, Result};
use crate::thermal::{
    default_n_max, pn_exact_batch, ExactOptions, OccupationDistribution, OccupationMethod,
    SqueezedThermalState,
};

/// Largest tail mass [`energy_entropy`] accepts.
pub const MAX_TAIL: f64 = 1e-6;

/// Entropy with a bound on what the truncated tail could add.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub value: f64,
    pub uncertainty: f64,
}

/// `S_E = −Σ p_n ln p_n`, with `0 ln 0 = 0` and negative roundoff ignored.
pub fn energy_entropy(dist: &OccupationDistribution) -> Result<f64> {
    Ok(energy_entropy_detailed(dist)?.value)
}

pub fn energy_entropy_detailed(dist: &OccupationDistribution) -> Result<EntropyValue> {
    let tail = dist.tail();
    if tail > MAX_TAIL {
        return Err(Error::Truncation {
            tail,
            limit: MAX_TAIL,
        });
    }
    let value = dist
        .p()
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| -p * p.ln())
        .collect::<crate::special::KahanSum>()
        .value();
    Ok(EntropyValue {
        value: value.max(0.0),
        uncertainty: tail_entropy_bound(dist),
    })
}

/// Entropy carried by the levels beyond `n_max`. With a known asymptotic
/// ratio `r` the tail is modelled as `p_N r^k`; otherwise the missing mass
/// `t` is charged `t(1 − ln t)`.
fn tail_entropy_bound(dist: &OccupationDistribution) -> f64 {
    let last = dist.p().last().copied().unwrap_or(0.0);
    match dist.tail_ratio() {
        Some(r) if r > 0.0 && r < 1.0 && last > 0.0 => {
            let mass = last * r / (1.0 - r);
            mass * -last.ln() + last * -r.ln() * r / ((1.0 - r) * (1.0 - r))
        }
        _ => {
            let t = dist.tail().max(0.0);
            if t > 0.0 {
                t * (1.0 - t.ln())
            } else {
                0.0
            }
        }
    }
}

/// Thermal entropy `−ln[2 sinh(x/2)] + (x/2) coth(x/2)`, evaluated as the
/// equivalent `−ln(1 − e^{−x}) + x n̄` which stays accurate for large `x`.
pub fn equilibrium_entropy(omega_over_t: f64) -> Result<f64> {
    if !(omega_over_t > 0.0) {
        return Err(domain(format!("omega_over_t must be > 0, got {omega_over_t}")));
    }
    let x = omega_over_t;
    let occ = if x.is_finite() { x / x.exp_m1() } else { 0.0 };
    Ok(-(-(-x).exp_m1()).ln() + occ)
}

/// High-temperature form `1 − ln(ω/T)`.
pub fn equilibrium_entropy_small(omega_over_t: f64) -> Result<f64> {
    ensure_positive("omega_over_t", omega_over_t)?;
    Ok(1.0 - omega_over_t.ln())
}

/// Tail mass targeted when [`delta_s_exact`] picks its truncation.
const EXACT_TAIL_TARGET: f64 = 1e-17;

/// Number of levels after which the geometric tail falls below `target`.
fn levels_for(state: &SqueezedThermalState, target: f64) -> usize {
    let r = state.tail_ratio();
    let base = default_n_max(state.omega_over_t());
    if !(r > 0.0 && r < 1.0) {
        return base;
    }
    let n = (target.ln() / r.ln()).ceil() + 10.0;
    (n as usize).max(base)
}

/// Exact occupations truncated where the tail is negligible for entropy.
pub fn exact_distribution_for_entropy(state: &SqueezedThermalState) -> Result<OccupationDistribution> {
    let n_max = levels_for(state, EXACT_TAIL_TARGET);
    let values = pn_exact_batch(state, n_max, ExactOptions::default())?;
    let p = values.iter().map(|v| v.p).collect();
    Ok(OccupationDistribution::new(p, OccupationMethod::Exact)?.with_tail_ratio(state.tail_ratio()))
}

/// `δS = S_E(p(s)) − S_eq`.
pub fn delta_s_exact(omega_over_t: f64, s: f64) -> Result<f64> {
    Ok(delta_s_exact_detailed(omega_over_t, s)?.value)
}

pub fn delta_s_exact_detailed(omega_over_t: f64, s: f64) -> Result<EntropyValue> {
    let state = SqueezedThermalState::new(omega_over_t, s, 0.0)?;
    if s == 1.0 {
        // Unsqueezed: the distribution is the thermal one by definition.
        return Ok(EntropyValue {
            value: 0.0,
            uncertainty: 0.0,
        });
    }
    let dist = exact_distribution_for_entropy(&state)?;
    let se = energy_entropy_detailed(&dist)?;
    Ok(EntropyValue {
        value: se.value - equilibrium_entropy(omega_over_t)?,
        uncertainty: se.uncertainty,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbativeForm {
    /// The full bracketed second-order expression.
    Full,
    /// Its `ω/T ≪ 1` simplification `−(ε²/2){(1 − x) ln x − 3 + 5x}`.
    SmallRatio,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(domain(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    Ok(())
}

/// Second-order entropy change `−Σ δp_n ln p_n^eq`.
pub fn delta_s_perturbative(omega_over_t: f64, epsilon: f64, form: PerturbativeForm) -> Result<f64> {
    ensure_positive("omega_over_t", omega_over_t)?;
    check_epsilon(epsilon)?;
    let x = omega_over_t;
    let e2 = epsilon * epsilon;
    Ok(match form {
        PerturbativeForm::Full => {
            let q = (-x).exp();
            let one_minus_q = -(-x).exp_m1();
            let bracket = one_minus_q.ln() * (1.0 + 6.0 * q + q * q)
                - x * (9.0 * q + 14.0 * q * q + q * q * q) / one_minus_q;
            -e2 / 16.0 * (x * x) / (one_minus_q * one_minus_q) * bracket
        }
        PerturbativeForm::SmallRatio => -e2 / 2.0 * ((1.0 - x) * x.ln() - 3.0 + 5.0 * x),
    })
}

/// Leading high-temperature estimate `(ε²/2) S_eq`.
pub fn delta_s_leading(omega_over_t: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(0.5 * epsilon * epsilon * equilibrium_entropy(omega_over_t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMethod {
    Exact,
    Perturbative,
    Leading,
}

impl std::str::FromStr for EntropyMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Self::Exact),
            "perturbative" => Ok(Self::Perturbative),
            "leading" => Ok(Self::Leading),
            other => Err(domain(format!("unknown entropy method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub s_e: f64,
    pub s_eq: f64,
    pub delta_s: f64,
    /// `δQ/T`, identical to `delta_s` with `k_B = 1`.
    pub delta_q_over_t: f64,
    /// `δQ/(T ln 2)`.
    pub landauer_ratio: f64,
    pub method: EntropyMethod,
    /// Entropy the truncated tail could add (exact method only).
    pub uncertainty: f64,
}

impl EntropyReport {
    fn from_delta(s_eq: f64, delta_s: f64, method: EntropyMethod, uncertainty: f64) -> Self {
        let delta_q_over_t = delta_s;
        Self {
            s_e: s_eq + delta_s,
            s_eq,
            delta_s,
            delta_q_over_t,
            landauer_ratio: delta_q_over_t / LN_2,
            method,
            uncertainty,
        }
    }
}

/// Heat `δQ = T δS` released by squeezing with ratio `s`.
pub fn heat_cost(omega_over_t: f64, s: f64, method: EntropyMethod) -> Result<EntropyReport> {
    ensure_positive("s", s)?;
    let s_eq = equilibrium_entropy(omega_over_t)?;
    let eps = (s - 1.0).abs();
    let report = match method {
        EntropyMethod::Exact => {
            let d = delta_s_exact_detailed(omega_over_t, s)?;
            EntropyReport::from_delta(s_eq, d.value, method, d.uncertainty)
        }
        EntropyMethod::Perturbative => {
            let d = delta_s_perturbative(omega_over_t, eps, PerturbativeForm::Full)?;
            EntropyReport::from_delta(s_eq, d, method, 0.0)
        }
        EntropyMethod::Leading => {
            EntropyReport::from_delta(s_eq, delta_s_leading(omega_over_t, eps)?, method, 0.0)
        }
    };
    debug_assert_eq!(report.delta_q_over_t, report.delta_s);
    Ok(report)
}
