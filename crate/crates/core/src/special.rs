//! Laguerre polynomials, the modified Bessel function `I₀`, and the
//! `₂F₁(1/2, m; 1; z)` family with integer `m`.

use crate::error::{domain, Error, Result};

/// Neumaier's variant of compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub const LAGUERRE_MAX_DEGREE: usize = 10_000;

/// `L_n(x)` from the upward three-term recurrence.
pub fn laguerre(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// All of `L_0(x) ..= L_n(x)`.
pub fn laguerre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 - x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `e^{−t/2} L_n(t)`, bounded by 1 in magnitude for `t ≥ 0`, so it stays
/// finite where `L_n(t)` alone would overflow.
pub fn laguerre_scaled(n: usize, t: f64) -> f64 {
    let damp = (-0.5 * t).exp();
    if n == 0 {
        return damp;
    }
    let mut prev = damp;
    let mut cur = (1.0 - t) * damp;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - t) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

pub const BESSEL_I0_MAX_ARG: f64 = 700.0;
const BESSEL_SERIES_SWITCH: f64 = 15.0;

/// Modified Bessel function of the first kind, order zero, for `0 ≤ z ≤ 700`.
pub fn bessel_i0(z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(domain(format!("bessel_i0 needs z >= 0, got {z}")));
    }
    if z > BESSEL_I0_MAX_ARG {
        return Err(Error::Domain(format!(
            "bessel_i0 argument {z} exceeds the overflow guard {BESSEL_I0_MAX_ARG}"
        )));
    }
    if z < BESSEL_SERIES_SWITCH {
        Ok(i0_series(z))
    } else {
        Ok(z.exp() * i0_asymptotic_scaled(z))
    }
}

/// `e^{−z} I₀(z)`, finite for every `z ≥ 0`.
pub fn bessel_i0_scaled(z: f64) -> Result<f64> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(domain(format!("bessel_i0_scaled needs finite z >= 0, got {z}")));
    }
    if z < BESSEL_SERIES_SWITCH {
        Ok(i0_series(z) * (-z).exp())
    } else {
        Ok(i0_asymptotic_scaled(z))
    }
}

fn i0_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut acc = KahanSum::new();
    acc.add(term);
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * kf);
        acc.add(term);
        if term < 1e-18 * acc.value() {
            break;
        }
    }
    acc.value()
}

fn i0_asymptotic_scaled(z: f64) -> f64 {
    // e^{-z} I0(z) ~ (2πz)^{-1/2} Σ ((2k-1)!!)² / (k! (8z)^k)
    let mut term = 1.0;
    let mut acc = KahanSum::new();
    acc.add(term);
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (k as f64 * 8.0 * z);
        if next > term {
            break;
        }
        term = next;
        acc.add(term);
        if term < 1e-17 * acc.value() {
            break;
        }
    }
    acc.value() / (2.0 * std::f64::consts::PI * z).sqrt()
}

pub const HYP2F1_MAX_M: usize = 10_000;

/// `₂F₁(1/2, m; 1; z)` for integer `0 ≤ m ≤ 10⁴` and real `z < 1`.
///
/// Both branches reduce to a terminating sum of `m` positive terms:
/// for `z ≤ 0` Euler's transform
/// `(1 − z)^{1/2 − m} ₂F₁(1/2, 1 − m; 1; z)`,
/// for `0 < z < 1` Pfaff's transform
/// `(1 − z)^{−1/2} ₂F₁(1/2, 1 − m; 1; z/(z − 1))`.
pub fn hyp2f1_half(m: usize, z: f64) -> Result<f64> {
    if !z.is_finite() || z >= 1.0 {
        return Err(domain(format!("hyp2f1_half needs z < 1, got {z}")));
    }
    if m > HYP2F1_MAX_M {
        return Err(domain(format!("hyp2f1_half needs m <= {HYP2F1_MAX_M}, got {m}")));
    }
    if m == 0 {
        return Ok(1.0);
    }
    let one_minus_z = 1.0 - z;
    if z <= 0.0 {
        let poly = terminating_half_sum(m, z);
        Ok(one_minus_z.powf(0.5 - m as f64) * poly)
    } else {
        let w = z / (z - 1.0);
        Ok(terminating_half_sum(m, w) / one_minus_z.sqrt())
    }
}

/// `₂F₁(1/2, 1 − m; 1; w) = Σ_{k<m} (1/2)_k (1 − m)_k / (k!)² w^k`.
pub(crate) fn terminating_half_sum(m: usize, w: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = KahanSum::new();
    acc.add(term);
    for k in 0..m.saturating_sub(1) {
        let kf = k as f64;
        let a = kf + 0.5;
        let b = kf + 1.0 - m as f64;
        term *= a * b * w / ((kf + 1.0) * (kf + 1.0));
        acc.add(term);
    }
    acc.value()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}
