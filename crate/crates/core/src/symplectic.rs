//! Real 2×2 area-preserving maps of the (x, y) = (Re α, Im α) phase plane.
//!
//! Maps act on column vectors `(x, y)ᵀ`. A sudden frequency jump by the ratio
//! `s = ω_after / ω_before` scales `x` by `√s` and `y` by `1/√s`; free
//! evolution between jumps is a clockwise rotation by the accumulated phase.
//! Every map built here has unit determinant. Products are not renormalized,
//! so `det_drift` stays meaningful as a diagnostic on long chains.

use std::f64::consts::PI;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// Tolerance on `|det − 1|` accepted by [`SymplecticMap2::new`] and
/// [`decompose_squeezing`].
pub const DET_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        ensure_finite("x", x)?;
        ensure_finite("y", y)?;
        Ok(Self { x, y })
    }

    pub fn radius_squared(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

/// Row-major `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticMap2 {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl SymplecticMap2 {
    pub const IDENTITY: Self = Self {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds a map from explicit entries, rejecting anything whose
    /// determinant is further than [`DET_TOLERANCE`] from one.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            ensure_finite(name, v)?;
        }
        let m = Self { a, b, c, d };
        if m.det_drift() > DET_TOLERANCE {
            return Err(Error::Consistency(format!(
                "determinant {} differs from 1 by more than {DET_TOLERANCE:e}",
                m.det()
            )));
        }
        Ok(m)
    }

    pub(crate) const fn from_entries_unchecked(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn det_drift(&self) -> f64 {
        (self.det() - 1.0).abs()
    }

    /// The map scaled by `1/√det`, removing accumulated determinant drift
    /// from a numerically integrated flow.
    pub fn renormalized(&self) -> Result<Self> {
        let det = self.det();
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::Consistency(format!("cannot renormalize a map with determinant {det}")));
        }
        let k = 1.0 / det.sqrt();
        Ok(Self::from_entries_unchecked(self.a * k, self.b * k, self.c * k, self.d * k))
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn transpose(&self) -> Self {
        Self::from_entries_unchecked(self.a, self.c, self.b, self.d)
    }

    /// Inverse of a unit-determinant map (the adjugate).
    pub fn inverse(&self) -> Self {
        Self::from_entries_unchecked(self.d, -self.b, -self.c, self.a)
    }

    /// Largest eigenvalue modulus, assuming `det = 1`.
    ///
    /// Elliptic maps (`|tr| ≤ 2`) have both eigenvalues on the unit circle.
    pub fn spectral_radius(&self) -> f64 {
        let t = self.trace().abs();
        if t <= 2.0 {
            1.0
        } else {
            0.5 * (t + (t * t - 4.0).sqrt())
        }
    }

    pub fn apply(&self, p: PhasePoint) -> PhasePoint {
        PhasePoint {
            x: self.a * p.x + self.b * p.y,
            y: self.c * p.x + self.d * p.y,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        ]
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn off_diagonal_max(&self) -> f64 {
        self.b.abs().max(self.c.abs())
    }
}

impl Default for SymplecticMap2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Mul for SymplecticMap2 {
    type Output = SymplecticMap2;

    fn mul(self, rhs: Self) -> Self {
        compose(&self, &rhs)
    }
}

/// Sudden change of frequency by the ratio `s`: `diag(√s, 1/√s)`.
pub fn jump_map(s: f64) -> Result<SymplecticMap2> {
    ensure_positive("squeezing ratio s", s)?;
    let r = s.sqrt();
    Ok(SymplecticMap2::from_entries_unchecked(r, 0.0, 0.0, 1.0 / r))
}

/// Free evolution accumulating the phase `theta`: `[[cos, sin], [−sin, cos]]`.
pub fn rotation_map(theta: f64) -> Result<SymplecticMap2> {
    ensure_finite("theta", theta)?;
    let (sin, cos) = theta.sin_cos();
    Ok(SymplecticMap2::from_entries_unchecked(cos, sin, -sin, cos))
}

/// One switching step: slow rotation by `theta` followed by a jump by `s`.
pub fn step_map(s: f64, theta: f64) -> Result<SymplecticMap2> {
    ensure_positive("squeezing ratio s", s)?;
    ensure_finite("theta", theta)?;
    let r = s.sqrt();
    let (sin, cos) = theta.sin_cos();
    Ok(SymplecticMap2::from_entries_unchecked(
        r * cos,
        r * sin,
        -sin / r,
        cos / r,
    ))
}

/// Matrix product `m2 · m1` (apply `m1` first).
pub fn compose(m2: &SymplecticMap2, m1: &SymplecticMap2) -> SymplecticMap2 {
    SymplecticMap2::from_entries_unchecked(
        m2.a * m1.a + m2.b * m1.c,
        m2.a * m1.b + m2.b * m1.d,
        m2.c * m1.a + m2.d * m1.c,
        m2.c * m1.b + m2.d * m1.d,
    )
}

/// Closed form of two consecutive ratchet steps with the same jump `s`;
/// `theta_a` is the later phase, `theta_b` the earlier one.
pub fn two_step_ratchet(s: f64, theta_a: f64, theta_b: f64) -> Result<SymplecticMap2> {
    ensure_positive("squeezing ratio s", s)?;
    ensure_finite("theta_a", theta_a)?;
    ensure_finite("theta_b", theta_b)?;
    let (_, ca) = theta_a.sin_cos();
    let (sb, cb) = theta_b.sin_cos();
    let (ssum, csum) = (theta_a + theta_b).sin_cos();
    let inv = 1.0 / s;
    Ok(SymplecticMap2::from_entries_unchecked(
        (s - 1.0) * ca * cb + csum,
        (s - 1.0) * ca * sb + ssum,
        -(inv - 1.0) * ca * sb - ssum,
        (inv - 1.0) * ca * cb + csum,
    ))
}

/// Closed form of two consecutive seesaw steps: jump `1/s` after phase
/// `theta_b`, then jump `s` after phase `theta_a`.
pub fn two_step_seesaw(s: f64, theta_a: f64, theta_b: f64) -> Result<SymplecticMap2> {
    ensure_positive("squeezing ratio s", s)?;
    ensure_finite("theta_a", theta_a)?;
    ensure_finite("theta_b", theta_b)?;
    let (sa, _) = theta_a.sin_cos();
    let (sb, cb) = theta_b.sin_cos();
    let (ssum, csum) = (theta_a + theta_b).sin_cos();
    let inv = 1.0 / s;
    Ok(SymplecticMap2::from_entries_unchecked(
        -(s - 1.0) * sa * sb + csum,
        (s - 1.0) * sa * cb + ssum,
        -(inv - 1.0) * sa * cb - ssum,
        -(inv - 1.0) * sa * sb + csum,
    ))
}

/// Two ratchet steps with equal phases `Θ`.
pub fn periodic_ratchet(s: f64, theta: f64) -> Result<SymplecticMap2> {
    ensure_positive("squeezing ratio s", s)?;
    ensure_finite("theta", theta)?;
    let (s2, c2) = (2.0 * theta).sin_cos();
    let cos_sq = theta.cos().powi(2);
    let inv = 1.0 / s;
    Ok(SymplecticMap2::from_entries_unchecked(
        (s - 1.0) * cos_sq + c2,
        0.5 * (s + 1.0) * s2,
        -0.5 * (inv + 1.0) * s2,
        (inv - 1.0) * cos_sq + c2,
    ))
}

/// Two seesaw steps with equal phases `Θ`.
pub fn periodic_seesaw(s: f64, theta: f64) -> Result<SymplecticMap2> {
    ensure_positive("squeezing ratio s", s)?;
    ensure_finite("theta", theta)?;
    let (s2, c2) = (2.0 * theta).sin_cos();
    let sin_sq = theta.sin().powi(2);
    let inv = 1.0 / s;
    Ok(SymplecticMap2::from_entries_unchecked(
        -(s - 1.0) * sin_sq + c2,
        0.5 * (s + 1.0) * s2,
        -0.5 * (inv + 1.0) * s2,
        -(inv - 1.0) * sin_sq + c2,
    ))
}

/// Effective squeezing of a map: `m = rotation_map(phase) · squeeze_along(s_eff, theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeDecomposition {
    /// Ratio of the singular values, always ≥ 1.
    pub s_eff: f64,
    /// Direction of the stretched axis, measured counter-clockwise from +x, in `[0, π)`.
    pub theta: f64,
    /// Residual rotation in `(−π, π]`.
    pub phase: f64,
}

impl SqueezeDecomposition {
    pub fn reconstruct(&self) -> SymplecticMap2 {
        let rot = SymplecticMap2::from_entries_unchecked(
            self.phase.cos(),
            self.phase.sin(),
            -self.phase.sin(),
            self.phase.cos(),
        );
        compose(&rot, &squeeze_along(self.s_eff, self.theta))
    }
}

/// Symmetric squeeze that stretches the axis at angle `theta` by `√s` and
/// compresses the orthogonal one by `1/√s`.
pub fn squeeze_along(s: f64, theta: f64) -> SymplecticMap2 {
    let r = s.sqrt();
    let (sin, cos) = theta.sin_cos();
    let (hi, lo) = (r, 1.0 / r);
    SymplecticMap2::from_entries_unchecked(
        hi * cos * cos + lo * sin * sin,
        (hi - lo) * sin * cos,
        (hi - lo) * sin * cos,
        hi * sin * sin + lo * cos * cos,
    )
}

/// Polar decomposition of a unit-determinant map into rotation × symmetric squeeze.
pub fn decompose_squeezing(m: &SymplecticMap2) -> Result<SqueezeDecomposition> {
    if !m.det().is_finite() || m.det_drift() > DET_TOLERANCE {
        return Err(Error::Consistency(format!(
            "cannot decompose: determinant {} is not 1 within {DET_TOLERANCE:e}",
            m.det()
        )));
    }
    // For det > 0 the orthogonal polar factor is proportional to m + cof(m).
    let phase = (m.b - m.c).atan2(m.a + m.d);
    let (sin, cos) = phase.sin_cos();
    // p = rotation(phase)ᵀ · m, symmetric positive-definite.
    let p11 = cos * m.a - sin * m.c;
    let p12 = cos * m.b - sin * m.d;
    let p21 = sin * m.a + cos * m.c;
    let p22 = sin * m.b + cos * m.d;
    let off = 0.5 * (p12 + p21);
    let half_diff = 0.5 * (p11 - p22);
    let mean = 0.5 * (p11 + p22);
    let radius = half_diff.hypot(off);
    let sigma_max = mean + radius;
    let sigma_min = mean - radius;
    let s_eff = if sigma_min > 0.0 {
        (sigma_max / sigma_min).max(1.0)
    } else {
        sigma_max * sigma_max
    };
    let theta = if radius == 0.0 {
        0.0
    } else {
        let t = 0.5 * (2.0 * off).atan2(2.0 * half_diff);
        t.rem_euclid(PI)
    };
    let theta = if theta >= PI { 0.0 } else { theta };
    Ok(SqueezeDecomposition {
        s_eff,
        theta,
        phase,
    })
}

/// Symmetric 2×2 covariance of `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covariance2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Covariance2 {
    /// Builds a covariance from a full matrix, rejecting non-symmetric or
    /// non-positive-definite input.
    pub fn from_matrix(m: [[f64; 2]; 2]) -> Result<Self> {
        let [[xx, xy], [yx, yy]] = m;
        for v in [xx, xy, yx, yy] {
            ensure_finite("covariance entry", v)?;
        }
        let scale = xx.abs().max(yy.abs()).max(xy.abs()).max(f64::MIN_POSITIVE);
        if (xy - yx).abs() > 1e-12 * scale {
            return Err(crate::error::domain(format!(
                "covariance is not symmetric: {xy} vs {yx}"
            )));
        }
        let cov = Self { xx, xy, yy };
        if xx <= 0.0 || cov.det() <= 0.0 {
            return Err(crate::error::domain("covariance is not positive-definite"));
        }
        Ok(cov)
    }

    pub fn isotropic(variance: f64) -> Result<Self> {
        ensure_positive("variance", variance)?;
        Ok(Self {
            xx: variance,
            xy: 0.0,
            yy: variance,
        })
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn to_matrix(&self) -> [[f64; 2]; 2] {
        [[self.xx, self.xy], [self.xy, self.yy]]
    }
}

/// Pushes a Gaussian covariance through a linear map: `m · cov · mᵀ`.
pub fn gaussian_transport(cov: &Covariance2, m: &SymplecticMap2) -> Covariance2 {
    let [[a, b], [c, d]] = m.entries();
    // (m · cov)
    let r11 = a * cov.xx + b * cov.xy;
    let r12 = a * cov.xy + b * cov.yy;
    let r21 = c * cov.xx + d * cov.xy;
    let r22 = c * cov.xy + d * cov.yy;
    Covariance2 {
        xx: r11 * a + r12 * b,
        xy: 0.5 * ((r11 * c + r12 * d) + (r21 * a + r22 * b)),
        yy: r21 * c + r22 * d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn assert_map_eq(m: &SymplecticMap2, expected: [[f64; 2]; 2], tol: f64) {
        let e = SymplecticMap2::from_entries_unchecked(
            expected[0][0],
            expected[0][1],
            expected[1][0],
            expected[1][1],
        );
        assert!(m.max_abs_diff(&e) <= tol, "{m:?} vs {expected:?}");
    }

    #[test]
    fn jump_map_examples() {
        assert_map_eq(&jump_map(1.0).unwrap(), [[1.0, 0.0], [0.0, 1.0]], 0.0);
        assert_map_eq(&jump_map(4.0).unwrap(), [[2.0, 0.0], [0.0, 0.5]], 0.0);
        assert_abs_diff_eq!(jump_map(2.5).unwrap().det(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn jump_map_rejects_bad_ratio() {
        for s in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(jump_map(s), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn rotation_map_examples() {
        assert_map_eq(&rotation_map(0.0).unwrap(), [[1.0, 0.0], [0.0, 1.0]], 0.0);
        assert_map_eq(
            &rotation_map(FRAC_PI_2).unwrap(),
            [[0.0, 1.0], [-1.0, 0.0]],
            1e-16,
        );
        assert_map_eq(&rotation_map(PI).unwrap(), [[-1.0, 0.0], [0.0, -1.0]], 1e-15);
        assert!(rotation_map(f64::NAN).is_err());
    }

    #[test]
    fn step_map_examples() {
        let r2 = 2f64.sqrt();
        assert_map_eq(&step_map(2.0, 0.0).unwrap(), [[r2, 0.0], [0.0, 1.0 / r2]], 1e-15);
        let m = step_map(1.0, 0.83).unwrap();
        assert!(m.max_abs_diff(&rotation_map(0.83).unwrap()) < 1e-15);
        assert_abs_diff_eq!(step_map(3.0, 0.7).unwrap().det(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn compose_examples() {
        let m = step_map(1.7, 0.4).unwrap();
        assert_eq!(compose(&SymplecticMap2::IDENTITY, &m), m);
        let id = compose(&jump_map(3.3).unwrap(), &jump_map(1.0 / 3.3).unwrap());
        assert!(id.max_abs_diff(&SymplecticMap2::IDENTITY) < 1e-15);
    }

    #[test]
    fn composed_step_equals_periodic_ratchet() {
        let (s, th) = (1.8, 0.77);
        let step = step_map(s, th).unwrap();
        let brute = compose(&step, &step);
        assert!(brute.max_abs_diff(&periodic_ratchet(s, th).unwrap()) < 1e-13);
        assert!(brute.max_abs_diff(&two_step_ratchet(s, th, th).unwrap()) < 1e-13);
    }

    #[test]
    fn two_step_examples() {
        let r = two_step_ratchet(1.0, 0.3, 1.2).unwrap();
        assert!(r.max_abs_diff(&rotation_map(1.5).unwrap()) < 1e-15);
        assert_map_eq(
            &two_step_ratchet(2.0, PI, PI).unwrap(),
            [[2.0, 0.0], [0.0, 0.5]],
            1e-14,
        );
        let w = two_step_seesaw(1.0, 0.3, 1.2).unwrap();
        assert!(w.max_abs_diff(&rotation_map(1.5).unwrap()) < 1e-15);
        assert_map_eq(
            &two_step_seesaw(2.0, FRAC_PI_2, FRAC_PI_2).unwrap(),
            [[-2.0, 0.0], [0.0, -0.5]],
            1e-14,
        );
    }

    #[test]
    fn seesaw_closed_form_matches_compose() {
        let (s, a, b) = (1.2, 0.4, 1.1);
        let brute = compose(&step_map(s, a).unwrap(), &step_map(1.0 / s, b).unwrap());
        assert!(brute.max_abs_diff(&two_step_seesaw(s, a, b).unwrap()) < 1e-14);
        let p = periodic_seesaw(s, a).unwrap();
        assert!(p.max_abs_diff(&two_step_seesaw(s, a, a).unwrap()) < 1e-14);
    }

    #[test]
    fn decompose_examples() {
        let d = decompose_squeezing(&SymplecticMap2::IDENTITY).unwrap();
        assert_eq!((d.s_eff, d.phase), (1.0, 0.0));

        let d = decompose_squeezing(&jump_map(4.0).unwrap()).unwrap();
        assert_abs_diff_eq!(d.s_eff, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.theta, 0.0, epsilon = 1e-15);

        let d = decompose_squeezing(&rotation_map(1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(d.s_eff, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.phase, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn decompose_folds_inverse_squeeze_into_axis() {
        let d = decompose_squeezing(&jump_map(0.25).unwrap()).unwrap();
        assert_abs_diff_eq!(d.s_eff, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.theta, FRAC_PI_2, epsilon = 1e-14);
    }

    #[test]
    fn decompose_rejects_non_symplectic() {
        let m = SymplecticMap2::from_entries_unchecked(2.0, 0.0, 0.0, 2.0);
        assert!(matches!(decompose_squeezing(&m), Err(Error::Consistency(_))));
        assert!(SymplecticMap2::new(2.0, 0.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn transport_examples() {
        let cov = Covariance2::from_matrix([[0.7, 0.1], [0.1, 0.4]]).unwrap();
        assert_eq!(gaussian_transport(&cov, &SymplecticMap2::IDENTITY), cov);

        let sigma2 = 0.8;
        let out = gaussian_transport(
            &Covariance2::isotropic(sigma2).unwrap(),
            &jump_map(3.0).unwrap(),
        );
        assert_abs_diff_eq!(out.xx, 3.0 * sigma2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.yy, sigma2 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.xy, 0.0);

        let iso = Covariance2::isotropic(1.3).unwrap();
        let rot = gaussian_transport(&iso, &rotation_map(0.9).unwrap());
        assert_abs_diff_eq!(rot.xx, 1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(rot.yy, 1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(rot.xy, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn covariance_rejects_asymmetric() {
        assert!(Covariance2::from_matrix([[1.0, 0.2], [0.3, 1.0]]).is_err());
        assert!(Covariance2::from_matrix([[1.0, 2.0], [2.0, 1.0]]).is_err());
    }

    #[test]
    fn spectral_radius_of_hyperbolic_map() {
        assert_eq!(rotation_map(0.3).unwrap().spectral_radius(), 1.0);
        assert_abs_diff_eq!(jump_map(9.0).unwrap().spectral_radius(), 3.0, epsilon = 1e-14);
    }
}
