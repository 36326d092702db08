//! Frequency-switching schedules and their accumulated phase-space maps.
//!
//! A schedule is an ordered list of steps `(s_n, θ_n)`; step `n` rotates by
//! the phase `θ_n` accumulated since the previous fast switch and then jumps
//! by `s_n`. The total map is `Λ_N ⋯ Λ_2 Λ_1`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::symplectic::{
    compose, decompose_squeezing, periodic_ratchet, periodic_seesaw, step_map,
    SqueezeDecomposition, SymplecticMap2,
};

/// `s_eff` beyond which evolution stops and reports runaway squeezing.
pub const RUNAWAY_S_EFF: f64 = 1e12;

/// Margin on the spectral radius above 1 that counts as runaway.
pub const SPECTRAL_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// One fast transition per cycle; every step jumps by the same `s`.
    Ratchet,
    /// Both transitions fast; jumps alternate `1/s`, `s`.
    Seesaw,
    Custom,
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ratchet" => Ok(Regime::Ratchet),
            "seesaw" => Ok(Regime::Seesaw),
            "custom" => Ok(Regime::Custom),
            other => Err(Error::Parse(format!("unknown regime `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Switch {
    pub s: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchSchedule {
    regime: Regime,
    base_s: Option<f64>,
    steps: Vec<Switch>,
}

impl SwitchSchedule {
    /// `cycles` periods of two steps each, all with jump `s` and phase `theta`.
    pub fn ratchet(s: f64, theta: f64, cycles: usize) -> Result<Self> {
        ensure_positive("s", s)?;
        ensure_finite("theta", theta)?;
        Ok(Self {
            regime: Regime::Ratchet,
            base_s: Some(s),
            steps: vec![Switch { s, theta }; 2 * cycles],
        })
    }

    /// `cycles` periods of two steps each, jumping `1/s` then `s`.
    pub fn seesaw(s: f64, theta: f64, cycles: usize) -> Result<Self> {
        ensure_positive("s", s)?;
        ensure_finite("theta", theta)?;
        let steps = (0..2 * cycles)
            .map(|i| Switch {
                s: if i % 2 == 0 { 1.0 / s } else { s },
                theta,
            })
            .collect();
        Ok(Self {
            regime: Regime::Seesaw,
            base_s: Some(s),
            steps,
        })
    }

    pub fn custom(steps: Vec<Switch>) -> Result<Self> {
        for (i, st) in steps.iter().enumerate() {
            ensure_positive(&format!("steps[{i}].s"), st.s)?;
            ensure_finite(&format!("steps[{i}].theta"), st.theta)?;
        }
        Ok(Self {
            regime: Regime::Custom,
            base_s: None,
            steps,
        })
    }

    pub fn empty() -> Self {
        Self {
            regime: Regime::Custom,
            base_s: None,
            steps: Vec::new(),
        }
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn base_s(&self) -> Option<f64> {
        self.base_s
    }

    pub fn steps(&self) -> &[Switch] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Parses a schedule document, either
    /// `{"regime": "ratchet", "s": 2, "theta": 3.14159, "cycles": 3}` or
    /// `{"steps": [[s1, theta1], [s2, theta2], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ScheduleDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("schedule: {e}")))?;
        match doc {
            ScheduleDoc::Steps { steps } => Self::custom(
                steps
                    .into_iter()
                    .map(|[s, theta]| Switch { s, theta })
                    .collect(),
            )
            .map_err(|e| Error::Parse(format!("schedule: {e}"))),
            ScheduleDoc::Generated {
                regime,
                s,
                theta,
                cycles,
            } => match regime {
                Regime::Ratchet => Self::ratchet(s, theta, cycles),
                Regime::Seesaw => Self::seesaw(s, theta, cycles),
                Regime::Custom => Err(Error::Parse(
                    "schedule: regime `custom` needs an explicit `steps` list".into(),
                )),
            }
            .map_err(|e| match e {
                Error::Parse(_) => e,
                other => Error::Parse(format!("schedule: {other}")),
            }),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = ScheduleDoc::Steps {
            steps: self.steps.iter().map(|st| [st.s, st.theta]).collect(),
        };
        serde_json::to_string(&doc).expect("schedule serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum ScheduleDoc {
    Steps {
        steps: Vec<[f64; 2]>,
    },
    Generated {
        regime: Regime,
        s: f64,
        theta: f64,
        cycles: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based step index.
    pub step: usize,
    pub squeeze: SqueezeDecomposition,
    /// Amplitude gain along the stretched axis, `σ_max = √s_eff`.
    pub gain: f64,
    pub det_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EvolutionOutcome {
    Completed,
    /// `s_eff` exceeded [`RUNAWAY_S_EFF`] after `step`; later steps were not applied.
    RunawayDetected { step: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evolution {
    pub total: SymplecticMap2,
    pub trajectory: Vec<StepRecord>,
    pub outcome: EvolutionOutcome,
}

impl Evolution {
    pub fn final_squeeze(&self) -> SqueezeDecomposition {
        self.trajectory
            .last()
            .map(|r| r.squeeze)
            .unwrap_or(SqueezeDecomposition {
                s_eff: 1.0,
                theta: 0.0,
                phase: 0.0,
            })
    }

    pub fn final_gain(&self) -> f64 {
        self.final_squeeze().s_eff.sqrt()
    }

    pub fn is_runaway(&self) -> bool {
        matches!(self.outcome, EvolutionOutcome::RunawayDetected { .. })
    }
}

/// Accumulates the schedule's steps left to right, recording the effective
/// squeezing after each one.
pub fn evolve_schedule(sched: &SwitchSchedule) -> Result<Evolution> {
    let mut total = SymplecticMap2::IDENTITY;
    let mut trajectory = Vec::with_capacity(sched.len());
    for (i, st) in sched.steps().iter().enumerate() {
        total = compose(&step_map(st.s, st.theta)?, &total);
        let det_drift = total.det_drift();
        let squeeze = match decompose_squeezing(&total) {
            Ok(d) => d,
            // Past ~1e8 per axis the determinant is lost to cancellation;
            // the singular-value ratio is still well defined.
            Err(_) => overflow_squeeze(&total),
        };
        trajectory.push(StepRecord {
            step: i + 1,
            squeeze,
            gain: squeeze.s_eff.sqrt(),
            det_drift,
        });
        if !squeeze.s_eff.is_finite() || squeeze.s_eff > RUNAWAY_S_EFF {
            return Ok(Evolution {
                total,
                trajectory,
                outcome: EvolutionOutcome::RunawayDetected { step: i + 1 },
            });
        }
    }
    Ok(Evolution {
        total,
        trajectory,
        outcome: EvolutionOutcome::Completed,
    })
}

fn overflow_squeeze(m: &SymplecticMap2) -> SqueezeDecomposition {
    let [[a, b], [c, d]] = m.entries();
    let frob = a * a + b * b + c * c + d * d;
    // With det = 1: σ_max² + σ_min² = ‖m‖_F², σ_max σ_min = 1.
    let s_eff = 0.5 * (frob + (frob * frob - 4.0).max(0.0).sqrt());
    SqueezeDecomposition {
        s_eff,
        theta: 0.0,
        phase: (b - c).atan2(a + d),
    }
}

/// Runaway threshold as a ratio; `Infinite` when no finite ratio suffices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Threshold {
    Finite(f64),
    Infinite,
}

impl Threshold {
    pub fn value(&self) -> f64 {
        match self {
            Threshold::Finite(v) => *v,
            Threshold::Infinite => f64::INFINITY,
        }
    }
}

const COS_POLE: f64 = 1e-12;

/// `s_c = (1 + |sin θ|) / |cos θ|`, the quoted runaway threshold for periodic
/// ratchet switching.
///
/// This is the boundary for the per-jump *amplitude* factor `√s`; the
/// boundary for the frequency ratio `s` itself is its square, see
/// [`spectral_boundary`].
pub fn runaway_threshold(theta: f64) -> Result<Threshold> {
    ensure_finite("theta", theta)?;
    let cos = theta.cos().abs();
    if cos < COS_POLE {
        return Ok(Threshold::Infinite);
    }
    Ok(Threshold::Finite((1.0 + theta.sin().abs()) / cos))
}

/// Exact frequency-ratio boundary of the hyperbolic region of the periodic
/// two-step map: `|tr| = 2` at `√s = (1 + |sin Θ|)/|cos Θ|` for the ratchet
/// and `√s = (1 + |cos Θ|)/|sin Θ|` for the seesaw.
pub fn spectral_boundary(theta: f64, regime: Regime) -> Result<Threshold> {
    ensure_finite("theta", theta)?;
    let (sin, cos) = theta.sin_cos();
    let (num, den) = match regime {
        Regime::Ratchet => (1.0 + sin.abs(), cos.abs()),
        Regime::Seesaw => (1.0 + cos.abs(), sin.abs()),
        Regime::Custom => {
            return Err(Error::Domain(
                "spectral boundary is defined for ratchet or seesaw only".into(),
            ))
        }
    };
    if den < COS_POLE {
        return Ok(Threshold::Infinite);
    }
    Ok(Threshold::Finite((num / den).powi(2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunawayCheck {
    pub runaway: bool,
    pub spectral_radius: f64,
    pub trace: f64,
}

/// Classifies periodic switching by the eigenvalues of its two-step map.
pub fn is_runaway(s: f64, theta: f64, regime: Regime) -> Result<RunawayCheck> {
    let m = match regime {
        Regime::Ratchet => periodic_ratchet(s, theta)?,
        Regime::Seesaw => periodic_seesaw(s, theta)?,
        Regime::Custom => {
            return Err(Error::Domain(
                "runaway classification needs a periodic ratchet or seesaw".into(),
            ))
        }
    };
    let spectral_radius = m.spectral_radius();
    Ok(RunawayCheck {
        runaway: spectral_radius > 1.0 + SPECTRAL_MARGIN,
        spectral_radius,
        trace: m.trace(),
    })
}
