//! The sweeps behind each subcommand. Each returns a [`Table`] in grid order.

use parasqueeze_core::dynamics::{default_dt_max, flow_map_with, OdeOptions, PiecewiseLinear};
use parasqueeze_core::entropy::{
    delta_s_exact_detailed, delta_s_leading, delta_s_perturbative, PerturbativeForm,
};
use parasqueeze_core::schedule::{
    evolve_schedule, is_runaway, runaway_threshold, spectral_boundary, Evolution,
    EvolutionOutcome, Regime, SwitchSchedule, Threshold,
};
use parasqueeze_core::symplectic::decompose_squeezing;
use parasqueeze_core::thermal::{
    boundary_level, pn_approx_distribution, pn_equilibrium, pn_exact_batch, ExactOptions,
    SqueezedThermalState,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::table::{json_num, Cell, Table};

/// Default levels for a panel: `⌊N₀⌋ − 1 ..= ⌊N₀⌋ + 3`.
pub fn default_levels(omega_over_t: f64) -> Vec<usize> {
    let n0 = boundary_level(omega_over_t).floor().max(1.0) as usize;
    (n0 - 1..=n0 + 3).collect()
}

pub struct OccupationsConfig {
    pub omega_over_t: Vec<f64>,
    pub epsilon: Vec<f64>,
    /// `None` picks [`default_levels`] per ratio.
    pub levels: Option<Vec<usize>>,
    /// Largest accepted error bound on an exact value.
    pub tol: f64,
}

pub const OCCUPATION_COLUMNS: [&str; 7] =
    ["omega_over_t", "epsilon", "n", "p_exact", "p_approx", "p_eq", "status"];

pub fn occupations(cfg: &OccupationsConfig) -> Result<Table, CliError> {
    for &x in &cfg.omega_over_t {
        if !(x > 0.0) {
            return Err(CliError::Config(format!("omega_over_t must be > 0, got {x}")));
        }
    }
    if let Some(e) = cfg.epsilon.iter().find(|e| !(**e >= 0.0)) {
        return Err(CliError::Config(format!("epsilon must be >= 0, got {e}")));
    }
    let jobs: Vec<(f64, Vec<usize>, f64)> = cfg
        .omega_over_t
        .iter()
        .flat_map(|&x| {
            let levels = cfg.levels.clone().unwrap_or_else(|| default_levels(x));
            cfg.epsilon.iter().map(move |&e| (x, levels.clone(), e))
        })
        .collect();
    let blocks: Vec<Vec<Vec<Cell>>> = jobs
        .par_iter()
        .map(|(x, levels, eps)| occupation_rows(*x, *eps, levels, cfg.tol))
        .collect();
    let mut table = Table::new(OCCUPATION_COLUMNS.to_vec());
    for row in blocks.into_iter().flatten() {
        table.push(row);
    }
    Ok(table)
}

fn occupation_rows(x: f64, eps: f64, levels: &[usize], tol: f64) -> Vec<Vec<Cell>> {
    let n_max = levels.iter().copied().max().unwrap_or(0);
    let state = SqueezedThermalState::from_epsilon(x, eps);
    let exact = state
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|st| pn_exact_batch(st, n_max, ExactOptions::default()));
    let approx = state
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|st| pn_approx_distribution(st, n_max));
    levels
        .iter()
        .map(|&n| {
            let mut status = Vec::new();
            let p_exact = match &exact {
                Ok(v) if v[n].abs_error_bound() <= tol => v[n].p,
                Ok(v) => {
                    status.push(format!("precision: error bound {:.1e}", v[n].abs_error_bound()));
                    v[n].p
                }
                Err(e) => {
                    status.push(format!("exact: {e}"));
                    f64::NAN
                }
            };
            let p_approx = match &approx {
                Ok(d) => d.p()[n],
                Err(e) => {
                    status.push(format!("approx: {e}"));
                    f64::NAN
                }
            };
            let status = if status.is_empty() { "ok".to_string() } else { status.join("; ") };
            vec![
                x.into(),
                eps.into(),
                n.into(),
                p_exact.into(),
                p_approx.into(),
                pn_equilibrium(x, n).into(),
                status.into(),
            ]
        })
        .collect()
}

pub const EVOLVE_COLUMNS: [&str; 6] = ["step", "s_eff", "gain", "theta", "phase", "det_drift"];

/// Per-step table (with the identity as step 0) and a summary document.
pub fn evolve(schedule: &SwitchSchedule) -> Result<(Table, Value), CliError> {
    let ev = evolve_schedule(schedule)?;
    let mut table = Table::new(EVOLVE_COLUMNS.to_vec());
    table.push(vec![0usize.into(), 1.0.into(), 1.0.into(), 0.0.into(), 0.0.into(), 0.0.into()]);
    for r in &ev.trajectory {
        table.push(vec![
            r.step.into(),
            r.squeeze.s_eff.into(),
            r.gain.into(),
            r.squeeze.theta.into(),
            r.squeeze.phase.into(),
            r.det_drift.into(),
        ]);
    }
    Ok((table, evolve_summary(schedule, &ev)))
}

fn evolve_summary(schedule: &SwitchSchedule, ev: &Evolution) -> Value {
    let [[a, b], [c, d]] = ev.total.entries();
    let fin = ev.final_squeeze();
    let runaway_step = match ev.outcome {
        EvolutionOutcome::RunawayDetected { step } => Some(step),
        EvolutionOutcome::Completed => None,
    };
    json!({
        "regime": schedule.regime(),
        "steps": schedule.len(),
        "steps_applied": ev.trajectory.len(),
        "total_map": [[json_num(a), json_num(b)], [json_num(c), json_num(d)]],
        "s_eff": json_num(fin.s_eff),
        "gain": json_num(ev.final_gain()),
        "theta": json_num(fin.theta),
        "phase": json_num(fin.phase),
        "det_drift": json_num(ev.total.det_drift()),
        "runaway": ev.is_runaway(),
        "runaway_step": runaway_step,
    })
}

pub struct EntropyConfig {
    pub omega_over_t: Vec<f64>,
    pub epsilon: Vec<f64>,
    /// Largest accepted tail uncertainty on the exact entropy.
    pub tol: f64,
}

pub const ENTROPY_COLUMNS: [&str; 8] = [
    "omega_over_t",
    "epsilon",
    "delta_s_exact",
    "delta_s_pert",
    "delta_s_leading",
    "delta_q_over_t",
    "landauer_ratio",
    "status",
];

pub fn entropy(cfg: &EntropyConfig) -> Result<Table, CliError> {
    let jobs: Vec<(f64, f64)> = cfg
        .omega_over_t
        .iter()
        .flat_map(|&x| cfg.epsilon.iter().map(move |&e| (x, e)))
        .collect();
    let rows: Vec<Result<Vec<Cell>, CliError>> = jobs
        .par_iter()
        .map(|&(x, eps)| {
            let pert = delta_s_perturbative(x, eps, PerturbativeForm::Full)?;
            let lead = delta_s_leading(x, eps)?;
            let (exact, status) = match delta_s_exact_detailed(x, 1.0 + eps) {
                Ok(v) if v.uncertainty <= cfg.tol => (v.value, "ok".to_string()),
                Ok(v) => (v.value, format!("tail uncertainty {:.1e}", v.uncertainty)),
                Err(e) => (f64::NAN, format!("exact: {e}")),
            };
            // δQ/T is δS itself with k_B = 1.
            let dq = exact;
            Ok(vec![
                x.into(),
                eps.into(),
                exact.into(),
                pert.into(),
                lead.into(),
                dq.into(),
                (dq / std::f64::consts::LN_2).into(),
                status.into(),
            ])
        })
        .collect();
    let mut table = Table::new(ENTROPY_COLUMNS.to_vec());
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

pub struct ResonanceConfig {
    pub theta: Vec<f64>,
    pub s: Vec<f64>,
    pub regime: Regime,
}

pub const RESONANCE_COLUMNS: [&str; 6] =
    ["theta", "s", "spectral_radius", "runaway_flag", "s_c_formula", "s_boundary"];

/// Runaway map over `(θ, s)`. Angles at a pole of the quoted threshold
/// formula are skipped.
pub fn resonance_scan(cfg: &ResonanceConfig) -> Result<Table, CliError> {
    if cfg.regime == Regime::Custom {
        return Err(CliError::Config("resonance-scan needs --regime ratchet or seesaw".into()));
    }
    if let Some(s) = cfg.s.iter().find(|s| !(**s > 0.0)) {
        return Err(CliError::Config(format!("s must be > 0, got {s}")));
    }
    let thetas: Vec<(f64, f64, f64)> = cfg
        .theta
        .iter()
        .filter_map(|&th| match runaway_threshold(th) {
            Ok(Threshold::Finite(sc)) => {
                let boundary = spectral_boundary(th, cfg.regime).map(|b| b.value()).unwrap_or(f64::NAN);
                Some((th, sc, boundary))
            }
            _ => None,
        })
        .collect();
    let jobs: Vec<(f64, f64, f64, f64)> = thetas
        .iter()
        .flat_map(|&(th, sc, b)| cfg.s.iter().map(move |&s| (th, s, sc, b)))
        .collect();
    let rows: Vec<Result<Vec<Cell>, CliError>> = jobs
        .par_iter()
        .map(|&(th, s, sc, b)| {
            let r = is_runaway(s, th, cfg.regime)?;
            Ok(vec![th.into(), s.into(), r.spectral_radius.into(), r.runaway.into(), sc.into(), b.into()])
        })
        .collect();
    let mut table = Table::new(RESONANCE_COLUMNS.to_vec());
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

pub const FLOW_COLUMNS: [&str; 8] = ["m11", "m12", "m21", "m22", "s_eff", "theta", "phase", "det_drift"];

pub fn flow(profile: &PiecewiseLinear, dt_max: Option<f64>, rtol: f64) -> Result<Table, CliError> {
    let dt = dt_max.unwrap_or_else(|| default_dt_max(profile));
    let opts = OdeOptions {
        rtol,
        ..OdeOptions::default()
    };
    let m = flow_map_with(profile, dt, opts)?;
    let d = decompose_squeezing(&m.renormalized()?)?;
    let [[a, b], [c, e]] = m.entries();
    let mut table = Table::new(FLOW_COLUMNS.to_vec());
    table.push(vec![
        a.into(),
        b.into(),
        c.into(),
        e.into(),
        d.s_eff.into(),
        d.theta.into(),
        d.phase.into(),
        m.det_drift().into(),
    ]);
    Ok(table)
}
