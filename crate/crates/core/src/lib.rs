//! Squeezing of a harmonic oscillator by fast frequency switches, the
//! resulting energy-level occupations, and the heat released by the extra
//! energy entropy.
//!
//! Units throughout are ħ = k_B = 1. Phase-space coordinates are
//! `(x, y) = (Re α, Im α)`.

pub mod dynamics;
pub mod entropy;
pub mod error;
mod precise;
pub mod quadrature;
pub mod schedule;
pub mod special;
pub mod symplectic;
pub mod thermal;

pub use dynamics::{
    flow_map, integrate_characteristics, ConstantFrequency, FnProfile, FrequencyProfile,
    PiecewiseLinear, Trajectory,
};
pub use entropy::{
    delta_s_exact, delta_s_leading, delta_s_perturbative, energy_entropy, equilibrium_entropy,
    heat_cost, EntropyMethod, EntropyReport, PerturbativeForm,
};
pub use error::{Error, Result};
pub use schedule::{
    evolve_schedule, is_runaway, runaway_threshold, Evolution, EvolutionOutcome, Regime,
    RunawayCheck, Switch, SwitchSchedule, Threshold,
};
pub use symplectic::{
    compose, decompose_squeezing, jump_map, rotation_map, step_map, Covariance2, PhasePoint,
    SqueezeDecomposition, SymplecticMap2,
};
pub use thermal::{
    boundary_level, nbar, pn_approx, pn_equilibrium, pn_exact, pn_wigner_integral,
    OccupationDistribution, OccupationMethod, SqueezedCoherentParams, SqueezedThermalState,
};
