//! Numerical laboratory for a three-species eco-epidemiological
//! reaction-diffusion-taxis system on an interval with no-flux boundaries.
//!
//! The model couples susceptible prey S, infected prey I and predators P:
//!
//! ```text
//! S_t = delta1 * S_xx                     + r*S*(1 - (S+I)/K) - lambda*S*I
//! I_t = delta2 * ((I_x^2 + eps)^((p-2)/2) * I_x)_x
//!                                         + lambda*S*I - m*P*I/(a+I) - mu*I^gamma
//! P_t = delta3 * P_xx - chi1*(xi(P)*P*S_x)_x - chi2*(eta(P)*P*I_x)_x
//!                                         + m*I*P/(a+I) - d*P
//! ```
//!
//! on (0, l) with zero-flux boundaries. Dispersal of the infected class is a
//! regularized p-Laplacian (p > 2 is slow diffusion), mortality is sublinear
//! for gamma < 1 (the finite-time-extinction mechanism), and predators drift
//! up prey gradients with density-dependent sensitivities xi, eta.
//!
//! The crate provides:
//! - closed-form positive equilibrium and feasibility checks ([`equilibrium`]);
//! - conservative finite-volume spatial operators ([`operators`]);
//! - explicit CFL-controlled time integration with event detection
//!   ([`integrator`]);
//! - mode-by-mode linear stability, Routh-Hurwitz classification and
//!   bifurcation thresholds in chi2 ([`stability`]);
//! - the spatially homogeneous submodel with persistence and finite-time
//!   extinction thresholds ([`temporal`]);
//! - scenario files, bundled presets and deterministic CSV artifacts
//!   ([`scenario`], [`presets`], [`report`]).
//!
//! Start from the `examples/` directory; each example exercises one of these
//! capabilities end to end.

pub mod equilibrium;
pub mod grid;
pub mod integrator;
pub mod kinetics;
pub mod operators;
pub mod params;
pub mod presets;
pub mod report;
pub mod roots;
pub mod scenario;
pub mod sensitivity;
pub mod stability;
pub mod temporal;

pub use equilibrium::{check_h2, equilibrium, jacobian_at, Equilibrium, Infeasible, JacobianEntries};
pub use grid::Grid1D;
pub use integrator::{
    measure_norms, simulate, stable_dt, Event, NormRow, PositivityPolicy, SimConfig, SimError,
    SimOutcome, SimState, Species, StepMethod, Trajectory,
};
pub use kinetics::reaction_terms;
pub use params::ModelParams;
pub use presets::{preset, preset_chis, PRESET_NAMES, REPORTED_EQUILIBRIUM};
pub use report::{event_text, fte_rows, run_scenario, FteRow, ReportError, RunArtifacts};
pub use scenario::{Analyses, ProfileSpec, Scenario, ScenarioError};
pub use sensitivity::TaxisSensitivity;
pub use stability::{
    bifurcation_thresholds, chi2_hopf, chi2_steady, dispersion_table, scan_modes,
    BifurcationThresholds, DispersionRow, ModeRecord, ScanSummary, Verdict,
};
pub use temporal::{
    alpha_exponent, comparison_ode, fte_thresholds, r0, rk4_solve, ComparisonOutcome,
    FteThresholds, ThresholdRegime,
};
