//! Bundled scenarios: the baseline rate set under five taxis strengths.
//!
//! All five share the kinetics, grid, initial data and run settings; only
//! (chi1, chi2) differs. fig1 is taxis-free, the others switch the drift
//! terms on at increasing and mixed strengths.

use crate::integrator::{PositivityPolicy, SimConfig, StepMethod};
use crate::params::ModelParams;
use crate::scenario::{Analyses, ProfileSpec, Scenario};
use crate::sensitivity::{SensitivityKind, TaxisSensitivity};

pub const PRESET_NAMES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

/// Coexistence tuple reported alongside the baseline rates in earlier work.
/// The closed forms at those rates give (1.6944, 1.5936, 0.3231744) instead;
/// run metadata records both for comparison.
pub const REPORTED_EQUILIBRIUM: [f64; 3] = [1.695, 13.83, 0.6147];

/// The taxis strengths (chi1, chi2) of each bundled scenario.
pub fn preset_chis(name: &str) -> Option<(f64, f64)> {
    match name {
        "fig1" => Some((0.0, 0.0)),
        "fig2" => Some((10.0, 10.0)),
        "fig3" => Some((100.0, 100.0)),
        "fig4" => Some((100.0, 40.0)),
        "fig5" => Some((40.0, 100.0)),
        _ => None,
    }
}

pub fn preset(name: &str) -> Option<Scenario> {
    let (chi1, chi2) = preset_chis(name)?;
    let mut params = ModelParams::baseline();
    params.chi1 = chi1;
    params.chi2 = chi2;
    // clamp_eps = 0.05 caps the volume-fill response at eta = 19. The
    // initial predator crest sits well above the eta singularity, so an
    // unguarded evaluation would drive the advective step size to nothing.
    let clamp_eps = 0.05;
    Some(Scenario {
        name: name.to_string(),
        params,
        xi: TaxisSensitivity { kind: SensitivityKind::Identity, clamp_eps },
        eta: TaxisSensitivity { kind: SensitivityKind::RationalVolumeFill, clamp_eps },
        n_cells: 512,
        initial: [
            ProfileSpec::cosine(0.1, 30, 0.35),
            ProfileSpec::sine(0.1, 60, 0.6),
            ProfileSpec::cosine(3.0, 90, 1.6),
        ],
        sim: SimConfig {
            t_end: 200.0,
            cfl_safety: 0.4,
            dt_max: 0.05,
            dt_min: 1e-12,
            save_stride: 0.5,
            method: StepMethod::Rk2,
            positivity: PositivityPolicy::ClipToZero,
            tol_extinction: 1e-10,
            tol_steady: 1e-3,
            blowup_guard: 1e6,
        },
        analyses: Analyses {
            run_sim: true,
            run_dispersion: true,
            run_fte_report: false,
            k_max: 64,
        },
    })
}
