//! Run orchestration and deterministic on-disk artifacts.
//!
//! [`run_scenario`] executes whatever the scenario's [analyses] section asks
//! for and writes plain CSV plus a key = value metadata file. Output is
//! byte-deterministic: no timestamps, no hash-ordered maps, one canonical
//! float formatting.
//!
//! Files, all optional except the last two:
//! - `snapshots.csv`: t,x,S,I,P long format, one row per save per cell;
//! - `norms.csv`: per-save sup/L2/mass per species plus the sup distance to
//!   the coexistence state (blank when that state is not a rest target);
//! - `dispersion.csv`: per-mode characteristic data and both chi2 thresholds;
//! - `fte_report.csv`: pointwise and L2 extinction thresholds, predictions
//!   and the observed extinction time;
//! - `scenario.txt`: the resolved scenario in canonical form;
//! - `meta.txt`: equilibrium data, scan summaries, clip/clamp accounting and
//!   cross-check gap maxima.

use crate::equilibrium::{equilibrium, jacobian_at, Equilibrium, JacobianEntries};
use crate::grid::Grid1D;
use crate::integrator::{measure_norms, simulate, Event, SimOutcome, Species};
use crate::presets::REPORTED_EQUILIBRIUM;
use crate::scenario::{fmt_f64, Scenario, ScenarioError};
use crate::stability::{
    bifurcation_thresholds, dispersion_table, scan_modes, BifurcationThresholds, DispersionRow,
    FailedCondition, ScanSummary,
};
use crate::temporal::{comparison_ode, fte_thresholds, ComparisonOutcome, FteThresholds};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Analysis(String),
}

/// One row of the extinction report: a smallness threshold, where the
/// initial data sits relative to it, and the comparison-ODE prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FteRow {
    /// "pointwise" (sup norm against (mu/lambda*K)^(1/(1-gamma))) or "l2"
    /// (squared L2 norm against (C4/lambda*K)^(1/(1-alpha))).
    pub kind: &'static str,
    pub threshold: f64,
    pub initial_value: f64,
    /// Absorption exponent of the comparison ODE: gamma for the pointwise
    /// route, the interpolation exponent for the L2 route.
    pub alpha: f64,
    pub rate_grow: f64,
    pub rate_decay: f64,
    pub below_threshold: bool,
    pub predicted: ComparisonOutcome,
}

/// Both extinction-report rows for this scenario's initial data. Errors for
/// gamma = 1, where no finite-time extinction threshold exists.
pub fn fte_rows(sc: &Scenario) -> Result<(FteThresholds, [FteRow; 2]), ReportError> {
    let thr = fte_thresholds(&sc.params).map_err(|e| ReportError::Analysis(e.to_string()))?;
    let grid = sc.grid()?;
    let (state, _) = sc.initial_state(&grid);
    let row0 = measure_norms(&state, &grid, None);
    let sup_i0 = row0.sup[1];
    let l2sq_i0 = row0.l2[1] * row0.l2[1];
    let lk = sc.params.lambda_k();
    let pointwise = FteRow {
        kind: "pointwise",
        threshold: thr.pointwise,
        initial_value: sup_i0,
        alpha: sc.params.gamma,
        rate_grow: lk,
        rate_decay: sc.params.mu,
        below_threshold: sup_i0 < thr.pointwise,
        predicted: comparison_ode(sup_i0, lk, sc.params.mu, sc.params.gamma),
    };
    let l2 = FteRow {
        kind: "l2",
        threshold: thr.l2_bound,
        initial_value: l2sq_i0,
        alpha: thr.alpha,
        rate_grow: lk,
        rate_decay: thr.c4,
        below_threshold: l2sq_i0 < thr.l2_bound,
        predicted: comparison_ode(l2sq_i0, lk, thr.c4, thr.alpha),
    };
    Ok((thr, [pointwise, l2]))
}

/// Compact single-line form of an event for logs and metadata.
pub fn event_text(e: &Event) -> String {
    match e {
        Event::Extinction { species, t } => {
            format!("extinction({})@{}", species.symbol(), fmt_f64(*t))
        }
        Event::SteadyReached { t } => format!("steady_reached@{}", fmt_f64(*t)),
        Event::BlowupGuard { t } => format!("blowup_guard@{}", fmt_f64(*t)),
    }
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    /// Present when the scenario asked for a simulation.
    pub outcome: Option<SimOutcome>,
    /// File names written under `out_dir`.
    pub files: Vec<&'static str>,
}

struct LinearAnalysis {
    eq: Equilibrium,
    jac: JacobianEntries,
    table: Vec<DispersionRow>,
    thresholds: BifurcationThresholds,
    summary: ScanSummary,
}

/// Execute the scenario's analyses and write every artifact into `out_dir`
/// (created if needed). A failed simulation still writes its partial
/// trajectory and records the error in meta.txt; infeasible linear analysis
/// or gamma != 1 skips dispersion with a note rather than failing the run.
pub fn run_scenario(sc: &Scenario, out_dir: &Path) -> Result<RunArtifacts, ReportError> {
    sc.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let grid = sc.grid()?;
    let mut files = Vec::new();

    std::fs::write(out_dir.join("scenario.txt"), sc.to_text())?;
    files.push("scenario.txt");

    let (initial, initial_clip) = sc.initial_state(&grid);
    let initial_norms = measure_norms(&initial, &grid, None);
    let outcome = if sc.analyses.run_sim {
        Some(simulate(initial, &sc.params, &sc.xi, &sc.eta, &grid, &sc.sim))
    } else {
        None
    };
    if let Some(out) = &outcome {
        std::fs::write(out_dir.join("snapshots.csv"), snapshots_csv(out, &grid))?;
        files.push("snapshots.csv");
        std::fs::write(out_dir.join("norms.csv"), norms_csv(out))?;
        files.push("norms.csv");
    }

    let eq = equilibrium(&sc.params);
    let linear = match (&eq, sc.analyses.run_dispersion) {
        (Ok(e), true) => match jacobian_at(&sc.params, e, &sc.eta) {
            Ok(jac) => {
                let table = dispersion_table(&sc.params, e, &jac, sc.analyses.k_max, sc.params.chi2);
                let thresholds = bifurcation_thresholds(&sc.params, &jac, sc.analyses.k_max);
                let (_, summary) = scan_modes(&sc.params, e, &jac, sc.analyses.k_max, sc.params.chi2);
                std::fs::write(out_dir.join("dispersion.csv"), dispersion_csv(&table))?;
                files.push("dispersion.csv");
                Some(LinearAnalysis { eq: *e, jac, table, thresholds, summary })
            }
            Err(_) => None,
        },
        _ => None,
    };

    let fte = if sc.analyses.run_fte_report {
        Some(fte_rows(sc).map(|(thr, rows)| {
            let observed = observed_extinction(outcome.as_ref());
            (thr, rows, observed)
        }))
    } else {
        None
    };
    if let Some(Ok((thr, rows, observed))) = &fte {
        std::fs::write(out_dir.join("fte_report.csv"), fte_csv(sc, thr, rows, *observed))?;
        files.push("fte_report.csv");
    }

    let meta = meta_text(MetaInputs {
        sc,
        eq: &eq,
        linear: linear.as_ref(),
        fte: fte.as_ref(),
        outcome: outcome.as_ref(),
        initial_clip,
        initial_sup: initial_norms.sup,
    });
    std::fs::write(out_dir.join("meta.txt"), meta)?;
    files.push("meta.txt");

    Ok(RunArtifacts { out_dir: out_dir.to_path_buf(), outcome, files })
}

fn observed_extinction(outcome: Option<&SimOutcome>) -> Option<f64> {
    outcome?.trajectory.events.iter().find_map(|e| match e {
        Event::Extinction { species: Species::Infected, t } => Some(*t),
        _ => None,
    })
}

fn snapshots_csv(out: &SimOutcome, grid: &Grid1D) -> String {
    let xs = grid.cell_centers();
    let mut s = String::with_capacity(64 * out.trajectory.snapshots.len() * grid.n_cells);
    s.push_str("t,x,S,I,P\n");
    for snap in &out.trajectory.snapshots {
        let t = fmt_f64(snap.t);
        for (j, x) in xs.iter().enumerate() {
            let _ = writeln!(
                s,
                "{t},{},{},{},{}",
                fmt_f64(*x),
                fmt_f64(snap.s[j]),
                fmt_f64(snap.i[j]),
                fmt_f64(snap.p[j])
            );
        }
    }
    s
}

fn norms_csv(out: &SimOutcome) -> String {
    let mut s = String::new();
    s.push_str("t,sup_S,sup_I,sup_P,l2_S,l2_I,l2_P,mass_S,mass_I,mass_P,sup_dist_eq\n");
    for row in &out.trajectory.norm_series {
        let _ = write!(s, "{}", fmt_f64(row.t));
        for v in row.sup.iter().chain(&row.l2).chain(&row.mass) {
            let _ = write!(s, ",{}", fmt_f64(*v));
        }
        match row.sup_dist_eq {
            Some(d) => {
                let _ = writeln!(s, ",{}", fmt_f64(d));
            }
            None => s.push_str(",\n"),
        }
    }
    s
}

/// CSV form of a dispersion table, one row per mode index.
pub fn dispersion_csv(table: &[DispersionRow]) -> String {
    let mut s = String::new();
    s.push_str("k,mu_k,A_k,B_k,C_k,P_k,max_real_eig,verdict,chi2_steady,chi2_hopf\n");
    for row in table {
        let r = &row.record;
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.k,
            fmt_f64(r.mu_k),
            fmt_f64(r.a_k),
            fmt_f64(r.b_k),
            fmt_f64(r.c_k),
            fmt_f64(r.p_k),
            fmt_f64(r.max_real_eig),
            r.verdict.as_str()
        );
        for v in [row.chi2_s, row.chi2_h] {
            match v {
                Some(x) => {
                    let _ = write!(s, ",{}", fmt_f64(x));
                }
                None => s.push(','),
            }
        }
        s.push('\n');
    }
    s
}

/// CSV form of the extinction report; `observed` fills the last-but-one
/// column when a simulation actually drove the infected class to zero.
pub fn fte_csv(
    sc: &Scenario,
    thr: &FteThresholds,
    rows: &[FteRow; 2],
    observed: Option<f64>,
) -> String {
    let mut s = String::new();
    s.push_str(
        "kind,gamma,p,alpha,c4,threshold,initial_value,below_threshold,\
         predicted_extinction_t,observed_extinction_t,regime\n",
    );
    for row in rows {
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{}",
            row.kind,
            fmt_f64(sc.params.gamma),
            fmt_f64(sc.params.p),
            fmt_f64(row.alpha),
            fmt_f64(thr.c4),
            fmt_f64(row.threshold),
            fmt_f64(row.initial_value),
            row.below_threshold
        );
        match row.predicted {
            ComparisonOutcome::ExtinctTime(t) => {
                let _ = write!(s, ",{}", fmt_f64(t));
            }
            ComparisonOutcome::Persists => s.push(','),
        }
        match observed {
            Some(t) => {
                let _ = write!(s, ",{}", fmt_f64(t));
            }
            None => s.push(','),
        }
        let _ = writeln!(s, ",{}", thr.regime.as_str());
    }
    s
}

struct MetaInputs<'a> {
    sc: &'a Scenario,
    eq: &'a Result<Equilibrium, crate::equilibrium::Infeasible>,
    linear: Option<&'a LinearAnalysis>,
    fte: Option<&'a Result<(FteThresholds, [FteRow; 2], Option<f64>), ReportError>>,
    outcome: Option<&'a SimOutcome>,
    initial_clip: [f64; 3],
    initial_sup: [f64; 3],
}

fn spatial_cov(f: &[f64]) -> f64 {
    let n = f.len() as f64;
    let mean = f.iter().sum::<f64>() / n;
    if mean.abs() <= 1e-12 {
        return 0.0;
    }
    let var = f.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    var.sqrt() / mean.abs()
}

fn meta_text(inp: MetaInputs) -> String {
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "format_version = 1");
    let _ = writeln!(w, "name = {}", inp.sc.name);
    let _ = writeln!(w);
    let _ = writeln!(w, "# initial data");
    for (j, sym) in ["S", "I", "P"].iter().enumerate() {
        let _ = writeln!(w, "initial_sup_{sym} = {}", fmt_f64(inp.initial_sup[j]));
        let _ = writeln!(w, "initial_clip_mass_{sym} = {}", fmt_f64(inp.initial_clip[j]));
    }
    let _ = writeln!(w);
    let _ = writeln!(w, "# coexistence state (closed form)");
    match inp.eq {
        Ok(eq) => {
            let _ = writeln!(w, "feasible = true");
            let _ = writeln!(w, "s_star = {}", fmt_f64(eq.s_star));
            let _ = writeln!(w, "i_star = {}", fmt_f64(eq.i_star));
            let _ = writeln!(w, "p_star = {}", fmt_f64(eq.p_star));
            let _ = writeln!(w, "h1_holds = {}", eq.h1_holds);
            let _ = writeln!(w, "h2_holds = {}", eq.h2_holds);
        }
        Err(reason) => {
            let _ = writeln!(w, "feasible = false");
            let _ = writeln!(w, "infeasible_reason = {reason}");
        }
    }
    let p = &inp.sc.params;
    let b = crate::params::ModelParams::baseline();
    let same_rates = [p.r, p.k, p.lambda, p.m, p.a, p.mu, p.d]
        == [b.r, b.k, b.lambda, b.m, b.a, b.mu, b.d];
    if same_rates {
        // previously reported tuple for this rate set; its I* and P* differ
        // from the closed forms above
        let _ = writeln!(
            w,
            "reported_reference = {},{},{}",
            fmt_f64(REPORTED_EQUILIBRIUM[0]),
            fmt_f64(REPORTED_EQUILIBRIUM[1]),
            fmt_f64(REPORTED_EQUILIBRIUM[2])
        );
    }
    let _ = writeln!(w, "equilibrium_is_rest_state = {}", p.gamma == 1.0);
    if let Some(lin) = inp.linear {
        let _ = writeln!(w);
        let _ = writeln!(w, "# linear analysis at chi2 = {}", fmt_f64(p.chi2));
        let _ = writeln!(w, "eta_at_p_star = {}", fmt_f64(lin.jac.eta_star));
        let _ = writeln!(
            w,
            "scan = {}",
            match lin.summary {
                ScanSummary::AllStable => "all_stable".to_string(),
                ScanSummary::FirstUnstable { k, failed } => format!(
                    "first_unstable k={k} failed={}",
                    match failed {
                        FailedCondition::CoeffA => "A",
                        FailedCondition::CoeffC => "C",
                        FailedCondition::CoeffP => "P",
                    }
                ),
            }
        );
        match (lin.thresholds.k_critical, lin.thresholds.chi2_critical) {
            (Some(k), Some(chi)) => {
                let _ = writeln!(w, "k_critical = {k}");
                let _ = writeln!(w, "chi2_critical = {}", fmt_f64(chi));
            }
            _ => {
                let _ = writeln!(w, "k_critical = none");
                let _ = writeln!(w, "chi2_critical = none");
            }
        }
        match lin.thresholds.first_hopf() {
            Some((k, chi)) => {
                let _ = writeln!(w, "first_hopf = k={k} chi2={}", fmt_f64(chi));
            }
            None => {
                let _ = writeln!(w, "first_hopf = none");
            }
        }
        let negative = lin
            .thresholds
            .chi2_steady_of_k
            .iter()
            .flatten()
            .filter(|v| **v <= 0.0)
            .count();
        let _ = writeln!(w, "steady_thresholds_nonpositive = {negative}");
        let gap = |pick: fn(&DispersionRow) -> f64| {
            fmt_f64(lin.table.iter().map(pick).fold(0.0f64, f64::max))
        };
        // largest disagreement between the determinant path and the
        // closed-form expansion (cross-check; the expansion carries its own
        // chi2 terms and a bracket that differs when delta1 != delta2)
        let _ = writeln!(w, "expansion_gap_max_A = {}", gap(|r| r.record.expanded_gap.a));
        let _ = writeln!(w, "expansion_gap_max_B = {}", gap(|r| r.record.expanded_gap.b));
        let _ = writeln!(w, "expansion_gap_max_C = {}", gap(|r| r.record.expanded_gap.c));
        let _ = writeln!(w, "expansion_gap_max_P = {}", gap(|r| r.record.expanded_gap.p));
        let _ = writeln!(w, "equilibrium_for_modes = {},{},{}",
            fmt_f64(lin.eq.s_star), fmt_f64(lin.eq.i_star), fmt_f64(lin.eq.p_star));
    }
    if let Some(fte) = inp.fte {
        let _ = writeln!(w);
        let _ = writeln!(w, "# extinction thresholds");
        match fte {
            Ok((thr, rows, observed)) => {
                let _ = writeln!(w, "fte_regime = {}", thr.regime.as_str());
                // the decay constant takes min(delta2, mu); the L2 route
                // treats the interpolation constant as one
                let _ = writeln!(w, "fte_c4 = {}", fmt_f64(thr.c4));
                for row in rows {
                    let _ = writeln!(
                        w,
                        "fte_{}_below_threshold = {}",
                        row.kind, row.below_threshold
                    );
                }
                match observed {
                    Some(t) => {
                        let _ = writeln!(w, "fte_observed_extinction_t = {}", fmt_f64(*t));
                    }
                    None => {
                        let _ = writeln!(w, "fte_observed_extinction_t = none");
                    }
                }
            }
            Err(e) => {
                let _ = writeln!(w, "fte_error = {e}");
            }
        }
    }
    if let Some(out) = inp.outcome {
        let traj = &out.trajectory;
        let _ = writeln!(w);
        let _ = writeln!(w, "# run");
        match &out.error {
            Some(e) => {
                let _ = writeln!(w, "run_error = {e}");
            }
            None => {
                let _ = writeln!(w, "run_error = none");
            }
        }
        let _ = writeln!(w, "steps = {}", traj.steps);
        if let Some(row) = traj.norm_series.last() {
            let _ = writeln!(w, "final_t = {}", fmt_f64(row.t));
        }
        let events: Vec<String> = traj.events.iter().map(event_text).collect();
        let _ = writeln!(
            w,
            "events = {}",
            if events.is_empty() { "none".to_string() } else { events.join(";") }
        );
        for (j, sym) in ["S", "I", "P"].iter().enumerate() {
            let _ = writeln!(w, "clipped_mass_{sym} = {}", fmt_f64(traj.clipped_mass[j]));
        }
        let _ = writeln!(w, "max_clip_fraction = {}", fmt_f64(traj.max_clip_fraction));
        let _ = writeln!(w, "eta_clamp_steps = {}", traj.eta_clamp_steps);
        let closest = traj
            .norm_series
            .iter()
            .filter_map(|r| r.sup_dist_eq)
            .fold(f64::INFINITY, f64::min);
        if closest.is_finite() {
            let _ = writeln!(w, "closest_approach_eq = {}", fmt_f64(closest));
        }
        if let Some(last) = traj.snapshots.last() {
            let covs = [spatial_cov(&last.s), spatial_cov(&last.i), spatial_cov(&last.p)];
            for (j, sym) in ["S", "I", "P"].iter().enumerate() {
                let _ = writeln!(w, "final_cov_{sym} = {}", fmt_f64(covs[j]));
            }
            let patterned = covs.iter().any(|c| *c > 0.01);
            let _ = writeln!(w, "pattern = {}", if patterned { "patterned" } else { "flat" });
        }
    }
    let _ = writeln!(w);
    let _ = writeln!(w, "# resolved scenario");
    for line in inp.sc.to_text().lines() {
        let _ = writeln!(w, "| {line}");
    }
    s
}
