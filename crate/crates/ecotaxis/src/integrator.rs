//! Explicit time stepping for the full system: CFL-controlled step sizes,
//! positivity handling, event detection and norm bookkeeping.
//!
//! The spatial operators are method-of-lines right-hand sides; stepping is
//! forward Euler or Heun (two-stage, second order). Step sizes come from
//! [`stable_dt`], which combines the diffusive, degenerate-diffusive,
//! advective and reaction stiffness limits of the current state.

use crate::equilibrium::equilibrium;
use crate::grid::Grid1D;
use crate::kinetics::reaction_terms;
use crate::operators::{laplacian_neumann, plaplacian_divergence, taxis_divergence, total_mass};
use crate::params::ModelParams;
use crate::sensitivity::TaxisSensitivity;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    Susceptible,
    Infected,
    Predator,
}

impl Species {
    pub const ALL: [Species; 3] = [Species::Susceptible, Species::Infected, Species::Predator];

    pub fn symbol(self) -> &'static str {
        match self {
            Species::Susceptible => "S",
            Species::Infected => "I",
            Species::Predator => "P",
        }
    }
}

/// Terminal and informational milestones detected at save points. Times are
/// linearly interpolated between the bracketing saves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    /// A species' sup norm dropped to tol_extinction. Extinction of the
    /// infected class ends the run; the other two are recorded (once) and
    /// integration continues.
    Extinction { species: Species, t: f64 },
    /// Sup distance to the homogeneous coexistence state dropped to
    /// tol_steady. Only watched when the equilibrium is feasible and
    /// gamma = 1 (otherwise E* is not a rest state of the flow).
    SteadyReached { t: f64 },
    /// A sup norm exceeded blowup_guard; the run is aborted.
    BlowupGuard { t: f64 },
}

impl Event {
    pub fn time(&self) -> f64 {
        match *self {
            Event::Extinction { t, .. } | Event::SteadyReached { t } | Event::BlowupGuard { t } => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMethod {
    Euler,
    /// Heun's two-stage method.
    Rk2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityPolicy {
    /// Replace negative values by zero after each accepted step; the removed
    /// mass is accounted in the trajectory.
    ClipToZero,
    /// Reject any step producing a negative value; the driver retries with
    /// half the step down to dt_min.
    RejectStep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub t_end: f64,
    /// Multiplies the stability-limit step. In (0, 1].
    pub cfl_safety: f64,
    pub dt_max: f64,
    /// Floor for the stability-limit step; truncating a step to land on a
    /// save time may go below it.
    pub dt_min: f64,
    /// Time between snapshot/norm rows; events are detected on this grid.
    pub save_stride: f64,
    pub method: StepMethod,
    pub positivity: PositivityPolicy,
    pub tol_extinction: f64,
    pub tol_steady: f64,
    pub blowup_guard: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            t_end: 100.0,
            cfl_safety: 0.4,
            dt_max: 0.05,
            dt_min: 1e-12,
            save_stride: 0.5,
            method: StepMethod::Rk2,
            positivity: PositivityPolicy::ClipToZero,
            tol_extinction: 1e-10,
            tol_steady: 1e-6,
            blowup_guard: 1e6,
        }
    }
}

/// Cell-centered fields at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub p: Vec<f64>,
}

impl SimState {
    pub fn new(t: f64, s: Vec<f64>, i: Vec<f64>, p: Vec<f64>) -> Self {
        assert!(s.len() == i.len() && i.len() == p.len(), "field lengths differ");
        SimState { t, s, i, p }
    }

    /// Spatially constant fields, mostly for temporal-limit runs and tests.
    pub fn uniform(n_cells: usize, vals: [f64; 3]) -> Self {
        SimState {
            t: 0.0,
            s: vec![vals[0]; n_cells],
            i: vec![vals[1]; n_cells],
            p: vec![vals[2]; n_cells],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.s.len()
    }
}

/// Per-species norms at one save point. `mass` is the cell sum times dx,
/// `l2` the continuum L2 norm, `sup_dist_eq` the sup distance to the
/// homogeneous equilibrium over all three species (None when that state is
/// infeasible or not a rest state).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRow {
    pub t: f64,
    pub sup: [f64; 3],
    pub l2: [f64; 3],
    pub mass: [f64; 3],
    pub sup_dist_eq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Saved states in time order, starting with the initial one.
    pub snapshots: Vec<SimState>,
    pub norm_series: Vec<NormRow>,
    pub events: Vec<Event>,
    /// Mass removed by positivity clipping, accumulated per species.
    pub clipped_mass: [f64; 3],
    /// Largest single-step clipped fraction of any species' mass.
    pub max_clip_fraction: f64,
    /// Steps on which a volume-fill sensitivity clamp was active somewhere.
    pub eta_clamp_steps: u64,
    pub steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SimError {
    #[error("stable step {dt:e} below dt_min {dt_min:e} at t = {t}")]
    StepTooSmall { t: f64, dt: f64, dt_min: f64 },
    #[error("non-finite field value at t = {t}")]
    NonFinite { t: f64 },
}

/// A finished or aborted run. On error the trajectory still holds everything
/// saved up to the failure plus the failing state, so partial artifacts can
/// be written.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub trajectory: Trajectory,
    pub error: Option<SimError>,
}

fn sup_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Largest stable explicit step for the current state, `cfl_safety` times
/// the most restrictive of:
///
/// - dx^2 / (2 delta1) and dx^2 / (2 delta3) for the linear diffusions;
/// - dx^2 / (2 delta2 (p-1) max_f (g^2+eps)^((p-2)/2)) for the degenerate
///   flux, whose effective diffusivity is at most (p-1) times the face
///   weight;
/// - dx / (max_f (|chi1 xi(P)grad S| + |chi2 eta(P)grad I|) * max(1, sup P))
///   for the taxis advection;
/// - the reciprocal of a sup-based Lipschitz bound on the reaction Jacobian.
///   For gamma < 1 the mortality derivative is evaluated at
///   max(sup I, 1e-6): the exact constant diverges as I drops to zero,
///   where the term only pulls toward zero and clipping guards the sign.
///
/// Constraints whose coefficient vanishes are skipped. Errors when the
/// combined step falls below dt_min, otherwise clamps to dt_max.
pub fn stable_dt(
    state: &SimState,
    params: &ModelParams,
    xi: &TaxisSensitivity,
    eta: &TaxisSensitivity,
    grid: &Grid1D,
    config: &SimConfig,
) -> Result<f64, SimError> {
    let dx = grid.dx;
    let n = grid.n_cells;
    let mut bound = f64::INFINITY;
    if params.delta1 > 0.0 {
        bound = bound.min(dx * dx / (2.0 * params.delta1));
    }
    if params.delta3 > 0.0 {
        bound = bound.min(dx * dx / (2.0 * params.delta3));
    }
    if params.delta2 > 0.0 {
        let mut wmax: f64 = if params.p == 2.0 { 1.0 } else { 0.0 };
        if params.p > 2.0 {
            let expo = (params.p - 2.0) / 2.0;
            for j in 0..n - 1 {
                let g = (state.i[j + 1] - state.i[j]) / dx;
                wmax = wmax.max((g * g + params.eps_reg).powf(expo));
            }
        }
        if wmax > 0.0 {
            bound = bound.min(dx * dx / (2.0 * params.delta2 * (params.p - 1.0) * wmax));
        }
    }
    let p_sup = sup_abs(&state.p);
    if params.chi1 > 0.0 || params.chi2 > 0.0 {
        let mut speed = 0.0f64;
        for j in 0..n - 1 {
            let mut v = 0.0;
            if params.chi1 > 0.0 {
                let gs = (state.s[j + 1] - state.s[j]) / dx;
                let up = if gs > 0.0 { state.p[j] } else { state.p[j + 1] };
                v += (params.chi1 * xi.value(up) * gs).abs();
            }
            if params.chi2 > 0.0 {
                let gi = (state.i[j + 1] - state.i[j]) / dx;
                let up = if gi > 0.0 { state.p[j] } else { state.p[j + 1] };
                v += (params.chi2 * eta.value(up) * gi).abs();
            }
            speed = speed.max(v);
        }
        if speed > 0.0 {
            bound = bound.min(dx / (speed * p_sup.max(1.0)));
        }
    }
    let s_sup = sup_abs(&state.s);
    let i_sup = sup_abs(&state.i);
    let i_char = i_sup.max(1e-6);
    let holling = params.m * i_sup / (params.a + i_sup);
    let row_s = params.r * (1.0 + (2.0 * s_sup + i_sup) / params.k)
        + params.lambda * i_sup
        + (params.r / params.k + params.lambda) * s_sup;
    let row_i = params.lambda * (s_sup + i_sup)
        + params.m * p_sup / params.a
        + params.mu * params.gamma * i_char.powf(params.gamma - 1.0)
        + holling;
    let row_p = params.m * p_sup / params.a + holling + params.d;
    let l_react = row_s.max(row_i).max(row_p);
    bound = bound.min(1.0 / l_react);
    let dt = config.cfl_safety * bound;
    if !dt.is_finite() {
        return Ok(config.dt_max);
    }
    if dt < config.dt_min {
        return Err(SimError::StepTooSmall { t: state.t, dt, dt_min: config.dt_min });
    }
    Ok(dt.min(config.dt_max))
}

fn scaled(mut v: Vec<f64>, c: f64) -> Vec<f64> {
    for x in &mut v {
        *x *= c;
    }
    v
}

/// Right-hand side with the reaction switched off: diffusion of S and P,
/// degenerate dispersal of I, taxis drift of P. Its cell sums vanish, so a
/// pure-transport update conserves each species' mass to rounding; exposed
/// for exactly that check.
pub fn transport_rhs(
    s: &[f64],
    i: &[f64],
    p_dens: &[f64],
    params: &ModelParams,
    xi: &TaxisSensitivity,
    eta: &TaxisSensitivity,
    grid: &Grid1D,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = grid.n_cells;
    let ds = if params.delta1 > 0.0 {
        scaled(laplacian_neumann(s, grid), params.delta1)
    } else {
        vec![0.0; n]
    };
    let di = if params.delta2 > 0.0 {
        scaled(plaplacian_divergence(i, params.p, params.eps_reg, grid), params.delta2)
    } else {
        vec![0.0; n]
    };
    let mut dp = if params.delta3 > 0.0 {
        scaled(laplacian_neumann(p_dens, grid), params.delta3)
    } else {
        vec![0.0; n]
    };
    if params.chi1 > 0.0 {
        for (o, v) in dp.iter_mut().zip(taxis_divergence(p_dens, s, xi, params.chi1, grid)) {
            *o -= v;
        }
    }
    if params.chi2 > 0.0 {
        for (o, v) in dp.iter_mut().zip(taxis_divergence(p_dens, i, eta, params.chi2, grid)) {
            *o -= v;
        }
    }
    (ds, di, dp)
}

fn full_rhs(
    s: &[f64],
    i: &[f64],
    p_dens: &[f64],
    params: &ModelParams,
    xi: &TaxisSensitivity,
    eta: &TaxisSensitivity,
    grid: &Grid1D,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (mut ds, mut di, mut dp) = transport_rhs(s, i, p_dens, params, xi, eta, grid);
    for j in 0..s.len() {
        let (f1, f2, f3) = reaction_terms(s[j], i[j], p_dens[j], params);
        ds[j] += f1;
        di[j] += f2;
        dp[j] += f3;
    }
    (ds, di, dp)
}

/// What one accepted step did beyond advancing the state.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepReport {
    /// Mass removed by clipping, per species. All zero under RejectStep.
    pub clipped: [f64; 3],
    /// Largest clipped fraction of a species' mass this step.
    pub clip_fraction: f64,
    /// A volume-fill sensitivity clamp was active during flux evaluation.
    pub clamped: bool,
}

/// Step rejected under [`PositivityPolicy::RejectStep`]; the state is
/// untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("step produced a negative value under the reject policy")]
pub struct StepRejected;

fn axpy(base: &[f64], slope: &[f64], h: f64) -> Vec<f64> {
    base.iter().zip(slope).map(|(b, k)| b + h * k).collect()
}

fn heun_combine(base: &[f64], k1: &[f64], k2: &[f64], h: f64) -> Vec<f64> {
    base.iter()
        .zip(k1.iter().zip(k2))
        .map(|(b, (a, c))| b + 0.5 * h * (a + c))
        .collect()
}

fn has_negative(f: &[f64]) -> bool {
    f.iter().any(|&v| v < 0.0)
}

fn clip_counting(f: &mut [f64], dx: f64) -> (f64, f64) {
    let mut neg = 0.0;
    let mut pos = 0.0;
    for v in f.iter_mut() {
        if *v < 0.0 {
            neg -= *v;
            *v = 0.0;
        } else {
            pos += *v;
        }
    }
    let fraction = if neg > 0.0 { neg / (neg + pos) } else { 0.0 };
    (neg * dx, fraction)
}

fn clip_silent(f: &mut [f64]) {
    for v in f.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

fn sens_clamped(
    params: &ModelParams,
    xi: &TaxisSensitivity,
    eta: &TaxisSensitivity,
    p_sup: f64,
) -> bool {
    (params.chi1 > 0.0 && xi.clamp_active(p_sup)) || (params.chi2 > 0.0 && eta.clamp_active(p_sup))
}

/// One explicit step of size dt. Advances `state.t` on success. Under
/// ClipToZero the Heun predictor is clipped before the second stage (its
/// removed mass is not accounted, only the corrector's); under RejectStep a
/// negative value in either stage rejects the step and leaves the state
/// untouched.
#[allow(clippy::too_many_arguments)]
pub fn step(
    state: &mut SimState,
    dt: f64,
    params: &ModelParams,
    xi: &TaxisSensitivity,
    eta: &TaxisSensitivity,
    grid: &Grid1D,
    method: StepMethod,
    positivity: PositivityPolicy,
) -> Result<StepReport, StepRejected> {
    let (k1s, k1i, k1p) = full_rhs(&state.s, &state.i, &state.p, params, xi, eta, grid);
    let mut clamped = sens_clamped(params, xi, eta, sup_abs(&state.p));
    let (mut ns, mut ni, mut np) = match method {
        StepMethod::Euler => {
            (axpy(&state.s, &k1s, dt), axpy(&state.i, &k1i, dt), axpy(&state.p, &k1p, dt))
        }
        StepMethod::Rk2 => {
            let mut ps = axpy(&state.s, &k1s, dt);
            let mut pi = axpy(&state.i, &k1i, dt);
            let mut pp = axpy(&state.p, &k1p, dt);
            match positivity {
                PositivityPolicy::ClipToZero => {
                    clip_silent(&mut ps);
                    clip_silent(&mut pi);
                    clip_silent(&mut pp);
                }
                PositivityPolicy::RejectStep => {
                    if has_negative(&ps) || has_negative(&pi) || has_negative(&pp) {
                        return Err(StepRejected);
                    }
                }
            }
            clamped |= sens_clamped(params, xi, eta, sup_abs(&pp));
            let (k2s, k2i, k2p) = full_rhs(&ps, &pi, &pp, params, xi, eta, grid);
            (
                heun_combine(&state.s, &k1s, &k2s, dt),
                heun_combine(&state.i, &k1i, &k2i, dt),
                heun_combine(&state.p, &k1p, &k2p, dt),
            )
        }
    };
    let report = match positivity {
        PositivityPolicy::RejectStep => {
            if has_negative(&ns) || has_negative(&ni) || has_negative(&np) {
                return Err(StepRejected);
            }
            StepReport { clamped, ..StepReport::default() }
        }
        PositivityPolicy::ClipToZero => {
            let mut clipped = [0.0; 3];
            let mut fraction = 0.0f64;
            for (slot, field) in clipped.iter_mut().zip([&mut ns, &mut ni, &mut np]) {
                let (mass, frac) = clip_counting(field, grid.dx);
                *slot = mass;
                fraction = fraction.max(frac);
            }
            StepReport { clipped, clip_fraction: fraction, clamped }
        }
    };
    state.s = ns;
    state.i = ni;
    state.p = np;
    state.t += dt;
    Ok(report)
}

/// Norms of one state; `eq` is the homogeneous target for the trailing
/// sup-distance column, if any.
pub fn measure_norms(state: &SimState, grid: &Grid1D, eq: Option<[f64; 3]>) -> NormRow {
    let fields = [&state.s, &state.i, &state.p];
    let mut sup = [0.0; 3];
    let mut l2 = [0.0; 3];
    let mut mass = [0.0; 3];
    for (j, f) in fields.iter().enumerate() {
        sup[j] = sup_abs(f);
        l2[j] = (f.iter().map(|v| v * v).sum::<f64>() * grid.dx).sqrt();
        mass[j] = total_mass(f, grid);
    }
    let sup_dist_eq = eq.map(|star| {
        let mut d = 0.0f64;
        for (j, f) in fields.iter().enumerate() {
            for v in f.iter() {
                d = d.max((v - star[j]).abs());
            }
        }
        d
    });
    NormRow { t: state.t, sup, l2, mass, sup_dist_eq }
}

fn cross_time(t0: f64, v0: f64, t1: f64, v1: f64, threshold: f64) -> f64 {
    let dv = v1 - v0;
    if !dv.is_finite() || dv == 0.0 {
        return t1;
    }
    let f = ((threshold - v0) / dv).clamp(0.0, 1.0);
    t0 + f * (t1 - t0)
}

fn detect_events(
    prev: &NormRow,
    cur: &NormRow,
    config: &SimConfig,
    fired: &mut [bool; 3],
    initial_row: bool,
) -> (Vec<Event>, bool) {
    let mut events = Vec::new();
    let mut terminal = false;
    for (j, species) in Species::ALL.into_iter().enumerate() {
        if !fired[j] && cur.sup[j] <= config.tol_extinction {
            fired[j] = true;
            let t = cross_time(prev.t, prev.sup[j], cur.t, cur.sup[j], config.tol_extinction);
            events.push(Event::Extinction { species, t });
            if species == Species::Infected {
                terminal = true;
            }
        }
    }
    if !initial_row {
        if let Some(d) = cur.sup_dist_eq {
            if d <= config.tol_steady {
                let d0 = prev.sup_dist_eq.unwrap_or(d);
                let t = cross_time(prev.t, d0, cur.t, d, config.tol_steady);
                events.push(Event::SteadyReached { t });
                terminal = true;
            }
        }
        let m0 = prev.sup.iter().copied().fold(0.0f64, f64::max);
        let m1 = cur.sup.iter().copied().fold(0.0f64, f64::max);
        if m1 >= config.blowup_guard {
            events.push(Event::BlowupGuard {
                t: cross_time(prev.t, m0, cur.t, m1, config.blowup_guard),
            });
            terminal = true;
        }
    }
    events.sort_by(|a, b| a.time().partial_cmp(&b.time()).unwrap());
    (events, terminal)
}

fn all_finite(state: &SimState) -> bool {
    state.s.iter().chain(&state.i).chain(&state.p).all(|v| v.is_finite())
}

/// Run the system from `initial` to t_end (or a terminal event, or a step
/// failure). Saves land exactly on multiples of save_stride by truncating
/// the step; that truncation is exempt from the dt_min check.
pub fn simulate(
    initial: SimState,
    params: &ModelParams,
    xi: &TaxisSensitivity,
    eta: &TaxisSensitivity,
    grid: &Grid1D,
    config: &SimConfig,
) -> SimOutcome {
    assert_eq!(initial.n_cells(), grid.n_cells, "state does not match grid");
    assert!(config.save_stride > 0.0, "save_stride must be positive");
    assert!(config.cfl_safety > 0.0 && config.cfl_safety <= 1.0);
    assert!(config.t_end >= initial.t);
    let eq_target = if params.gamma == 1.0 {
        equilibrium(params).ok().map(|e| [e.s_star, e.i_star, e.p_star])
    } else {
        None
    };
    let mut state = initial;
    let t0 = state.t;
    let mut traj = Trajectory {
        snapshots: Vec::new(),
        norm_series: Vec::new(),
        events: Vec::new(),
        clipped_mass: [0.0; 3],
        max_clip_fraction: 0.0,
        eta_clamp_steps: 0,
        steps: 0,
    };
    let mut fired = [false; 3];
    let row0 = measure_norms(&state, grid, eq_target);
    let (events, mut terminal) = detect_events(&row0, &row0, config, &mut fired, true);
    traj.snapshots.push(state.clone());
    traj.norm_series.push(row0);
    traj.events.extend(events);
    let mut error = None;
    let mut save_idx = 0u64;
    'outer: while !terminal && state.t < config.t_end {
        save_idx += 1;
        let target = (t0 + save_idx as f64 * config.save_stride).min(config.t_end);
        while state.t < target {
            let formula = match stable_dt(&state, params, xi, eta, grid, config) {
                Ok(v) => v,
                Err(e) => {
                    error = Some(e);
                    break 'outer;
                }
            };
            let want = target - state.t;
            let mut h = formula.min(want);
            let report = loop {
                match step(&mut state, h, params, xi, eta, grid, config.method, config.positivity)
                {
                    Ok(report) => break report,
                    Err(StepRejected) => {
                        h *= 0.5;
                        if h < config.dt_min {
                            error = Some(SimError::StepTooSmall {
                                t: state.t,
                                dt: h,
                                dt_min: config.dt_min,
                            });
                            break 'outer;
                        }
                    }
                }
            };
            if h == want {
                state.t = target;
            }
            traj.steps += 1;
            traj.eta_clamp_steps += report.clamped as u64;
            for (acc, c) in traj.clipped_mass.iter_mut().zip(report.clipped) {
                *acc += c;
            }
            traj.max_clip_fraction = traj.max_clip_fraction.max(report.clip_fraction);
            if !all_finite(&state) {
                error = Some(SimError::NonFinite { t: state.t });
                break 'outer;
            }
        }
        let row = measure_norms(&state, grid, eq_target);
        let prev = *traj.norm_series.last().unwrap();
        let (events, term) = detect_events(&prev, &row, config, &mut fired, false);
        traj.snapshots.push(state.clone());
        traj.norm_series.push(row);
        traj.events.extend(events);
        terminal = term;
        if target >= config.t_end {
            break;
        }
    }
    if error.is_some() {
        traj.snapshots.push(state.clone());
        traj.norm_series.push(measure_norms(&state, grid, eq_target));
    }
    SimOutcome { trajectory: traj, error }
}
