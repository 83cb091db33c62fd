//! Plain-text scenario files: everything one run needs, in a strict
//! sectioned key = value format.
//!
//! ```text
//! name = fig1
//!
//! [params]
//! r = 5
//! ...
//!
//! [sensitivity]
//! xi = identity
//! eta = rational_volume_fill
//! clamp_eps = 0.05
//!
//! [grid]
//! n_cells = 512
//!
//! [initial]
//! s = cosine(0.1, 30, 0.35)
//! i = sine(0.1, 60, 0.6)
//! p = cosine(3, 90, 1.6)
//!
//! [sim]
//! t_end = 200
//! ...
//!
//! [analyses]
//! run_dispersion = true
//! ```
//!
//! The parser is deliberately unforgiving: unknown sections, unknown or
//! duplicate keys and malformed values are all errors, with line numbers.
//! [`Scenario::to_text`] writes the canonical form, which parses back to an
//! identical value.

use crate::grid::Grid1D;
use crate::integrator::{PositivityPolicy, SimConfig, SimState, StepMethod};
use crate::params::ModelParams;
use crate::sensitivity::{SensitivityKind, TaxisSensitivity, DEFAULT_CLAMP_EPS};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing key `{key}` in [{section}]")]
    Missing { section: &'static str, key: &'static str },
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One species' initial profile. Modes are integer Neumann indices: mode k
/// evaluates cos(k pi x / l) (or the matching sine), so every profile is
/// compatible with the zero-flux boundary in the cosine case and exactly
/// representable on the analysis wavenumber grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileForm {
    Constant { value: f64 },
    Cosine { amp: f64, mode: u32, offset: f64 },
    Sine { amp: f64, mode: u32, offset: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSpec {
    pub form: ProfileForm,
    /// Replace negative samples by zero (densities must start nonnegative;
    /// the clipped mass is reported).
    pub clamp: bool,
}

impl ProfileSpec {
    pub fn constant(value: f64) -> Self {
        ProfileSpec { form: ProfileForm::Constant { value }, clamp: true }
    }

    pub fn cosine(amp: f64, mode: u32, offset: f64) -> Self {
        ProfileSpec { form: ProfileForm::Cosine { amp, mode, offset }, clamp: true }
    }

    pub fn sine(amp: f64, mode: u32, offset: f64) -> Self {
        ProfileSpec { form: ProfileForm::Sine { amp, mode, offset }, clamp: true }
    }

    /// Cell-center samples and the mass removed by clamping.
    pub fn sample(&self, grid: &Grid1D) -> (Vec<f64>, f64) {
        let l = grid.domain_len;
        let mut vals: Vec<f64> = grid
            .cell_centers()
            .iter()
            .map(|x| match self.form {
                ProfileForm::Constant { value } => value,
                ProfileForm::Cosine { amp, mode, offset } => {
                    amp * (mode as f64 * PI * x / l).cos() + offset
                }
                ProfileForm::Sine { amp, mode, offset } => {
                    amp * (mode as f64 * PI * x / l).sin() + offset
                }
            })
            .collect();
        let mut clipped = 0.0;
        if self.clamp {
            for v in &mut vals {
                if *v < 0.0 {
                    clipped -= *v;
                    *v = 0.0;
                }
            }
        }
        (vals, clipped * grid.dx)
    }

    fn to_text(self) -> String {
        match self.form {
            ProfileForm::Constant { value } => format!("constant({})", fmt_f64(value)),
            ProfileForm::Cosine { amp, mode, offset } => {
                format!("cosine({}, {mode}, {})", fmt_f64(amp), fmt_f64(offset))
            }
            ProfileForm::Sine { amp, mode, offset } => {
                format!("sine({}, {mode}, {})", fmt_f64(amp), fmt_f64(offset))
            }
        }
    }
}

/// Which artifacts a run of this scenario produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Analyses {
    pub run_sim: bool,
    pub run_dispersion: bool,
    pub run_fte_report: bool,
    /// Largest mode index in dispersion tables and scans.
    pub k_max: usize,
}

impl Default for Analyses {
    fn default() -> Self {
        Analyses { run_sim: true, run_dispersion: false, run_fte_report: false, k_max: 64 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: ModelParams,
    pub xi: TaxisSensitivity,
    pub eta: TaxisSensitivity,
    pub n_cells: usize,
    /// Initial profiles for S, I, P in that order.
    pub initial: [ProfileSpec; 3],
    pub sim: SimConfig,
    pub analyses: Analyses,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let (mut header, mut sections) = split_sections(text)?;
        let name = header.req("name")?.1;
        header.finish()?;

        let mut sec = sections.remove("params").ok_or(ScenarioError::MissingSection("params"))?;
        let params = ModelParams {
            r: sec.req_f64("r")?,
            k: sec.req_f64("k")?,
            lambda: sec.req_f64("lambda")?,
            m: sec.req_f64("m")?,
            a: sec.req_f64("a")?,
            mu: sec.req_f64("mu")?,
            d: sec.req_f64("d")?,
            delta1: sec.req_f64("delta1")?,
            delta2: sec.req_f64("delta2")?,
            delta3: sec.req_f64("delta3")?,
            chi1: sec.req_f64("chi1")?,
            chi2: sec.req_f64("chi2")?,
            p: sec.opt_f64("p", 2.0)?,
            gamma: sec.opt_f64("gamma", 1.0)?,
            eps_reg: sec.opt_f64("eps_reg", 1e-6)?,
            domain_len: sec.req_f64("domain_len")?,
        };
        sec.finish()?;

        let (xi, eta) = match sections.remove("sensitivity") {
            Some(mut sec) => {
                let xi_kind = match sec.take("xi")? {
                    Some((line, v)) => parse_sensitivity(line, &v)?,
                    None => SensitivityKind::Identity,
                };
                let eta_kind = match sec.take("eta")? {
                    Some((line, v)) => parse_sensitivity(line, &v)?,
                    None => SensitivityKind::Identity,
                };
                let clamp_eps = sec.opt_f64("clamp_eps", DEFAULT_CLAMP_EPS)?;
                sec.finish()?;
                (
                    TaxisSensitivity { kind: xi_kind, clamp_eps },
                    TaxisSensitivity { kind: eta_kind, clamp_eps },
                )
            }
            None => (TaxisSensitivity::identity(), TaxisSensitivity::identity()),
        };

        let mut sec = sections.remove("grid").ok_or(ScenarioError::MissingSection("grid"))?;
        let n_cells = sec.req_usize("n_cells")?;
        sec.finish()?;

        let mut sec =
            sections.remove("initial").ok_or(ScenarioError::MissingSection("initial"))?;
        let mut profile = |key: &'static str, clamp_key: &'static str| {
            let (line, v) = sec.req(key)?;
            let form = parse_profile(line, &v)?;
            let clamp = sec.opt_bool(clamp_key, true)?;
            Ok::<ProfileSpec, ScenarioError>(ProfileSpec { form, clamp })
        };
        let initial = [
            profile("s", "clamp_s")?,
            profile("i", "clamp_i")?,
            profile("p", "clamp_p")?,
        ];
        sec.finish()?;

        let defaults = SimConfig::default();
        let sim = match sections.remove("sim") {
            Some(mut sec) => {
                let method = match sec.take("method")? {
                    Some((line, v)) => parse_method(line, &v)?,
                    None => defaults.method,
                };
                let positivity = match sec.take("positivity")? {
                    Some((line, v)) => parse_positivity(line, &v)?,
                    None => defaults.positivity,
                };
                let cfg = SimConfig {
                    t_end: sec.opt_f64("t_end", defaults.t_end)?,
                    cfl_safety: sec.opt_f64("cfl_safety", defaults.cfl_safety)?,
                    dt_max: sec.opt_f64("dt_max", defaults.dt_max)?,
                    dt_min: sec.opt_f64("dt_min", defaults.dt_min)?,
                    save_stride: sec.opt_f64("save_stride", defaults.save_stride)?,
                    method,
                    positivity,
                    tol_extinction: sec.opt_f64("tol_extinction", defaults.tol_extinction)?,
                    tol_steady: sec.opt_f64("tol_steady", defaults.tol_steady)?,
                    blowup_guard: sec.opt_f64("blowup_guard", defaults.blowup_guard)?,
                };
                sec.finish()?;
                cfg
            }
            None => defaults,
        };

        let defaults = Analyses::default();
        let analyses = match sections.remove("analyses") {
            Some(mut sec) => {
                let a = Analyses {
                    run_sim: sec.opt_bool("run_sim", defaults.run_sim)?,
                    run_dispersion: sec.opt_bool("run_dispersion", defaults.run_dispersion)?,
                    run_fte_report: sec.opt_bool("run_fte_report", defaults.run_fte_report)?,
                    k_max: sec.opt_usize("k_max", defaults.k_max)?,
                };
                sec.finish()?;
                a
            }
            None => defaults,
        };

        if let Some((_, sec)) = sections.into_iter().next() {
            return Err(ScenarioError::Parse {
                line: sec.line,
                msg: format!("unknown section [{}]", sec.name),
            });
        }

        let scenario = Scenario { name, params, xi, eta, n_cells, initial, sim, analyses };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
        Scenario::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Canonical serialization; parses back to an identical value.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "name = {}", self.name);
        let _ = writeln!(w);
        let _ = writeln!(w, "[params]");
        for (key, v) in [
            ("r", p.r),
            ("k", p.k),
            ("lambda", p.lambda),
            ("m", p.m),
            ("a", p.a),
            ("mu", p.mu),
            ("d", p.d),
            ("delta1", p.delta1),
            ("delta2", p.delta2),
            ("delta3", p.delta3),
            ("chi1", p.chi1),
            ("chi2", p.chi2),
            ("p", p.p),
            ("gamma", p.gamma),
            ("eps_reg", p.eps_reg),
            ("domain_len", p.domain_len),
        ] {
            let _ = writeln!(w, "{key} = {}", fmt_f64(v));
        }
        let _ = writeln!(w);
        let _ = writeln!(w, "[sensitivity]");
        let _ = writeln!(w, "xi = {}", sensitivity_text(self.xi.kind));
        let _ = writeln!(w, "eta = {}", sensitivity_text(self.eta.kind));
        let _ = writeln!(w, "clamp_eps = {}", fmt_f64(self.eta.clamp_eps));
        let _ = writeln!(w);
        let _ = writeln!(w, "[grid]");
        let _ = writeln!(w, "n_cells = {}", self.n_cells);
        let _ = writeln!(w);
        let _ = writeln!(w, "[initial]");
        for (j, key) in ["s", "i", "p"].iter().enumerate() {
            let _ = writeln!(w, "{key} = {}", self.initial[j].to_text());
            if !self.initial[j].clamp {
                let _ = writeln!(w, "clamp_{key} = false");
            }
        }
        let _ = writeln!(w);
        let _ = writeln!(w, "[sim]");
        let c = &self.sim;
        let _ = writeln!(w, "t_end = {}", fmt_f64(c.t_end));
        let _ = writeln!(w, "cfl_safety = {}", fmt_f64(c.cfl_safety));
        let _ = writeln!(w, "dt_max = {}", fmt_f64(c.dt_max));
        let _ = writeln!(w, "dt_min = {}", fmt_f64(c.dt_min));
        let _ = writeln!(w, "save_stride = {}", fmt_f64(c.save_stride));
        let _ = writeln!(
            w,
            "method = {}",
            match c.method {
                StepMethod::Euler => "euler",
                StepMethod::Rk2 => "rk2",
            }
        );
        let _ = writeln!(
            w,
            "positivity = {}",
            match c.positivity {
                PositivityPolicy::ClipToZero => "clip",
                PositivityPolicy::RejectStep => "reject",
            }
        );
        let _ = writeln!(w, "tol_extinction = {}", fmt_f64(c.tol_extinction));
        let _ = writeln!(w, "tol_steady = {}", fmt_f64(c.tol_steady));
        let _ = writeln!(w, "blowup_guard = {}", fmt_f64(c.blowup_guard));
        let _ = writeln!(w);
        let _ = writeln!(w, "[analyses]");
        let a = &self.analyses;
        let _ = writeln!(w, "run_sim = {}", a.run_sim);
        let _ = writeln!(w, "run_dispersion = {}", a.run_dispersion);
        let _ = writeln!(w, "run_fte_report = {}", a.run_fte_report);
        let _ = writeln!(w, "k_max = {}", a.k_max);
        out
    }

    pub fn grid(&self) -> Result<Grid1D, ScenarioError> {
        Grid1D::new(self.n_cells, self.params.domain_len)
            .map_err(|e| ScenarioError::Invalid(e.to_string()))
    }

    /// Sampled initial state plus the per-species mass removed by profile
    /// clamping.
    pub fn initial_state(&self, grid: &Grid1D) -> (SimState, [f64; 3]) {
        let (s, c0) = self.initial[0].sample(grid);
        let (i, c1) = self.initial[1].sample(grid);
        let (p, c2) = self.initial[2].sample(grid);
        (SimState::new(0.0, s, i, p), [c0, c1, c2])
    }

    /// Overwrite one model parameter by its scenario-file key. Used by
    /// parameter sweeps; re-validates, and a rejected value leaves the
    /// scenario exactly as it was.
    pub fn set_param_field(&mut self, field: &str, value: f64) -> Result<(), ScenarioError> {
        let slot = param_slot(&mut self.params, field)
            .ok_or_else(|| ScenarioError::Invalid(format!("unknown parameter field `{field}`")))?;
        let previous = std::mem::replace(slot, value);
        if let Err(e) = self.params.validate() {
            *param_slot(&mut self.params, field).expect("field resolved above") = previous;
            return Err(ScenarioError::Invalid(e.to_string()));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.params.validate().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        self.grid()?;
        let c = &self.sim;
        let checks = [
            (c.t_end > 0.0 && c.t_end.is_finite(), "t_end must be positive and finite"),
            (c.cfl_safety > 0.0 && c.cfl_safety <= 1.0, "cfl_safety must be in (0, 1]"),
            (c.dt_max > 0.0, "dt_max must be positive"),
            (c.dt_min >= 0.0 && c.dt_min <= c.dt_max, "need 0 <= dt_min <= dt_max"),
            (c.save_stride > 0.0, "save_stride must be positive"),
            (c.tol_extinction > 0.0, "tol_extinction must be positive"),
            (c.tol_steady > 0.0, "tol_steady must be positive"),
            (c.blowup_guard > 0.0, "blowup_guard must be positive"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(ScenarioError::Invalid(msg.to_string()));
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Scenario {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::parse(s)
    }
}

fn param_slot<'a>(p: &'a mut ModelParams, field: &str) -> Option<&'a mut f64> {
    Some(match field {
        "r" => &mut p.r,
        "k" => &mut p.k,
        "lambda" => &mut p.lambda,
        "m" => &mut p.m,
        "a" => &mut p.a,
        "mu" => &mut p.mu,
        "d" => &mut p.d,
        "delta1" => &mut p.delta1,
        "delta2" => &mut p.delta2,
        "delta3" => &mut p.delta3,
        "chi1" => &mut p.chi1,
        "chi2" => &mut p.chi2,
        "p" => &mut p.p,
        "gamma" => &mut p.gamma,
        "eps_reg" => &mut p.eps_reg,
        "domain_len" => &mut p.domain_len,
        _ => return None,
    })
}

/// Shortest round-trip decimal; exponent notation outside [1e-4, 1e16).
/// Every number in the CSV artifacts goes through this, so files parse back
/// to the exact bits that were written.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-4..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

struct Section {
    name: &'static str,
    line: usize,
    entries: Vec<(usize, String, String)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Result<Option<(usize, String)>, ScenarioError> {
        let hits: Vec<usize> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.1 == key)
            .map(|(ix, _)| ix)
            .collect();
        if hits.len() > 1 {
            let line = self.entries[hits[1]].0;
            return Err(ScenarioError::Parse {
                line,
                msg: format!("duplicate key `{key}` in [{}]", self.name),
            });
        }
        Ok(hits.first().map(|&ix| {
            let e = self.entries.remove(ix);
            (e.0, e.2)
        }))
    }

    fn req(&mut self, key: &'static str) -> Result<(usize, String), ScenarioError> {
        self.take(key)?.ok_or(ScenarioError::Missing { section: self.name, key })
    }

    fn req_f64(&mut self, key: &'static str) -> Result<f64, ScenarioError> {
        let (line, v) = self.req(key)?;
        parse_f64(line, &v)
    }

    fn req_usize(&mut self, key: &'static str) -> Result<usize, ScenarioError> {
        let (line, v) = self.req(key)?;
        v.parse().map_err(|_| ScenarioError::Parse {
            line,
            msg: format!("expected a nonnegative integer, got `{v}`"),
        })
    }

    fn opt_f64(&mut self, key: &'static str, default: f64) -> Result<f64, ScenarioError> {
        match self.take(key)? {
            Some((line, v)) => parse_f64(line, &v),
            None => Ok(default),
        }
    }

    fn opt_usize(&mut self, key: &'static str, default: usize) -> Result<usize, ScenarioError> {
        match self.take(key)? {
            Some((line, v)) => v.parse().map_err(|_| ScenarioError::Parse {
                line,
                msg: format!("expected a nonnegative integer, got `{v}`"),
            }),
            None => Ok(default),
        }
    }

    fn opt_bool(&mut self, key: &'static str, default: bool) -> Result<bool, ScenarioError> {
        match self.take(key)? {
            Some((line, v)) => match v.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(ScenarioError::Parse {
                    line,
                    msg: format!("expected true or false, got `{v}`"),
                }),
            },
            None => Ok(default),
        }
    }

    fn finish(self) -> Result<(), ScenarioError> {
        if let Some((line, key, _)) = self.entries.into_iter().next() {
            return Err(ScenarioError::Parse {
                line,
                msg: format!("unknown key `{key}` in [{}]", self.name),
            });
        }
        Ok(())
    }
}

const SECTION_NAMES: [&str; 6] = ["params", "sensitivity", "grid", "initial", "sim", "analyses"];

fn split_sections(
    text: &str,
) -> Result<(Section, std::collections::BTreeMap<&str, Section>), ScenarioError> {
    let mut header = Section { name: "header", line: 0, entries: Vec::new() };
    let mut sections: std::collections::BTreeMap<&str, Section> = Default::default();
    let mut current: Option<&str> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(inner) = t.strip_prefix('[') {
            let Some(name) = inner.strip_suffix(']') else {
                return Err(ScenarioError::Parse { line, msg: "unterminated section header".into() });
            };
            let name = name.trim();
            let Some(canon) = SECTION_NAMES.iter().find(|s| **s == name) else {
                return Err(ScenarioError::Parse { line, msg: format!("unknown section [{name}]") });
            };
            if sections.contains_key(canon) {
                return Err(ScenarioError::Parse {
                    line,
                    msg: format!("section [{name}] appears twice"),
                });
            }
            sections.insert(canon, Section { name: canon, line, entries: Vec::new() });
            current = Some(canon);
            continue;
        }
        let Some((key, value)) = t.split_once('=') else {
            return Err(ScenarioError::Parse { line, msg: format!("expected key = value, got `{t}`") });
        };
        let entry = (line, key.trim().to_string(), value.trim().to_string());
        match current {
            Some(name) => sections.get_mut(name).unwrap().entries.push(entry),
            None => header.entries.push(entry),
        }
    }
    Ok((header, sections))
}

fn parse_f64(line: usize, v: &str) -> Result<f64, ScenarioError> {
    let x: f64 = v
        .parse()
        .map_err(|_| ScenarioError::Parse { line, msg: format!("expected a number, got `{v}`") })?;
    if !x.is_finite() {
        return Err(ScenarioError::Parse { line, msg: format!("non-finite value `{v}`") });
    }
    Ok(x)
}

/// `name(arg, arg, ...)` or a bare `name`.
fn parse_call(v: &str) -> Option<(&str, Vec<&str>)> {
    match v.split_once('(') {
        None => Some((v.trim(), Vec::new())),
        Some((name, rest)) => {
            let args = rest.strip_suffix(')')?;
            Some((name.trim(), args.split(',').map(str::trim).collect()))
        }
    }
}

fn parse_profile(line: usize, v: &str) -> Result<ProfileForm, ScenarioError> {
    let bad = |msg: String| ScenarioError::Parse { line, msg };
    let (name, args) =
        parse_call(v).ok_or_else(|| bad(format!("malformed profile `{v}`")))?;
    let num = |s: &str| parse_f64(line, s);
    let mode = |s: &str| {
        s.parse::<u32>()
            .map_err(|_| bad(format!("mode index must be a nonnegative integer, got `{s}`")))
    };
    match (name, args.as_slice()) {
        ("constant", [c]) => Ok(ProfileForm::Constant { value: num(c)? }),
        ("cosine", [a, k, c]) => {
            Ok(ProfileForm::Cosine { amp: num(a)?, mode: mode(k)?, offset: num(c)? })
        }
        ("sine", [a, k, c]) => {
            Ok(ProfileForm::Sine { amp: num(a)?, mode: mode(k)?, offset: num(c)? })
        }
        _ => Err(bad(format!(
            "expected constant(c), cosine(amp, mode, offset) or sine(amp, mode, offset), got `{v}`"
        ))),
    }
}

fn parse_sensitivity(line: usize, v: &str) -> Result<SensitivityKind, ScenarioError> {
    let bad = |msg: String| ScenarioError::Parse { line, msg };
    let (name, args) =
        parse_call(v).ok_or_else(|| bad(format!("malformed sensitivity `{v}`")))?;
    match (name, args.as_slice()) {
        ("identity", []) => Ok(SensitivityKind::Identity),
        ("zero", []) => Ok(SensitivityKind::Zero),
        ("rational_volume_fill", []) => Ok(SensitivityKind::RationalVolumeFill),
        ("cutoff_linear", [t]) => {
            Ok(SensitivityKind::CutoffLinear { threshold: parse_f64(line, t)? })
        }
        _ => Err(bad(format!(
            "expected identity, zero, rational_volume_fill or cutoff_linear(threshold), got `{v}`"
        ))),
    }
}

fn sensitivity_text(kind: SensitivityKind) -> String {
    match kind {
        SensitivityKind::Identity => "identity".to_string(),
        SensitivityKind::Zero => "zero".to_string(),
        SensitivityKind::RationalVolumeFill => "rational_volume_fill".to_string(),
        SensitivityKind::CutoffLinear { threshold } => {
            format!("cutoff_linear({})", fmt_f64(threshold))
        }
    }
}

fn parse_method(line: usize, v: &str) -> Result<StepMethod, ScenarioError> {
    match v {
        "euler" => Ok(StepMethod::Euler),
        "rk2" => Ok(StepMethod::Rk2),
        _ => Err(ScenarioError::Parse {
            line,
            msg: format!("expected euler or rk2, got `{v}`"),
        }),
    }
}

fn parse_positivity(line: usize, v: &str) -> Result<PositivityPolicy, ScenarioError> {
    match v {
        "clip" => Ok(PositivityPolicy::ClipToZero),
        "reject" => Ok(PositivityPolicy::RejectStep),
        _ => Err(ScenarioError::Parse {
            line,
            msg: format!("expected clip or reject, got `{v}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample_text() -> String {
        let mut p = ModelParams::baseline();
        p.chi1 = 10.0;
        p.chi2 = 10.0;
        let sc = Scenario {
            name: "sample".into(),
            params: p,
            xi: TaxisSensitivity { kind: SensitivityKind::Identity, clamp_eps: 0.05 },
            eta: TaxisSensitivity { kind: SensitivityKind::RationalVolumeFill, clamp_eps: 0.05 },
            n_cells: 128,
            initial: [
                ProfileSpec::cosine(0.1, 30, 0.35),
                ProfileSpec::sine(0.1, 60, 0.6),
                ProfileSpec::cosine(3.0, 90, 1.6),
            ],
            sim: SimConfig { t_end: 200.0, tol_steady: 1e-3, ..SimConfig::default() },
            analyses: Analyses { run_dispersion: true, ..Analyses::default() },
        };
        sc.to_text()
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = sample_text();
        let a = Scenario::parse(&text).unwrap();
        let b = Scenario::parse(&a.to_text()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());
        assert_eq!(a.params.m, 70.8);
        assert_eq!(a.initial[1].form, ProfileForm::Sine { amp: 0.1, mode: 60, offset: 0.6 });
        assert!(a.analyses.run_dispersion);
    }

    #[test]
    fn round_trips_the_awkward_variants() {
        let mut p = ModelParams::baseline();
        p.p = 4.0;
        p.gamma = 0.5;
        p.eps_reg = 1e-9;
        let sc = Scenario {
            name: "variants".into(),
            params: p,
            xi: TaxisSensitivity { kind: SensitivityKind::CutoffLinear { threshold: 2.5 }, clamp_eps: 1e-6 },
            eta: TaxisSensitivity { kind: SensitivityKind::Zero, clamp_eps: 1e-6 },
            n_cells: 64,
            initial: [
                ProfileSpec::constant(75.0),
                ProfileSpec {
                    form: ProfileForm::Cosine { amp: 3e-6, mode: 1, offset: 3e-6 },
                    clamp: false,
                },
                ProfileSpec::constant(0.0),
            ],
            sim: SimConfig {
                t_end: 0.5,
                dt_max: 2e-5,
                method: StepMethod::Euler,
                positivity: PositivityPolicy::RejectStep,
                ..SimConfig::default()
            },
            analyses: Analyses {
                run_sim: false,
                run_dispersion: false,
                run_fte_report: true,
                k_max: 10,
            },
        };
        let back = Scenario::parse(&sc.to_text()).unwrap();
        assert_eq!(sc, back);
    }

    #[test]
    fn unknown_key_is_rejected_with_its_line() {
        let mut text = sample_text();
        text.push_str("\n[analyses]\n");
        // appending a second [analyses] is caught first
        let err = Scenario::parse(&text).unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { msg, .. } if msg.contains("twice")));

        let text = sample_text().replace("r = 5", "r = 5\nbogus = 1");
        let err = Scenario::parse(&text).unwrap_err();
        match err {
            ScenarioError::Parse { line, msg } => {
                assert!(msg.contains("unknown key `bogus`"), "{msg}");
                assert_eq!(line, 5);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn missing_key_and_section_are_reported() {
        let text = sample_text().replace("mu = 3.4\n", "");
        match Scenario::parse(&text).unwrap_err() {
            ScenarioError::Missing { section, key } => {
                assert_eq!((section, key), ("params", "mu"));
            }
            other => panic!("{other}"),
        }
        let text: String = sample_text()
            .lines()
            .skip_while(|l| !l.starts_with("[sensitivity]"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(matches!(
            Scenario::parse(&format!("name = x\n{text}")),
            Err(ScenarioError::MissingSection("params"))
        ));
    }

    #[test]
    fn malformed_values_are_rejected() {
        let text = sample_text().replace("lambda = 3", "lambda = three");
        assert!(matches!(
            Scenario::parse(&text),
            Err(ScenarioError::Parse { msg, .. }) if msg.contains("expected a number")
        ));
        let text = sample_text().replace("method = rk2", "method = rk7");
        assert!(matches!(Scenario::parse(&text), Err(ScenarioError::Parse { .. })));
        let text = sample_text().replace("s = cosine(0.1, 30, 0.35)", "s = cosine(0.1, 30)");
        assert!(matches!(Scenario::parse(&text), Err(ScenarioError::Parse { .. })));
        let text = sample_text().replace("lambda = 3", "lambda = -1");
        assert!(matches!(Scenario::parse(&text), Err(ScenarioError::Invalid(_))));
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let text = sample_text().replace("a = 12", "a = 12\na = 13");
        assert!(matches!(
            Scenario::parse(&text),
            Err(ScenarioError::Parse { msg, .. }) if msg.contains("duplicate")
        ));
    }

    #[test]
    fn profiles_sample_neumann_modes() {
        let grid = Grid1D::new(256, 30.0 * PI).unwrap();
        let (p, clipped) = ProfileSpec::cosine(3.0, 90, 1.6).sample(&grid);
        // mode 90 on l = 30 pi is cos(3x); the trough is clamped at zero
        assert!(clipped > 0.0);
        assert!(p.iter().all(|&v| v >= 0.0));
        let xs = grid.cell_centers();
        for (j, x) in xs.iter().enumerate() {
            let want = (3.0 * (3.0 * x).cos() + 1.6).max(0.0);
            assert_relative_eq!(p[j], want, max_relative = 1e-12, epsilon = 1e-12);
        }
        // mode 0 degenerates to a constant
        let (c, z) = ProfileSpec::cosine(0.5, 0, 1.0).sample(&grid);
        assert!(z == 0.0 && c.iter().all(|&v| v == 1.5));
        let (s, _) = ProfileSpec::sine(0.5, 0, 0.25).sample(&grid);
        assert!(s.iter().all(|&v| v == 0.25));
    }

    #[test]
    fn unclamped_profile_keeps_negative_samples() {
        let grid = Grid1D::new(64, 10.0).unwrap();
        let spec = ProfileSpec { form: ProfileForm::Cosine { amp: 2.0, mode: 2, offset: 0.0 }, clamp: false };
        let (vals, clipped) = spec.sample(&grid);
        assert_eq!(clipped, 0.0);
        assert!(vals.iter().any(|&v| v < 0.0));
    }

    #[test]
    fn set_param_field_revalidates() {
        let mut sc = Scenario::parse(&sample_text()).unwrap();
        sc.set_param_field("lambda", 0.2).unwrap();
        assert_eq!(sc.params.lambda, 0.2);
        assert!(sc.set_param_field("bogus", 1.0).is_err());
        assert!(sc.set_param_field("gamma", 1.5).is_err());
    }

    #[test]
    fn rejected_edit_leaves_the_scenario_untouched() {
        let mut sc = Scenario::parse(&sample_text()).unwrap();
        let before = sc.clone();
        assert!(sc.set_param_field("mu", -1.0).is_err());
        assert!(sc.set_param_field("gamma", 2.0).is_err());
        assert_eq!(sc.params.mu, before.params.mu);
        assert_eq!(sc.params.gamma, before.params.gamma);
        // The text form still validates and round-trips.
        let reparsed: Scenario = sc.to_text().parse().unwrap();
        assert_eq!(reparsed, before);
    }

    #[test]
    fn initial_state_matches_grid() {
        let sc = Scenario::parse(&sample_text()).unwrap();
        let grid = sc.grid().unwrap();
        let (state, clipped) = sc.initial_state(&grid);
        assert_eq!(state.n_cells(), 128);
        assert!(clipped[2] > 0.0); // the predator trough
        assert_eq!(clipped[0], 0.0);
    }
}
