//! Mode-by-mode linear stability of the coexistence state and the taxis
//! thresholds where it is lost.
//!
//! Linearizing the kinetics at E* and restricting to the Neumann mode
//! cos(k*pi*x/l) reduces the PDE to the 3x3 matrix M_k = J - mu_k*D with
//! mu_k = (k*pi/l)^2. The mode is stable exactly when the characteristic
//! polynomial x^3 + A_k x^2 + B_k x + C_k satisfies the Routh-Hurwitz
//! conditions A_k > 0, C_k > 0, P_k = A_k*B_k - C_k > 0.
//!
//! All coefficients here are computed definitionally from M_k (trace,
//! principal minors, determinant) because determinants cannot drift. The
//! closed-form mu-polynomial expansions of the same quantities are kept as
//! a cross-check; they disagree with the determinant path in the sign and
//! shape of some chi2 terms and (for P_k) when delta1 != delta2, and every
//! gap is recorded in the output rather than silently reconciled.
//!
//! Everything below assumes chi1 = 0 and gamma = 1; no linear theory is
//! offered for the S-taxis term or sublinear mortality.

use crate::equilibrium::{Equilibrium, JacobianEntries};
use crate::params::ModelParams;
use crate::roots::{max_real_part, quadratic_real_roots};
use thiserror::Error;

/// Routh-Hurwitz classification of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    /// C_k = 0 within tolerance with A_k, B_k > 0: a real eigenvalue sits at
    /// zero, the onset of a stationary pattern.
    SteadyStateCritical,
    /// P_k = 0 within tolerance with A_k, C_k > 0: a purely imaginary pair,
    /// the onset of oscillations.
    HopfCritical,
    Unstable,
}

impl Verdict {
    /// Token used in CSV output.
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::SteadyStateCritical => "steady_critical",
            Verdict::HopfCritical => "hopf_critical",
            Verdict::Unstable => "unstable",
        }
    }
}

/// |definitional - expanded| per characteristic coefficient, reported so the
/// known drift of the closed-form expansions stays visible in artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoeffGap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p: f64,
}

impl CoeffGap {
    pub fn max_component(&self) -> f64 {
        self.a.max(self.b).max(self.c).max(self.p)
    }
}

/// Characteristic data of one Neumann mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRecord {
    pub k: usize,
    /// (k*pi/l)^2.
    pub mu_k: f64,
    pub a_k: f64,
    pub b_k: f64,
    pub c_k: f64,
    /// A_k*B_k - C_k, the Routh-Hurwitz product.
    pub p_k: f64,
    /// Largest real part over the three eigenvalues of the mode matrix.
    pub max_real_eig: f64,
    pub verdict: Verdict,
    /// Gap against the closed-form coefficient expansions (cross-check only).
    pub expanded_gap: CoeffGap,
}

/// M_k = J - mu_k * D, where D carries the diffusion coefficients on the
/// diagonal and the cross-diffusion entry -chi2*eta(P*)*P* at (3,2). chi2 is
/// explicit (rather than read from params) because threshold solving varies
/// it with everything else frozen.
pub fn mode_matrix(
    params: &ModelParams,
    jac: &JacobianEntries,
    k: usize,
    chi2: f64,
) -> [[f64; 3]; 3] {
    let mu = params.neumann_eigenvalue(k);
    [
        [jac.a11 - mu * params.delta1, jac.a12, jac.a13],
        [jac.a21, jac.a22 - mu * params.delta2, jac.a23],
        [jac.a31, jac.a32 + mu * chi2 * jac.eta_p_star, jac.a33 - mu * params.delta3],
    ]
}

/// (A, B, C) of det(xI - M) = x^3 + A x^2 + B x + C: A = -tr(M), B = sum of
/// principal 2x2 minors, C = -det(M).
fn char_poly(m: &[[f64; 3]; 3]) -> (f64, f64, f64) {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minor = |i: usize, j: usize| m[i][i] * m[j][j] - m[i][j] * m[j][i];
    let b = minor(0, 1) + minor(0, 2) + minor(1, 2);
    let det = m[0][0] * minor(1, 2) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    (-tr, b, -det)
}

/// Routh-Hurwitz verdict with a relative tolerance band around the two
/// bifurcation boundaries C_k = 0 and P_k = 0.
pub fn classify(a: f64, b: f64, c: f64, p: f64) -> Verdict {
    let tol = 1e-12 * (1.0 + a.abs() + b.abs() + c.abs());
    if a > tol && b > tol && c.abs() <= tol {
        Verdict::SteadyStateCritical
    } else if a > tol && c > tol && p.abs() <= tol {
        Verdict::HopfCritical
    } else if a > tol && c > tol && p > tol {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}

/// Full characteristic record of mode k at the given chi2.
pub fn char_coefficients(
    params: &ModelParams,
    eq: &Equilibrium,
    jac: &JacobianEntries,
    k: usize,
    chi2: f64,
) -> ModeRecord {
    let m = mode_matrix(params, jac, k, chi2);
    let (a, b, c) = char_poly(&m);
    let p = a * b - c;
    let (ea, eb, ec, ep) = expanded_coefficients(params, eq, jac, k, chi2);
    ModeRecord {
        k,
        mu_k: params.neumann_eigenvalue(k),
        a_k: a,
        b_k: b,
        c_k: c,
        p_k: p,
        max_real_eig: max_real_part(a, b, c),
        verdict: classify(a, b, c, p),
        expanded_gap: CoeffGap {
            a: (a - ea).abs(),
            b: (b - eb).abs(),
            c: (c - ec).abs(),
            p: (p - ep).abs(),
        },
    }
}

// Constants of the mu-polynomial coefficient expansions. script_a/b/c/p are
// the mu = 0 (temporal) coefficients; w* and m* multiply the mu powers of
// C_k and P_k respectively.
struct Expansion {
    r_sk: f64, // r*S*/K = -a11
    pred: f64, // m*I*P*/(a+I*)^2 = a22
    script_a: f64,
    script_b: f64,
    script_c: f64,
    script_p: f64,
    w: [f64; 3],
    m: [f64; 3],
}

fn expansion(params: &ModelParams, eq: &Equilibrium) -> Expansion {
    let (d1, d2, d3) = (params.delta1, params.delta2, params.delta3);
    let sum_d = d1 + d2 + d3;
    let denom2 = (params.a + eq.i_star).powi(2);
    let r_sk = params.r * eq.s_star / params.k;
    let pred = params.m * eq.i_star * eq.p_star / denom2;
    let a32 = params.a * params.m * eq.p_star / denom2;
    let cross = (params.r / params.k + params.lambda) * eq.s_star * eq.i_star * params.lambda;
    let script_a = r_sk - pred;
    let script_b = a32 * params.d - r_sk * pred + cross;
    let script_c = params.r * params.m * params.a * eq.s_star * eq.p_star * params.d
        / (params.k * denom2);
    let script_p = script_a * script_b - script_c;
    let w = [
        d1 * d2 * d3,
        d2 * d3 * r_sk - d1 * d3 * pred,
        a32 * params.d * d1 + (cross - r_sk * pred) * d3,
    ];
    let (a11, a22, a33) = (-r_sk, pred, 0.0);
    let a12 = -(params.r / params.k + params.lambda) * eq.s_star;
    let a21 = params.lambda * eq.i_star;
    let a23 = -params.d;
    // the second bracket reads delta2 where symmetry suggests delta1; kept
    // verbatim, so m[1] drifts from the determinant path when delta1 != delta2
    let m2 = -((a11 + a22) * (d3 * sum_d + d1 * d2)
        + (a22 + a33) * (d2 * sum_d + d2 * d3)
        + (a11 + a33) * (d2 * sum_d + d1 * d3));
    let m3 = d1 * (script_b - script_a * a22 + a23 * a32)
        + d2 * (script_b - script_a * a11)
        + d3 * (script_b - script_a * (a11 + a22) - (a11 * a22 - a12 * a21));
    Expansion {
        r_sk,
        pred,
        script_a,
        script_b,
        script_c,
        script_p,
        w,
        m: [sum_d * (d1 * d2 + d2 * d3 + d3 * d1) - d1 * d2 * d3, m2, m3],
    }
}

/// The closed-form expansions of (A_k, B_k, C_k, P_k) in powers of mu_k.
///
/// Cross-check path only. Known divergences from the determinant path: the
/// chi2 terms of B_k and C_k enter here with the opposite sign and, in C_k,
/// a different mu structure; P_k's mu^2 coefficient mismatches when
/// delta1 != delta2. At chi2 = 0 with delta1 = delta2 the two paths agree to
/// rounding.
pub fn expanded_coefficients(
    params: &ModelParams,
    eq: &Equilibrium,
    jac: &JacobianEntries,
    k: usize,
    chi2: f64,
) -> (f64, f64, f64, f64) {
    let x = expansion(params, eq);
    let (d1, d2, d3) = (params.delta1, params.delta2, params.delta3);
    let mu = params.neumann_eigenvalue(k);
    let hp = chi2 * jac.eta_p_star;
    let ea = (d1 + d2 + d3) * mu + x.script_a;
    let eb = (d1 * d2 + d2 * d3 + d3 * d1) * mu * mu
        + mu * ((d2 + d3) * x.r_sk - (d1 + d3) * x.pred)
        + x.script_b
        - hp * params.d;
    let ec = x.w[0] * mu.powi(3) + x.w[1] * mu * mu + x.w[2] * mu + x.script_c
        - hp * (d3 * mu + x.r_sk * params.d);
    let ep = x.m[0] * mu.powi(3) + x.m[1] * mu * mu + x.m[2] * mu + x.script_p
        - ((d1 + d2) * params.d + d3 * (params.d - 1.0)) * hp * mu
        - hp * params.d * (2.0 * x.r_sk - x.pred);
    (ea, eb, ec, ep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ThresholdError {
    /// The threshold equation has no chi2 dependence (k = 0, or the eta
    /// factor vanishes at E*).
    #[error("mode {k}: chi2 coefficient of the threshold equation vanishes")]
    DegenerateDenominator { k: usize },
    #[error("mode {k}: no positive chi2 root")]
    NoPositiveRoot { k: usize },
}

/// chi2 at which C_k = 0: a real eigenvalue of mode k crosses zero.
///
/// C_k is exactly affine in chi2 (the cross-diffusion entry appears linearly
/// in the determinant), so two evaluations determine the root. The sign of
/// the slope is d*mu_k*eta(P*)P**(delta1*mu_k + r*S*/K) > 0; with C_k(0) > 0
/// that makes every root negative, which is returned as-is and left to the
/// caller to flag as non-physical.
pub fn chi2_steady(
    params: &ModelParams,
    jac: &JacobianEntries,
    k: usize,
) -> Result<f64, ThresholdError> {
    let c_at = |chi: f64| char_poly(&mode_matrix(params, jac, k, chi)).2;
    let c0 = c_at(0.0);
    let slope = c_at(1.0) - c0;
    if slope.abs() <= 1e-14 * (1.0 + c0.abs()) {
        return Err(ThresholdError::DegenerateDenominator { k });
    }
    Ok(-c0 / slope)
}

/// Smallest positive chi2 at which P_k = 0: a complex pair of mode k crosses
/// the imaginary axis.
///
/// Solved as a quadratic through three evaluations. Since A_k is chi2-free
/// and B_k, C_k are affine, P_k = A_k*B_k - C_k is itself affine and the
/// quadratic coefficient vanishes to rounding; the general solve is kept so
/// the degeneracy is handled by measurement instead of assumption.
pub fn chi2_hopf(
    params: &ModelParams,
    jac: &JacobianEntries,
    k: usize,
) -> Result<f64, ThresholdError> {
    let p_at = |chi: f64| {
        let (a, b, c) = char_poly(&mode_matrix(params, jac, k, chi));
        a * b - c
    };
    let p0 = p_at(0.0);
    let p1 = p_at(1.0);
    let p2 = p_at(2.0);
    let scale = 1.0 + p0.abs().max(p1.abs()).max(p2.abs());
    let mut quad = 0.5 * (p0 - 2.0 * p1 + p2);
    if quad.abs() <= 1e-10 * scale {
        quad = 0.0;
    }
    let lin = p1 - p0 - quad;
    if quad == 0.0 && lin.abs() <= 1e-14 * scale {
        return Err(ThresholdError::DegenerateDenominator { k });
    }
    quadratic_real_roots(quad, lin, p0)
        .into_iter()
        .filter(|x| *x > 0.0)
        .fold(None, |best: Option<f64>, x| Some(best.map_or(x, |b| b.min(x))))
        .ok_or(ThresholdError::NoPositiveRoot { k })
}

/// Closed-form steady-state threshold display. Cross-check only: besides the
/// chi2-term sign issue inherited from the expanded C_k, its denominator
/// carries delta3 without the mu_k factor that solving the expanded C_k = 0
/// would give. Values can differ from [`chi2_steady`] in sign and magnitude.
pub fn expanded_chi2_steady(
    params: &ModelParams,
    eq: &Equilibrium,
    jac: &JacobianEntries,
    k: usize,
) -> f64 {
    let x = expansion(params, eq);
    let mu = params.neumann_eigenvalue(k);
    let numer = x.w[0] * mu.powi(3) + x.w[1] * mu * mu + x.w[2] * mu + x.script_c;
    numer / (jac.eta_p_star * (x.r_sk * params.d + params.delta3))
}

/// Closed-form Hopf threshold display: an affine solve whose numerator keeps
/// only the mu-free part of P_k. Cross-check only.
pub fn expanded_chi2_hopf(
    params: &ModelParams,
    eq: &Equilibrium,
    jac: &JacobianEntries,
    k: usize,
) -> f64 {
    let x = expansion(params, eq);
    let mu = params.neumann_eigenvalue(k);
    let (d1, d2, d3) = (params.delta1, params.delta2, params.delta3);
    let bracket = ((d1 + d2) * params.d + d3 * (params.d - 1.0)) * mu
        + params.d * (2.0 * x.r_sk - x.pred);
    x.script_p / (jac.eta_p_star * bracket)
}

/// Outcome of a mode sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanSummary {
    AllStable,
    /// Smallest k whose mode is not strictly stable, with the first
    /// Routh-Hurwitz quantity (in the order A_k, C_k, P_k) that is not
    /// positive there.
    FirstUnstable { k: usize, failed: FailedCondition },
}

/// Which Routh-Hurwitz quantity broke: A_k = -trace, C_k = -determinant, or
/// the product P_k = A_k*B_k - C_k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailedCondition {
    CoeffA,
    CoeffC,
    CoeffP,
}

/// Records for k = 0..=k_max plus the first instability, if any.
pub fn scan_modes(
    params: &ModelParams,
    eq: &Equilibrium,
    jac: &JacobianEntries,
    k_max: usize,
    chi2: f64,
) -> (Vec<ModeRecord>, ScanSummary) {
    let records: Vec<ModeRecord> =
        (0..=k_max).map(|k| char_coefficients(params, eq, jac, k, chi2)).collect();
    let summary = records
        .iter()
        .find(|r| r.verdict != Verdict::Stable)
        .map_or(ScanSummary::AllStable, |r| {
            let tol = 1e-12 * (1.0 + r.a_k.abs() + r.b_k.abs() + r.c_k.abs());
            let failed = if r.a_k <= tol {
                FailedCondition::CoeffA
            } else if r.c_k <= tol {
                FailedCondition::CoeffC
            } else {
                FailedCondition::CoeffP
            };
            ScanSummary::FirstUnstable { k: r.k, failed }
        });
    (records, summary)
}

/// Per-k thresholds plus the critical mode: the k >= 1 with the smallest
/// positive steady-state threshold. Entries are None where the solve fails
/// (k = 0 always, NoPositiveRoot for Hopf).
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationThresholds {
    /// Indexed by k, 0..=k_max; entry k=0 is None.
    pub chi2_steady_of_k: Vec<Option<f64>>,
    pub chi2_hopf_of_k: Vec<Option<f64>>,
    pub k_critical: Option<usize>,
    pub chi2_critical: Option<f64>,
}

impl BifurcationThresholds {
    /// Smallest positive Hopf threshold, for reporting alongside the
    /// steady-state critical pair.
    pub fn first_hopf(&self) -> Option<(usize, f64)> {
        self.chi2_hopf_of_k
            .iter()
            .enumerate()
            .filter_map(|(k, v)| v.filter(|x| *x > 0.0).map(|x| (k, x)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
    }
}

pub fn bifurcation_thresholds(
    params: &ModelParams,
    jac: &JacobianEntries,
    k_max: usize,
) -> BifurcationThresholds {
    let mut steady = vec![None; k_max + 1];
    let mut hopf = vec![None; k_max + 1];
    for k in 1..=k_max {
        steady[k] = chi2_steady(params, jac, k).ok();
        hopf[k] = chi2_hopf(params, jac, k).ok();
    }
    let critical = steady
        .iter()
        .enumerate()
        .filter_map(|(k, v)| v.filter(|x| *x > 0.0).map(|x| (k, x)))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    BifurcationThresholds {
        chi2_steady_of_k: steady,
        chi2_hopf_of_k: hopf,
        k_critical: critical.map(|(k, _)| k),
        chi2_critical: critical.map(|(_, x)| x),
    }
}

/// Null-vector components of the critical mode: the kernel of M_k is spanned
/// by (lambda_k, zeta_k, 1) in (S, I, P) order when C_k(chi2) = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeShape {
    pub lambda_k: f64,
    pub zeta_k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error("mode {k}: null-vector formula denominator vanishes")]
    SingularFormula { k: usize },
}

/// Kernel components at an explicit chi2, from row elimination of M_k:
/// zeta from the P row, lambda from the I row. The vector annihilates all
/// three rows only where C_k(chi2) = 0.
pub fn mode_shape_at(
    params: &ModelParams,
    eq: &Equilibrium,
    jac: &JacobianEntries,
    k: usize,
    chi2: f64,
) -> Result<ModeShape, ShapeError> {
    let mu = params.neumann_eigenvalue(k);
    let denom = chi2 * jac.eta_p_star * mu + jac.a32;
    if denom.abs() <= 1e-14 * (1.0 + jac.a32.abs()) {
        return Err(ShapeError::SingularFormula { k });
    }
    let zeta_k = params.delta3 * mu / denom;
    let lambda_k =
        (params.d + (params.delta2 * mu - jac.a22) * zeta_k) / (params.lambda * eq.i_star);
    Ok(ModeShape { lambda_k, zeta_k })
}

/// Mode shape evaluated at chi2 = [`chi2_steady`]`(k)`, where it spans the
/// kernel of the mode matrix.
pub fn bifurcation_mode_shape(
    params: &ModelParams,
    eq: &Equilibrium,
    jac: &JacobianEntries,
    k: usize,
) -> Result<ModeShape, ShapeError> {
    let chi2 = chi2_steady(params, jac, k)?;
    mode_shape_at(params, eq, jac, k, chi2)
}

/// Closed-form mode-shape display. Cross-check only: relative to the row
/// elimination it carries eta(P*) without the P* factor in zeta's
/// denominator and delta1 in place of delta2 in lambda, so it does not
/// annihilate M_k. Kept verbatim and reported next to [`mode_shape_at`].
pub fn expanded_mode_shape(
    params: &ModelParams,
    eq: &Equilibrium,
    jac: &JacobianEntries,
    k: usize,
    chi2: f64,
) -> Result<ModeShape, ShapeError> {
    let mu = params.neumann_eigenvalue(k);
    let denom = chi2 * jac.eta_star * mu + jac.a32;
    if denom.abs() <= 1e-14 * (1.0 + jac.a32.abs()) {
        return Err(ShapeError::SingularFormula { k });
    }
    let zeta_k = params.delta3 * mu / denom;
    let lambda_k =
        ((params.delta1 * mu - jac.a22) * zeta_k + params.d) / (params.lambda * eq.i_star);
    Ok(ModeShape { lambda_k, zeta_k })
}

/// One row of the dispersion artifact: the mode record plus both thresholds
/// (None where the solve reports an error).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRow {
    pub record: ModeRecord,
    pub chi2_s: Option<f64>,
    pub chi2_h: Option<f64>,
}

pub fn dispersion_table(
    params: &ModelParams,
    eq: &Equilibrium,
    jac: &JacobianEntries,
    k_max: usize,
    chi2: f64,
) -> Vec<DispersionRow> {
    (0..=k_max)
        .map(|k| DispersionRow {
            record: char_coefficients(params, eq, jac, k, chi2),
            chi2_s: chi2_steady(params, jac, k).ok(),
            chi2_h: chi2_hopf(params, jac, k).ok(),
        })
        .collect()
}
