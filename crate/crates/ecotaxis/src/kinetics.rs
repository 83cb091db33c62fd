use crate::params::ModelParams;

/// Pointwise reaction terms (f1, f2, f3):
///
/// ```text
/// f1 = r*S*(1 - (S+I)/K) - lambda*S*I
/// f2 = lambda*S*I - m*P*I/(a+I) - mu*I^gamma
/// f3 = m*I*P/(a+I) - d*P
/// ```
///
/// Total on nonnegative inputs. I^gamma is evaluated exactly (0 at I = 0 for
/// any gamma > 0) and never linearized; its unbounded slope near zero is the
/// mechanism behind finite-time extinction and is handled by step control,
/// not by smoothing.
pub fn reaction_terms(s: f64, i: f64, p_dens: f64, params: &ModelParams) -> (f64, f64, f64) {
    let infection = params.lambda * s * i;
    let predation = params.m * p_dens * i / (params.a + i);
    let f1 = params.r * s * (1.0 - (s + i) / params.k) - infection;
    let f2 = infection - predation - params.mu * pow_gamma(i, params.gamma);
    let f3 = predation - params.d * p_dens;
    (f1, f2, f3)
}

/// i^gamma with exact special cases: identity when gamma = 1, zero at i <= 0.
/// Transient negative undershoots (before the positivity policy clips them)
/// must not produce NaN from a fractional power of a negative base.
pub(crate) fn pow_gamma(i: f64, gamma: f64) -> f64 {
    if gamma == 1.0 {
        i
    } else if i <= 0.0 {
        0.0
    } else {
        i.powf(gamma)
    }
}
