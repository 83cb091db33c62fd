use crate::params::ModelParams;
use crate::sensitivity::TaxisSensitivity;
use thiserror::Error;

/// The positive coexistence state E* = (S*, I*, P*), with the two feasibility
/// and stability-sufficiency flags evaluated at construction.
///
/// Closed forms:
/// ```text
/// I* = a*d/(m - d)
/// S* = K - a*d*(r + lambda*K) / (r*(m - d))
/// P* = (a + I*)*(lambda*S* - mu) / m
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub s_star: f64,
    pub i_star: f64,
    pub p_star: f64,
    /// Feasibility: lambda*K > mu and m > d + lambda*a*d*(r+lambda*K)/(r*(lambda*K-mu)).
    /// Always true on a successfully constructed value.
    pub h1_holds: bool,
    /// The stronger pair of inequalities sufficient for temporal stability
    /// claims; see [`check_h2`]. Informational only: it is neither necessary
    /// nor (empirically) sufficient for eigenvalue stability.
    pub h2_holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Infeasible {
    /// lambda*K <= mu: infection cannot sustain itself even at carrying capacity.
    #[error("no positive equilibrium: lambda*K = {lambda_k} <= mu = {mu}")]
    TransmissionBelowMortality { lambda_k: f64, mu: f64 },
    /// m below the feasibility threshold d + lambda*a*d*(r+lambda*K)/(r*(lambda*K-mu)).
    #[error("no positive equilibrium: m = {m} <= feasibility bound {bound}")]
    PredationBelowThreshold { m: f64, bound: f64 },
    /// m = d puts I* = a*d/(m-d) on its pole.
    #[error("degenerate parameters: m = d, I* is undefined")]
    PredationEqualsDeath,
}

/// Closed-form positive equilibrium, or which feasibility inequality failed.
pub fn equilibrium(params: &ModelParams) -> Result<Equilibrium, Infeasible> {
    let lambda_k = params.lambda_k();
    if lambda_k <= params.mu {
        return Err(Infeasible::TransmissionBelowMortality { lambda_k, mu: params.mu });
    }
    if params.m == params.d {
        return Err(Infeasible::PredationEqualsDeath);
    }
    let bound = params.d
        + params.lambda * params.a * params.d * (params.r + lambda_k)
            / (params.r * (lambda_k - params.mu));
    if params.m <= bound {
        return Err(Infeasible::PredationBelowThreshold { m: params.m, bound });
    }
    let i_star = params.a * params.d / (params.m - params.d);
    let s_star = params.k
        - params.a * params.d * (params.r + lambda_k) / (params.r * (params.m - params.d));
    let p_star = (params.a + i_star) * (params.lambda * s_star - params.mu) / params.m;
    let mut eq = Equilibrium { s_star, i_star, p_star, h1_holds: true, h2_holds: false };
    eq.h2_holds = check_h2(params, &eq);
    Ok(eq)
}

/// The sufficient-condition pair used by the classical (gamma = 1, spatially
/// homogeneous) stability statement:
///
/// ```text
/// m > max[ d + lambda*a*d*(r+lambda*K)/(r*(lambda*K-mu)),  d*lambda*K/r ]
/// (r/K + lambda)*S**I**lambda > 2*r*m*S**I**P* / (K*(a+I*)^2)
/// ```
///
/// Evaluated verbatim. Random sampling shows it is not equivalent to
/// eigenvalue stability in either direction, so nothing here asserts such an
/// equivalence; callers should consult the mode-matrix eigenvalues.
pub fn check_h2(params: &ModelParams, eq: &Equilibrium) -> bool {
    let lambda_k = params.lambda_k();
    if lambda_k <= params.mu || params.m == params.d {
        return false;
    }
    let feas = params.d
        + params.lambda * params.a * params.d * (params.r + lambda_k)
            / (params.r * (lambda_k - params.mu));
    let ratio = params.d * lambda_k / params.r;
    if params.m <= feas.max(ratio) {
        return false;
    }
    let lhs = (params.r / params.k + params.lambda) * eq.s_star * eq.i_star * params.lambda;
    let rhs = 2.0 * params.r * params.m * eq.s_star * eq.i_star * eq.p_star
        / (params.k * (params.a + eq.i_star).powi(2));
    lhs > rhs
}

/// Linearization of the kinetics at E* together with the diffusion/taxis
/// matrix D of the spatial part. Valid only for gamma = 1; for gamma < 1 the
/// mortality term is not differentiable at densities approaching zero along
/// the extinction path, and no linear theory is offered here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianEntries {
    pub a11: f64,
    pub a12: f64,
    pub a13: f64,
    pub a21: f64,
    pub a22: f64,
    pub a23: f64,
    pub a31: f64,
    pub a32: f64,
    pub a33: f64,
    /// eta(P*), the eta sensitivity value at the equilibrium.
    pub eta_star: f64,
    /// eta(P*) * P*, the factor carried by the cross-diffusion entry of D.
    pub eta_p_star: f64,
    /// D = [[delta1,0,0],[0,delta2,0],[0, -chi2*eta(P*)*P*, delta3]] with the
    /// chi2 configured in the parameters.
    pub d_matrix: [[f64; 3]; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JacobianError {
    #[error("linearization requires gamma = 1 (got {gamma})")]
    GammaNotOne { gamma: f64 },
}

/// Jacobian of the kinetics at a feasible equilibrium, with the taxis factor
/// evaluated through the configured eta sensitivity.
///
/// ```text
/// a11 = -r*S*/K     a12 = -(r/K + lambda)*S*    a13 = 0
/// a21 = lambda*I*   a22 = m*I*P*/(a+I*)^2       a23 = -d
/// a31 = 0           a32 = a*m*P*/(a+I*)^2       a33 = 0
/// ```
///
/// a23 = -d uses m*I*/(a+I*) = d, which holds exactly at E*.
pub fn jacobian_at(
    params: &ModelParams,
    eq: &Equilibrium,
    eta: &TaxisSensitivity,
) -> Result<JacobianEntries, JacobianError> {
    if params.gamma != 1.0 {
        return Err(JacobianError::GammaNotOne { gamma: params.gamma });
    }
    let denom = (params.a + eq.i_star).powi(2);
    let eta_star = eta.value(eq.p_star);
    let eta_p_star = eta_star * eq.p_star;
    Ok(JacobianEntries {
        a11: -params.r * eq.s_star / params.k,
        a12: -(params.r / params.k + params.lambda) * eq.s_star,
        a13: 0.0,
        a21: params.lambda * eq.i_star,
        a22: params.m * eq.i_star * eq.p_star / denom,
        a23: -params.d,
        a31: 0.0,
        a32: params.a * params.m * eq.p_star / denom,
        a33: 0.0,
        eta_star,
        eta_p_star,
        d_matrix: [
            [params.delta1, 0.0, 0.0],
            [0.0, params.delta2, 0.0],
            [0.0, -params.chi2 * eta_p_star, params.delta3],
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn baseline_closed_forms() {
        let eq = equilibrium(&ModelParams::baseline()).unwrap();
        assert_relative_eq!(eq.i_star, 99.6 / 62.5, max_relative = 1e-14);
        assert_relative_eq!(eq.s_star, 75.0 - 22908.0 / 312.5, max_relative = 1e-12);
        assert_relative_eq!(eq.p_star, 13.5936 * (3.0 * 1.6944 - 3.4) / 70.8, max_relative = 1e-12);
        assert!(eq.h1_holds);
        // the ratio clause fails at the baseline: d*lambda*K/r = 373.5 > m
        assert!(!eq.h2_holds);
    }

    #[test]
    fn weak_predation_is_infeasible_with_computed_bound() {
        let mut p = ModelParams::baseline();
        p.m = 60.0;
        match equilibrium(&p).unwrap_err() {
            Infeasible::PredationBelowThreshold { m, bound } => {
                assert_eq!(m, 60.0);
                assert_relative_eq!(bound, 70.32527075812274, max_relative = 1e-12);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn transmission_boundary_is_infeasible() {
        let mut p = ModelParams::baseline();
        p.lambda = p.mu / p.k; // lambda*K = mu exactly
        assert!(matches!(
            equilibrium(&p).unwrap_err(),
            Infeasible::TransmissionBelowMortality { .. }
        ));
    }

    #[test]
    fn predation_death_pole() {
        let mut p = ModelParams::baseline();
        p.m = p.d;
        assert_eq!(equilibrium(&p).unwrap_err(), Infeasible::PredationEqualsDeath);
    }

    #[test]
    fn h2_holds_on_the_persistent_set() {
        let p = ModelParams::stable_coexistence();
        let eq = equilibrium(&p).unwrap();
        assert!(eq.h2_holds);
        assert_relative_eq!(eq.s_star, 27.857142857142858, max_relative = 1e-13);
        assert_relative_eq!(eq.i_star, 10.0 / 7.0, max_relative = 1e-14);
        assert_relative_eq!(eq.p_star, 15.612244897959181, max_relative = 1e-13);
    }

    #[test]
    fn jacobian_baseline_entries() {
        let p = ModelParams::baseline();
        let eq = equilibrium(&p).unwrap();
        let eta = TaxisSensitivity::rational_volume_fill(1e-6);
        let j = jacobian_at(&p, &eq, &eta).unwrap();
        assert_relative_eq!(j.a11, -0.112960, max_relative = 1e-10);
        assert_relative_eq!(j.a12, -5.19616, max_relative = 1e-10);
        assert_relative_eq!(j.a21, 4.7808, max_relative = 1e-12);
        assert_relative_eq!(j.a22, 0.19732429378530633, max_relative = 1e-12);
        assert_eq!(j.a23, -8.3);
        assert_relative_eq!(j.a32, 1.485875706214656, max_relative = 1e-12);
        assert_eq!((j.a13, j.a31, j.a33), (0.0, 0.0, 0.0));
        assert_relative_eq!(j.eta_p_star, 0.15431108518258504, max_relative = 1e-12);
        assert_eq!(j.d_matrix[2][1], 0.0); // baseline chi2 = 0
    }

    #[test]
    fn jacobian_rejects_sublinear_mortality() {
        let mut p = ModelParams::baseline();
        p.gamma = 0.5;
        let eq = equilibrium(&p).unwrap();
        assert!(jacobian_at(&p, &eq, &TaxisSensitivity::identity()).is_err());
    }

    prop_compose! {
        // Feasible-by-construction parameter draws: lambda*K is pushed above
        // mu and m above the feasibility bound.
        fn feasible_params()(
            k in 1.0f64..100.0,
            r in 0.1f64..10.0,
            a in 0.5f64..20.0,
            d in 0.1f64..10.0,
            mu in 0.1f64..10.0,
            excess in 0.05f64..5.0,
            headroom in 0.05f64..3.0,
        ) -> ModelParams {
            let lambda = mu * (1.0 + excess) / k;
            let lambda_k = lambda * k;
            let bound = d + lambda * a * d * (r + lambda_k) / (r * (lambda_k - mu));
            let mut p = ModelParams::baseline();
            p.r = r; p.k = k; p.lambda = lambda; p.a = a; p.d = d; p.mu = mu;
            p.m = bound * (1.0 + headroom);
            p
        }
    }

    proptest! {
        #[test]
        fn equilibrium_is_positive_and_annihilates_kinetics(p in feasible_params()) {
            let eq = equilibrium(&p).unwrap();
            prop_assert!(eq.s_star > 0.0 && eq.i_star > 0.0 && eq.p_star > 0.0);
            let (f1, f2, f3) = crate::kinetics::reaction_terms(eq.s_star, eq.i_star, eq.p_star, &p);
            let scale = p.lambda * eq.s_star * eq.i_star + p.m * eq.p_star + 1.0;
            prop_assert!(f1.abs() <= 1e-12 * scale);
            prop_assert!(f2.abs() <= 1e-12 * scale);
            prop_assert!(f3.abs() <= 1e-12 * scale);
        }

        #[test]
        fn jacobian_sign_structure(p in feasible_params()) {
            let eq = equilibrium(&p).unwrap();
            let j = jacobian_at(&p, &eq, &TaxisSensitivity::identity()).unwrap();
            prop_assert!(j.a23 * j.a32 < 0.0);
            prop_assert!(j.a12 < 0.0);
            prop_assert!(j.a21 > 0.0);
        }

        #[test]
        fn equilibrium_is_scale_consistent(p in feasible_params(), c in 0.1f64..10.0) {
            // rescaling time moves every rate but not the steady state
            let eq = equilibrium(&p).unwrap();
            let mut q = p;
            q.r *= c; q.lambda *= c; q.m *= c; q.mu *= c; q.d *= c;
            q.delta1 *= c; q.delta2 *= c; q.delta3 *= c; q.chi1 *= c; q.chi2 *= c;
            let eq_scaled = equilibrium(&q).unwrap();
            prop_assert!((eq.s_star - eq_scaled.s_star).abs() <= 1e-12 * eq.s_star.abs());
            prop_assert!((eq.i_star - eq_scaled.i_star).abs() <= 1e-12 * eq.i_star.abs());
            prop_assert!((eq.p_star - eq_scaled.p_star).abs() <= 1e-12 * eq.p_star.abs());
        }
    }
}
