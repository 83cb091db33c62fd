//! The spatially homogeneous submodel: persistence number, finite-time
//! extinction thresholds for sublinear mortality (gamma < 1), and the scalar
//! comparison ODE whose closed-form extinction time bounds the PDE's.

use crate::kinetics::reaction_terms;
use crate::params::ModelParams;
use thiserror::Error;

/// Kinetics with all transport switched off; the uniform-in-space limit of
/// the full model and the oracle the PDE stepper is tested against.
pub fn ode_rhs(s: f64, i: f64, p_dens: f64, params: &ModelParams) -> (f64, f64, f64) {
    reaction_terms(s, i, p_dens, params)
}

/// Persistence number m*r/(d*lambda*K). Above 1 (with the auxiliary rate
/// orderings m*r/d > lambda*K > mu) the disease persists in the gamma = 1
/// temporal model; below, the predator cannot sustain itself on the infected
/// class.
pub fn r0(params: &ModelParams) -> f64 {
    params.m * params.r / (params.d * params.lambda_k())
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TemporalError {
    #[error("gamma = {gamma} outside (0, 1): extinction thresholds undefined")]
    GammaOutOfRange { gamma: f64 },
    #[error("dispersal exponent p = {p} must be >= 2")]
    BadExponent { p: f64 },
    #[error("interpolation exponent is closed-form only for n = 2 (got {n})")]
    DimensionUnsupported { n: usize },
}

/// The interpolation exponent alpha in the comparison ODE's absorption term
/// y^alpha.
///
/// For p = 2 it is 2(1+gamma)/((1-gamma)^2 + 4). For p > 2 it comes from the
/// two-step interpolation theta = (1/(1+gamma) - 1/2)/(1/(1+gamma) + 1/2 - 1/p),
/// l = 1/(theta/p + (1-theta)/(1+gamma)), alpha = l/2. Always in (0, 1) for
/// gamma in (0, 1), and larger for p > 2 than for p = 2 at the same gamma,
/// which is what orders the extinction thresholds across p.
pub fn alpha_exponent(gamma: f64, p: f64, n: usize) -> Result<f64, TemporalError> {
    if n != 2 {
        return Err(TemporalError::DimensionUnsupported { n });
    }
    if !gamma.is_finite() || gamma <= 0.0 || gamma >= 1.0 {
        return Err(TemporalError::GammaOutOfRange { gamma });
    }
    if !p.is_finite() || p < 2.0 {
        return Err(TemporalError::BadExponent { p });
    }
    let alpha = if p == 2.0 {
        2.0 * (1.0 + gamma) / ((1.0 - gamma).powi(2) + 4.0)
    } else {
        let inv = 1.0 / (1.0 + gamma);
        let theta = (inv - 0.5) / (inv + 0.5 - 1.0 / p);
        let l = 1.0 / (theta / p + (1.0 - theta) * inv);
        l / 2.0
    };
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    Ok(alpha)
}

/// Which side of C4 = lambda*K the decay constant falls on; the side decides
/// how the L2 extinction bounds order across the dispersal exponent p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdRegime {
    /// C4 < lambda*K: bounds are below one and shrink as p grows.
    GrowthDominated,
    /// C4 >= lambda*K: bounds are at least one and grow with p.
    DecayDominated,
}

impl ThresholdRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdRegime::GrowthDominated => "growth_dominated",
            ThresholdRegime::DecayDominated => "decay_dominated",
        }
    }
}

/// Initial-data smallness thresholds that force the infected class to zero
/// in finite time when gamma < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FteThresholds {
    /// Pointwise bound (mu/lambda*K)^(1/(1-gamma)) on a constant I0 in the
    /// temporal model.
    pub pointwise: f64,
    /// Interpolation exponent used in the L2 route.
    pub alpha: f64,
    /// Bound on ||I0||_2^2: (C4/lambda*K)^(1/(1-alpha)). Sufficient up to
    /// the interpolation-inequality constant, which is taken as 1.
    pub l2_bound: f64,
    /// min(delta2, mu), the decay constant of the comparison ODE.
    pub c4: f64,
    pub regime: ThresholdRegime,
}

/// All extinction thresholds for the given parameters. gamma = 1 is
/// rejected: the exponents 1/(1-gamma) and 1/(1-alpha) both blow up and no
/// finite-time extinction occurs.
pub fn fte_thresholds(params: &ModelParams) -> Result<FteThresholds, TemporalError> {
    let alpha = alpha_exponent(params.gamma, params.p, 2)?;
    let lk = params.lambda_k();
    let c4 = params.delta2.min(params.mu);
    let ratio = c4 / lk;
    Ok(FteThresholds {
        pointwise: (params.mu / lk).powf(1.0 / (1.0 - params.gamma)),
        alpha,
        l2_bound: ratio.powf(1.0 / (1.0 - alpha)),
        c4,
        regime: if ratio < 1.0 {
            ThresholdRegime::GrowthDominated
        } else {
            ThresholdRegime::DecayDominated
        },
    })
}

/// Fate of the scalar majorant dy/dt = rate_grow*y - rate_decay*y^alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComparisonOutcome {
    /// y reaches exactly zero at this time.
    ExtinctTime(f64),
    /// y0 is at or above the balance point (rate_decay/rate_grow)^(1/(1-alpha)).
    Persists,
}

/// Closed-form solve of the comparison ODE.
///
/// The substitution u = y^(1-alpha) turns it into the linear equation
/// du/dt = (1-alpha)(rate_grow*u - rate_decay), so extinction happens iff
/// u0 < rate_decay/rate_grow, at
/// t* = -ln(1 - rate_grow*u0/rate_decay) / ((1-alpha)*rate_grow).
/// rate_grow <= 0 is allowed (the log argument then exceeds 1; at zero the
/// limit t* = u0/((1-alpha)*rate_decay) is used).
pub fn comparison_ode(
    y0: f64,
    rate_grow: f64,
    rate_decay: f64,
    alpha: f64,
) -> ComparisonOutcome {
    assert!(y0 >= 0.0 && alpha > 0.0 && alpha < 1.0 && rate_decay > 0.0);
    if y0 == 0.0 {
        return ComparisonOutcome::ExtinctTime(0.0);
    }
    let u0 = y0.powf(1.0 - alpha);
    let x = rate_grow * u0 / rate_decay;
    if x >= 1.0 {
        return ComparisonOutcome::Persists;
    }
    let t = if rate_grow == 0.0 {
        u0 / ((1.0 - alpha) * rate_decay)
    } else {
        -(-x).ln_1p() / ((1.0 - alpha) * rate_grow)
    };
    ComparisonOutcome::ExtinctTime(t)
}

/// Classical fixed-step RK4 on the temporal kinetics, sampled at the given
/// times. Substep size never exceeds max_dt. Reference integrator for
/// stepper acceptance; not used in the PDE path.
pub fn rk4_solve(
    initial: [f64; 3],
    params: &ModelParams,
    ts: &[f64],
    max_dt: f64,
) -> Vec<[f64; 3]> {
    assert!(max_dt > 0.0);
    let f = |y: [f64; 3]| {
        let (a, b, c) = ode_rhs(y[0], y[1], y[2], params);
        [a, b, c]
    };
    let mut y = initial;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(ts.len());
    for &target in ts {
        assert!(target >= t, "sample times must be nondecreasing from 0");
        let span = target - t;
        if span > 0.0 {
            let n = (span / max_dt).ceil() as usize;
            let h = span / n as f64;
            for _ in 0..n {
                let k1 = f(y);
                let k2 = f(add(y, scal(k1, 0.5 * h)));
                let k3 = f(add(y, scal(k2, 0.5 * h)));
                let k4 = f(add(y, scal(k3, h)));
                for j in 0..3 {
                    y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                }
            }
            t = target;
        }
        out.push(y);
    }
    out
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scal(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::equilibrium;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn persistence_number() {
        let p = ModelParams::baseline();
        assert_relative_eq!(r0(&p), 0.18955823293172688, max_relative = 1e-14);
        let mut q = p;
        q.m = q.d * q.lambda_k() / q.r;
        assert_relative_eq!(r0(&q), 1.0, max_relative = 1e-15);
        q.m *= 2.0;
        assert_relative_eq!(r0(&q), 2.0, max_relative = 1e-15);
        assert_relative_eq!(r0(&ModelParams::stable_coexistence()), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn alpha_closed_forms() {
        assert_relative_eq!(alpha_exponent(0.5, 2.0, 2).unwrap(), 12.0 / 17.0, max_relative = 1e-15);
        assert_relative_eq!(alpha_exponent(0.5, 4.0, 2).unwrap(), 11.0 / 13.0, max_relative = 1e-14);
        // degenerate limit: alpha -> 1 as gamma -> 1 (no extinction there)
        let near = alpha_exponent(1.0 - 1e-9, 2.0, 2).unwrap();
        assert!(near < 1.0 && near > 1.0 - 1e-8);
    }

    #[test]
    fn alpha_rejections() {
        assert!(matches!(
            alpha_exponent(1.0, 2.0, 2),
            Err(TemporalError::GammaOutOfRange { .. })
        ));
        assert!(matches!(
            alpha_exponent(0.0, 2.0, 2),
            Err(TemporalError::GammaOutOfRange { .. })
        ));
        assert!(matches!(alpha_exponent(0.5, 1.9, 2), Err(TemporalError::BadExponent { .. })));
        assert!(matches!(
            alpha_exponent(0.5, 2.0, 3),
            Err(TemporalError::DimensionUnsupported { .. })
        ));
    }

    #[test]
    fn alpha_ordering_across_p() {
        for gamma in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let base = alpha_exponent(gamma, 2.0, 2).unwrap();
            assert!(base > 0.0 && base < 1.0);
            for p in [3.0, 4.0, 8.0] {
                let hi = alpha_exponent(gamma, p, 2).unwrap();
                assert!(hi > base && hi < 1.0, "gamma={gamma} p={p}");
            }
        }
    }

    #[test]
    fn thresholds_at_the_shared_rates() {
        let mut p = ModelParams::baseline();
        p.gamma = 0.5;
        let t2 = fte_thresholds(&p).unwrap();
        assert_eq!(t2.c4, 1.0); // min(delta2, mu) = min(1, 3.4)
        assert_relative_eq!(t2.pointwise, 0.00022834567901234564, max_relative = 1e-13);
        assert_relative_eq!(t2.alpha, 12.0 / 17.0, max_relative = 1e-15);
        assert_relative_eq!(t2.l2_bound, 1.0059570495253629e-8, max_relative = 1e-12);
        assert_eq!(t2.regime, ThresholdRegime::GrowthDominated);

        p.p = 4.0;
        p.eps_reg = 1e-9;
        let t4 = fte_thresholds(&p).unwrap();
        assert_relative_eq!(t4.l2_bound, 5.138231086172626e-16, max_relative = 1e-12);
        // C4 < lambda*K: the p = 2 bound is the larger one
        assert!(t2.l2_bound > t4.l2_bound);
    }

    #[test]
    fn threshold_ordering_flips_with_the_regime() {
        let mut p = ModelParams::baseline();
        p.gamma = 0.5;
        p.mu = 0.5;
        p.delta2 = 0.3;
        p.lambda = 0.004;
        p.k = 50.0; // C4/lambda*K = 0.3/0.2 = 1.5
        let t2 = fte_thresholds(&p).unwrap();
        assert_eq!(t2.regime, ThresholdRegime::DecayDominated);
        p.p = 4.0;
        p.eps_reg = 1e-9;
        let t4 = fte_thresholds(&p).unwrap();
        assert!(t4.l2_bound > t2.l2_bound);
    }

    #[test]
    fn gamma_one_is_rejected() {
        assert!(matches!(
            fte_thresholds(&ModelParams::baseline()),
            Err(TemporalError::GammaOutOfRange { .. })
        ));
    }

    #[test]
    fn comparison_ode_edge_cases() {
        assert_eq!(comparison_ode(0.0, 225.0, 1.0, 0.5), ComparisonOutcome::ExtinctTime(0.0));
        // balance point: u0 = c/g exactly
        assert_eq!(comparison_ode(0.25, 2.0, 1.0, 0.5), ComparisonOutcome::Persists);
        assert_eq!(comparison_ode(0.3, 2.0, 1.0, 0.5), ComparisonOutcome::Persists);
    }

    #[test]
    fn comparison_ode_closed_form() {
        let alpha = 12.0 / 17.0;
        match comparison_ode(1e-9, 225.0, 1.0, alpha) {
            ComparisonOutcome::ExtinctTime(t) => {
                assert_relative_eq!(t, 0.010691416914110513, max_relative = 1e-10);
            }
            other => panic!("{other:?}"),
        }
        match comparison_ode(0.0002260622222222222, 225.0, 3.4, 0.5) {
            ComparisonOutcome::ExtinctTime(t) => {
                assert_relative_eq!(t, 0.04707384834773714, max_relative = 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comparison_ode_matches_linearized_rk4() {
        // the u = y^(1-alpha) substitution is linear; integrating it numerically
        // reproduces the closed-form extinction time
        let (y0, g, c, alpha) = (1e-9, 225.0, 1.0, 12.0 / 17.0);
        let t_star = match comparison_ode(y0, g, c, alpha) {
            ComparisonOutcome::ExtinctTime(t) => t,
            _ => unreachable!(),
        };
        let om = 1.0 - alpha;
        let mut u = y0.powf(om);
        let du = |u: f64| om * (g * u - c);
        let h = t_star / 20_000.0;
        let mut t = 0.0;
        let crossing = loop {
            let k1 = du(u);
            let k2 = du(u + 0.5 * h * k1);
            let k3 = du(u + 0.5 * h * k2);
            let k4 = du(u + h * k3);
            let next = u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if next <= 0.0 {
                break t + h * u / (u - next);
            }
            u = next;
            t += h;
            assert!(t < 10.0 * t_star, "no crossing found");
        };
        assert_relative_eq!(crossing, t_star, max_relative = 1e-8);
    }

    #[test]
    fn comparison_ode_without_growth() {
        let alpha = 0.5;
        let u0 = 0.04f64.powf(1.0 - alpha); // 0.2
        match comparison_ode(0.04, 0.0, 2.0, alpha) {
            ComparisonOutcome::ExtinctTime(t) => {
                assert_relative_eq!(t, u0 / (0.5 * 2.0), max_relative = 1e-14);
            }
            other => panic!("{other:?}"),
        }
        // negative growth only speeds extinction up
        match comparison_ode(0.04, -3.0, 2.0, alpha) {
            ComparisonOutcome::ExtinctTime(t) => assert!(t > 0.0 && t < u0 / (0.5 * 2.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rhs_is_the_shared_kinetics() {
        let p = ModelParams::baseline();
        assert_eq!(ode_rhs(p.k, 0.0, 0.0, &p), (0.0, 0.0, 0.0));
        let eq = equilibrium(&p).unwrap();
        let (f1, f2, f3) = ode_rhs(eq.s_star, eq.i_star, eq.p_star, &p);
        let scale = p.lambda * eq.s_star * eq.i_star + p.m * eq.p_star;
        assert!(f1.abs() <= 1e-12 * scale);
        assert!(f2.abs() <= 1e-12 * scale);
        assert!(f3.abs() <= 1e-12 * scale);
        let mut q = p;
        q.gamma = 0.5;
        assert_eq!(ode_rhs(0.0, 1.0, 0.0, &q).1, -3.4);
    }

    #[test]
    fn rk4_holds_the_fixed_point() {
        let p = ModelParams::stable_coexistence();
        let eq = equilibrium(&p).unwrap();
        let y0 = [eq.s_star, eq.i_star, eq.p_star];
        let out = rk4_solve(y0, &p, &[5.0, 10.0], 0.01);
        for y in out {
            for (got, want) in y.iter().zip(&y0) {
                assert_relative_eq!(got, want, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn rk4_fourth_order() {
        let p = ModelParams::baseline();
        let y0 = [0.35, 0.6, 1.6];
        let fine = rk4_solve(y0, &p, &[1.0], 1e-4)[0];
        let err = |dt: f64| {
            let y = rk4_solve(y0, &p, &[1.0], dt)[0];
            y.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max)
        };
        let e1 = err(0.02);
        let e2 = err(0.01);
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "observed order {order}");
    }

    proptest! {
        #[test]
        fn pointwise_threshold_monotonicity(
            mu in 0.1f64..10.0,
            lambda in 0.01f64..2.0,
            k in 1.0f64..100.0,
            gamma in 0.05f64..0.95,
        ) {
            let mut p = ModelParams::baseline();
            p.mu = mu; p.lambda = lambda; p.k = k; p.gamma = gamma;
            let base = fte_thresholds(&p).unwrap().pointwise;
            let mut q = p; q.mu *= 1.1;
            prop_assert!(fte_thresholds(&q).unwrap().pointwise > base);
            let mut q = p; q.lambda *= 1.1;
            prop_assert!(fte_thresholds(&q).unwrap().pointwise < base);
            let mut q = p; q.k *= 1.1;
            prop_assert!(fte_thresholds(&q).unwrap().pointwise < base);
        }

        #[test]
        fn l2_bound_ordering_follows_the_regime(
            mu in 0.1f64..10.0,
            delta2 in 0.05f64..5.0,
            lk in 0.1f64..50.0,
            gamma in 0.05f64..0.95,
            p_exp in 2.5f64..8.0,
        ) {
            let mut p = ModelParams::baseline();
            p.mu = mu; p.delta2 = delta2; p.lambda = lk / p.k; p.gamma = gamma;
            let t2 = fte_thresholds(&p).unwrap();
            p.p = p_exp;
            p.eps_reg = 1e-9;
            let tp = fte_thresholds(&p).unwrap();
            prop_assume!((t2.c4 / lk - 1.0).abs() > 1e-9);
            match t2.regime {
                ThresholdRegime::GrowthDominated => prop_assert!(t2.l2_bound > tp.l2_bound),
                ThresholdRegime::DecayDominated => prop_assert!(tp.l2_bound > t2.l2_bound),
            }
        }

        #[test]
        fn comparison_extinction_iff_below_balance(
            y0 in 1e-12f64..10.0,
            g in 0.01f64..300.0,
            c in 0.01f64..10.0,
            alpha in 0.05f64..0.95,
        ) {
            let balance = (c / g).powf(1.0 / (1.0 - alpha));
            let out = comparison_ode(y0, g, c, alpha);
            if y0 < balance * (1.0 - 1e-12) {
                prop_assert!(matches!(out, ComparisonOutcome::ExtinctTime(t) if t > 0.0));
            } else if y0 > balance * (1.0 + 1e-12) {
                prop_assert_eq!(out, ComparisonOutcome::Persists);
            }
        }
    }
}
