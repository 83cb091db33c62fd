//! Conservative finite-volume spatial operators with zero-flux boundaries.
//!
//! Every operator is the divergence of face fluxes that vanish at both
//! boundary faces, so its cell sum times dx telescopes to zero: transport
//! moves mass around, never creates it. Nonlinearities are evaluated at
//! faces to keep that structure exact.

use crate::grid::Grid1D;
use crate::sensitivity::TaxisSensitivity;

/// Divergence of two-point diffusive fluxes (f[i+1]-f[i])/dx with zero
/// boundary fluxes. Second order on smooth Neumann-compatible profiles.
pub fn laplacian_neumann(f: &[f64], grid: &Grid1D) -> Vec<f64> {
    debug_assert_eq!(f.len(), grid.n_cells);
    let dx = grid.dx;
    let n = f.len();
    let mut out = vec![0.0; n];
    let mut left = 0.0;
    for i in 0..n {
        let right = if i + 1 < n { (f[i + 1] - f[i]) / dx } else { 0.0 };
        out[i] = (right - left) / dx;
        left = right;
    }
    out
}

/// Divergence of the regularized degenerate flux (g^2 + eps)^((p-2)/2) * g,
/// g the face gradient. For p = 2 the weight exponent is zero and the
/// arithmetic is identical to [`laplacian_neumann`], bitwise.
pub fn plaplacian_divergence(f: &[f64], p: f64, eps_reg: f64, grid: &Grid1D) -> Vec<f64> {
    debug_assert_eq!(f.len(), grid.n_cells);
    debug_assert!(p >= 2.0 && eps_reg >= 0.0);
    let dx = grid.dx;
    let expo = (p - 2.0) / 2.0;
    let n = f.len();
    let mut out = vec![0.0; n];
    let mut left = 0.0;
    for i in 0..n {
        let right = if i + 1 < n {
            let g = (f[i + 1] - f[i]) / dx;
            if expo == 0.0 {
                g
            } else {
                (g * g + eps_reg).powf(expo) * g
            }
        } else {
            0.0
        };
        out[i] = (right - left) / dx;
        left = right;
    }
    out
}

/// Divergence of the taxis flux chi * sens(P) * P * grad(attractant), with
/// the face velocity v = chi * (A[i+1]-A[i])/dx and the advected quantity
/// sens(P)*P taken from the cell upwind of v. Callers subtract the result
/// (the model carries the taxis terms with a minus sign).
pub fn taxis_divergence(
    carrier: &[f64],
    attractant: &[f64],
    sens: &TaxisSensitivity,
    chi: f64,
    grid: &Grid1D,
) -> Vec<f64> {
    debug_assert_eq!(carrier.len(), grid.n_cells);
    debug_assert_eq!(attractant.len(), grid.n_cells);
    debug_assert!(chi >= 0.0);
    let dx = grid.dx;
    let n = carrier.len();
    let mut out = vec![0.0; n];
    let mut left = 0.0;
    for i in 0..n {
        let right = if i + 1 < n {
            let v = chi * (attractant[i + 1] - attractant[i]) / dx;
            let up = if v > 0.0 { carrier[i] } else { carrier[i + 1] };
            v * sens.value(up) * up
        } else {
            0.0
        };
        out[i] = (right - left) / dx;
        left = right;
    }
    out
}

/// Midpoint-rule total mass, sum of f[i]*dx.
pub fn total_mass(f: &[f64], grid: &Grid1D) -> f64 {
    f.iter().sum::<f64>() * grid.dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(n: usize, l: f64) -> Grid1D {
        Grid1D::new(n, l).unwrap()
    }

    fn cos_profile(g: &Grid1D) -> Vec<f64> {
        g.cell_centers().iter().map(|x| (PI * x / g.domain_len).cos()).collect()
    }

    #[test]
    fn constants_are_annihilated() {
        let g = grid(16, 3.0);
        let c = vec![2.5; 16];
        assert!(laplacian_neumann(&c, &g).iter().all(|&v| v == 0.0));
        assert!(plaplacian_divergence(&c, 4.0, 1e-6, &g).iter().all(|&v| v == 0.0));
        // constant attractant: no face velocity
        let p = vec![1.0; 16];
        assert!(taxis_divergence(&p, &c, &TaxisSensitivity::identity(), 3.0, &g)
            .iter()
            .all(|&v| v == 0.0));
        // absent carrier: nothing to advect
        let z = vec![0.0; 16];
        assert!(taxis_divergence(&z, &c_cos(&g), &TaxisSensitivity::identity(), 3.0, &g)
            .iter()
            .all(|&v| v == 0.0));
    }

    fn c_cos(g: &Grid1D) -> Vec<f64> {
        cos_profile(g)
    }

    #[test]
    fn laplacian_matches_eigenfunction_at_second_order() {
        // cos(pi x / l) is a Neumann eigenfunction with eigenvalue -(pi/l)^2
        let l = 2.0;
        let err = |n: usize| {
            let g = grid(n, l);
            let f = cos_profile(&g);
            let lap = laplacian_neumann(&f, &g);
            let lam = (PI / l).powi(2);
            lap.iter()
                .zip(&f)
                .map(|(o, fi)| (o + lam * fi).abs())
                .fold(0.0f64, f64::max)
        };
        let e1 = err(32);
        let e2 = err(64);
        let order = (e1 / e2).log2();
        assert!(order > 1.9, "observed order {order}");
    }

    #[test]
    fn p_equals_two_reduction_is_bitwise() {
        let g = grid(40, 7.0);
        let f: Vec<f64> = g.cell_centers().iter().map(|x| (x * 1.3).sin() * 2.0 + 0.3).collect();
        let a = laplacian_neumann(&f, &g);
        let b = plaplacian_divergence(&f, 2.0, 0.0, &g);
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_face_flux_value() {
        // linear profile with slope 2: every interior face has g = 2, so the
        // p = 4 face flux is (g^2)^1 * g = 8 and only boundary cells see a
        // nonzero divergence
        let g = grid(8, 8.0);
        let f: Vec<f64> = g.cell_centers().iter().map(|x| 2.0 * x).collect();
        let out = plaplacian_divergence(&f, 4.0, 0.0, &g);
        assert!((out[0] - 8.0 / g.dx).abs() < 1e-12);
        assert!((out[7] + 8.0 / g.dx).abs() < 1e-12);
        for v in &out[1..7] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn regularization_insensitivity_at_moderate_gradients() {
        // p = 3: eps only matters where gradients vanish
        let g = grid(128, 2.0);
        let f: Vec<f64> = g.cell_centers().iter().map(|x| (1.7 * x).sin() + 0.1 * x).collect();
        let lo = plaplacian_divergence(&f, 3.0, 1e-10, &g);
        let hi = plaplacian_divergence(&f, 3.0, 1e-6, &g);
        let gap = lo.iter().zip(&hi).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        assert!(gap < 1e-3, "sup gap {gap:e}");
    }

    #[test]
    fn total_mass_of_constant() {
        let l = 30.0 * PI;
        for n in [16, 257] {
            let g = grid(n, l);
            let f = vec![1.5; n];
            assert!((total_mass(&f, &g) - 1.5 * l).abs() < 1e-10);
        }
    }

    #[test]
    fn total_mass_is_midpoint_rule() {
        // for f = x^2 the composite midpoint sum is the integral minus
        // exactly l*dx^2/12
        let l = 4.0;
        let g = grid(32, l);
        let f: Vec<f64> = g.cell_centers().iter().map(|x| x * x).collect();
        let expected = l.powi(3) / 3.0 - l * g.dx * g.dx / 12.0;
        assert!((total_mass(&f, &g) - expected).abs() < 1e-10);
    }

    fn reflect(f: &[f64]) -> Vec<f64> {
        f.iter().rev().copied().collect()
    }

    proptest! {
        // Conservation: the cell sum of any operator output telescopes to
        // zero, up to rounding measured against the total face-flux budget.
        #[test]
        fn operators_conserve_mass(
            seed_vals in proptest::collection::vec(-1e3f64..1e3, 8..64),
            p in prop_oneof![Just(2.0f64), Just(3.0), Just(4.0)],
            eps in prop_oneof![Just(0.0f64), Just(1e-6), Just(1e-2)],
            chi in 0.0f64..50.0,
            l in 0.5f64..100.0,
        ) {
            let n = seed_vals.len();
            let g = grid(n, l);
            let f = seed_vals.clone();
            let carrier: Vec<f64> = seed_vals.iter().map(|v| v.abs() * 0.01).collect();

            for out in [
                laplacian_neumann(&f, &g),
                plaplacian_divergence(&f, p, if p > 2.0 { eps.max(1e-12) } else { eps }, &g),
                taxis_divergence(&carrier, &f, &TaxisSensitivity::identity(), chi, &g),
                taxis_divergence(&carrier, &f, &TaxisSensitivity::cutoff_linear(2.0), chi, &g),
            ] {
                let residual = total_mass(&out, &g).abs();
                // partial sums of out*dx reconstruct the face fluxes, which
                // set the rounding scale of the telescoped sum
                let mut budget = 1.0;
                let mut partial = 0.0;
                for v in &out {
                    partial += v * g.dx;
                    budget += partial.abs();
                }
                prop_assert!(residual <= 1e-11 * budget, "residual {residual:e} budget {budget:e}");
            }
        }

        // Neumann-symmetric stencils commute with reflection about the
        // domain midpoint.
        #[test]
        fn operators_commute_with_reflection(
            seed_vals in proptest::collection::vec(-10.0f64..10.0, 8..40),
            p in prop_oneof![Just(2.0f64), Just(3.0)],
        ) {
            let n = seed_vals.len();
            let g = grid(n, 5.0);
            let f = seed_vals;
            let carrier: Vec<f64> = f.iter().map(|v| v.abs() * 0.05).collect();

            let direct = plaplacian_divergence(&reflect(&f), p, 1e-8, &g);
            let reflected = reflect(&plaplacian_divergence(&f, p, 1e-8, &g));
            for (a, b) in direct.iter().zip(&reflected) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
            }

            let direct = taxis_divergence(
                &reflect(&carrier), &reflect(&f), &TaxisSensitivity::identity(), 2.0, &g);
            let reflected =
                reflect(&taxis_divergence(&carrier, &f, &TaxisSensitivity::identity(), 2.0, &g));
            for (a, b) in direct.iter().zip(&reflected) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
            }
        }
    }
}
