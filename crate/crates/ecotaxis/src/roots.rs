//! Closed-form real-root extraction for the low-degree polynomials that
//! show up in the linear stability analysis.
//!
//! Cubics are monic characteristic polynomials of 3x3 mode matrices, so the
//! quantity of interest is usually the largest real part over all roots.

/// Roots of a monic cubic with real coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicRoots {
    /// Three real roots, ascending. Multiple roots appear repeated.
    ThreeReal([f64; 3]),
    /// One real root plus a complex-conjugate pair re +- i*im, im > 0.
    OneReal { real: f64, pair_re: f64, pair_im: f64 },
}

/// Solves x^3 + a2 x^2 + a1 x + a0 = 0.
///
/// Uses the trigonometric form when all roots are real and the cube-root
/// (Cardano) form otherwise; the branch test R^2 < Q^3 is evaluated on the
/// scaled invariants so borderline multiple roots land in the cube-root
/// branch, where they come out exact.
pub fn cubic_roots(a2: f64, a1: f64, a0: f64) -> CubicRoots {
    debug_assert!(a2.is_finite() && a1.is_finite() && a0.is_finite());
    let q = (a2 * a2 - 3.0 * a1) / 9.0;
    let r = (2.0 * a2.powi(3) - 9.0 * a2 * a1 + 27.0 * a0) / 54.0;
    let r2 = r * r;
    let q3 = q.powi(3);
    let shift = a2 / 3.0;
    if r2 < q3 {
        let theta = (r / q3.sqrt()).clamp(-1.0, 1.0).acos();
        let scale = -2.0 * q.sqrt();
        let mut roots = [
            scale * (theta / 3.0).cos() - shift,
            scale * ((theta + 2.0 * std::f64::consts::PI) / 3.0).cos() - shift,
            scale * ((theta - 2.0 * std::f64::consts::PI) / 3.0).cos() - shift,
        ];
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        CubicRoots::ThreeReal(roots)
    } else {
        let big_a = -r.signum() * (r.abs() + (r2 - q3).max(0.0).sqrt()).cbrt();
        let big_b = if big_a == 0.0 { 0.0 } else { q / big_a };
        let real = (big_a + big_b) - shift;
        let pair_re = -0.5 * (big_a + big_b) - shift;
        let pair_im = 3.0f64.sqrt() / 2.0 * (big_a - big_b).abs();
        if pair_im == 0.0 {
            let mut roots = [real, pair_re, pair_re];
            roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
            CubicRoots::ThreeReal(roots)
        } else {
            CubicRoots::OneReal { real, pair_re, pair_im }
        }
    }
}

/// Largest real part over the roots of x^3 + a2 x^2 + a1 x + a0.
pub fn max_real_part(a2: f64, a1: f64, a0: f64) -> f64 {
    match cubic_roots(a2, a1, a0) {
        CubicRoots::ThreeReal(r) => r[2],
        CubicRoots::OneReal { real, pair_re, .. } => real.max(pair_re),
    }
}

/// Real roots of c2 x^2 + c1 x + c0 = 0, ascending.
///
/// A vanishing leading coefficient degrades gracefully to the linear case;
/// the identically-zero polynomial yields no roots. The small root is
/// computed from the product form to dodge subtractive cancellation.
pub fn quadratic_real_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c2 == 0.0 {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-c1 / (2.0 * c2)];
    }
    let sq = disc.sqrt();
    // disc > 0 guarantees qf != 0
    let qf = -0.5 * (c1 + c1.signum() * sq);
    let mut roots = vec![qf / c2, c0 / qf];
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distinct_real_roots() {
        // (x-1)(x-2)(x-3)
        match cubic_roots(-6.0, 11.0, -6.0) {
            CubicRoots::ThreeReal(r) => {
                for (got, want) in r.iter().zip(&[1.0, 2.0, 3.0]) {
                    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
                }
            }
            other => panic!("expected three real roots, got {other:?}"),
        }
        assert!((max_real_part(-6.0, 11.0, -6.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn triple_root_is_exact() {
        // (x+1)^3
        match cubic_roots(3.0, 3.0, 1.0) {
            CubicRoots::ThreeReal(r) => {
                for v in r {
                    assert!((v + 1.0).abs() < 1e-12);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn double_root_on_branch_boundary() {
        // (x-2)^2 (x+5) = x^3 + x^2 - 16x + 20, where R^2 == Q^3
        match cubic_roots(1.0, -16.0, 20.0) {
            CubicRoots::ThreeReal(r) => {
                assert!((r[0] + 5.0).abs() < 1e-9);
                assert!((r[1] - 2.0).abs() < 1e-9);
                assert!((r[2] - 2.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn complex_pair_identities() {
        // coefficients of a community matrix whose spectrum is one negative
        // real eigenvalue and a weakly unstable complex pair
        let a2 = -0.08436429378530717;
        let a1 = 37.15228033735548;
        let a0 = 1.393109514124252;
        let (real, pair_re, pair_im) = match cubic_roots(a2, a1, a0) {
            CubicRoots::OneReal { real, pair_re, pair_im } => (real, pair_re, pair_im),
            other => panic!("{other:?}"),
        };
        assert!((pair_re - 0.060928482340914636).abs() < 1e-12);
        // root sum = -a2 and root product = -a0 pin the remaining parts
        assert!((real + 2.0 * pair_re + a2).abs() < 1e-12);
        let prod = real * (pair_re * pair_re + pair_im * pair_im);
        assert!((prod + a0).abs() < 1e-9 * a0.abs());
        assert!((max_real_part(a2, a1, a0) - pair_re).abs() == 0.0);
    }

    #[test]
    fn quadratic_basics() {
        assert_eq!(quadratic_real_roots(1.0, -5.0, 6.0), vec![2.0, 3.0]);
        assert_eq!(quadratic_real_roots(0.0, 2.0, -4.0), vec![2.0]);
        assert!(quadratic_real_roots(1.0, 0.0, 1.0).is_empty());
        assert!(quadratic_real_roots(0.0, 0.0, 0.0).is_empty());
        let r = quadratic_real_roots(1.0, 0.0, -4.0);
        assert!((r[0] + 2.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_avoids_cancellation() {
        // roots -1e-8 and -1e8; the naive formula loses the small one
        let r = quadratic_real_roots(1.0, 1e8 + 1e-8, 1.0);
        assert!((r[1] + 1e-8).abs() < 1e-17, "small root {:e}", r[1]);
        assert!((r[0] + 1e8).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn recovers_separated_real_roots(
            base in -50.0f64..50.0,
            gap1 in 1.0f64..30.0,
            gap2 in 1.0f64..30.0,
        ) {
            let (r0, r1, r2) = (base, base + gap1, base + gap1 + gap2);
            let a2 = -(r0 + r1 + r2);
            let a1 = r0 * r1 + r1 * r2 + r0 * r2;
            let a0 = -r0 * r1 * r2;
            match cubic_roots(a2, a1, a0) {
                CubicRoots::ThreeReal(r) => {
                    for (got, want) in r.iter().zip(&[r0, r1, r2]) {
                        prop_assert!((got - want).abs() < 1e-6 * (1.0 + want.abs()));
                    }
                }
                other => prop_assert!(false, "expected real roots, got {other:?}"),
            }
        }

        #[test]
        fn recovers_complex_pair(
            real in -20.0f64..20.0,
            sigma in -20.0f64..20.0,
            omega in 0.5f64..20.0,
        ) {
            let norm2 = sigma * sigma + omega * omega;
            let a2 = -(real + 2.0 * sigma);
            let a1 = norm2 + 2.0 * real * sigma;
            let a0 = -real * norm2;
            match cubic_roots(a2, a1, a0) {
                CubicRoots::OneReal { real: got_r, pair_re, pair_im } => {
                    prop_assert!((got_r - real).abs() < 1e-6 * (1.0 + real.abs()));
                    prop_assert!((pair_re - sigma).abs() < 1e-6 * (1.0 + sigma.abs()));
                    prop_assert!((pair_im - omega).abs() < 1e-6 * (1.0 + omega.abs()));
                }
                other => prop_assert!(false, "expected complex pair, got {other:?}"),
            }
            let mr = max_real_part(a2, a1, a0);
            prop_assert!((mr - real.max(sigma)).abs() < 1e-6 * (1.0 + mr.abs()));
        }
    }
}
