//! Closed-form coexistence state, its feasibility window, and the verdict of
//! the homogeneous (k = 0) mode. Run with:
//!
//!     cargo run --example equilibrium_and_stability

use ecotaxis::stability::char_coefficients;
use ecotaxis::{equilibrium, jacobian_at, r0, ModelParams, TaxisSensitivity};

fn main() {
    let baseline = ModelParams::baseline();
    let eq = equilibrium(&baseline).expect("feasible at the bundled rates");
    println!("bundled rates: E* = ({:.6}, {:.6}, {:.6})", eq.s_star, eq.i_star, eq.p_star);
    println!("  H1 (m > d and positivity): {}", eq.h1_holds);
    println!("  H2 (mu < lambda S* < mu + m): {}", eq.h2_holds);
    println!("  R0 = m r / (d lambda K) = {:.4}", r0(&baseline));

    let eta = TaxisSensitivity::rational_volume_fill(0.05);
    let jac = jacobian_at(&baseline, &eq, &eta).unwrap();
    let k0 = char_coefficients(&baseline, &eq, &jac, 0, baseline.chi2);
    println!(
        "  homogeneous mode: max Re eig = {:+.5}, verdict {}",
        k0.max_real_eig,
        k0.verdict.as_str()
    );
    println!("  (positive: the coexistence state is temporally unstable at these rates)");

    // the same survey on a parameter set chosen to sit inside the stable
    // window, then across a transmission sweep to show the window's edges
    let stable = ModelParams::stable_coexistence();
    let eq_s = equilibrium(&stable).unwrap();
    let jac_s = jacobian_at(&stable, &eq_s, &eta).unwrap();
    let k0_s = char_coefficients(&stable, &eq_s, &jac_s, 0, stable.chi2);
    println!(
        "\nstable set: E* = ({:.6}, {:.6}, {:.6}), R0 = {:.2}, max Re eig = {:+.5} ({})",
        eq_s.s_star,
        eq_s.i_star,
        eq_s.p_star,
        r0(&stable),
        k0_s.max_real_eig,
        k0_s.verdict.as_str()
    );

    println!("\ntransmission sweep on the stable set:");
    println!("{:>8} {:>12} {:>12} {:>12} {:>10}", "lambda", "S*", "I*", "P*", "verdict");
    for i in 0..8 {
        let mut p = stable.clone();
        p.lambda = 0.1 + 0.4 * i as f64;
        match equilibrium(&p) {
            Ok(eq) => {
                let jac = jacobian_at(&p, &eq, &eta).unwrap();
                let rec = char_coefficients(&p, &eq, &jac, 0, p.chi2);
                println!(
                    "{:>8.2} {:>12.5} {:>12.5} {:>12.5} {:>10}",
                    p.lambda,
                    eq.s_star,
                    eq.i_star,
                    eq.p_star,
                    rec.verdict.as_str()
                );
            }
            Err(reason) => {
                println!("{:>8.2} infeasible: {reason}", p.lambda);
            }
        }
    }
}
