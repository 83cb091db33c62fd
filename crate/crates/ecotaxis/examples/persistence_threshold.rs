//! The classical (gamma = 1) persistence threshold R0 = m r / (d lambda K):
//! sweep the transmission rate and classify each run of the spatially
//! homogeneous model. Run with:
//!
//!     cargo run --example persistence_threshold

use ecotaxis::{equilibrium, r0, rk4_solve, ModelParams};

fn main() {
    let ts: Vec<f64> = (0..=1200).map(|i| i as f64 * 0.25).collect();
    println!(
        "{:>8} {:>8} {:>8} {:>8} {:>14} {:>12}",
        "lambda", "lamK", "R0", "mr/d", "tail min I", "outcome"
    );
    for i in 0..10 {
        let mut params = ModelParams::stable_coexistence();
        params.lambda = 0.15 + 0.3 * i as f64;
        let lam_k = params.lambda_k();
        let start = match equilibrium(&params) {
            Ok(eq) => [eq.s_star * 1.2, (eq.i_star * 0.5).max(0.05), eq.p_star * 0.8],
            Err(_) => [params.k * 0.5, 0.05, 1.0],
        };
        let sol = rk4_solve(start, &params, &ts, 1e-3);
        let tail_min = ts
            .iter()
            .zip(&sol)
            .filter(|(t, _)| **t >= 100.0)
            .map(|(_, y)| y[1])
            .fold(f64::INFINITY, f64::min);
        let outcome = if tail_min > 1e-3 {
            "persists"
        } else if tail_min < 1e-6 {
            "dies out"
        } else {
            "marginal"
        };
        println!(
            "{:>8.2} {:>8.1} {:>8.3} {:>8.1} {:>14.4e} {:>12}",
            params.lambda,
            lam_k,
            r0(&params),
            params.m * params.r / params.d,
            tail_min,
            outcome
        );
    }
    println!("\npersistence needs m r / d > lambda K > mu (here mu = 9) with R0 > 1;");
    println!("below lambda K = mu the infection cannot sustain itself.");
}
