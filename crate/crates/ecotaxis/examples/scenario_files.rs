//! The scenario text format: author a file from scratch, parse it, tweak a
//! parameter, and inspect what a run of it would produce. Run with:
//!
//!     cargo run --example scenario_files

use ecotaxis::{run_scenario, Scenario};

const SCENARIO: &str = "\
name = worked-example

[params]
r = 5
k = 75
lambda = 3
m = 70.8
a = 12
mu = 3.4
d = 8.3
delta1 = 1
delta2 = 1
delta3 = 2
chi1 = 0
chi2 = 60
domain_len = 94.24777960769379

[sensitivity]
xi = identity
eta = rational_volume_fill
clamp_eps = 0.05

[grid]
n_cells = 128

[initial]
s = cosine(0.1, 30, 0.35)
i = sine(0.1, 60, 0.6)
p = cosine(3, 90, 1.6)

[sim]
t_end = 40
save_stride = 1
method = rk2
positivity = clip

[analyses]
run_dispersion = true
k_max = 16
";

fn main() {
    let mut sc: Scenario = SCENARIO.parse().expect("the text above is well formed");
    println!("parsed scenario {:?}: chi2 = {}, {} cells", sc.name, sc.params.chi2, sc.n_cells);

    // edits re-validate; a negative rate is rejected with a reason
    sc.set_param_field("chi2", 80.0).unwrap();
    let err = sc.set_param_field("mu", -1.0).unwrap_err();
    println!("rejected edit: {err}");

    // the canonical form round-trips exactly
    let reparsed: Scenario = sc.to_text().parse().unwrap();
    assert_eq!(reparsed, sc);

    let out = std::env::temp_dir().join("ecotaxis-worked-example");
    let art = run_scenario(&sc, &out).expect("run failed");
    println!("ran it: {} files under {}", art.files.len(), art.out_dir.display());
    let meta = std::fs::read_to_string(out.join("meta.txt")).unwrap();
    for line in meta.lines().filter(|l| {
        ["scan =", "first_hopf =", "events =", "pattern ="].iter().any(|p| l.starts_with(p))
    }) {
        println!("meta: {line}");
    }
}
