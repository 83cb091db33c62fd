//! Run a bundled scenario end to end and describe the artifacts it writes.
//! Run with:
//!
//!     cargo run --example preset_run [name] [out_dir]
//!
//! defaulting to fig1 into runs/<name>.

use ecotaxis::{event_text, preset, run_scenario};
use std::path::PathBuf;

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig1".into());
    let sc = preset(&name).unwrap_or_else(|| {
        eprintln!("unknown preset {name:?}");
        std::process::exit(1);
    });
    let out: PathBuf = args.next().map(Into::into).unwrap_or_else(|| format!("runs/{name}").into());

    let art = run_scenario(&sc, &out).expect("run failed");
    println!("{name}: wrote {} files under {}", art.files.len(), art.out_dir.display());
    for f in &art.files {
        println!("  {f}");
    }
    let outcome = art.outcome.expect("presets request a simulation");
    let traj = &outcome.trajectory;
    println!("steps: {}", traj.steps);
    if traj.events.is_empty() {
        println!("events: none");
    } else {
        for e in &traj.events {
            println!("event: {}", event_text(e));
        }
    }
    if let Some(last) = traj.norm_series.last() {
        println!(
            "final t = {}: sup S = {:.5}, sup I = {:.5}, sup P = {:.5}",
            last.t, last.sup[0], last.sup[1], last.sup[2]
        );
        if let Some(d) = last.sup_dist_eq {
            println!("sup distance to E* = {d:.5}");
        }
    }
}
