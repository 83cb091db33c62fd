//! Thin command-line front end over the library. All real work lives in
//! `ecotaxis::report`; this file parses arguments and picks output paths.

use clap::{Parser, Subcommand};
use ecotaxis::report::{dispersion_csv, fte_csv};
use ecotaxis::scenario::fmt_f64;
use ecotaxis::{
    bifurcation_thresholds, dispersion_table, equilibrium, event_text, fte_rows, jacobian_at,
    preset, run_scenario, RunArtifacts, Scenario, PRESET_NAMES,
};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "ecotaxis", version, about = "1-D eco-epidemic taxis model: runs and analyses")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file and write CSV artifacts
    Run {
        scenario: PathBuf,
        /// Output directory [default: runs/<name>]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the bundled scenarios (omit the name to list them)
    Preset {
        name: Option<String>,
        /// Output directory [default: runs/<name>]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write <name>.txt into the output directory instead of running
        #[arg(long)]
        scenario_only: bool,
    },
    /// Print the per-mode stability table for a scenario as CSV
    Dispersion {
        scenario: PathBuf,
        /// Highest mode index [default: the scenario's k_max]
        #[arg(long)]
        k_max: Option<usize>,
        /// Override the taxis strength the table is evaluated at
        #[arg(long)]
        chi2: Option<f64>,
    },
    /// Print extinction thresholds and comparison predictions as CSV
    FteReport { scenario: PathBuf },
    /// Run copies of a scenario over a parameter range, in parallel
    Sweep {
        scenario: PathBuf,
        /// Range spec key=lo:hi:n over a [params] key, e.g. chi2=0:100:11
        #[arg(long)]
        vary: String,
        /// Output directory [default: sweeps/<name>-<key>]
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    if let Err(e) = dispatch(Cli::parse().cmd) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

type CliError = Box<dyn std::error::Error>;

fn dispatch(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Run { scenario, out } => {
            let sc = Scenario::load(&scenario)?;
            let dir = out.unwrap_or_else(|| Path::new("runs").join(&sc.name));
            report_run(&run_scenario(&sc, &dir)?);
            Ok(())
        }
        Cmd::Preset { name: None, .. } => {
            for n in PRESET_NAMES {
                println!("{n}");
            }
            Ok(())
        }
        Cmd::Preset { name: Some(name), out, scenario_only } => {
            let sc = preset(&name)
                .ok_or_else(|| format!("unknown preset {name:?}; try: {}", PRESET_NAMES.join(", ")))?;
            let dir = out.unwrap_or_else(|| Path::new("runs").join(&sc.name));
            if scenario_only {
                std::fs::create_dir_all(&dir)?;
                let path = dir.join(format!("{name}.txt"));
                sc.save(&path)?;
                println!("wrote {}", path.display());
            } else {
                report_run(&run_scenario(&sc, &dir)?);
            }
            Ok(())
        }
        Cmd::Dispersion { scenario, k_max, chi2 } => {
            let sc = Scenario::load(&scenario)?;
            let eq = equilibrium(&sc.params)?;
            let jac = jacobian_at(&sc.params, &eq, &sc.eta)?;
            let k_max = k_max.unwrap_or(sc.analyses.k_max);
            let chi2 = chi2.unwrap_or(sc.params.chi2);
            let table = dispersion_table(&sc.params, &eq, &jac, k_max, chi2);
            print!("{}", dispersion_csv(&table));
            let thr = bifurcation_thresholds(&sc.params, &jac, k_max);
            match (thr.k_critical, thr.chi2_critical) {
                (Some(k), Some(chi)) => {
                    eprintln!("# steady-state threshold first crossed at k={k}, chi2={}", fmt_f64(chi));
                }
                _ => eprintln!("# no positive steady-state threshold up to k={k_max}"),
            }
            if let Some((k, chi)) = thr.first_hopf() {
                eprintln!("# oscillatory threshold first crossed at k={k}, chi2={}", fmt_f64(chi));
            }
            Ok(())
        }
        Cmd::FteReport { scenario } => {
            let sc = Scenario::load(&scenario)?;
            let (thr, rows) = fte_rows(&sc)?;
            print!("{}", fte_csv(&sc, &thr, &rows, None));
            Ok(())
        }
        Cmd::Sweep { scenario, vary, out } => sweep(&scenario, &vary, out),
    }
}

fn report_run(art: &RunArtifacts) {
    println!("wrote {} ({} files)", art.out_dir.display(), art.files.len());
    if let Some(outcome) = &art.outcome {
        let events: Vec<String> = outcome.trajectory.events.iter().map(event_text).collect();
        println!("events: {}", if events.is_empty() { "none".into() } else { events.join("; ") });
        if let Some(err) = &outcome.error {
            println!("run stopped early: {err}");
        }
    }
}

struct SweepJob {
    index: usize,
    value: f64,
    dir: PathBuf,
    sc: Scenario,
}

fn sweep(scenario: &Path, vary: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    let base = Scenario::load(scenario)?;
    let (key, lo, hi, n) = parse_vary(vary)?;
    let root = out.unwrap_or_else(|| Path::new("sweeps").join(format!("{}-{key}", base.name)));
    std::fs::create_dir_all(&root)?;

    let mut jobs = Vec::with_capacity(n);
    for i in 0..n {
        let value = if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
        let mut sc = base.clone();
        sc.set_param_field(&key, value)?;
        sc.name = format!("{}-{key}-{i:03}", base.name);
        jobs.push(SweepJob { index: i, value, dir: root.join(format!("{key}-{i:03}")), sc });
    }

    let width = std::thread::available_parallelism().map(|w| w.get()).unwrap_or(4);
    let mut index = String::from("index,value,dir,error,events,final_t\n");
    for chunk in jobs.chunks(width) {
        let results: Vec<_> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|job| scope.spawn(move || run_scenario(&job.sc, &job.dir)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
        });
        for (job, result) in chunk.iter().zip(results) {
            index.push_str(&index_row(job, &result));
            match result {
                Ok(_) => println!("{} = {}: done", key, fmt_f64(job.value)),
                Err(e) => println!("{} = {}: failed ({e})", key, fmt_f64(job.value)),
            }
        }
    }
    let index_path = root.join("sweep_index.csv");
    std::fs::write(&index_path, index)?;
    println!("wrote {}", index_path.display());
    Ok(())
}

fn index_row(job: &SweepJob, result: &Result<RunArtifacts, ecotaxis::ReportError>) -> String {
    let dir = job.dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let head = format!("{},{},{dir}", job.index, fmt_f64(job.value));
    match result {
        Ok(art) => match &art.outcome {
            Some(outcome) => {
                let error = match &outcome.error {
                    // commas would break the row
                    Some(e) => e.to_string().replace(',', ";"),
                    None => "none".into(),
                };
                let events: Vec<String> =
                    outcome.trajectory.events.iter().map(event_text).collect();
                let events =
                    if events.is_empty() { "none".to_string() } else { events.join(";") };
                let final_t = outcome
                    .trajectory
                    .norm_series
                    .last()
                    .map(|r| fmt_f64(r.t))
                    .unwrap_or_default();
                format!("{head},{error},{events},{final_t}\n")
            }
            None => format!("{head},none,none,\n"),
        },
        Err(e) => format!("{head},{},,\n", e.to_string().replace(',', ";")),
    }
}

fn parse_vary(spec: &str) -> Result<(String, f64, f64, usize), CliError> {
    let (key, range) = spec
        .split_once('=')
        .ok_or("--vary expects key=lo:hi:n, e.g. chi2=0:100:11")?;
    let key = key.strip_prefix("params.").unwrap_or(key).to_string();
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err("--vary range must be lo:hi:n".into());
    }
    let lo: f64 = parts[0].parse().map_err(|_| format!("bad range start {:?}", parts[0]))?;
    let hi: f64 = parts[1].parse().map_err(|_| format!("bad range end {:?}", parts[1]))?;
    let n: usize = parts[2].parse().map_err(|_| format!("bad range count {:?}", parts[2]))?;
    if n == 0 {
        return Err("--vary needs at least one point".into());
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err("--vary range must be finite".into());
    }
    Ok((key, lo, hi, n))
}
