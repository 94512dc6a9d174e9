//! `manip-sim`: scenario-driven closed-loop manipulator simulator.
//!
//! Exit codes: 0 success; 1 configuration or schema error; 2 singular
//! Jacobian abort; 3 numerical divergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use manip_core::trajectory::reachability_check;
use manip_sim::runner::AbortReason;
use manip_sim::{config, demos, run_scenario};

#[derive(Parser)]
#[command(name = "manip-sim", version, about = "Batch manipulator-control simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file and write trace.csv + metrics.json.
    Run {
        scenario: PathBuf,
        /// Output directory (overrides the scenario's outputs.dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in demo scenario.
    Demo {
        name: String,
        /// Output directory (default: out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in demo names.
    ListDemos,
    /// Check a scenario file: schema, model, and trajectory reachability.
    Validate { scenario: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run { scenario, out } => cmd_run(&scenario, out.as_deref()),
        Cmd::Demo { name, out } => cmd_demo(&name, out.as_deref()),
        Cmd::ListDemos => {
            for name in demos::DEMO_NAMES {
                println!("{name}");
            }
            0
        }
        Cmd::Validate { scenario } => cmd_validate(&scenario),
    };
    ExitCode::from(code as u8)
}

fn load_scenario(path: &Path) -> Result<(config::Scenario, PathBuf), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("reading {}: {e}", path.display()))?;
    let scn = config::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    Ok((scn, base))
}

fn cmd_run(path: &Path, out_override: Option<&Path>) -> i32 {
    let (scn, base) = match load_scenario(path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let resolved = match config::resolve(&scn, &base) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    let out_dir = out_override
        .map(Path::to_path_buf)
        .or_else(|| scn.outputs.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    execute(&resolved, &out_dir)
}

fn cmd_demo(name: &str, out_override: Option<&Path>) -> i32 {
    let Some(runs) = demos::build(name) else {
        eprintln!("error: unknown demo '{name}'; see `manip-sim list-demos`");
        return 1;
    };
    let base = out_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("out").join(name));
    let mut worst = 0;
    for (subdir, scn) in runs {
        let resolved = match config::resolve(&scn, Path::new(".")) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e:#}");
                return 1;
            }
        };
        let out_dir = if subdir.is_empty() {
            base.clone()
        } else {
            base.join(&subdir)
        };
        let code = execute(&resolved, &out_dir);
        worst = worst.max(code);
    }
    worst
}

fn execute(resolved: &config::Resolved, out_dir: &Path) -> i32 {
    match run_scenario(resolved, out_dir) {
        Ok(outcome) => {
            let m = &outcome.metrics;
            println!(
                "{}: final_p_err={:.3e} final_qvec_err={:.3e} path_length={:.3} \
                 final_sign={} aborted={}",
                out_dir.display(),
                m.final_p_err,
                m.final_qvec_err,
                m.path_length,
                m.final_sign,
                m.aborted
            );
            if outcome.abort != AbortReason::None {
                eprintln!("warning: run aborted ({})", m.aborted);
            }
            outcome.abort.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn cmd_validate(path: &Path) -> i32 {
    let (scn, base) = match load_scenario(path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let resolved = match config::resolve(&scn, &base) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    match reachability_check(
        &resolved.model,
        &resolved.trajectory,
        &resolved.initial.theta,
        200,
        resolved.cfg.cond_abort,
    ) {
        Ok(report) => {
            println!(
                "{}: ok (min_manipulability={:.3e}, max_condition={:.3e}, \
                 condition_violations={})",
                path.display(),
                report.min_manipulability,
                report.max_condition,
                report.condition_violations
            );
            if report.condition_violations > 0 {
                eprintln!("warning: trajectory approaches the condition-number abort limit");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
