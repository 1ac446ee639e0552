//! `usc-lab`: solve, sweep and analyse the capacity expansion model from
//! the command line.
//!
//! Exit codes: 0 on success, 1 when a solve is infeasible, unbounded or
//! fails, 2 on usage or configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use usc_lab_core::analysis::{detect_cycling, CYCLING_TOL};
use usc_lab_core::harness::{calibrate_equivalent_target, factor_separation, run_sweep};
use usc_lab_core::io::{
    default_config, load_config, load_sweep, to_json_string, write_profiles_csv, write_results,
    write_sweep_csv, PolicyOverride, RunConfig,
};
use usc_lab_core::lp::{write_mps, MpsStyle, RevisedSimplex};
use usc_lab_core::model::{synth_profiles, DEFAULT_SEED, DESK_HORIZON};
use usc_lab_core::{build_lp, solve_scenario, Error, Scenario, Slcr, Variant};

#[derive(Parser)]
#[command(name = "usc-lab", version, about = "Capacity expansion with renewable-share constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// TOML configuration; the bundled default when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Constraint family (1-4) of the renewable-share policy.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    family: Option<u8>,
    /// Storage-loss coverage: zero, proportionate or complete (or a/b/c).
    #[arg(long)]
    slcr: Option<Slcr>,
    /// Target share in [0, 1].
    #[arg(long)]
    phi: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write results.json, dispatch.csv, rldc.csv and cycling.csv.
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory (overrides the config).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run the sweep described by a config file's [sweep] section; writes sweep.csv.
    Sweep {
        #[arg(long, short)]
        config: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Find the complete-coverage target reaching `target` when reported under another variant.
    Calibrate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        target: f64,
        /// Variant under which the share is reported, e.g. `1b`.
        #[arg(long)]
        report_as: Variant,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Five-run separation of cycling and ambition effects; prints JSON.
    Separate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Write synthetic PV and wind availability profiles as CSV.
    GenProfiles {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DESK_HORIZON)]
        horizon: usize,
        #[arg(long, short, default_value = "profiles.csv")]
        out: PathBuf,
    },
    /// Write the scenario's LP in MPS format.
    DumpLp {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Fixed-column MPS with generated names instead of free MPS.
        #[arg(long)]
        fixed: bool,
        #[arg(long, short, default_value = "model.mps")]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Solve(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Lp(_) | Error::Calibration(_) | Error::Undefined(_) => Failure::Solve(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn scenario(args: &ScenarioArgs) -> Result<(Scenario, RunConfig), Failure> {
    let (mut s, rc) = match &args.config {
        Some(p) => load_config(p)?,
        None => default_config()?,
    };
    PolicyOverride {
        family: args.family,
        slcr: args.slcr,
        phi: args.phi,
    }
    .apply(&mut s)?;
    Ok((s, rc))
}

fn emit_json(text: &str, out: &Path) -> Result<(), Failure> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(out, text)?;
    print!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { scenario: a, out } => {
            let (s, rc) = scenario(&a)?;
            let run = solve_scenario(&s, &RevisedSimplex::new(rc.solver.clone()))?;
            let dir = out.unwrap_or(rc.output_dir);
            write_results(&run, &dir)?;
            if !run.is_optimal() {
                return Err(Failure::Solve(format!(
                    "scenario is {}; see {}",
                    run.solution.status,
                    dir.join("results.json").display()
                )));
            }
            let report = detect_cycling(&run, CYCLING_TOL);
            println!(
                "optimal objective {:.6e}; {} cycling hours, {:.6e} MWh unintended; results in {}",
                run.solution.objective,
                report.hours,
                report.total_energy(),
                dir.display()
            );
        }
        Command::Sweep { config, out } => {
            let (spec, rc) = load_sweep(&config)?;
            let rows = run_sweep(&spec, &rc.solver)?;
            let path = out.unwrap_or(rc.output_dir).join("sweep.csv");
            write_sweep_csv(&rows, &path)?;
            let failed = rows.iter().filter(|r| r.objective.is_none()).count();
            println!("{} rows ({failed} not optimal) written to {}", rows.len(), path.display());
        }
        Command::Calibrate {
            scenario: a,
            target,
            report_as,
            tol,
        } => {
            let (mut s, rc) = scenario(&a)?;
            if s.policy.variant().map(|v| v.slcr) != Some(Slcr::Complete) {
                let family = s.policy.variant().map_or(report_as.family, |v| v.family);
                PolicyOverride {
                    family: Some(family),
                    slcr: Some(Slcr::Complete),
                    phi: Some(target),
                }
                .apply(&mut s)?;
            }
            let cal = calibrate_equivalent_target(&s, target, report_as, tol, &rc.solver)?;
            emit_json(&to_json_string(&cal)?, &rc.output_dir.join("calibration.json"))?;
        }
        Command::Separate { scenario: a } => {
            let (s, rc) = scenario(&a)?;
            let phi = a.phi.unwrap_or(if s.policy.variant().is_some() { s.policy.phi } else { 0.8 });
            let sep = factor_separation(&s, phi, &rc.solver)?;
            emit_json(&to_json_string(&sep)?, &rc.output_dir.join("separation.json"))?;
        }
        Command::GenProfiles { seed, horizon, out } => {
            let p = synth_profiles(seed, horizon)?;
            write_profiles_csv(&p.pv, &p.wind, &out)?;
            println!("{horizon} hours written to {}", out.display());
        }
        Command::DumpLp {
            scenario: a,
            fixed,
            out,
        } => {
            let (s, _) = scenario(&a)?;
            let (lp, _) = build_lp(&s)?;
            let style = if fixed { MpsStyle::Fixed } else { MpsStyle::Free };
            let mut f = std::io::BufWriter::new(fs::File::create(&out)?);
            write_mps(&lp, "USCLAB", style, &mut f)?;
            println!("{} rows, {} columns written to {}", lp.n_rows(), lp.n_vars(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Solve(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
