use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mpsolve_cli::{
    compare_dirac, converge, parse_scenario, run, write_comparison, write_convergence, write_run,
    CliError, ScenarioConfig,
};

/// Multi-projection solver for the 1-D time-dependent Schrödinger equation.
#[derive(Parser)]
#[command(name = "mpsolve", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario and write energy.csv, coefficients.csv, state.csv and summary.json.
    Run {
        scenario: PathBuf,
        /// Output directory (overrides outputs.directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun with 1, 2, 4, ... times the slices and write convergence.csv.
    Converge {
        scenario: PathBuf,
        #[arg(long)]
        doublings: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare against the amplitude equations and the first-order formula.
    CompareDirac {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario file and list every problem found.
    Validate { scenario: PathBuf },
}

fn output_dir(config: &ScenarioConfig, out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| config.outputs.directory.clone())
        .unwrap_or_else(|| Path::new("mpsolve-out").join(&config.name))
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { scenario, out } => {
            let config = parse_scenario(&scenario)?;
            let result = run(&config)?;
            let s = result.summary(&config);
            println!(
                "{}: energy ratio {:.6}, final norm {:.12}",
                config.name, s.energy_ratio, s.final_norm
            );
            if let Some(p) = &s.reference_phase {
                println!("phase vs reference {:.6} rad (|overlap| {:.8})", p.phase, p.overlap_abs);
            }
            report(&write_run(&config, &result, &output_dir(&config, out))?);
        }
        Command::Converge { scenario, doublings, out } => {
            if doublings < 2 {
                return Err(CliError::Usage(format!(
                    "--doublings must be at least 2 (got {doublings})"
                )));
            }
            let config = parse_scenario(&scenario)?;
            let table = converge(&config, doublings)?;
            if table.trivially_flat {
                eprintln!("warning: convergence trivially flat (potential is piecewise constant)");
            }
            report(&write_convergence(&table, &output_dir(&config, out))?);
        }
        Command::CompareDirac { scenario, out } => {
            let config = parse_scenario(&scenario)?;
            let cmp = compare_dirac(&config)?;
            let d = &cmp.divergence.report;
            println!(
                "max norm {:.6}, final norm {:.6}, first exceedance {}",
                d.max_norm,
                d.final_norm,
                d.first_exceedance.map_or("none".into(), |t| format!("t = {t}"))
            );
            report(&write_comparison(&cmp, &output_dir(&config, out))?);
        }
        Command::Validate { scenario } => {
            let config = parse_scenario(&scenario)?;
            println!("{}: ok", config.name);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
