use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use hypermono::cli::{run_str, Command, RunOptions, EXIT_CONFIG_ERROR};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Classify,
    BuildU1,
    BuildL0,
    Blaschke,
    Curvature,
    Monodromy,
    ResidueAudit,
    Heins,
    DivisorAudit,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Classify => Command::Classify,
            Cmd::BuildU1 => Command::BuildU1,
            Cmd::BuildL0 => Command::BuildL0,
            Cmd::Blaschke => Command::Blaschke,
            Cmd::Curvature => Command::Curvature,
            Cmd::Monodromy => Command::Monodromy,
            Cmd::ResidueAudit => Command::ResidueAudit,
            Cmd::Heins => Command::Heins,
            Cmd::DivisorAudit => Command::DivisorAudit,
        }
    }
}

/// Build singular hyperbolic metrics, extract monodromy and run audits.
///
/// Writes `report.json` (and `grid.csv` when `--grid` is given) to the output
/// directory. Exit status: 0 pass, 1 input error, 2 audit failure.
/// HYPERMONO_THREADS caps the number of worker threads.
#[derive(Debug, Parser)]
#[command(name = "hypermono", version)]
struct Args {
    command: Cmd,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Resolution of the CSV grid.
    #[arg(long)]
    grid: Option<usize>,
    /// Quadrature tolerance for continuation.
    #[arg(long)]
    tol: Option<f64>,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("HYPERMONO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("HYPERMONO_THREADS={raw:?} is not a count"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(e) = configure_threads() {
        eprintln!("hypermono: {e}");
        return ExitCode::from(EXIT_CONFIG_ERROR as u8);
    }
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("hypermono: cannot read {}: {e}", args.config.display());
            return ExitCode::from(EXIT_CONFIG_ERROR as u8);
        }
    };
    let opts = RunOptions { seed: args.seed, grid: args.grid, tol: args.tol };
    let output = match run_str(args.command.into(), &text, &opts) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("hypermono: {e}");
            return ExitCode::from(EXIT_CONFIG_ERROR as u8);
        }
    };
    let write = || -> std::io::Result<()> {
        fs::create_dir_all(&args.out)?;
        fs::write(args.out.join("report.json"), output.report_json())?;
        if let Some(csv) = &output.csv {
            fs::write(args.out.join("grid.csv"), csv)?;
        }
        Ok(())
    };
    if let Err(e) = write() {
        eprintln!("hypermono: cannot write to {}: {e}", args.out.display());
        return ExitCode::from(EXIT_CONFIG_ERROR as u8);
    }
    println!("{}", args.out.join("report.json").display());
    ExitCode::from(output.status.exit_code() as u8)
}
