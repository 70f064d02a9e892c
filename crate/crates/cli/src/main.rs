use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use corrdyn_cli::{config, landmarks_from_file, run, tomo_demo, CliError, TomoDemo};

#[derive(Parser)]
#[command(name = "corrdyn", version, about = "Dephasing dynamics of two-photon correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a preset (fig2a, fig2b, fig3a, fig3b) or a config file
    Run {
        source: String,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        /// Step override, in units of lambda0
        #[arg(long)]
        step: Option<f64>,
        /// Tomography seed override
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recompute the landmark report from a sweep.csv
    Landmarks { csv: PathBuf },
    /// Simulated tomography of one dephased state
    TomoDemo {
        #[arg(long, allow_negative_numbers = true)]
        kappa_a: f64,
        #[arg(long, allow_negative_numbers = true)]
        kappa_b: f64,
        /// Expected counts per setting
        #[arg(long)]
        counts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        resamples: usize,
    },
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { source, out, step, seed } => {
            let mut cfg = config::load(&source)?;
            if let Some(s) = step {
                cfg.step = s;
            }
            if let (Some(seed), Some(t)) = (seed, cfg.tomography.as_mut()) {
                t.seed = seed;
            }
            let output = run(&cfg, &out)?;
            for f in &output.files {
                println!("wrote {}", f.display());
            }
            print!("{}", output.landmarks.to_text());
        }
        Command::Landmarks { csv } => print!("{}", landmarks_from_file(&csv)?),
        Command::TomoDemo { kappa_a, kappa_b, counts, seed, resamples } => {
            print!("{}", tomo_demo(&TomoDemo { kappa_a, kappa_b, counts, seed, resamples })?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
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
