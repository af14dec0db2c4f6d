use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shor_spectra::error::Error;
use shor_spectra::experiment::{
    orbits_json, run_fig1, run_fig23, run_verify, shift_spectrum_json, thue_morse_csv,
    ExperimentConfig,
};
use shor_spectra::io::{parse_theta_spec, ThetaSpec};
use shor_spectra::operators::RegisterShape;

#[derive(Parser)]
#[command(name = "shor-spectra", version, about = "Spectral statistics of Shor order-finding operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// First-register qubit count.
    #[arg(long, default_value_t = 10)]
    n1: u32,
    /// The odd integer N whose order is sought.
    #[arg(long, default_value_t = 29)]
    modulus: u64,
    /// Base x, coprime to the modulus.
    #[arg(long, default_value_t = 2)]
    base: u64,
    /// Shift eigenangles: `paper`, `all`, `seeds`, or comma-separated
    /// rationals p/q meaning the angle 2*pi*p/q.
    #[arg(long, default_value = "paper")]
    thetas: String,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Histogram bin width.
    #[arg(long, default_value_t = 0.25)]
    bins: f64,
    /// Include the wrap-around spacing closing the circle.
    #[arg(long)]
    wraparound: bool,
    /// Eigenstate index within the first theta block (sorted by angle).
    /// Index 0 is the exact flat eigenstate (eigenvalue 1), so the
    /// default is the first generic state.
    #[arg(long, default_value_t = 1)]
    seed_index: usize,
}

impl CommonArgs {
    fn to_config(&self) -> Result<ExperimentConfig, Error> {
        let thetas: ThetaSpec = parse_theta_spec(&self.thetas)?;
        Ok(ExperimentConfig {
            n1: self.n1,
            modulus: self.modulus,
            base: self.base,
            thetas,
            bin_width: self.bins,
            include_wraparound: self.wraparound,
            output_dir: self.out.clone(),
            eigenstate_index: self.seed_index,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the orbit decomposition of k -> x*k mod N as JSON.
    Orbits {
        #[arg(long, default_value_t = 2)]
        base: u64,
        #[arg(long)]
        modulus: u64,
    },
    /// Print the distinct shift eigenangles with multiplicities as JSON.
    ShiftSpectrum {
        #[arg(long, default_value_t = 2)]
        base: u64,
        #[arg(long)]
        modulus: u64,
    },
    /// Spacing-distribution experiment (histogram vs CUE/GOE/Poisson).
    Fig1 {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Eigenvector intensity experiment (intensities and cumulative
    /// distribution vs 1-exp(-x)).
    Fig23 {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Emit the Fourier transform of the Thue-Morse sequence as CSV.
    ThueMorse {
        #[arg(long)]
        n1: u32,
    },
    /// Run the cross-check battery on a small shape.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Orbits { base, modulus } => {
            println!("{}", orbits_json(base, modulus)?);
        }
        Command::ShiftSpectrum { base, modulus } => {
            println!("{}", shift_spectrum_json(base, modulus)?);
        }
        Command::Fig1 { common } => {
            let config = common.to_config()?;
            let report = run_fig1(&config)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Fig23 { common } => {
            let config = common.to_config()?;
            let report = run_fig23(&config)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::ThueMorse { n1 } => {
            print!("{}", thue_morse_csv(n1)?);
        }
        Command::Verify { common } => {
            let config = common.to_config()?;
            // exercised early so config errors exit with code 2
            RegisterShape::minimal(config.n1, config.modulus, config.base)?;
            let report = run_verify(&config)?;
            for c in &report.checks {
                println!(
                    "{}: {} (margin {:e}, tolerance {:e})",
                    c.name,
                    if c.passed { "pass" } else { "FAIL" },
                    c.margin,
                    c.tolerance
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::VerificationFailure(failures)) => {
            for f in &failures {
                eprintln!("verification failed: {f}");
            }
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
