use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gauss_ito::cli::{list_catalog, run_file, RunOptions};

#[derive(Parser)]
#[command(name = "gauss-ito", about = "Verify the Gaussian Itô formula on closed-form process models")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write the report, term table and timings.
    Run {
        scenario: PathBuf,
        /// Output directory.
        #[arg(long, env = "GAUSS_ITO_OUT")]
        out: Option<PathBuf>,
        /// Monte Carlo seed, replacing the scenario's seeds.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List the process models with their parameters.
    ListCatalog,
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, out, seed, jobs } => match run_file(&scenario, &RunOptions { out, seed, jobs }) {
            Ok(outcome) => {
                let s = &outcome.report.summary;
                for c in outcome.report.cases.iter().filter(|c| !c.pass) {
                    let why = c.error.clone().unwrap_or_else(|| {
                        format!("residual {:?} against tolerance {:e}", c.residual, c.tolerance)
                    });
                    eprintln!("FAIL {}: {why}", c.id);
                }
                println!(
                    "{} cases: {} passed, {} failed ({} deterministic, {} Monte Carlo); report in {}",
                    s.total,
                    s.passed,
                    s.failed,
                    s.deterministic,
                    s.mc,
                    outcome.out_dir.display()
                );
                ExitCode::from(outcome.exit_code() as u8)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::ListCatalog => {
            print!("{}", list_catalog());
            ExitCode::SUCCESS
        }
        Command::Version => {
            println!("gauss-ito {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
    }
}
