use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use strip_poisson::run::{self, RunFailure, EXIT_CONFIG};
use strip_poisson::verify::{self, Suite};

/// Poisson problem on the periodic infinite strip.
#[derive(Parser)]
#[command(name = "strip-poisson", version)]
struct Cli {
    /// Upper bound on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a JSON config file.
    Run {
        config: PathBuf,
        /// Output directory; takes precedence over STRIP_POISSON_OUTPUT and the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a verification battery: table1, green, manufactured,
    /// solver_equivalence, dichotomy, constructive, inequalities, kernel,
    /// norm_ratio or all.
    Verify { suite: String },
}

fn report_failure(f: &RunFailure) -> ExitCode {
    eprintln!("{}", f.to_json());
    ExitCode::from(f.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", serde_json::json!({"error": "THREADS", "message": e.to_string()}));
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    match cli.command {
        Command::Run { config, output } => match run::run_file(&config, output.as_deref()) {
            Ok(out) => {
                println!("wrote {}", out.output_dir.display());
                ExitCode::SUCCESS
            }
            Err(f) => report_failure(&f),
        },
        Command::Verify { suite } => {
            let suite: Suite = match suite.parse() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{}", serde_json::json!({"error": e.code(), "message": e.to_string()}));
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            };
            let checks = verify::run_suite(suite);
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{}: {}/{} checks passed", suite.name(), checks.len() - failed, checks.len());
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
