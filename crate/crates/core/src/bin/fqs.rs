//! `fqs`: simulate, verify, and budget time-periodic Hamiltonian dynamics.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fqs::cli::{
    cmd_resources, cmd_simulate, cmd_verify, write_reports, write_simulation, ExperimentConfig,
    ResourceTableRequest, EXIT_NUMERICAL, EXIT_OK,
};
use fqs::error::FqsError;

#[derive(Parser)]
#[command(
    name = "fqs",
    version,
    about = "Floquet-system Hamiltonian simulation toolkit"
)]
struct Cli {
    /// Worker threads for sweep parallelism (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a pipeline described by a config file and write state + summary.
    Simulate(SimulateArgs),
    /// Run a verification suite and write the bound-report table.
    Verify(VerifyArgs),
    /// Emit the resource comparison table.
    Resources(ResourcesArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: bounds | encodings | amplification | all.
    #[arg(long, default_value = "all")]
    suite: String,

    /// Optional experiment config: validated up front, and its model drives
    /// the Hamiltonian-dependent bound sweeps.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ResourcesArgs {
    #[arg(long, default_value_t = 100.0)]
    alpha: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 100.0)]
    t: f64,
    /// Comma-separated epsilon grid.
    #[arg(long, default_value = "1e-3", value_delimiter = ',')]
    epsilon: Vec<f64>,
    /// Optional comma-separated omega sweep (defaults to --omega only).
    #[arg(long, value_delimiter = ',')]
    omega_sweep: Option<Vec<f64>>,
    #[arg(long, default_value_t = 3)]
    n_a: u64,
    /// Trotter order for the comparison row.
    #[arg(long, default_value_t = 2)]
    trotter_p: u32,
}

fn error_record(err: &FqsError) -> String {
    serde_json::json!({
        "kind": err.kind(),
        "error": err.to_string(),
        "exit_code": err.exit_code(),
    })
    .to_string()
}

fn run(cli: Cli) -> i32 {
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match cli.command {
        Command::Simulate(args) => {
            let mut config = match ExperimentConfig::from_path(&args.config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{}", error_record(&e));
                    return e.exit_code();
                }
            };
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            match cmd_simulate(&config).and_then(|a| {
                let files = write_simulation(&a, &cli.out)?;
                Ok((a, files))
            }) {
                Ok((artifacts, files)) => {
                    println!(
                        "fidelity {:.12}  success_probability {:.12}  l_max {}  wall {:.3}s",
                        artifacts.diagnostics.fidelity,
                        artifacts.diagnostics.success_probability,
                        artifacts.diagnostics.l_max,
                        artifacts.diagnostics.wall_time_s
                    );
                    for f in files {
                        println!("wrote {}", f.display());
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("{}", error_record(&e));
                    e.exit_code()
                }
            }
        }
        Command::Verify(args) => {
            let config = match &args.config {
                Some(path) => match ExperimentConfig::from_path(path) {
                    Ok(c) => Some(c),
                    Err(e) => {
                        eprintln!("{}", error_record(&e));
                        return e.exit_code();
                    }
                },
                None => None,
            };
            match cmd_verify(&args.suite, config.as_ref()) {
                Ok((rows, code)) => {
                    let violations = rows.iter().filter(|r| r.violated()).count();
                    match write_reports(&rows, &cli.out) {
                        Ok(path) => println!(
                            "{} checks, {} violations; wrote {}",
                            rows.len(),
                            violations,
                            path.display()
                        ),
                        Err(e) => {
                            eprintln!("{}", error_record(&e));
                            return e.exit_code();
                        }
                    }
                    code
                }
                Err(e) => {
                    eprintln!("{}", error_record(&e));
                    e.exit_code()
                }
            }
        }
        Command::Resources(args) => {
            let req = ResourceTableRequest {
                alpha: args.alpha,
                gamma: args.gamma.unwrap_or(args.alpha / 2.0),
                omega: args.omega,
                t: args.t,
                epsilons: args.epsilon.clone(),
                omegas: args.omega_sweep.unwrap_or_else(|| vec![args.omega]),
                n_a: args.n_a,
                trotter_order: args.trotter_p,
            };
            match cmd_resources(&req) {
                Ok(csv) => {
                    if let Err(e) = std::fs::create_dir_all(&cli.out)
                        .map_err(FqsError::from)
                        .and_then(|_| {
                            std::fs::write(cli.out.join("resources.csv"), &csv)
                                .map_err(FqsError::from)
                        })
                    {
                        eprintln!("{}", error_record(&e));
                        return e.exit_code();
                    }
                    println!("wrote {}", cli.out.join("resources.csv").display());
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("{}", error_record(&e));
                    e.exit_code()
                }
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("FQS_LOG", "error")).init();
    let cli = Cli::parse();
    let code = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli)))
        .unwrap_or(EXIT_NUMERICAL);
    ExitCode::from(code as u8)
}
