use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use matchsim::commands::{self, TrainArgs};
use matchsim::parallel::Execution;
use matchsim::training::Task;

#[derive(Parser)]
#[command(name = "matchsim", version, about = "Free-fermion circuit simulator")]
struct Cli {
    /// Force single-threaded, bit-reproducible execution.
    #[arg(long, global = true)]
    serial: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Memorize,
    Born,
    Maxcut,
}

#[derive(Subcommand)]
enum Command {
    /// Print p(y|x); with --mask, y lists only the measured qubits or all N.
    Prob {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        mask: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare every outcome against exact diagonalization.
    Compare {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Time single-probability evaluation across qubit counts.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a circuit on a pattern, distribution or graph.
    Train {
        #[arg(long, value_enum)]
        task: TaskArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        beta1: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Loss trace CSV.
        #[arg(long)]
        out: PathBuf,
        /// Trained circuit; defaults to the --out path with a .circuit extension.
        #[arg(long)]
        params_out: Option<PathBuf>,
    },
    /// Print each gate's Hamiltonian as Pauli strings.
    Pauli {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = Execution::from_serial_flag(cli.serial);
    if cli.serial {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Prob { circuit, x, y, mask, seed } => commands::prob(&mut out, circuit, x, y, mask.as_deref(), *seed),
        Command::Compare { circuit, x, seed } => commands::compare(&mut out, circuit, x, *seed, mode),
        Command::Bench {
            n_list,
            layers,
            reps,
            seed,
            out: csv,
        } => commands::bench(&mut out, n_list, *layers, *reps, *seed, csv),
        Command::Train {
            task,
            input,
            iters,
            lr,
            beta1,
            seed,
            out: csv,
            params_out,
        } => commands::train(
            &mut out,
            &TrainArgs {
                task: match task {
                    TaskArg::Memorize => Task::Memorize,
                    TaskArg::Born => Task::Born,
                    TaskArg::Maxcut => Task::Maxcut,
                },
                input,
                iters: *iters,
                lr: *lr,
                beta1: *beta1,
                seed: *seed,
                out: csv,
                params_out: params_out.as_deref(),
                mode,
            },
        ),
        Command::Pauli { circuit, seed } => commands::pauli(&mut out, circuit, *seed),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
