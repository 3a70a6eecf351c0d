use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gsss_cli::{
    cmd_couple, cmd_decay, cmd_iat_sweep, cmd_rate_table, cmd_sample, CliError, DensitySpec, Dims, Format, Output,
    Statistic, SweepConfig,
};

#[derive(Parser)]
#[command(name = "gsss", version, about = "Geodesic shrinkage slice sampling experiments on the sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Base seed; every output is a function of the arguments and this seed.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Output file, `-` for stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Table of the contraction rate bound and spectral gap lower bound.
    RateTable {
        /// Dimensions, e.g. `3..1000`, `2,3,10` or `2..1024 step 2x`.
        #[arg(long, default_value = "2..1000")]
        dims: String,
    },
    /// Mean integrated autocorrelation time of constant-target chains.
    IatSweep {
        #[arg(long, default_value = "2..1024 step 2x")]
        dims: String,
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = Statistic::Component)]
        statistic: Statistic,
    },
    /// Rotation-coupling estimate of the one-step contraction coefficient.
    Couple {
        #[arg(long, short)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Run a single chain from e_1 and write its states.
    Sample {
        #[arg(long, short)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
        /// Target for ideal slice sampling: `constant`, `hemisphere` or
        /// `exp-linear:<kappa>`. Omit for the constant-target kernel.
        #[arg(long)]
        density: Option<String>,
    },
    /// Empirical Wasserstein-1 distance to uniform along the chain.
    Decay {
        #[arg(long, short)]
        dim: usize,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        steps: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let output = Output::from_arg(cli.output);
    let (seed, format) = (cli.seed, cli.format);
    match cli.command {
        Command::RateTable { dims } => {
            cmd_rate_table(&dims.parse::<Dims>()?, format, &output)?;
        }
        Command::IatSweep {
            dims,
            iters,
            reps,
            statistic,
        } => {
            let config = SweepConfig {
                dims: dims.parse()?,
                n_its: iters,
                n_rep: reps,
                seed,
                statistic,
            };
            cmd_iat_sweep(&config, format, &output)?;
        }
        Command::Couple { dim, alpha, samples } => {
            cmd_couple(dim, alpha, samples, seed, format, &output)?;
        }
        Command::Sample { dim, iters, density } => {
            let density = density.map(|s| s.parse::<DensitySpec>()).transpose()?;
            cmd_sample(dim, iters, seed, density.as_ref(), format, &output)?;
        }
        Command::Decay { dim, samples, steps } => {
            cmd_decay(dim, samples, steps, seed, format, &output)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = std::env::var("GSSS_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size thread pool: {e}");
        }
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
