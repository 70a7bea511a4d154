//! Thin command-line driver over the library's experiment functions.
//!
//! Exit codes: 0 on success, 2 for invalid configuration (including flag
//! parse errors), 3 when a resource guard rejects the request.

use std::fs::File;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bscq_polar::cli::{self, Bound, DecoderKind, FrozenMode};
use bscq_polar::de::SelectMode;
use bscq_polar::Error;

#[derive(Parser)]
#[command(
    name = "bscq-polar",
    about = "Polar code design and decoding experiments on qubit BSCQ channels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output path (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    Ub,
    Ncub,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Pmbpqm,
    Helstrom,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrozenArg {
    Random,
    Ones,
    Zeros,
}

#[derive(Subcommand)]
enum Command {
    /// Channel capacity over a gamma grid (CSV)
    Capacity {
        #[arg(long)]
        delta: f64,
        /// Comma-separated gammas; defaults to a 21-point admissible grid
        #[arg(long)]
        gamma: Option<String>,
    },
    /// Design a polar code by Monte-Carlo density evolution (JSON)
    Design {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long)]
        n: usize,
        #[arg(long = "M", default_value_t = 10_000)]
        m_samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Fixed information-set size; omit to use the union-bound target
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "ub")]
        bound: BoundArg,
        /// Block-error target for union-bound selection
        #[arg(long, default_value_t = 0.1)]
        target: f64,
    },
    /// Achievable rate versus gamma for PM-BPQM (UB/NCUB) and the
    /// measure-first baseline (CSV)
    RateSweep {
        #[arg(long)]
        delta: f64,
        /// Comma-separated gammas; defaults to a 10-point admissible grid
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long = "M", default_value_t = 10_000)]
        m_samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        target: f64,
    },
    /// Sorted per-index error curves over a depth range (CSV)
    Polarization {
        #[arg(long, default_value_t = 0.08)]
        delta: f64,
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        /// Comma-separated depths
        #[arg(long, default_value = "7,8,9,10,11,12")]
        n: String,
        #[arg(long = "M", default_value_t = 10_000)]
        m_samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact density evolution versus the genie decoder (CSV)
    DeVsSim {
        /// Qubit BSCQ channel parameters (ignored when --theta is given)
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Pure-state-channel angles (comma separated); switches to the
        /// θ-domain decoder
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Monte-Carlo block error of a designed code (CSV)
    BlockError {
        #[arg(long)]
        delta: f64,
        /// Comma-separated gammas
        #[arg(long, default_value = "0")]
        gamma: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Information-set size (rate = k / 2^n)
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long = "M", default_value_t = 10_000)]
        m_samples: usize,
        #[arg(long, value_enum, default_value = "pmbpqm")]
        decoder: DecoderArg,
        #[arg(long, value_enum, default_value = "random")]
        frozen: FrozenArg,
    },
}

fn parse_list(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidConfig(format!("bad number {t:?}: {e}")))
        })
        .collect()
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidConfig(format!("bad integer {t:?}: {e}")))
        })
        .collect()
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), Error> {
    match cli.command {
        Command::Capacity { delta, gamma } => {
            let grid = match gamma {
                Some(g) => parse_list(&g)?,
                None => cli::admissible_gamma_grid(delta, 21),
            };
            cli::cmd_capacity(delta, &grid, out)
        }
        Command::Design {
            delta,
            gamma,
            n,
            m_samples,
            seed,
            k,
            bound,
            target,
        } => {
            let select = match k {
                Some(k) => SelectMode::FixedK(k),
                None => SelectMode::TargetUnionBound {
                    target,
                    factor: match bound {
                        BoundArg::Ub => Bound::Ub.factor(),
                        BoundArg::Ncub => Bound::Ncub.factor(),
                    },
                },
            };
            cli::cmd_design(delta, gamma, n, m_samples, seed, select, out).map(|_| ())
        }
        Command::RateSweep {
            delta,
            gamma,
            n,
            m_samples,
            seed,
            target,
        } => {
            let grid = match gamma {
                Some(g) => parse_list(&g)?,
                None => cli::admissible_gamma_grid(delta, 10),
            };
            cli::cmd_rate_sweep(delta, &grid, n, m_samples, seed, target, out).map(|_| ())
        }
        Command::Polarization {
            delta,
            gamma,
            n,
            m_samples,
            seed,
        } => {
            let depths = parse_usize_list(&n)?;
            cli::cmd_polarization(delta, gamma, &depths, m_samples, seed, out).map(|_| ())
        }
        Command::DeVsSim {
            delta,
            gamma,
            theta,
            n,
        } => match theta {
            Some(t) => cli::cmd_de_vs_sim_psc(&parse_list(&t)?, n, out).map(|_| ()),
            None => cli::cmd_de_vs_sim_bscq(delta, gamma, n, out).map(|_| ()),
        },
        Command::BlockError {
            delta,
            gamma,
            n,
            k,
            trials,
            seed,
            m_samples,
            decoder,
            frozen,
        } => {
            let grid = parse_list(&gamma)?;
            cli::cmd_block_error(
                delta,
                &grid,
                n,
                k,
                trials,
                seed,
                match decoder {
                    DecoderArg::Pmbpqm => DecoderKind::Pmbpqm,
                    DecoderArg::Helstrom => DecoderKind::Helstrom,
                },
                match frozen {
                    FrozenArg::Random => FrozenMode::Random,
                    FrozenArg::Ones => FrozenMode::Ones,
                    FrozenArg::Zeros => FrozenMode::Zeros,
                },
                m_samples,
                out,
            )
            .map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.out {
        Some(path) => match File::create(path) {
            Ok(mut f) => run(cli, &mut f),
            Err(e) => Err(Error::Io(e)),
        },
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            run(cli, &mut lock)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::ResourceGuard(msg)) => {
            eprintln!("resource guard: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
