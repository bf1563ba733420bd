//! `dirset`: direction-set experiments from the command line.
//!
//! Exit codes: 0 success, 1 configuration error, 2 resource limit,
//! 3 a `reproduce` scenario ran but one of its checks failed.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirset_core::Error;

use config::{BudgetConfig, ExperimentConfig, ScanConfig};

#[derive(Parser)]
#[command(name = "dirset", version, about = "Finite direction sets of integer sets and their denseness diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// TOML experiment config; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    bound: Option<u64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    resolution: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for report files (default: stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or structured
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Args, Default)]
struct SetArgs {
    /// Integer-set spec, e.g. `primes` or `block(5: 1..2)`; repeat for one spec per coordinate
    #[arg(long = "spec", short = 's')]
    specs: Vec<String>,
    /// Dimension; a single spec is repeated k times
    #[arg(long)]
    k: Option<usize>,
    /// Restrict to tuples with pairwise distinct coordinates
    #[arg(long)]
    distinct: bool,
    /// euclidean or l1
    #[arg(long)]
    norm: Option<String>,
    /// exhaustive, sampled or auto
    #[arg(long)]
    mode: Option<String>,
    /// Tuples drawn in sampled mode
    #[arg(long)]
    samples: Option<u64>,
    /// Largest tuple product walked exhaustively
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Elements of one set up to the bound
    Enumerate(SetArgs),
    /// Build a truncated direction set
    Directions(SetArgs),
    /// Natural-density checkpoints and verdict
    Density {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<u64>>,
    },
    /// Consecutive-ratio profile over the last W pairs
    Ratios {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Epsilon-coverage of a probe grid
    Cover {
        #[command(flatten)]
        set: SetArgs,
        /// grid or random
        #[arg(long)]
        probes: Option<String>,
    },
    /// Exact gaps of the ratio set inside (lo, hi)
    Gaps {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        lo: Option<String>,
        #[arg(long)]
        hi: Option<String>,
        /// pair-scan, interval-sieve or auto
        #[arg(long)]
        method: Option<String>,
    },
    /// Directions persisting across a bound ladder
    Accumulate {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<u64>>,
    },
    /// Permutation and projection closure of the persistent directions
    Closure {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<u64>>,
    },
    /// Three-term arithmetic progressions
    Aps {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Counts of n = k f(k) up to the bound, f = omega or totient
    CountFx {
        #[arg(long)]
        function: Option<String>,
    },
    /// Find a tuple whose direction lies in an open box
    Witness {
        #[command(flatten)]
        set: SetArgs,
        /// One `lo:hi` interval per coordinate
        #[arg(long = "box", value_delimiter = ',')]
        open_box: Option<Vec<String>>,
        #[arg(long)]
        search_bound: Option<u64>,
    },
    /// Run a named acceptance scenario
    Reproduce { scenario: Option<String> },
}

impl SetArgs {
    fn into_config(self) -> ExperimentConfig {
        let budget = (self.budget.is_some() || self.samples.is_some())
            .then_some(BudgetConfig { tuples: self.budget, samples: self.samples });
        ExperimentConfig {
            specs: (!self.specs.is_empty()).then_some(self.specs),
            k: self.k,
            distinct: self.distinct.then_some(true),
            norm: self.norm,
            mode: self.mode,
            budget,
            ..Default::default()
        }
    }
}

impl Command {
    fn into_config(self) -> ExperimentConfig {
        let (name, mut c) = match self {
            Command::Enumerate(s) => ("enumerate", s.into_config()),
            Command::Directions(s) => ("directions", s.into_config()),
            Command::Density { set, checkpoints } => ("density", ExperimentConfig { checkpoints, ..set.into_config() }),
            Command::Ratios { set, window } => ("ratios", ExperimentConfig { window, ..set.into_config() }),
            Command::Cover { set, probes } => ("cover", ExperimentConfig { probes, ..set.into_config() }),
            Command::Gaps { set, lo, hi, method } => {
                let scan = (lo.is_some() || hi.is_some() || method.is_some()).then_some(ScanConfig { lo, hi, method });
                ("gaps", ExperimentConfig { scan, ..set.into_config() })
            }
            Command::Accumulate { set, ladder } => ("accumulate", ExperimentConfig { ladder, ..set.into_config() }),
            Command::Closure { set, ladder } => ("closure", ExperimentConfig { ladder, ..set.into_config() }),
            Command::Aps { set, limit } => ("aps", ExperimentConfig { limit, ..set.into_config() }),
            Command::CountFx { function } => ("count-fx", ExperimentConfig { function, ..Default::default() }),
            Command::Witness { set, open_box, search_bound } => {
                ("witness", ExperimentConfig { open_box, search_bound, ..set.into_config() })
            }
            Command::Reproduce { scenario } => ("reproduce", ExperimentConfig { scenario, ..Default::default() }),
        };
        c.command = Some(name.into());
        c
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resource(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = (|| {
        let base = match &cli.config {
            Some(path) => config::load(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = ExperimentConfig {
            bound: cli.bound,
            epsilon: cli.epsilon,
            resolution: cli.resolution,
            seed: cli.seed,
            workers: cli.workers,
            out: cli.out,
            format: cli.format,
            ..Default::default()
        };
        let sub = cli.command.map(Command::into_config).unwrap_or_default();
        commands::run(&base.overlaid(sub).overlaid(flags))
    })();
    match result {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("dirset: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
