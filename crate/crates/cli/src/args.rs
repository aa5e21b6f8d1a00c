use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "xfid", version, about = "Two-qubit X-state metrics, inverse relations and figure sweeps")]
#[command(args_override_self = true)]
pub struct Cli {
    /// key = value file with defaults for any flag; flags given on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and oracle metrics for one state.
    Analyze {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rank and kind of one state.
    Classify {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Recover sin²θ from a purity/concurrence target and build the state.
    Solve {
        #[arg(long)]
        relation: String,
        #[arg(long)]
        purity: f64,
        #[arg(long)]
        concurrence: f64,
        /// The relation's free coherence (`x` or `y`, see `--relation`).
        #[arg(long)]
        aux: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<f64>,
        #[arg(long)]
        degrees: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a figure preset or a custom one-parameter sweep.
    Sweep(SweepArgs),
    /// Seeded closed-vs-oracle check over every rank.
    Verify {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = xfid_core::verify::DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Recompute the reference states and comparison pairs.
    Examples {
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub phi: f64,
    #[arg(long)]
    pub psi: f64,
    #[arg(long, default_value_t = 0.0)]
    pub x: f64,
    #[arg(long, default_value_t = 0.0)]
    pub y: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.0)]
    pub nu: f64,
    /// Read angles and phases in degrees.
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Figure preset, 1 to 10.
    #[arg(long, conflicts_with_all = ["relation", "vary"])]
    pub figure: Option<u32>,
    #[arg(long, requires = "vary")]
    pub relation: Option<String>,
    /// Swept input of a custom sweep: P, C, e or f.
    #[arg(long, requires_all = ["relation", "lo", "hi"])]
    pub vary: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub purity: Option<f64>,
    #[arg(long)]
    pub concurrence: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub e: Option<f64>,
    #[arg(long)]
    pub f: Option<f64>,
    #[arg(long)]
    pub degrees: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Clone, Default)]
pub struct OutputArgs {
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    #[arg(long)]
    pub csv: bool,
    /// Write the primary output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}
