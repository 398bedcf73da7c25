use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use feedscope::commands::{
    analyze_cmd, compare_cmd, fixture_cmd, gen_synthetic_cmd, graph_loops_cmd, simulate_cmd, AnalyzeOpts,
    AnalyzeSettings, CompareOpts, GenOpts, GraphLoopsOpts, Output, RunOverrides, SimulateOpts,
};
use feedscope::synth::SyntheticSpec;
use feedscope::CliError;
use feedscope_core::discovery::Method;

/// Feedback loop discovery and dominance analysis for stock-and-flow models.
#[derive(Parser)]
#[command(name = "feedscope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Exhaustive,
    StrongestPath,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Exhaustive => Method::Exhaustive,
            MethodArg::StrongestPath => Method::StrongestPath,
        }
    }
}

fn fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s} is not a number"))?;
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{s} is not in [0, 1)"))
    }
}

fn ratio(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s} is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{s} is not in [0, 1]"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a model and print every variable as CSV.
    Simulate {
        model: PathBuf,
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discover, score and rank the feedback loops of a model.
    Analyze {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Largest loop count enumerated exhaustively.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
        /// Search every n-th step in strongest-path mode.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        stride: u64,
        /// Drop loops whose average contribution is below this fraction.
        #[arg(long, default_value_t = 0.001, value_parser = fraction)]
        threshold: f64,
        /// Keep at most this many loops.
        #[arg(long)]
        top: Option<usize>,
        /// Ranking JSON destination.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-step loop scores as `time,loop_id,score,relative`.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Loop catalog JSON.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Per-step link scores as `time,src,dst,score`.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
    /// Find the loops of a weighted edge list (`src,dst,weight`).
    GraphLoops {
        edges: PathBuf,
        /// Node to search from, or `all`.
        #[arg(long, default_value = "all")]
        start: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random linear model with densely coupled stocks.
    GenSynthetic {
        #[arg(long)]
        stocks: usize,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report how much of a reference catalog a candidate catalog recovered.
    Compare {
        reference: PathBuf,
        candidate: PathBuf,
        /// Model the catalogs belong to, or the edge list they came from.
        model: PathBuf,
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// Shared-segment ratio at which a missed loop counts as a near miss.
        #[arg(long, default_value_t = 0.6, value_parser = ratio)]
        near_miss: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a bundled fixture, or list them.
    Fixture { name: Option<String> },
}

fn run(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Simulate {
            model,
            start,
            stop,
            dt,
            out,
        } => simulate_cmd(&SimulateOpts {
            model,
            run: RunOverrides { start, stop, dt },
            out,
        }),
        Command::Analyze {
            model,
            method,
            cap,
            stride,
            threshold,
            top,
            out,
            csv,
            catalog,
            scores,
        } => analyze_cmd(&AnalyzeOpts {
            model,
            settings: AnalyzeSettings {
                method: method.into(),
                cap: cap as usize,
                stride: stride as usize,
                threshold,
                top,
            },
            out,
            csv,
            catalog,
            scores,
        }),
        Command::GraphLoops {
            edges,
            start,
            method,
            cap,
            out,
        } => graph_loops_cmd(&GraphLoopsOpts {
            edges,
            start: (start != "all").then_some(start),
            method: method.into(),
            cap: cap as usize,
            out,
        }),
        Command::GenSynthetic {
            stocks,
            density,
            seed,
            out,
        } => gen_synthetic_cmd(&GenOpts {
            spec: SyntheticSpec { stocks, density, seed },
            out,
        }),
        Command::Compare {
            reference,
            candidate,
            model,
            top,
            near_miss,
            out,
        } => compare_cmd(&CompareOpts {
            reference,
            candidate,
            model,
            top,
            near_miss,
            out,
        }),
        Command::Fixture { name } => fixture_cmd(name.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version requests are not errors
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(output) => {
            for w in &output.warnings {
                eprintln!("{w}");
            }
            print!("{}", output.stdout);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
