use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use probdl::cli::{
    cmd_bench, cmd_check, cmd_gen_random, cmd_gen_synthetic, cmd_query, OutputFormat, Report,
    RunConfig,
};
use probdl::generate::RandomKbParams;
use probdl::justify::{DEFAULT_HST_BUDGET, DEFAULT_TIMEOUT};
use probdl::semantics::DEFAULT_WORLD_LIMIT;
use probdl::tableau::DEFAULT_NODE_BUDGET;
use probdl::{Engine, Method};

/// Probabilistic ALC reasoner.
#[derive(Parser)]
#[command(name = "probdl", version)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Single-justification strategy used inside the hitting set tree.
    #[arg(long, value_enum, default_value_t = Method::GlassBox, global = true)]
    method: Method,
    /// Probability engine.
    #[arg(long, value_enum, default_value_t = Engine::Bdd, global = true)]
    engine: Engine,
    /// Per-query timeout in seconds.
    #[arg(long, default_value_t = DEFAULT_TIMEOUT.as_secs_f64(), global = true)]
    timeout: f64,
    /// Completion-graph node budget per tableau run.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET, global = true)]
    max_tableau_nodes: usize,
    /// Hitting set tree node budget.
    #[arg(long, default_value_t = DEFAULT_HST_BUDGET, global = true)]
    max_hst_nodes: usize,
    /// Largest number of probabilistic axioms the brute-force engine accepts.
    #[arg(long, default_value_t = DEFAULT_WORLD_LIMIT, global = true)]
    world_limit: usize,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the probability of a query.
    Query {
        kb: PathBuf,
        query: String,
        /// Write the decision diagram in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check that the knowledge base (all axioms included) is consistent.
    Check { kb: PathBuf },
    /// Print a generated knowledge base.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run `B0 <= Bn` on layered knowledge bases for n = 2, 4, ..., max-n.
    Bench {
        #[arg(long)]
        max_n: usize,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Layered knowledge base whose query `B0 <= Bn` has 2^n justifications.
    Synthetic { n: usize },
    /// Random ALC knowledge base with uniform probabilities.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        axioms: usize,
        #[arg(long, default_value_t = 8)]
        probabilistic: usize,
    },
}

fn run_config(args: &RunArgs) -> Result<RunConfig, String> {
    if !(args.timeout.is_finite() && args.timeout > 0.0) {
        return Err(format!("timeout must be positive, got {}", args.timeout));
    }
    Ok(RunConfig {
        method: args.method,
        engine: args.engine,
        timeout: Duration::from_secs_f64(args.timeout),
        max_tableau_nodes: args.max_tableau_nodes,
        max_hst_nodes: args.max_hst_nodes,
        world_limit: args.world_limit,
        format: if args.json {
            OutputFormat::Json
        } else {
            OutputFormat::Human
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match run_config(&cli.run) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let report: Report = match &cli.command {
        Command::Query { kb, query, dot } => cmd_query(kb, query, &config, dot.as_deref()),
        Command::Check { kb } => cmd_check(kb, &config),
        Command::Gen { kind } => match kind {
            GenKind::Synthetic { n } => cmd_gen_synthetic(*n),
            GenKind::Random {
                seed,
                axioms,
                probabilistic,
            } => cmd_gen_random(
                *seed,
                RandomKbParams {
                    max_axioms: *axioms,
                    max_probabilistic: *probabilistic,
                    ..RandomKbParams::default()
                },
            ),
        },
        Command::Bench { max_n } => cmd_bench(*max_n, &config),
    };
    let _ = std::io::stdout().write_all(report.stdout.as_bytes());
    let _ = std::io::stderr().write_all(report.stderr.as_bytes());
    ExitCode::from(report.exit_code as u8)
}
