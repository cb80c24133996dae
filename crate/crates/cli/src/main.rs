//! `gern` command-line interface.

mod commands;
mod convert;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gern::diagnostics::Variant;
use gern::gnn::Normalization;
use gern::io::{FeatureFormat, SplitMode, ValSize};
use gern::spanning::TreeGenerator;

use output::Format;

#[derive(Parser)]
#[command(
    name = "gern",
    version,
    about = "Random spanning trees, random path graphs and GCN training on them"
)]
pub struct Cli {
    /// Base seed for every random stream of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory receiving all outputs and run.json.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a GCN on random path graphs (or trees) of a bundle.
    Train(Box<TrainArgs>),
    /// Score a checkpoint on a bundle split.
    Evaluate(EvaluateArgs),
    /// Edge inclusion frequencies of a tree generator.
    RstStats(RstStatsArgs),
    /// Per-edge effective resistances and the resistance-weighted cut.
    Resistance(ResistanceArgs),
    /// Sample trees and their depth-first path linearizations.
    Linearize(LinearizeArgs),
    /// Winner-take-all online prediction on random path graphs.
    Wta(WtaArgs),
    /// Over-smoothing and over-squashing curves for full, tree and path propagation.
    Diagnostics(DiagnosticsArgs),
    /// Write a synthetic bundle.
    Synth(SynthArgs),
    /// Convert a `.content` / `.cites` citation network into a bundle.
    Convert(ConvertArgs),
}

#[derive(Args)]
struct BundleArgs {
    /// Bundle directory (edges.tsv, labels.tsv, features.tsv|bin, meta.txt).
    #[arg(long)]
    bundle: PathBuf,
    /// Keep the largest connected component instead of failing on a disconnected graph.
    #[arg(long)]
    largest_component: bool,
}

#[derive(Args)]
struct SplitArgs {
    /// Use the bundle's `split-<name>.tsv`.
    #[arg(long, conflicts_with = "split_file")]
    split_name: Option<String>,
    /// Read the split from a file of `node<TAB>train|validation|test` lines.
    #[arg(long)]
    split_file: Option<PathBuf>,
    /// Split to draw otherwise: `per-class:<k>` or `fraction:<f>`.
    #[arg(long, default_value = "per-class:20")]
    split: SplitMode,
    /// Validation size: `default`, a count, or a fraction of the remainder.
    #[arg(long, default_value = "default")]
    val_size: ValSize,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    bundle: BundleArgs,
    #[command(flatten)]
    split: SplitArgs,
    /// File of `key=value` lines; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    max_epochs: Option<String>,
    /// Propagation steps k (number of GCN layers).
    #[arg(long, value_name = "K")]
    hops: Option<String>,
    #[arg(long, value_name = "N")]
    hidden: Option<String>,
    #[arg(long, value_name = "Z")]
    pool_size: Option<String>,
    /// `rpg` or `rst`.
    #[arg(long)]
    pool_kind: Option<String>,
    /// `wilson`, `aldous-broder`, `a-rst[:beta]` or `bfs`.
    #[arg(long)]
    generator: Option<String>,
    /// Shorthand for `--generator a-rst:<beta>`.
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    lr: Option<String>,
    #[arg(long)]
    weight_decay: Option<String>,
    #[arg(long)]
    lr_decay_factor: Option<String>,
    #[arg(long)]
    patience: Option<String>,
    #[arg(long)]
    lr_min: Option<String>,
    #[arg(long)]
    max_steps_per_lr: Option<String>,
    #[arg(long)]
    dropout: Option<String>,
    /// `self-loop` or `degree-only`.
    #[arg(long)]
    normalization: Option<String>,
    #[arg(long)]
    val_every: Option<String>,
    #[arg(long)]
    queue_bound: Option<String>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    bundle: BundleArgs,
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long, default_value = "self-loop")]
    normalization: Normalization,
    /// Also write per-node predictions.
    #[arg(long)]
    predictions: bool,
}

#[derive(Args)]
struct RstStatsArgs {
    #[command(flatten)]
    bundle: BundleArgs,
    #[arg(long, default_value = "wilson")]
    generator: TreeGenerator,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Second generator to compare against.
    #[arg(long)]
    compare: Option<TreeGenerator>,
    /// Skip the exact-resistance reference.
    #[arg(long)]
    no_exact: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResistanceMethodArg {
    Exact,
    Mc,
    Both,
}

#[derive(Args)]
struct ResistanceArgs {
    #[command(flatten)]
    bundle: BundleArgs,
    #[arg(long, value_enum, default_value_t = ResistanceMethodArg::Exact)]
    method: ResistanceMethodArg,
    /// Trees for the Monte Carlo estimate.
    #[arg(long, default_value_t = 10_000)]
    trees: usize,
    #[arg(long, default_value = "wilson")]
    generator: TreeGenerator,
}

#[derive(Args)]
struct LinearizeArgs {
    #[command(flatten)]
    bundle: BundleArgs,
    #[arg(long, default_value = "a-rst")]
    generator: TreeGenerator,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Start node of the depth-first traversal (random if omitted).
    #[arg(long)]
    start: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Random,
    AdversarialStub,
}

#[derive(Args)]
struct WtaArgs {
    #[command(flatten)]
    bundle: BundleArgs,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = OrderArg::Random)]
    order: OrderArg,
    /// Prediction for the first node of every game.
    #[arg(long, default_value_t = 0)]
    default_label: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Smoothing,
    Squashing,
    Both,
}

#[derive(Args)]
struct DiagnosticsArgs {
    #[command(flatten)]
    bundle: BundleArgs,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    depths: Vec<usize>,
    #[arg(long, default_value_t = 128)]
    width: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "full,rst,rpg")]
    variants: Vec<Variant>,
    #[arg(long, value_enum, default_value_t = MetricArg::Both)]
    metric: MetricArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    CliqueChain,
    Sbm,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(value_enum)]
    kind: SynthKind,
    #[arg(long, default_value_t = 3)]
    cliques: usize,
    #[arg(long, default_value_t = 3)]
    size: usize,
    #[arg(long, default_value_t = 4)]
    blocks: usize,
    #[arg(long, default_value_t = 25)]
    block_size: usize,
    #[arg(long, default_value_t = 0.5)]
    p_in: f64,
    #[arg(long, default_value_t = 0.05)]
    p_out: f64,
    /// Bundle name recorded in meta.txt.
    #[arg(long)]
    name: Option<String>,
    /// `text` or `binary`.
    #[arg(long, default_value = "text")]
    feature_format: FeatureFormat,
    /// Also store a drawn split (`per-class:<k>` or `fraction:<f>`) as `split-<split-name>.tsv`.
    #[arg(long)]
    split: Option<SplitMode>,
    #[arg(long, default_value = "default")]
    val_size: ValSize,
    #[arg(long, default_value = "default")]
    split_name: String,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    content: PathBuf,
    #[arg(long)]
    cites: PathBuf,
    #[arg(long)]
    name: String,
    /// Scale feature rows to sum to one.
    #[arg(long)]
    row_normalize: bool,
    #[arg(long)]
    largest_component: bool,
    #[arg(long, default_value = "text")]
    feature_format: FeatureFormat,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = commands::run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
