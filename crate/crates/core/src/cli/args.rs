use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::embedding::Format;

/// Measure, mitigate and report gender bias in word embeddings.
///
/// Results are printed as JSON on stdout; diagnostics go to stderr. Exit
/// status is 0 on success, 2 on usage errors and 3 on data errors.
#[derive(Debug, Parser)]
#[command(name = "fairvec", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one bias metric.
    Metric(MetricArgs),
    /// Debias an embedding and write the result.
    Debias(DebiasArgs),
    /// Word-level or embedding-level report.
    #[command(subcommand)]
    Report(ReportCommand),
    /// Compare bias metrics of two embeddings.
    Compare(CompareArgs),
    /// Write an SVG plot.
    #[command(subcommand)]
    Viz(VizCommand),
    /// Download a registered pretrained embedding into the cache.
    Fetch(FetchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionChoice {
    /// First principal component of the definitional pairs.
    Pca,
    /// Difference of a single pair (see --pair).
    PairDiff,
}

/// Options shared by every command that reads an embedding.
#[derive(Debug, Args, Default)]
pub struct Common {
    /// Embedding file.
    #[arg(long, value_name = "PATH")]
    pub emb: Option<PathBuf>,
    /// Embedding format: auto, text, word2vec-bin or vocab-npy.
    #[arg(long, value_name = "FORMAT")]
    pub format: Option<Format>,
    /// Keep rows at their stored length instead of normalizing them.
    #[arg(long)]
    pub no_normalize: bool,
    /// How to build the gender direction.
    #[arg(long, value_enum)]
    pub direction: Option<DirectionChoice>,
    /// Pair-list JSON for the PCA direction (default: bundled definitional pairs).
    #[arg(long, value_name = "FILE")]
    pub pairs: Option<PathBuf>,
    /// Female,male pair for the pair-diff direction (default: she,he).
    #[arg(long, value_name = "F,M")]
    pub pair: Option<String>,
    /// JSON run configuration; flags override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for Monte-Carlo sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Word selection.
#[derive(Debug, Args, Default)]
pub struct WordArgs {
    /// Comma-separated words.
    #[arg(long, value_name = "W1,W2,...")]
    pub words: Option<String>,
    /// Newline-separated word list.
    #[arg(long, value_name = "FILE")]
    pub words_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    /// direct-bias, indirect-bias, weat, pmn, proximity-bias, gipe, sembias
    /// or neighbours-analysis.
    pub name: String,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub words: WordArgs,
    /// Query word for pmn, proximity-bias and neighbours-analysis.
    #[arg(long)]
    pub word: Option<String>,
    /// Neighbour count.
    #[arg(short, long)]
    pub k: Option<usize>,
    /// Indirect-bias threshold.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Direct-bias strictness.
    #[arg(short, long)]
    pub c: Option<f64>,
    /// Monte-Carlo draws for the WEAT p-value.
    #[arg(long)]
    pub permutations: Option<usize>,
    /// WEAT specification JSON (default: bundled career/family test).
    #[arg(long, value_name = "FILE")]
    pub weat: Option<PathBuf>,
    /// SemBias dataset JSON (default: bundled sample).
    #[arg(long, value_name = "FILE")]
    pub sembias: Option<PathBuf>,
    /// Anchor pair for SemBias.
    #[arg(long, value_name = "A,B")]
    pub anchors: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Hard,
    Ran,
    Hsr,
}

#[derive(Debug, Args)]
pub struct DebiasArgs {
    #[arg(value_enum)]
    pub method: Method,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub words: WordArgs,
    /// Output embedding file.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format (default: text, or the input format).
    #[arg(long, value_name = "FORMAT")]
    pub out_format: Option<Format>,
    /// Equalize pair-list JSON (hard).
    #[arg(long, value_name = "FILE")]
    pub equalize: Option<PathBuf>,
    /// Gender-specific word list (hard, ran).
    #[arg(long, value_name = "FILE")]
    pub gender_specific: Option<PathBuf>,
    /// Definitional word list (hsr).
    #[arg(long, value_name = "FILE")]
    pub definitional: Option<PathBuf>,
    /// Ridge penalty (hsr).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Neighbour count (ran).
    #[arg(short, long)]
    pub k: Option<usize>,
    /// Repulsion threshold (ran).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Repulsion weight (ran).
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Attraction weight (ran).
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// Neutralization weight (ran).
    #[arg(long)]
    pub lambda3: Option<f64>,
    /// Optimizer learning rate (ran).
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Optimizer iteration budget (ran).
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Direct bias, proximity bias and neighbour table of one word.
    Word(WordReportArgs),
    /// Most and least biased words of the vocabulary.
    Global(GlobalReportArgs),
}

#[derive(Debug, Args)]
pub struct WordReportArgs {
    pub word: String,
    #[command(flatten)]
    pub common: Common,
    #[arg(short, long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Directory for the plots (default: current directory).
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Print the aligned text form instead of JSON.
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct GlobalReportArgs {
    #[command(flatten)]
    pub common: Common,
    /// Words per list.
    #[arg(short, long, default_value_t = 10)]
    pub n: usize,
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    /// The embedding compared against --emb.
    #[arg(long, value_name = "PATH")]
    pub other: Option<PathBuf>,
    #[arg(long, value_name = "FORMAT")]
    pub other_format: Option<Format>,
    #[command(flatten)]
    pub words: WordArgs,
    #[arg(short, long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub permutations: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum VizCommand {
    /// Neighbours of a word by similarity and gender cosine.
    Neighbors(VizArgs),
    /// Signed gender cosine per word.
    BiasBar(VizArgs),
    /// Words on their first two principal components.
    Pca(VizArgs),
    /// Neighbour cloud of --word, or --words sized by |cos(w, g)|.
    Cloud(VizArgs),
}

#[derive(Debug, Args)]
pub struct VizArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub words: WordArgs,
    #[arg(long)]
    pub word: Option<String>,
    #[arg(short, long)]
    pub k: Option<usize>,
    /// Output SVG file.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    pub name: String,
    /// Registry JSON mapping names to {url, sha256, format}.
    #[arg(long, value_name = "FILE")]
    pub registry: PathBuf,
}
