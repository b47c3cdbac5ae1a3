use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;
use wikivec::CorpusMode;

#[derive(Parser, Debug)]
#[command(
    name = "wikivec",
    version,
    about = "Concept-annotated Wikipedia corpora and embeddings"
)]
pub struct Cli {
    /// JSON file of flag values (or a run manifest); flags given on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Where to write the run manifest. Defaults to `<out>.manifest.json`
    /// for commands with an `--out` file.
    #[arg(long, global = true, value_name = "PATH")]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Render a MediaWiki XML dump as a concept-annotated corpus.
    Ingest(IngestArgs),
    /// Train joint word/concept vectors on a corpus.
    Train(TrainArgs),
    /// Nearest neighbours of a token.
    Similar(SimilarArgs),
    /// Answer "a is to b as c is to ?".
    Analogy(AnalogyArgs),
    #[command(subcommand)]
    Eval(EvalCommand),
    #[command(subcommand)]
    Baseline(BaselineCommand),
    /// Summary counts for a corpus, vector file or link graph.
    Stats(StatsArgs),
}

#[derive(Subcommand, Debug)]
pub enum EvalCommand {
    /// Analogy accuracy per vocabulary bucket.
    Analogy(EvalAnalogyArgs),
    /// Spearman correlation on word-pair similarity datasets.
    Similarity(EvalSimilarityArgs),
}

#[derive(Subcommand, Debug)]
pub enum BaselineCommand {
    /// Build the page link graph from a dump.
    Build(BaselineBuildArgs),
    /// Link-overlap relatedness of two pages.
    Sim(BaselineSimArgs),
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct IngestArgs {
    #[arg(long)]
    pub dump: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "standard")]
    pub mode: CorpusMode,
    /// Render single-threaded.
    #[arg(long)]
    pub ordered: bool,
    #[arg(long, env = "WIKIVEC_WORKERS", default_value_t = 1)]
    pub workers: usize,
    /// Also write `surface<TAB>page_id<TAB>count` anchor statistics, usable
    /// as a sense index.
    #[arg(long, value_name = "PATH")]
    pub anchor_stats: Option<PathBuf>,
    /// Also write the ingest counters as JSON.
    #[arg(long, value_name = "PATH")]
    pub stats: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 300)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub window: usize,
    #[arg(long, default_value_t = 5)]
    pub negative: usize,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 5)]
    pub min_count: u64,
    #[arg(long, default_value_t = 0.025)]
    pub lr: f32,
    #[arg(long, default_value_t = 1e-5)]
    pub subsample: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, env = "WIKIVEC_WORKERS", default_value_t = 1)]
    pub workers: usize,
    /// Pre-trained vectors for the initial word rows.
    #[arg(long, value_name = "PATH")]
    pub init: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimilarArgs {
    #[arg(long)]
    pub vectors: PathBuf,
    #[arg(long)]
    pub query: String,
    #[arg(short = 'k', long = "k", default_value_t = 10)]
    pub k: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct AnalogyArgs {
    #[arg(long)]
    pub vectors: PathBuf,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub c: String,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EvalAnalogyArgs {
    /// Comma-separated vector files.
    #[arg(long, value_delimiter = ',', required = true)]
    pub vectors: Vec<PathBuf>,
    #[arg(long)]
    pub questions: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "30000,300000,3000000")]
    pub buckets: Vec<usize>,
    /// Also score every set on the questions found by all sets.
    #[arg(long)]
    pub commons: bool,
    /// Write the report as JSON.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EvalSimilarityArgs {
    /// Comma-separated vector files.
    #[arg(long, value_delimiter = ',')]
    pub vectors: Vec<PathBuf>,
    /// Directory of similarity datasets.
    #[arg(long)]
    pub pairs: PathBuf,
    /// Anchor statistics file mapping surface forms to pages.
    #[arg(long)]
    pub sense_index: PathBuf,
    /// Link graph to score alongside the vector sets.
    #[arg(long, value_name = "PATH")]
    pub graph: Option<PathBuf>,
    /// Also correlate every scorer on the pairs all of them cover.
    #[arg(long)]
    pub common_subset: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BaselineBuildArgs {
    #[arg(long)]
    pub dump: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BaselineSimArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub b: u64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
#[command(group(ArgGroup::new("input").required(true).multiple(true).args(["corpus", "vectors", "graph"])))]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

impl Command {
    /// Subcommand words as typed, e.g. `eval analogy`.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Train(_) => "train",
            Command::Similar(_) => "similar",
            Command::Analogy(_) => "analogy",
            Command::Eval(EvalCommand::Analogy(_)) => "eval analogy",
            Command::Eval(EvalCommand::Similarity(_)) => "eval similarity",
            Command::Baseline(BaselineCommand::Build(_)) => "baseline build",
            Command::Baseline(BaselineCommand::Sim(_)) => "baseline sim",
            Command::Stats(_) => "stats",
        }
    }

    /// Resolved flag values, keyed by flag name.
    pub fn config(&self) -> serde_json::Value {
        let value = match self {
            Command::Ingest(a) => serde_json::to_value(a),
            Command::Train(a) => serde_json::to_value(a),
            Command::Similar(a) => serde_json::to_value(a),
            Command::Analogy(a) => serde_json::to_value(a),
            Command::Eval(EvalCommand::Analogy(a)) => serde_json::to_value(a),
            Command::Eval(EvalCommand::Similarity(a)) => serde_json::to_value(a),
            Command::Baseline(BaselineCommand::Build(a)) => serde_json::to_value(a),
            Command::Baseline(BaselineCommand::Sim(a)) => serde_json::to_value(a),
            Command::Stats(a) => serde_json::to_value(a),
        };
        value.expect("flag values serialize")
    }
}
