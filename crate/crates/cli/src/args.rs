use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use emorec_core::corpus::CorpusFormat;
use emorec_core::Variant;

/// Topic-based emotion recommendation and sentiment classification.
///
/// Every global flag can also be set through an `EMOREC_`-prefixed
/// environment variable (`EMOREC_SEED`, `EMOREC_EPSILON`, ...); an explicit
/// flag wins.
#[derive(Debug, Parser)]
#[command(name = "emorec", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for fold assignment, baseline partitions and the uniform baseline.
    #[arg(long, global = true, env = "EMOREC_SEED", default_value_t = 42)]
    pub seed: u64,
    /// Floor for zero probabilities before renormalisation (0 disables smoothing).
    #[arg(long, global = true, env = "EMOREC_EPSILON", default_value_t = emorec_core::model::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Stopword list, one word per line (default: the bundled English list).
    #[arg(long, global = true, env = "EMOREC_STOPWORDS")]
    pub stopwords: Option<PathBuf>,
    /// Rendering of results on stdout.
    #[arg(long, global = true, env = "EMOREC_FORMAT", value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model and write it to disk.
    Train(TrainArgs),
    /// Score one text with a trained model.
    Predict(PredictArgs),
    /// Run k-fold cross-validation and write the metric reports.
    Evaluate(EvaluateArgs),
    /// Write topic positivity, emotion profile and distance tables.
    Report(ReportArgs),
    /// Serve a model over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// Corpus file (JSON lines or TSV).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Corpus format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    pub corpus_format: Option<CorpusFormatArg>,
    /// Drop words occurring fewer times than this across the corpus.
    #[arg(long, default_value_t = 5)]
    pub min_count: u64,
    /// Keep digits inside words instead of splitting on them.
    #[arg(long)]
    pub keep_digits: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorpusFormatArg {
    Jsonl,
    Tsv,
}

impl From<CorpusFormatArg> for CorpusFormat {
    fn from(f: CorpusFormatArg) -> Self {
        match f {
            CorpusFormatArg::Jsonl => CorpusFormat::Jsonl,
            CorpusFormatArg::Tsv => CorpusFormat::Tsv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Topic,
    FullVocab,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Topic => Variant::Topic,
            VariantArg::FullVocab => Variant::FullVocab,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Emotion polarity TSV (`emotion<TAB>positive|negative`).
    #[arg(long)]
    pub polarity: PathBuf,
    /// Word-to-topic partition TSV (`word<TAB>topic_id`).
    #[arg(long, conflicts_with = "baseline_topics")]
    pub partition: Option<PathBuf>,
    /// Build a baseline partition with this many topics instead of reading one.
    #[arg(long)]
    pub baseline_topics: Option<usize>,
    #[arg(long, value_enum, default_value_t = VariantArg::Topic)]
    pub variant: VariantArg,
    /// Where to write the model.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Text to score; read from stdin when omitted.
    #[arg(long)]
    pub text: Option<String>,
    /// Number of emotions to list.
    #[arg(long, default_value_t = emorec_core::predict::DEFAULT_TOP_K)]
    pub top_k: usize,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub polarity: PathBuf,
    /// Partition TSV, optionally named as NAME=PATH (default name: file stem). Repeatable.
    #[arg(long = "partition")]
    pub partitions: Vec<String>,
    /// Sentiment lexicon TSV, optionally named as NAME=PATH. Repeatable.
    #[arg(long = "lexicon")]
    pub lexicons: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Deepest rank reported in the rank curves.
    #[arg(long, default_value_t = 20)]
    pub max_rank: usize,
    /// Partition whose profiles define graded relevance (default: the first).
    #[arg(long)]
    pub relevance_partition: Option<String>,
    /// Skip the full-vocabulary model.
    #[arg(long)]
    pub no_full_vocab: bool,
    /// Directory for report.json, binary_metrics.tsv and the curve files.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Corpus to re-estimate unsmoothed profiles from and summarise.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub corpus_format: Option<CorpusFormatArg>,
    /// Polarity TSV overriding the one stored in the model.
    #[arg(long)]
    pub polarity: Option<PathBuf>,
    /// Words used to name each topic.
    #[arg(long, default_value_t = emorec_core::report::TOPIC_LABEL_WORDS)]
    pub top_words: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// Largest accepted `text`, in bytes.
    #[arg(long, default_value_t = emorec_core::predict::MAX_TEXT_BYTES)]
    pub max_text_bytes: usize,
    /// Largest accepted `top_k`.
    #[arg(long, default_value_t = emorec_core::predict::MAX_TOP_K)]
    pub max_top_k: usize,
}
