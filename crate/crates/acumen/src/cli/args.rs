//! Command-line surface.
//!
//! Flags that have a statistical default (seed, trials, resamples, alpha
//! level, correlation kind and level, bucket count) are optional here and
//! resolved in three steps: explicit flag, then the `--config` file, then the
//! built-in default. That keeps run scripts short while letting a single
//! config file pin a whole experiment.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::correlate::{CorrKind, CorrLevel};
use crate::judge::Evaluator;

#[derive(Parser, Debug)]
#[command(
    name = "acumen",
    version,
    about = "Summarization meta-evaluation: content-unit scoring, lexical metrics, \
             correlation analysis, resampling statistics, and LLM judging"
)]
pub struct Cli {
    /// File of key=value lines supplying defaults for omitted flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate raw JSONL/CSV inputs and write a normalized corpus directory.
    Ingest(IngestArgs),
    /// Score every annotated (example, system) cell by matched-unit fraction.
    ScoreAcu(ScoreAcuArgs),
    /// Grid-search the length normalization strength on annotated data.
    Calibrate(CalibrateArgs),
    /// Compute lexical metric matrices against the reference summaries.
    Metrics(MetricsArgs),
    /// Correlate metric matrices with a human score matrix.
    Correlate(CorrelateArgs),
    /// Split system pairs into buckets by mean score difference.
    Buckets(BucketsArgs),
    /// Estimate significance-test power across sample sizes for system pairs.
    Power(PowerArgs),
    /// Paired bootstrap test between two systems' per-example scores.
    CompareSystems(CompareSystemsArgs),
    /// Permutation test for the correlation gap between two metrics.
    CompareMetrics(CompareMetricsArgs),
    /// Bootstrap confidence intervals for metric-human correlations.
    Ci(CiArgs),
    /// Krippendorff alpha over the corpus annotations.
    Agreement(AgreementArgs),
    /// Score the corpus with an LLM judge through the on-disk cache.
    Judge(JudgeArgs),
    /// Merge every artifact in a directory into one machine-readable report.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Examples JSONL (one object per line with example_id, reference,
    /// optional source, and acus).
    #[arg(long, value_name = "FILE")]
    pub examples: PathBuf,

    /// System outputs JSONL (system, example_id, summary).
    #[arg(long, value_name = "FILE")]
    pub outputs: Option<PathBuf>,

    /// Per-worker unit match annotations JSONL.
    #[arg(long, value_name = "FILE")]
    pub acu_annotations: Option<PathBuf>,

    /// Per-worker Likert annotations JSONL.
    #[arg(long, value_name = "FILE")]
    pub likert_annotations: Option<PathBuf>,

    /// External metric matrix as NAME=PATH; repeatable.
    #[arg(long = "metric", value_name = "NAME=PATH")]
    pub metrics: Vec<String>,

    /// Drop malformed records with a warning instead of failing.
    #[arg(long)]
    pub lenient: bool,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ScoreAcuArgs {
    /// Corpus directory produced by ingest.
    #[arg(long, value_name = "DIR")]
    pub corpus: PathBuf,

    /// Length normalization strength; omit for raw (unnormalized) fractions.
    #[arg(long)]
    pub alpha: Option<f64>,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    #[arg(long, value_name = "DIR")]
    pub corpus: PathBuf,

    /// Comma-separated grid of strengths to try; defaults to a log-spaced
    /// grid over [0.25, 10].
    #[arg(long, value_name = "LIST")]
    pub grid: Option<String>,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    #[arg(long, value_name = "DIR")]
    pub corpus: PathBuf,

    /// Comma-separated metric names. Recognized: rouge1-r/p/f, rouge2-r/p/f,
    /// rougeL-r/p/f, chrf, bleu, coverage, density, compression, novel-1..3,
    /// repeated-1..3.
    #[arg(long, value_name = "LIST")]
    pub metrics: Option<String>,

    /// Apply stemming to ROUGE token matching.
    #[arg(long)]
    pub stem: bool,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CorrelateArgs {
    /// Human score matrix CSV.
    #[arg(long, value_name = "FILE")]
    pub human: PathBuf,

    /// Comma-separated metric matrix CSVs.
    #[arg(long, value_name = "FILES")]
    pub metrics: String,

    /// pearson, spearman, or kendall.
    #[arg(long)]
    pub kind: Option<CorrKind>,

    /// sys (system level) or sum (summary level).
    #[arg(long)]
    pub level: Option<CorrLevel>,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BucketsArgs {
    /// Score matrix CSV whose column means rank the systems.
    #[arg(long, value_name = "FILE")]
    pub scores: PathBuf,

    /// Number of buckets.
    #[arg(long)]
    pub k: Option<usize>,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PowerArgs {
    /// Score matrix CSV; mutually exclusive with --corpus.
    #[arg(long, value_name = "FILE")]
    pub scores: Option<PathBuf>,

    /// Corpus directory; per-example unit match fractions are scored first.
    #[arg(long, value_name = "DIR")]
    pub corpus: Option<PathBuf>,

    /// Comma-separated system names to compare; defaults to every system.
    #[arg(long, value_name = "LIST")]
    pub systems: Option<String>,

    /// Comma-separated sample sizes to simulate.
    #[arg(long, value_name = "LIST")]
    pub n: Option<String>,

    /// Number of effect-size buckets for labeling pairs.
    #[arg(long)]
    pub k: Option<usize>,

    #[arg(long)]
    pub trials: Option<usize>,

    #[arg(long)]
    pub resamples: Option<usize>,

    #[arg(long)]
    pub alpha_level: Option<f64>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompareSystemsArgs {
    #[arg(long, value_name = "FILE")]
    pub scores: PathBuf,

    /// First system name.
    #[arg(long)]
    pub a: String,

    /// Second system name.
    #[arg(long)]
    pub b: String,

    #[arg(long)]
    pub resamples: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompareMetricsArgs {
    #[arg(long, value_name = "FILE")]
    pub human: PathBuf,

    /// First metric matrix CSV.
    #[arg(long, value_name = "FILE")]
    pub x: PathBuf,

    /// Second metric matrix CSV.
    #[arg(long, value_name = "FILE")]
    pub y: PathBuf,

    #[arg(long)]
    pub kind: Option<CorrKind>,

    #[arg(long)]
    pub level: Option<CorrLevel>,

    #[arg(long)]
    pub resamples: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CiArgs {
    #[arg(long, value_name = "FILE")]
    pub human: PathBuf,

    /// Comma-separated metric matrix CSVs.
    #[arg(long, value_name = "FILES")]
    pub metrics: String,

    #[arg(long)]
    pub kind: Option<CorrKind>,

    #[arg(long)]
    pub level: Option<CorrLevel>,

    #[arg(long)]
    pub resamples: Option<usize>,

    /// Two-sided miss probability; the interval covers 1 minus this.
    #[arg(long)]
    pub alpha_level: Option<f64>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct AgreementArgs {
    #[arg(long, value_name = "DIR")]
    pub corpus: PathBuf,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct JudgeArgs {
    #[arg(long, value_name = "DIR")]
    pub corpus: PathBuf,

    /// gptscore, geval_greedy, or geval_sampled.
    #[arg(long)]
    pub evaluator: Evaluator,

    /// Base URL of the OpenAI-compatible API.
    #[arg(long)]
    pub endpoint: Option<String>,

    #[arg(long)]
    pub model: Option<String>,

    /// Response cache directory; defaults to judge_cache under --out.
    #[arg(long, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,

    #[arg(long)]
    pub max_inflight: Option<usize>,

    /// Environment variable holding the API key.
    #[arg(long)]
    pub api_key_env: Option<String>,

    #[arg(long)]
    pub retry_base_ms: Option<u64>,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Directory of artifacts from earlier commands.
    #[arg(long, value_name = "DIR")]
    pub dir: PathBuf,

    /// Where to write the report; defaults to the artifact directory itself.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}
