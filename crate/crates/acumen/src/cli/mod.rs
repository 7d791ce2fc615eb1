//! Command-line entry points.
//!
//! Every subcommand follows the same shape: validate inputs first, compute
//! everything in memory, then write artifacts. A missing input path exits
//! with status 2 before any output file or directory is touched; a load,
//! parse, or computation failure exits with status 1.

mod args;
mod artifacts;
mod report;

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::json;

use crate::acu;
use crate::corpus::{self, Corpus, CorpusError, Example, LoadOptions, LoadPaths, ScoreMatrix};
use crate::correlate::{self, CorrError, CorrKind, CorrLevel};
use crate::judge::{self, JudgeConfig, JudgeError};
use crate::lexmetrics::{self, LexError, RougeVariant};
use crate::resample::{self, ResampleConfig, ResampleError, Scale};
use artifacts::{fmt_opt, Provenance};

pub use args::Cli;

/// Parses `argv`, runs the selected command, and returns the process exit
/// code: 0 on success, 1 on computation failure, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

/// Failure of one invocation, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or missing input paths; exit code 2.
    Usage(String),
    /// Load, parse, or computation failures; exit code 1.
    Compute(String),
}

macro_rules! compute_from {
    ($($ty:ty),* $(,)?) => {$(
        impl From<$ty> for CliError {
            fn from(err: $ty) -> CliError {
                CliError::Compute(err.to_string())
            }
        }
    )*};
}

compute_from!(
    CorpusError,
    acu::AcuError,
    CorrError,
    ResampleError,
    JudgeError,
    LexError,
    std::io::Error,
);

fn execute(cli: args::Cli) -> Result<String, CliError> {
    let settings = Settings::load(cli.config.as_deref())?;
    match cli.command {
        args::Command::Ingest(a) => cmd_ingest(a),
        args::Command::ScoreAcu(a) => cmd_score_acu(a, &settings),
        args::Command::Calibrate(a) => cmd_calibrate(a, &settings),
        args::Command::Metrics(a) => cmd_metrics(a, &settings),
        args::Command::Correlate(a) => cmd_correlate(a, &settings),
        args::Command::Buckets(a) => cmd_buckets(a, &settings),
        args::Command::Power(a) => cmd_power(a, &settings),
        args::Command::CompareSystems(a) => cmd_compare_systems(a, &settings),
        args::Command::CompareMetrics(a) => cmd_compare_metrics(a, &settings),
        args::Command::Ci(a) => cmd_ci(a, &settings),
        args::Command::Agreement(a) => cmd_agreement(a),
        args::Command::Judge(a) => cmd_judge(a, &settings),
        args::Command::Report(a) => report::cmd_report(a),
    }
}

/// Defaults from the optional `--config` key=value file. Flags win over the
/// file, the file wins over built-in defaults.
struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> Result<Settings, CliError> {
        let mut values = BTreeMap::new();
        if let Some(path) = path {
            if !path.is_file() {
                return Err(CliError::Usage(format!(
                    "config file not found: {}",
                    path.display()
                )));
            }
            let text = std::fs::read_to_string(path)?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::Usage(format!(
                        "config line {} is not key=value: '{line}'",
                        lineno + 1
                    ))
                })?;
                values.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Settings { values })
    }

    fn resolve<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.resolve_opt(key, flag)?.unwrap_or(default))
    }

    fn resolve_opt<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key '{key}': {e}"))),
            None => Ok(None),
        }
    }

    fn resample_config(
        &self,
        seed: Option<u64>,
        trials: Option<usize>,
        resamples: Option<usize>,
        alpha_level: Option<f64>,
        sample_size: usize,
    ) -> Result<ResampleConfig, CliError> {
        let defaults = ResampleConfig::default();
        let cfg = ResampleConfig {
            seed: self.resolve("seed", seed, defaults.seed)?,
            trials: self.resolve("trials", trials, defaults.trials)?,
            resamples: self.resolve("resamples", resamples, defaults.resamples)?,
            alpha_level: self.resolve("alpha_level", alpha_level, defaults.alpha_level)?,
            sample_size,
        };
        cfg.validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

fn require_file(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "input file not found: {}",
            path.display()
        )))
    }
}

fn require_dir(path: &Path) -> Result<(), CliError> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "input directory not found: {}",
            path.display()
        )))
    }
}

fn ensure_out_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| {
        CliError::Compute(format!(
            "cannot create output directory {}: {e}",
            path.display()
        ))
    })
}

fn split_list(spec: &str) -> Vec<String> {
    spec.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

fn parse_list<T>(spec: &str, what: &str) -> Result<Vec<T>, CliError>
where
    T: FromStr,
    T::Err: Display,
{
    split_list(spec)
        .iter()
        .map(|t| {
            t.parse()
                .map_err(|e| CliError::Usage(format!("invalid {what} '{t}': {e}")))
        })
        .collect()
}

fn stem_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load_corpus(dir: &Path) -> Result<Corpus, CliError> {
    require_dir(dir)?;
    let paths = corpus::benchmark_dir_paths(dir)?;
    require_file(&paths.examples)?;
    let (corpus, _report) = corpus::load_benchmark(&paths, &LoadOptions::default())?;
    Ok(corpus)
}

fn read_matrix(path: &Path) -> Result<ScoreMatrix, CliError> {
    require_file(path)?;
    corpus::read_matrix_csv(path)
        .map_err(|e| CliError::Compute(format!("{}: {e}", path.display())))
}

fn cmd_ingest(a: args::IngestArgs) -> Result<String, CliError> {
    require_file(&a.examples)?;
    for path in [&a.outputs, &a.acu_annotations, &a.likert_annotations]
        .into_iter()
        .flatten()
    {
        require_file(path)?;
    }
    let mut external_metrics = BTreeMap::new();
    for spec in &a.metrics {
        let (name, path) = spec.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("--metric expects NAME=PATH, got '{spec}'"))
        })?;
        let path = PathBuf::from(path);
        require_file(&path)?;
        if external_metrics.insert(name.to_string(), path).is_some() {
            return Err(CliError::Usage(format!("duplicate metric name '{name}'")));
        }
    }
    let paths = LoadPaths {
        examples: a.examples.clone(),
        outputs: a.outputs.clone(),
        match_annotations: a.acu_annotations.clone(),
        likert_annotations: a.likert_annotations.clone(),
        external_metrics,
    };
    let options = LoadOptions { lenient: a.lenient };
    let (corpus, report) = corpus::load_benchmark(&paths, &options)?;
    ensure_out_dir(&a.out)?;
    let corpus_dir = a.out.join("corpus");
    corpus::save_benchmark(&corpus, &corpus_dir)?;
    let prov = Provenance::new(None, &json!({"command": "ingest", "lenient": a.lenient}));
    artifacts::write_json(
        &a.out.join("ingest_report.json"),
        &prov,
        json!({"report": report, "corpus_dir": "corpus"}),
    )?;
    Ok(format!(
        "ingested {} examples, {} systems, {} outputs into {}",
        report.examples,
        report.systems,
        report.outputs,
        corpus_dir.display()
    ))
}

fn cmd_score_acu(a: args::ScoreAcuArgs, settings: &Settings) -> Result<String, CliError> {
    let alpha = settings.resolve_opt("alpha", a.alpha)?;
    let corpus = load_corpus(&a.corpus)?;
    let matrix = acu::score_matrix(&corpus, alpha)?;
    ensure_out_dir(&a.out)?;
    let prov = Provenance::new(None, &json!({"command": "score-acu", "alpha": alpha}));
    let mut extra = Vec::new();
    if let Some(alpha) = alpha {
        extra.push(("alpha".to_string(), alpha.to_string()));
    }
    let file = a.out.join("acu_scores.csv");
    artifacts::write_matrix_artifact(&file, &matrix, &prov, &extra)?;
    Ok(format!(
        "scored {} examples x {} systems -> {}",
        matrix.n_examples(),
        matrix.n_systems(),
        file.display()
    ))
}

fn cmd_calibrate(a: args::CalibrateArgs, settings: &Settings) -> Result<String, CliError> {
    let grid = match settings.resolve_opt("grid", a.grid.clone())? {
        Some(spec) => parse_list::<f64>(&spec, "grid value")?,
        None => acu::default_alpha_grid(),
    };
    let corpus = load_corpus(&a.corpus)?;
    let result = acu::calibrate_alpha(&corpus, &grid)?;
    ensure_out_dir(&a.out)?;
    let prov = Provenance::new(None, &json!({"command": "calibrate", "grid": grid}));
    let grid_rows: Vec<_> = result
        .grid
        .iter()
        .map(|(alpha, residual)| json!({"alpha": alpha, "residual_correlation": residual}))
        .collect();
    let file = a.out.join("calibration.json");
    artifacts::write_json(
        &file,
        &prov,
        json!({
            "alpha": result.alpha,
            "residual_correlation": result.residual_correlation,
            "grid": grid_rows,
        }),
    )?;
    Ok(format!(
        "calibrated normalization strength alpha = {} (residual correlation {:.6}) -> {}",
        result.alpha,
        result.residual_correlation,
        file.display()
    ))
}

const DEFAULT_METRICS: &str = "rouge1-r,rouge2-r,rougeL-r,chrf,bleu";

/// One named lexical metric, parsed from its CLI spelling.
enum MetricFn {
    Rouge(RougeVariant, Facet),
    Chrf,
    Bleu,
    Extract(ExtractField),
}

enum Facet {
    Recall,
    Precision,
    F1,
}

enum ExtractField {
    Coverage,
    Density,
    Compression,
    Novel(usize),
    Repeated(usize),
}

impl MetricFn {
    fn parse(name: &str) -> Result<MetricFn, CliError> {
        let unknown = || {
            CliError::Usage(format!(
                "unknown metric '{name}' (expected rouge1-r/p/f, rouge2-r/p/f, \
                 rougeL-r/p/f, chrf, bleu, coverage, density, compression, \
                 novel-N, or repeated-N)"
            ))
        };
        if let Some(rest) = name.strip_prefix("rouge") {
            let (variant, facet) = rest.split_once('-').ok_or_else(unknown)?;
            let variant = match variant {
                "1" => RougeVariant::R1,
                "2" => RougeVariant::R2,
                "L" => RougeVariant::RL,
                _ => return Err(unknown()),
            };
            let facet = match facet {
                "r" => Facet::Recall,
                "p" => Facet::Precision,
                "f" => Facet::F1,
                _ => return Err(unknown()),
            };
            return Ok(MetricFn::Rouge(variant, facet));
        }
        if let Some(n) = name.strip_prefix("novel-") {
            let n = n.parse().map_err(|_| unknown())?;
            return Ok(MetricFn::Extract(ExtractField::Novel(n)));
        }
        if let Some(n) = name.strip_prefix("repeated-") {
            let n = n.parse().map_err(|_| unknown())?;
            return Ok(MetricFn::Extract(ExtractField::Repeated(n)));
        }
        match name {
            "chrf" => Ok(MetricFn::Chrf),
            "bleu" => Ok(MetricFn::Bleu),
            "coverage" => Ok(MetricFn::Extract(ExtractField::Coverage)),
            "density" => Ok(MetricFn::Extract(ExtractField::Density)),
            "compression" => Ok(MetricFn::Extract(ExtractField::Compression)),
            _ => Err(unknown()),
        }
    }

    fn eval(&self, name: &str, ex: &Example, summary: &str, stem: bool) -> Result<f64, CliError> {
        match self {
            MetricFn::Rouge(variant, facet) => {
                let score = lexmetrics::rouge_with(&ex.reference, summary, *variant, stem);
                let value = match facet {
                    Facet::Recall => score.recall,
                    Facet::Precision => score.precision,
                    Facet::F1 => Some(score.f1),
                };
                value.ok_or_else(|| {
                    CliError::Compute(format!("metric '{name}' has no value for this pair"))
                })
            }
            MetricFn::Chrf => Ok(lexmetrics::chrf(&ex.reference, summary)),
            MetricFn::Bleu => Ok(lexmetrics::bleu(&[ex.reference.as_str()], summary)),
            MetricFn::Extract(field) => {
                let source = ex.source.as_deref().ok_or_else(|| {
                    CliError::Compute(format!(
                        "metric '{name}' needs a source document, example '{}' has none",
                        ex.example_id
                    ))
                })?;
                let stats = lexmetrics::extractive_stats(source, summary).map_err(|e| {
                    CliError::Compute(format!("example '{}': {e}", ex.example_id))
                })?;
                let lookup = |map: &BTreeMap<usize, f64>, n: usize| {
                    map.get(&n).copied().ok_or_else(|| {
                        let available: Vec<String> =
                            map.keys().map(usize::to_string).collect();
                        CliError::Usage(format!(
                            "metric '{name}' is out of range (available n: {})",
                            available.join(", ")
                        ))
                    })
                };
                match field {
                    ExtractField::Coverage => Ok(stats.coverage),
                    ExtractField::Density => Ok(stats.density),
                    ExtractField::Compression => Ok(stats.compression),
                    ExtractField::Novel(n) => lookup(&stats.novel_ngram_fraction, *n),
                    ExtractField::Repeated(n) => lookup(&stats.repeated_ngram_fraction, *n),
                }
            }
        }
    }
}

fn cmd_metrics(a: args::MetricsArgs, settings: &Settings) -> Result<String, CliError> {
    let spec = settings
        .resolve_opt("metrics", a.metrics.clone())?
        .unwrap_or_else(|| DEFAULT_METRICS.to_string());
    let names = split_list(&spec);
    if names.is_empty() {
        return Err(CliError::Usage("--metrics names an empty list".into()));
    }
    let parsed: Vec<(String, MetricFn)> = names
        .into_iter()
        .map(|name| MetricFn::parse(&name).map(|f| (name, f)))
        .collect::<Result<_, _>>()?;
    let corpus = load_corpus(&a.corpus)?;
    let systems = corpus.system_names();
    let examples = corpus.example_ids();
    if systems.is_empty() || examples.is_empty() {
        return Err(CliError::Compute(
            "corpus has no system outputs to score".into(),
        ));
    }
    let mut matrices = Vec::new();
    for (name, metric) in &parsed {
        let mut values = Vec::with_capacity(examples.len() * systems.len());
        for example_id in &examples {
            let ex = corpus.example(example_id).expect("ids come from the corpus");
            for system in &systems {
                let out = corpus.output(system, example_id).ok_or_else(|| {
                    CorpusError::IncompleteGrid {
                        example_id: example_id.clone(),
                        system: system.clone(),
                    }
                })?;
                values.push(metric.eval(name, ex, &out.summary, a.stem)?);
            }
        }
        let matrix = ScoreMatrix::new(examples.clone(), systems.clone(), values)?;
        matrices.push((name.clone(), matrix));
    }
    ensure_out_dir(&a.out)?;
    for (name, matrix) in &matrices {
        let prov = Provenance::new(
            None,
            &json!({"command": "metrics", "metric": name, "stem": a.stem}),
        );
        artifacts::write_matrix_artifact(
            &a.out.join(format!("{name}.csv")),
            matrix,
            &prov,
            &[("metric".to_string(), name.clone())],
        )?;
    }
    let written: Vec<&str> = matrices.iter().map(|(n, _)| n.as_str()).collect();
    Ok(format!(
        "wrote {} metric matrices ({}) for {} examples x {} systems under {}",
        matrices.len(),
        written.join(", "),
        examples.len(),
        systems.len(),
        a.out.display()
    ))
}

fn cmd_correlate(a: args::CorrelateArgs, settings: &Settings) -> Result<String, CliError> {
    let kind = settings.resolve("kind", a.kind, CorrKind::Pearson)?;
    let level = settings.resolve("level", a.level, CorrLevel::Summary)?;
    let metric_paths: Vec<PathBuf> = split_list(&a.metrics).into_iter().map(PathBuf::from).collect();
    if metric_paths.is_empty() {
        return Err(CliError::Usage("--metrics names an empty list".into()));
    }
    require_file(&a.human)?;
    for path in &metric_paths {
        require_file(path)?;
    }
    let human = read_matrix(&a.human)?;
    let mut rows = Vec::new();
    let mut last: Option<(String, Option<f64>)> = None;
    for path in &metric_paths {
        let name = stem_name(path);
        let matrix = read_matrix(path)?;
        let (value, skipped) = match level {
            CorrLevel::Summary => match correlate::summary_level(&matrix, &human, kind) {
                Ok(s) => (Some(s.value), s.skipped_rows),
                Err(CorrError::AllRowsDegenerate) => (None, human.n_examples()),
                Err(e) => return Err(e.into()),
            },
            CorrLevel::System => (
                correlate::leveled_corr(&matrix, &human, kind, level)?,
                0,
            ),
        };
        rows.push(vec![
            name.clone(),
            kind.to_string(),
            level.to_string(),
            fmt_opt(value),
            skipped.to_string(),
        ]);
        last = Some((name, value));
    }
    ensure_out_dir(&a.out)?;
    let prov = Provenance::new(
        None,
        &json!({"command": "correlate", "kind": kind.to_string(), "level": level.to_string()}),
    );
    let file = a.out.join("correlations.csv");
    artifacts::write_table(
        &file,
        &prov,
        &[],
        &["metric", "kind", "level", "coefficient", "skipped_rows"],
        &rows,
    )?;
    let summary = match (rows.len(), last) {
        (1, Some((name, Some(value)))) => format!(
            "{kind} {level} correlation of {name} vs human = {value} -> {}",
            file.display()
        ),
        _ => format!("wrote {} correlations -> {}", rows.len(), file.display()),
    };
    Ok(summary)
}

fn cmd_buckets(a: args::BucketsArgs, settings: &Settings) -> Result<String, CliError> {
    let k = settings.resolve("k", a.k, 6usize)?;
    let matrix = read_matrix(&a.scores)?;
    let means = matrix.column_means();
    let scored: Vec<(String, f64)> = matrix.systems().iter().cloned().zip(means.iter().copied()).collect();
    let by_name: BTreeMap<&str, f64> = scored.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    let buckets = correlate::make_buckets(&scored, k)?;
    let mut rows = Vec::new();
    let mut total_pairs = 0usize;
    for bucket in &buckets {
        for (sys_a, sys_b) in &bucket.pairs {
            let diff = (by_name[sys_a.as_str()] - by_name[sys_b.as_str()]).abs();
            rows.push(vec![
                bucket.bucket_index.to_string(),
                sys_a.clone(),
                sys_b.clone(),
                diff.to_string(),
            ]);
            total_pairs += 1;
        }
    }
    ensure_out_dir(&a.out)?;
    let prov = Provenance::new(None, &json!({"command": "buckets", "k": k}));
    let file = a.out.join("buckets.csv");
    artifacts::write_table(
        &file,
        &prov,
        &[],
        &["bucket_index", "system_a", "system_b", "mean_diff"],
        &rows,
    )?;
    Ok(format!(
        "split {} system pairs into {} buckets -> {}",
        total_pairs,
        buckets.len(),
        file.display()
    ))
}

const POWER_PAIR_TAG: u64 = u64::from_be_bytes(*b"powercli");

fn cmd_power(a: args::PowerArgs, settings: &Settings) -> Result<String, CliError> {
    let matrix = match (&a.scores, &a.corpus) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--scores and --corpus are mutually exclusive".into(),
            ))
        }
        (Some(path), None) => read_matrix(path)?,
        (None, Some(dir)) => {
            let corpus = load_corpus(dir)?;
            acu::score_matrix(&corpus, None)?
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --scores or --corpus is required".into(),
            ))
        }
    };
    let systems = match settings.resolve_opt("systems", a.systems.clone())? {
        Some(spec) => {
            let list = split_list(&spec);
            for name in &list {
                if matrix.system_index(name).is_none() {
                    return Err(CliError::Usage(format!(
                        "system '{name}' is not in the score matrix"
                    )));
                }
            }
            list
        }
        None => matrix.systems().to_vec(),
    };
    if systems.len() < 2 {
        return Err(CliError::Usage(
            "power analysis needs at least two systems".into(),
        ));
    }
    let sizes = match settings.resolve_opt("n", a.n.clone())? {
        Some(spec) => parse_list::<usize>(&spec, "sample size")?,
        None => vec![100],
    };
    if sizes.is_empty() {
        return Err(CliError::Usage("--n names an empty list".into()));
    }
    let base = settings.resample_config(a.seed, a.trials, a.resamples, a.alpha_level, 2)?;
    let k = settings.resolve("k", a.k, 6usize)?;

    let means = matrix.column_means();
    let scored: Vec<(String, f64)> = systems
        .iter()
        .map(|name| {
            let idx = matrix.system_index(name).expect("validated above");
            (name.clone(), means[idx])
        })
        .collect();
    let n_pairs = systems.len() * (systems.len() - 1) / 2;
    let k_eff = k.clamp(1, n_pairs);
    let buckets = correlate::make_buckets(&scored, k_eff)?;
    let mut bucket_of: BTreeMap<(String, String), usize> = BTreeMap::new();
    for bucket in &buckets {
        for (x, y) in &bucket.pairs {
            let key = if x <= y {
                (x.clone(), y.clone())
            } else {
                (y.clone(), x.clone())
            };
            bucket_of.insert(key, bucket.bucket_index);
        }
    }

    let mut rows = Vec::new();
    let mut pair_index = 0u64;
    for i in 0..systems.len() {
        for j in i + 1..systems.len() {
            let (sys_a, sys_b) = (&systems[i], &systems[j]);
            let col_a = matrix.column(matrix.system_index(sys_a).expect("validated above"));
            let col_b = matrix.column(matrix.system_index(sys_b).expect("validated above"));
            let key = if sys_a <= sys_b {
                (sys_a.clone(), sys_b.clone())
            } else {
                (sys_b.clone(), sys_a.clone())
            };
            let bucket = bucket_of[&key];
            for &n in &sizes {
                let cfg = ResampleConfig {
                    seed: resample::substream_seed(base.seed, POWER_PAIR_TAG, pair_index),
                    sample_size: n,
                    ..base.clone()
                };
                let result = resample::power_analysis(&col_a, &col_b, &cfg)?;
                rows.push(vec![
                    format!("{sys_a}|{sys_b}"),
                    bucket.to_string(),
                    n.to_string(),
                    result.power.to_string(),
                ]);
                pair_index += 1;
            }
        }
    }

    ensure_out_dir(&a.out)?;
    let prov = Provenance::new(
        Some(base.seed),
        &json!({
            "command": "power",
            "systems": systems,
            "n": sizes,
            "k": k_eff,
            "trials": base.trials,
            "resamples": base.resamples,
            "alpha_level": base.alpha_level,
        }),
    );
    let file = a.out.join("power_curve.csv");
    artifacts::write_table(
        &file,
        &prov,
        &[],
        &["pair", "effect_bucket", "n", "power"],
        &rows,
    )?;
    Ok(format!(
        "estimated power for {} system pairs at {} sample sizes -> {}",
        n_pairs,
        sizes.len(),
        file.display()
    ))
}

fn cmd_compare_systems(
    a: args::CompareSystemsArgs,
    settings: &Settings,
) -> Result<String, CliError> {
    let matrix = read_matrix(&a.scores)?;
    let idx_a = matrix.system_index(&a.a).ok_or_else(|| {
        CliError::Usage(format!("system '{}' is not in the score matrix", a.a))
    })?;
    let idx_b = matrix.system_index(&a.b).ok_or_else(|| {
        CliError::Usage(format!("system '{}' is not in the score matrix", a.b))
    })?;
    let cfg = settings.resample_config(a.seed, None, a.resamples, None, 2)?;
    let col_a = matrix.column(idx_a);
    let col_b = matrix.column(idx_b);
    let p_value = resample::paired_bootstrap_test(&col_a, &col_b, &cfg)?;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    ensure_out_dir(&a.out)?;
    let prov = Provenance::new(
        Some(cfg.seed),
        &json!({
            "command": "compare-systems",
            "a": a.a,
            "b": a.b,
            "resamples": cfg.resamples,
        }),
    );
    let file = a.out.join("system_comparison.json");
    artifacts::write_json(
        &file,
        &prov,
        json!({
            "system_a": {"name": a.a, "mean": mean(&col_a)},
            "system_b": {"name": a.b, "mean": mean(&col_b)},
            "n_examples": matrix.n_examples(),
            "resamples": cfg.resamples,
            "p_value": p_value,
        }),
    )?;
    Ok(format!(
        "paired bootstrap {} vs {}: p = {} -> {}",
        a.a,
        a.b,
        p_value,
        file.display()
    ))
}

fn cmd_compare_metrics(
    a: args::CompareMetricsArgs,
    settings: &Settings,
) -> Result<String, CliError> {
    let kind = settings.resolve("kind", a.kind, CorrKind::Pearson)?;
    let level = settings.resolve("level", a.level, CorrLevel::Summary)?;
    require_file(&a.human)?;
    require_file(&a.x)?;
    require_file(&a.y)?;
    let human = read_matrix(&a.human)?;
    let mx = read_matrix(&a.x)?;
    let my = read_matrix(&a.y)?;
    let cfg = settings.resample_config(a.seed, None, a.resamples, None, 2)?;
    let p_value = resample::permutation_metric_test(&mx, &my, &human, kind, level, &cfg)?;
    let rx = correlate::leveled_corr(&mx, &human, kind, level)?;
    let ry = correlate::leveled_corr(&my, &human, kind, level)?;
    ensure_out_dir(&a.out)?;
    let name_x = stem_name(&a.x);
    let name_y = stem_name(&a.y);
    let prov = Provenance::new(
        Some(cfg.seed),
        &json!({
            "command": "compare-metrics",
            "kind": kind.to_string(),
            "level": level.to_string(),
            "resamples": cfg.resamples,
        }),
    );
    let file = a.out.join("metric_comparison.json");
    artifacts::write_json(
        &file,
        &prov,
        json!({
            "metric_x": {"name": name_x, "coefficient": rx},
            "metric_y": {"name": name_y, "coefficient": ry},
            "kind": kind.to_string(),
            "level": level.to_string(),
            "resamples": cfg.resamples,
            "p_value": p_value,
        }),
    )?;
    Ok(format!(
        "permutation test {name_x} vs {name_y} ({kind}, {level}): p = {} -> {}",
        p_value,
        file.display()
    ))
}

fn cmd_ci(a: args::CiArgs, settings: &Settings) -> Result<String, CliError> {
    let kind = settings.resolve("kind", a.kind, CorrKind::Pearson)?;
    let level = settings.resolve("level", a.level, CorrLevel::Summary)?;
    let metric_paths: Vec<PathBuf> = split_list(&a.metrics).into_iter().map(PathBuf::from).collect();
    if metric_paths.is_empty() {
        return Err(CliError::Usage("--metrics names an empty list".into()));
    }
    require_file(&a.human)?;
    for path in &metric_paths {
        require_file(path)?;
    }
    let human = read_matrix(&a.human)?;
    let cfg = settings.resample_config(a.seed, None, a.resamples, a.alpha_level, 2)?;
    let mut rows = Vec::new();
    for path in &metric_paths {
        let name = stem_name(path);
        let matrix = read_matrix(path)?;
        let interval = resample::bootstrap_ci(&matrix, &human, kind, level, &cfg)
            .map_err(|e| CliError::Compute(format!("{name}: {e}")))?;
        rows.push(vec![
            name,
            interval.point.to_string(),
            interval.low.to_string(),
            interval.high.to_string(),
        ]);
    }
    ensure_out_dir(&a.out)?;
    let level_pct = 1.0 - cfg.alpha_level;
    let prov = Provenance::new(
        Some(cfg.seed),
        &json!({
            "command": "ci",
            "kind": kind.to_string(),
            "level": level.to_string(),
            "resamples": cfg.resamples,
            "alpha_level": cfg.alpha_level,
        }),
    );
    let file = a.out.join("confidence_intervals.csv");
    artifacts::write_table(
        &file,
        &prov,
        &[
            ("kind".to_string(), kind.to_string()),
            ("level".to_string(), level.to_string()),
            ("confidence_level".to_string(), level_pct.to_string()),
        ],
        &["metric", "point", "low", "high"],
        &rows,
    )?;
    Ok(format!(
        "bootstrap {}% intervals for {} metrics -> {}",
        level_pct * 100.0,
        rows.len(),
        file.display()
    ))
}

fn cmd_agreement(a: args::AgreementArgs) -> Result<String, CliError> {
    let corpus = load_corpus(&a.corpus)?;
    let families: Vec<(&str, Scale, Vec<Vec<f64>>)> = vec![
        (
            "summary_match_fraction",
            Scale::Interval,
            resample::summary_level_agreement_units(&corpus),
        ),
        (
            "acu_binary_label",
            Scale::Nominal,
            resample::acu_level_agreement_units(&corpus),
        ),
        (
            "likert_prior",
            Scale::Interval,
            resample::likert_agreement_units(&corpus, corpus::Protocol::Prior),
        ),
        (
            "likert_ref_free",
            Scale::Interval,
            resample::likert_agreement_units(&corpus, corpus::Protocol::RefFree),
        ),
        (
            "likert_ref_based",
            Scale::Interval,
            resample::likert_agreement_units(&corpus, corpus::Protocol::RefBased),
        ),
    ];
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (name, scale, units) in families {
        if units.is_empty() {
            continue;
        }
        match resample::krippendorff_alpha(&units, scale) {
            Ok(alpha) => rows.push(vec![
                name.to_string(),
                scale.to_string(),
                units.len().to_string(),
                alpha.to_string(),
            ]),
            Err(ResampleError::InsufficientData(msg)) => {
                notes.push(format!("{name}: {msg}"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if rows.is_empty() {
        return Err(CliError::Compute(
            "no annotation family has enough overlapping ratings for agreement".into(),
        ));
    }
    for note in &notes {
        eprintln!("note: {note}");
    }
    ensure_out_dir(&a.out)?;
    let prov = Provenance::new(None, &json!({"command": "agreement"}));
    let file = a.out.join("agreement.csv");
    artifacts::write_table(
        &file,
        &prov,
        &[],
        &["unit", "scale", "n_units", "alpha"],
        &rows,
    )?;
    Ok(format!(
        "computed agreement for {} annotation families -> {}",
        rows.len(),
        file.display()
    ))
}

fn cmd_judge(a: args::JudgeArgs, settings: &Settings) -> Result<String, CliError> {
    let corpus = load_corpus(&a.corpus)?;
    let endpoint = settings
        .resolve_opt("endpoint", a.endpoint.clone())?
        .ok_or_else(|| CliError::Usage("--endpoint is required (flag or config file)".into()))?;
    let model = settings
        .resolve_opt("model", a.model.clone())?
        .ok_or_else(|| CliError::Usage("--model is required (flag or config file)".into()))?;
    let cache_dir = a
        .cache_dir
        .clone()
        .unwrap_or_else(|| a.out.join("judge_cache"));
    let mut cfg = JudgeConfig::new(endpoint.clone(), model.clone(), cache_dir);
    if let Some(v) = settings.resolve_opt("max_inflight", a.max_inflight)? {
        cfg.max_inflight = v;
    }
    if let Some(v) = settings.resolve_opt("api_key_env", a.api_key_env.clone())? {
        cfg.api_key_env = v;
    }
    if let Some(v) = settings.resolve_opt("retry_base_ms", a.retry_base_ms)? {
        cfg.retry_base_ms = v;
    }
    let matrix = judge::run_judge_batch(&corpus, a.evaluator, &cfg)?;
    ensure_out_dir(&a.out)?;
    let prov = Provenance::new(
        None,
        &json!({
            "command": "judge",
            "evaluator": a.evaluator.to_string(),
            "model": model,
            "endpoint": endpoint,
        }),
    );
    let file = a.out.join(format!("judge_{}.csv", a.evaluator));
    artifacts::write_matrix_artifact(
        &file,
        &matrix,
        &prov,
        &[
            ("evaluator".to_string(), a.evaluator.to_string()),
            ("model".to_string(), model),
        ],
    )?;
    Ok(format!(
        "judged {} cells with {} -> {}",
        matrix.n_examples() * matrix.n_systems(),
        a.evaluator,
        file.display()
    ))
}
