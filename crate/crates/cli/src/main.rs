//! `mobayes` — cross-validated benchmarks for the selector + classifier
//! pipeline. Thin shell: all metric and algorithm logic lives in the
//! library crate.
//!
//! Exit codes: 0 success, 1 runtime/data error, 2 usage error.

mod config_file;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mobayes::metrics::win_tie_loss;
use mobayes::moea::{ClassifierKind, RankingStrategy};
use mobayes::pipeline::{cross_validate_pipeline, EvalReport, PipelineConfig};
use mobayes::suite::{benchmark_suite, load_entry, SuiteConfig, SuiteEntry};
use mobayes::DiscretizeStrategy;

use config_file::{parse_kv, parse_suite, KvMap};

const DATA_DIR_ENV: &str = "MOBAYES_DATA_DIR";

#[derive(Parser)]
#[command(name = "mobayes", version, about = "Semi-naive Bayes classification with evolutionary feature selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-validate a pipeline on one dataset and write run reports
    Evaluate(EvaluateArgs),
    /// Run a multi-dataset benchmark suite from a suite file
    Suite(SuiteArgs),
    /// Win-tie-loss comparison of two results files (dataset,value CSV)
    Compare(CompareArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Nb,
    Aode,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SelectorArg {
    None,
    Enora,
    Nsga2,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Dataset file (.arff or .csv); relative paths fall back to $MOBAYES_DATA_DIR
    #[arg(long)]
    data: Option<PathBuf>,
    /// Class column name (default: last column)
    #[arg(long)]
    class_column: Option<String>,
    /// Missing-value token for CSV input (default "?")
    #[arg(long)]
    missing_token: Option<String>,
    /// Discretization bins for numeric attributes
    #[arg(long)]
    bins: Option<usize>,
    /// Classifier
    #[arg(long, value_enum)]
    algo: Option<AlgoArg>,
    /// Feature selector
    #[arg(long, value_enum)]
    selector: Option<SelectorArg>,
    /// Selector population size N
    #[arg(long)]
    pop_size: Option<usize>,
    /// Selector generations G
    #[arg(long)]
    generations: Option<usize>,
    /// ENORA slot count (default: min(10, attributes))
    #[arg(long)]
    slots: Option<usize>,
    /// Inner folds of the wrapper evaluator
    #[arg(long)]
    inner_folds: Option<usize>,
    /// Fitness subsample cap
    #[arg(long)]
    subsample_cap: Option<usize>,
    /// Minimum super-parent value frequency
    #[arg(long)]
    m_threshold: Option<u64>,
    /// Outer cross-validation folds
    #[arg(long)]
    folds: Option<usize>,
    /// Run seed
    #[arg(long)]
    seed: Option<u64>,
    /// Report base path: writes <out>.json and <out>.txt
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value config file; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Suite file: shared config plus [dataset] sections
    suite: PathBuf,
    /// Report base path: writes <out>.json and <out>.txt
    #[arg(long)]
    out: Option<PathBuf>,
    /// Results file to compare suite accuracies against
    #[arg(long)]
    compare: Option<PathBuf>,
    /// Absolute difference treated as a tie
    #[arg(long, default_value_t = 0.0)]
    tie_tolerance: f64,
}

#[derive(Args)]
struct CompareArgs {
    /// Our results file (dataset,value per line)
    ours: PathBuf,
    /// The other results file
    theirs: PathBuf,
    /// Absolute difference treated as a tie
    #[arg(long, default_value_t = 0.0)]
    tie_tolerance: f64,
    /// Treat smaller values as better (for loss-like metrics)
    #[arg(long, default_value_t = false)]
    lower_is_better: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap prints usage errors and exits 2
    let outcome = match cli.command {
        Command::Evaluate(args) => run_evaluate(args),
        Command::Suite(args) => run_suite(args),
        Command::Compare(args) => run_compare(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// The complete effective configuration of an evaluate run; embedded in the
/// machine-readable report so the run can be reproduced from it.
#[derive(Debug, Clone, Serialize)]
struct EffectiveConfig {
    data: String,
    class_column: Option<String>,
    missing_token: String,
    bins: usize,
    algo: String,
    selector: String,
    pop_size: usize,
    generations: usize,
    slots: Option<usize>,
    inner_folds: usize,
    subsample_cap: usize,
    m_threshold: u64,
    folds: usize,
    seed: u64,
}

impl EffectiveConfig {
    fn classifier(&self) -> ClassifierKind {
        match self.algo.as_str() {
            "nb" => ClassifierKind::Nb,
            _ => ClassifierKind::Aode {
                m_threshold: self.m_threshold,
            },
        }
    }

    fn ranking(&self) -> Option<RankingStrategy> {
        match self.selector.as_str() {
            "enora" => Some(RankingStrategy::Enora),
            "nsga2" => Some(RankingStrategy::Nsga2),
            _ => None,
        }
    }

    fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            selector: self.ranking(),
            population_size: self.pop_size,
            generations: self.generations,
            slots: self.slots,
            inner_folds: self.inner_folds,
            subsample_cap: self.subsample_cap,
            classifier: self.classifier(),
            bins: self.bins,
            strategy: DiscretizeStrategy::EqualFrequency,
        }
    }
}

/// Flag value, else config-file value, else default.
struct Resolver {
    file: KvMap,
}

impl Resolver {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    fn opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow!("config key {key:?}: invalid value {raw:?} ({e})")),
        }
    }
}

fn parse_algo(s: &str) -> Result<String> {
    match s {
        "nb" | "aode" => Ok(s.to_string()),
        other => bail!("unknown algo {other:?} (expected nb or aode)"),
    }
}

fn parse_selector(s: &str) -> Result<String> {
    match s {
        "none" | "enora" | "nsga2" => Ok(s.to_string()),
        other => bail!("unknown selector {other:?} (expected none, enora, or nsga2)"),
    }
}

fn run_evaluate(args: EvaluateArgs) -> Result<ExitCode> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?;
            parse_kv(&text)?
        }
        None => KvMap::new(),
    };
    let r = Resolver { file };

    let Some(data) = r.opt(args.data, "data")? else {
        eprintln!("error: --data is required (flag or config file)");
        return Ok(ExitCode::from(2));
    };
    let algo_flag = args.algo.map(|a| match a {
        AlgoArg::Nb => "nb".to_string(),
        AlgoArg::Aode => "aode".to_string(),
    });
    let selector_flag = args.selector.map(|s| match s {
        SelectorArg::None => "none".to_string(),
        SelectorArg::Enora => "enora".to_string(),
        SelectorArg::Nsga2 => "nsga2".to_string(),
    });

    let config = EffectiveConfig {
        data: data.display().to_string(),
        class_column: r.opt(args.class_column, "class-column")?,
        missing_token: r.get(args.missing_token, "missing-token", "?".to_string())?,
        bins: r.get(args.bins, "bins", 10)?,
        algo: parse_algo(&r.get(algo_flag, "algo", "aode".to_string())?)?,
        selector: parse_selector(&r.get(selector_flag, "selector", "none".to_string())?)?,
        pop_size: r.get(args.pop_size, "pop-size", 50)?,
        generations: r.get(args.generations, "generations", 50)?,
        slots: r.opt(args.slots, "slots")?,
        inner_folds: r.get(args.inner_folds, "inner-folds", 5)?,
        subsample_cap: r.get(args.subsample_cap, "subsample-cap", 2000)?,
        m_threshold: r.get(args.m_threshold, "m-threshold", 1)?,
        folds: r.get(args.folds, "folds", 10)?,
        seed: r.get(args.seed, "seed", 7)?,
    };
    let out = r.opt(args.out, "out")?;

    let entry = SuiteEntry {
        name: data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into()),
        data: resolve_data_path(&data),
        class_column: config.class_column.clone(),
        missing_token: Some(config.missing_token.clone()),
    };
    let dataset = load_entry(&entry)?;
    let report = cross_validate_pipeline(&dataset, &config.pipeline(), config.folds, config.seed)?;

    print!("{}", report.human_table());
    println!("{}", report.aggregate_line());

    if let Some(base) = out {
        let run = RunReport {
            tool: "mobayes",
            command: "evaluate",
            config: &config,
            report: &report,
        };
        write_reports(&base, &serde_json::to_string_pretty(&run)?, &report.human_table())?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct RunReport<'a> {
    tool: &'static str,
    command: &'static str,
    config: &'a EffectiveConfig,
    report: &'a EvalReport,
}

fn run_suite(args: SuiteArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.suite)
        .with_context(|| format!("cannot read suite file {}", args.suite.display()))?;
    let suite_file = parse_suite(&text)?;
    let r = Resolver {
        file: suite_file.shared,
    };

    let config = EffectiveConfig {
        data: String::new(),
        class_column: None,
        missing_token: r.get(None, "missing-token", "?".to_string())?,
        bins: r.get(None, "bins", 10)?,
        algo: parse_algo(&r.get(None, "algo", "aode".to_string())?)?,
        selector: parse_selector(&r.get(None, "selector", "enora".to_string())?)?,
        pop_size: r.get(None, "pop-size", 50)?,
        generations: r.get(None, "generations", 50)?,
        slots: r.opt(None, "slots")?,
        inner_folds: r.get(None, "inner-folds", 5)?,
        subsample_cap: r.get(None, "subsample-cap", 2000)?,
        m_threshold: r.get(None, "m-threshold", 1)?,
        folds: r.get(None, "folds", 10)?,
        seed: r.get(None, "seed", 7)?,
    };

    let entries: Vec<SuiteEntry> = suite_file
        .datasets
        .iter()
        .map(|ds| {
            let data = PathBuf::from(ds.get("data").expect("validated by parser"));
            SuiteEntry {
                name: ds
                    .get("name")
                    .cloned()
                    .unwrap_or_else(|| stem_of(&data)),
                data: resolve_data_path(&data),
                class_column: ds.get("class-column").cloned(),
                missing_token: ds.get("missing-token").cloned(),
            }
        })
        .collect();
    let n_entries = entries.len();

    let suite_config = SuiteConfig {
        pipeline: config.pipeline(),
        folds: config.folds,
        seed: config.seed,
        entries,
    };
    let report = benchmark_suite(&suite_config);
    print!("{}", report.human_table());

    if let Some(cmp_path) = &args.compare {
        let theirs = read_results(cmp_path)?;
        let ours: Vec<(String, f64)> = report.accuracies();
        let (a, b) = align_results(&ours, &theirs)?;
        let wtl = win_tie_loss(&a, &b, true, args.tie_tolerance)?;
        println!("W-T-L vs {}: {}", cmp_path.display(), wtl);
    }

    if let Some(base) = &args.out {
        write_reports(base, &report.to_json(), &report.human_table())?;
    }

    if n_entries > 0 && report.succeeded() == 0 {
        bail!("every suite row failed");
    }
    Ok(ExitCode::SUCCESS)
}

fn run_compare(args: CompareArgs) -> Result<ExitCode> {
    let ours = read_results(&args.ours)?;
    let theirs = read_results(&args.theirs)?;
    let (a, b) = align_results(&ours, &theirs)?;

    println!("{:<24} {:>10} {:>10} {:>10}  outcome", "dataset", "ours", "theirs", "delta");
    for ((name, va), vb) in ours.iter().zip(&b) {
        let delta = va - vb;
        let outcome = if delta.abs() <= args.tie_tolerance {
            "tie"
        } else if (delta > 0.0) != args.lower_is_better {
            "win"
        } else {
            "loss"
        };
        println!("{name:<24} {va:>10.4} {vb:>10.4} {delta:>+10.4}  {outcome}");
    }
    let wtl = win_tie_loss(&a, &b, !args.lower_is_better, args.tie_tolerance)?;
    println!("W-T-L: {wtl}");
    Ok(ExitCode::SUCCESS)
}

/// Reads a `dataset,value` results file. A header line is skipped when its
/// second field does not parse as a number.
fn read_results(path: &Path) -> Result<Vec<(String, f64)>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read results file {}", path.display()))?;
    let mut rows = Vec::new();
    let mut keys = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((name, value)) = line.split_once(',') else {
            bail!("{}: line {}: expected dataset,value", path.display(), i + 1);
        };
        let name = name.trim().to_string();
        match value.trim().parse::<f64>() {
            Ok(v) => {
                if keys.insert(name.clone(), ()).is_some() {
                    bail!("{}: duplicate dataset key {name:?}", path.display());
                }
                rows.push((name, v));
            }
            Err(_) if i == 0 => continue, // header row
            Err(e) => bail!("{}: line {}: bad value ({e})", path.display(), i + 1),
        }
    }
    if rows.is_empty() {
        bail!("{}: no result rows", path.display());
    }
    Ok(rows)
}

/// Aligns two results lists by dataset key (order taken from `ours`).
/// Any key missing on either side is an error listing the gaps.
fn align_results(ours: &[(String, f64)], theirs: &[(String, f64)]) -> Result<(Vec<f64>, Vec<f64>)> {
    let theirs_map: HashMap<&str, f64> = theirs.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let ours_keys: std::collections::HashSet<&str> = ours.iter().map(|(k, _)| k.as_str()).collect();
    let missing_theirs: Vec<&str> = ours
        .iter()
        .map(|(k, _)| k.as_str())
        .filter(|k| !theirs_map.contains_key(*k))
        .collect();
    let missing_ours: Vec<&str> = theirs
        .iter()
        .map(|(k, _)| k.as_str())
        .filter(|k| !ours_keys.contains(*k))
        .collect();
    if !missing_theirs.is_empty() || !missing_ours.is_empty() {
        bail!(
            "dataset keys differ; missing in theirs: [{}], missing in ours: [{}]",
            missing_theirs.join(", "),
            missing_ours.join(", ")
        );
    }
    let a: Vec<f64> = ours.iter().map(|(_, v)| *v).collect();
    let b: Vec<f64> = ours.iter().map(|(k, _)| theirs_map[k.as_str()]).collect();
    Ok((a, b))
}

/// Relative paths that do not exist locally fall back to $MOBAYES_DATA_DIR.
fn resolve_data_path(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
        let candidate = Path::new(&dir).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn write_reports(base: &Path, json: &str, human: &str) -> Result<()> {
    if let Some(parent) = base.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let json_path = base.with_extension("json");
    let txt_path = base.with_extension("txt");
    std::fs::write(&json_path, json)
        .with_context(|| format!("cannot write {}", json_path.display()))?;
    std::fs::write(&txt_path, human)
        .with_context(|| format!("cannot write {}", txt_path.display()))?;
    Ok(())
}
