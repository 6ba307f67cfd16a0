//! Command-line front end for the conference participant recommender.
//!
//! Commands: `generate` (seeded synthetic dataset), `validate` (dataset
//! lint), `recommend` (score and emit suggestions), `evaluate` (one method
//! at one beta on a train/test split), and `sweep` (the full method-by-beta
//! grid). Data goes to files or standard output; diagnostics go to the
//! error stream. Exit codes: 0 success, 1 bad data, 2 bad output path or
//! usage.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use sparp_core::evaluation::{DEFAULT_SEED, DEFAULT_TAU, DEFAULT_TRAIN_RATIO};
use sparp_core::io::{
    export_report, load_dataset, write_contacts, write_profiles, write_recommendations,
    ReportFormat,
};
use sparp_core::model::{
    validate_dataset, ConferenceConfig, Dataset, Epoch, NormalizationMode, PersonalityTrait,
    DEFAULT_BETA, DEFAULT_GAMMA, DEFAULT_TOTAL_TIME_MINUTES,
};
use sparp_core::synth::{generate_synthetic, SynthesisParams, DEFAULT_POPULATION};
use sparp_core::{
    run_experiment, run_pipeline, Method, MetricsReport, RelevanceCriteria, RelevanceMode,
    SplitSpec,
};

#[derive(Parser)]
#[command(name = "sparp", version, about = "Conference participant recommender")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic dataset as contacts.csv and profiles.csv.
    Generate(GenerateArgs),
    /// Check dataset files and list every violation found.
    Validate(ValidateArgs),
    /// Score a dataset and emit recommendations as CSV.
    Recommend(RecommendArgs),
    /// Judge one method at one beta against a held-out pair split.
    Evaluate(EvaluateArgs),
    /// Judge a whole method-by-beta grid against a held-out pair split.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct DatasetArgs {
    /// Contact records CSV (participant_a,participant_b,epoch,duration_minutes,frequency).
    #[arg(long)]
    contacts: PathBuf,
    /// Personality profiles CSV (participant_id followed by five 1-5 ratings).
    #[arg(long)]
    profiles: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Minimum merged score for a pair to be recommended.
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    /// Merged-score normalization: raw_sum or minmax.
    #[arg(long, default_value = "minmax", value_parser = parse_mode)]
    mode: NormalizationMode,
    /// Keep only the strongest N suggestions per participant.
    #[arg(long)]
    top_n: Option<NonZeroUsize>,
    /// Observation window in minutes for raw tie scores.
    #[arg(long, default_value_t = DEFAULT_TOTAL_TIME_MINUTES)]
    total_time: f64,
}

#[derive(Args)]
struct EvalArgs {
    /// What counts as a relevant pair: test_tie, test_personality, or either.
    #[arg(long, default_value = "either", value_parser = parse_relevance)]
    relevance: RelevanceMode,
    /// Relevance threshold on the held-out signals.
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
    /// Share of pairs assigned to training, strictly between 0 and 1.
    #[arg(long, default_value_t = DEFAULT_TRAIN_RATIO)]
    split: f64,
    /// Seed for the pair split.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Report serialization: csv or json.
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: ReportFormat,
    /// Report file; the report streams to standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of participants.
    #[arg(long, default_value_t = DEFAULT_POPULATION)]
    n: usize,
    /// Generator seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Directory receiving contacts.csv and profiles.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Epoch blend weight checked against the dataset.
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    /// Observation window in minutes checked against the dataset.
    #[arg(long, default_value_t = DEFAULT_TOTAL_TIME_MINUTES)]
    total_time: f64,
}

#[derive(Args)]
struct RecommendArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Weight of the past epoch in the tie blend.
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    #[command(flatten)]
    score: ScoreArgs,
    /// Recommendations file; CSV streams to standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Scoring method to judge: sparp, c1, or c2.
    #[arg(long, default_value = "sparp", value_parser = parse_method)]
    method: Method,
    /// Weight of the past epoch in the tie blend.
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    #[command(flatten)]
    score: ScoreArgs,
    #[command(flatten)]
    eval: EvalArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Comma-separated tie blend weights.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4")]
    betas: Vec<f64>,
    /// Comma-separated scoring methods.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "sparp,c1,c2",
        value_parser = parse_method
    )]
    methods: Vec<Method>,
    #[command(flatten)]
    score: ScoreArgs,
    #[command(flatten)]
    eval: EvalArgs,
}

fn parse_mode(s: &str) -> Result<NormalizationMode, String> {
    s.parse().map_err(|e: sparp_core::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: sparp_core::Error| e.to_string())
}

fn parse_relevance(s: &str) -> Result<RelevanceMode, String> {
    s.parse().map_err(|e: sparp_core::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: sparp_core::Error| e.to_string())
}

/// Failure with the process exit code it maps to: 1 for data problems,
/// 2 for output problems.
struct Failure {
    code: u8,
    source: anyhow::Error,
}

type CliResult = Result<(), Failure>;

trait IntoFailure<T> {
    fn or_data_failure(self) -> Result<T, Failure>;
    fn or_output_failure(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> IntoFailure<T> for Result<T, E> {
    fn or_data_failure(self) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code: 1,
            source: e.into(),
        })
    }

    fn or_output_failure(self) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code: 2,
            source: e.into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Recommend(args) => cmd_recommend(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.source);
            ExitCode::from(failure.code)
        }
    }
}

fn score_config(beta: f64, score: &ScoreArgs) -> ConferenceConfig {
    ConferenceConfig {
        total_time_minutes: score.total_time,
        beta,
        gamma: score.gamma,
        normalization_mode: score.mode,
        top_n: score.top_n,
    }
}

fn load(dataset: &DatasetArgs, config: ConferenceConfig) -> Result<Dataset, Failure> {
    let contacts = File::open(&dataset.contacts)
        .with_context(|| format!("opening {}", dataset.contacts.display()))
        .or_data_failure()?;
    let profiles = File::open(&dataset.profiles)
        .with_context(|| format!("opening {}", dataset.profiles.display()))
        .or_data_failure()?;
    load_dataset(contacts, profiles, config).or_data_failure()
}

/// Fails with the violation list on the error stream when the dataset is
/// structurally unsound; commands that score data call this first so the
/// diagnostics beat the pipeline's summary error.
fn require_valid(d: &Dataset) -> CliResult {
    let violations = validate_dataset(d);
    if violations.is_empty() {
        return Ok(());
    }
    for v in &violations {
        eprintln!("violation: {v}");
    }
    Err(anyhow!(
        "dataset failed validation with {} violation(s)",
        violations.len()
    ))
    .or_data_failure()
}

fn create_file(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("creating {}", path.display()))
        .or_output_failure()
}

fn cmd_generate(args: GenerateArgs) -> CliResult {
    let mut params = SynthesisParams::for_population(args.n);
    params.seed = args.seed;
    let d = generate_synthetic(&params).or_data_failure()?;

    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating directory {}", args.out.display()))
        .or_output_failure()?;
    let contacts_path = args.out.join("contacts.csv");
    let profiles_path = args.out.join("profiles.csv");
    write_contacts(create_file(&contacts_path)?, &d.contacts).or_output_failure()?;
    write_profiles(create_file(&profiles_path)?, &d.profiles).or_output_failure()?;

    println!(
        "wrote {} ({} contact records)",
        contacts_path.display(),
        d.contacts.len()
    );
    println!(
        "wrote {} ({} profiles)",
        profiles_path.display(),
        d.profiles.len()
    );
    println!("trait rating counts (ratings 1-5):");
    for trait_name in PersonalityTrait::ALL {
        let mut counts = [0usize; 5];
        for p in d.profiles.values() {
            counts[usize::from(p.rating(trait_name)) - 1] += 1;
        }
        println!(
            "  {:<17} {}",
            trait_name.to_string(),
            counts.map(|c| c.to_string()).join(" ")
        );
    }
    for epoch in Epoch::ALL {
        let mut histogram: std::collections::BTreeMap<u64, usize> = Default::default();
        for c in d.contacts.iter().filter(|c| c.epoch == epoch) {
            *histogram.entry(c.duration_minutes as u64).or_insert(0) += 1;
        }
        let rendered: Vec<String> = histogram
            .iter()
            .map(|(minutes, count)| format!("{minutes}x{count}"))
            .collect();
        println!(
            "{epoch} durations (minutes x pairs): {}",
            rendered.join(" ")
        );
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> CliResult {
    let config = ConferenceConfig {
        total_time_minutes: args.total_time,
        beta: args.beta,
        ..ConferenceConfig::default()
    };
    let d = load(&args.dataset, config)?;
    let violations = validate_dataset(&d);
    if violations.is_empty() {
        println!("no violations");
        return Ok(());
    }
    for v in &violations {
        println!("{v}");
    }
    Err(anyhow!("{} violation(s)", violations.len())).or_data_failure()
}

fn cmd_recommend(args: RecommendArgs) -> CliResult {
    let d = load(&args.dataset, score_config(args.beta, &args.score))?;
    require_valid(&d)?;
    let recs = run_pipeline(&d).or_data_failure()?;
    match &args.out {
        Some(path) => {
            write_recommendations(create_file(path)?, &recs).or_output_failure()?;
            println!("wrote {} ({} recommendations)", path.display(), recs.len());
        }
        None => {
            write_recommendations(io::stdout().lock(), &recs).or_output_failure()?;
        }
    }
    Ok(())
}

fn run_sweep(
    dataset: &DatasetArgs,
    betas: &[f64],
    methods: &[Method],
    config_beta: f64,
    score: &ScoreArgs,
    eval: &EvalArgs,
) -> Result<MetricsReport, Failure> {
    let d = load(dataset, score_config(config_beta, score))?;
    require_valid(&d)?;
    let criteria = RelevanceCriteria {
        mode: eval.relevance,
        tau: eval.tau,
    };
    let split = SplitSpec {
        train_ratio: eval.split,
        seed: eval.seed,
    };
    run_experiment(&d, betas, methods, &criteria, &split).or_data_failure()
}

/// Writes the report where asked. With `--out` the human-readable summary
/// goes to standard output; without it the report itself is the output and
/// nothing else is printed.
fn emit_report(report: &MetricsReport, eval: &EvalArgs) -> CliResult {
    let bytes = export_report(report, eval.format).or_data_failure()?;
    match &eval.out {
        Some(path) => {
            let mut file = create_file(path)?;
            file.write_all(&bytes)
                .with_context(|| format!("writing {}", path.display()))
                .or_output_failure()?;
            file.flush()
                .with_context(|| format!("writing {}", path.display()))
                .or_output_failure()?;
            print_summary(report);
            println!("wrote {} ({} rows)", path.display(), report.rows.len());
        }
        None => {
            io::stdout()
                .lock()
                .write_all(&bytes)
                .context("writing report to standard output")
                .or_output_failure()?;
        }
    }
    Ok(())
}

/// Per-coefficient MAE and NMAE summary with one column per method.
fn print_summary(report: &MetricsReport) {
    let methods = [Method::C1, Method::Sparp, Method::C2];
    let mut coords: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.beta, r.bucket)).collect();
    coords.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    coords.dedup();

    let cell =
        |beta: f64, bucket: f64, method: Method, pick: fn(&sparp_core::MetricsRow) -> f64| {
            report
                .rows
                .iter()
                .find(|r| r.beta == beta && r.bucket == bucket && r.method == method)
                .map(|r| format!("{:.3}", pick(r)))
                .unwrap_or_else(|| "-".to_owned())
        };

    println!(
        "{:<22} {:>8} {:>8} {:>8} {:>9} {:>9} {:>9}",
        "coefficient", "mae/c1", "mae/sparp", "mae/c2", "nmae/c1", "nmae/sparp", "nmae/c2"
    );
    for (beta, bucket) in coords {
        let label = format!("{bucket:.1} (beta={beta})");
        let mae: Vec<String> = methods
            .iter()
            .map(|&m| cell(beta, bucket, m, |r| r.mae))
            .collect();
        let nmae: Vec<String> = methods
            .iter()
            .map(|&m| cell(beta, bucket, m, |r| r.nmae))
            .collect();
        println!(
            "{label:<22} {:>8} {:>8} {:>8} {:>9} {:>9} {:>9}",
            mae[0], mae[1], mae[2], nmae[0], nmae[1], nmae[2]
        );
    }
    for note in &report.notes {
        println!("note: {note}");
    }
}

fn cmd_evaluate(args: EvaluateArgs) -> CliResult {
    let report = run_sweep(
        &args.dataset,
        &[args.beta],
        &[args.method],
        args.beta,
        &args.score,
        &args.eval,
    )?;
    emit_report(&report, &args.eval)
}

fn cmd_sweep(args: SweepArgs) -> CliResult {
    let config_beta = args.betas.first().copied().unwrap_or(DEFAULT_BETA);
    let report = run_sweep(
        &args.dataset,
        &args.betas,
        &args.methods,
        config_beta,
        &args.score,
        &args.eval,
    )?;
    emit_report(&report, &args.eval)
}
