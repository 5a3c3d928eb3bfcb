use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use lmrank::run::{rank, DEFAULT_RUN_TAG, DEFAULT_TOP_K};
use lmrank::{Corpus, ModelKind, RunConfig, ScoreMode, TopicParams};

mod config;

use config::ConfigFile;

/// Rank documents with Dirichlet, LDA-mixture or topic-space language models.
#[derive(Parser, Debug)]
#[command(name = "lmrank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score queries against a corpus and write a TREC run file.
    Rank(RankArgs),
    /// Write random θ/φ/wordmap files matching a corpus.
    SynthTopics(SynthArgs),
}

#[derive(Args, Debug, Default)]
struct RankArgs {
    /// key=value file supplying any of the options below; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// lmd, lbdm or ldi
    #[arg(long)]
    model: Option<String>,
    /// Corpus in GibbsLDA data format
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// One document id per line, in corpus order (default d1, d2, ...)
    #[arg(long)]
    docids: Option<PathBuf>,
    /// One query per line: id followed by tokens
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long)]
    theta: Option<PathBuf>,
    #[arg(long)]
    phi: Option<PathBuf>,
    #[arg(long)]
    wordmap: Option<PathBuf>,
    /// Dirichlet prior [default: 2000]
    #[arg(long)]
    mu: Option<f64>,
    /// Weight of the Dirichlet model in lbdm [default: 0.7]
    #[arg(long)]
    lambda: Option<f64>,
    /// log or linear [default: log]
    #[arg(long)]
    score_mode: Option<String>,
    /// Results per query [default: 1000]
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    run_tag: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 10)]
    topics: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    theta: PathBuf,
    #[arg(long)]
    phi: PathBuf,
    #[arg(long)]
    wordmap: PathBuf,
}

/// A problem with flags or configuration rather than with input data.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

fn pick<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| usage(format!("config value {key} = {v:?}: {e}")))
        })
        .transpose()
}

fn run_config(args: RankArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path).map_err(|e| usage(format!("{e:#}")))?,
        None => ConfigFile::default(),
    };
    let required = |v: Option<PathBuf>, key: &str| {
        v.ok_or_else(|| usage(format!("missing required option --{key}")))
    };
    let model: String = pick(args.model, &file, "model")?
        .ok_or_else(|| usage("missing required option --model"))?;
    let model = ModelKind::from_str(&model).map_err(|e| usage(e.to_string()))?;
    let mut config = RunConfig::new(
        model,
        required(pick(args.corpus, &file, "corpus")?, "corpus")?,
        required(pick(args.queries, &file, "queries")?, "queries")?,
        required(pick(args.output, &file, "output")?, "output")?,
    );
    config.docids = pick(args.docids, &file, "docids")?;
    config.theta = pick(args.theta, &file, "theta")?;
    config.phi = pick(args.phi, &file, "phi")?;
    config.wordmap = pick(args.wordmap, &file, "wordmap")?;
    if let Some(mu) = pick(args.mu, &file, "mu")? {
        config.mu = mu;
    }
    if let Some(lambda) = pick(args.lambda, &file, "lambda")? {
        config.lambda = lambda;
    }
    if let Some(mode) = pick::<String>(args.score_mode, &file, "score-mode")? {
        config.score_mode = ScoreMode::from_str(&mode).map_err(|e| usage(e.to_string()))?;
    }
    config.top_k = pick(args.top_k, &file, "top-k")?.unwrap_or(DEFAULT_TOP_K);
    config.run_tag =
        pick(args.run_tag, &file, "run-tag")?.unwrap_or_else(|| DEFAULT_RUN_TAG.into());
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

fn run_rank(args: RankArgs) -> Result<()> {
    let config = run_config(args)?;
    let output = rank(&config)?;
    for diag in &output.diagnostics {
        eprintln!("{diag}");
    }
    lmrank::write_trec_run(&output.lists, &config.run_tag, &config.output)?;
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let corpus = Corpus::load(&args.corpus)?;
    let params = TopicParams::synthesize(
        args.seed,
        corpus.num_docs(),
        corpus.num_terms(),
        args.topics,
    )
    .map_err(|e| usage(e.to_string()))?;
    params
        .save(&corpus, &args.theta, &args.phi, &args.wordmap)
        .with_context(|| format!("writing topic files for {}", display(&args.corpus)))?;
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

/// 1 for usage or configuration problems, 2 for data, parse and I/O errors.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<lmrank::Error>() {
        Some(lmrank::Error::Config(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Rank(args) => run_rank(args),
        Command::SynthTopics(args) => run_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
