use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tradebench::config::ExperimentConfig;
use tradebench::corpus::{generate_synthetic, SyntheticSpec};
use tradebench::error::{Error, Result};
use tradebench::harness;
use tradebench::learners::{Algorithm, Hyperparams};
use tradebench::tradeoff::{break_even, CostForm, CostModel, TimeBasis};

#[derive(Parser)]
#[command(name = "tradebench", about = "Quality/time trade-off benchmark for text classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment matrix from a config file
    Run(RunArgs),
    /// Generate a synthetic TSV corpus
    Synth(SynthArgs),
    /// Solve the analytical break-even crossover between two cost models
    Breakeven(BreakevenArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// override the size schedule, e.g. "1,2,4,8"
    #[arg(long)]
    sizes: Option<String>,
    /// override the algorithm set, e.g. "NB,LR,SVM"
    #[arg(long)]
    algos: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// "train" or "train_plus_predict"
    #[arg(long)]
    time_basis: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// run cells concurrently (degrades timing fidelity, stamped in the CSV)
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long, default_value_t = 2000)]
    vocab_per_class: usize,
    #[arg(long, default_value_t = 8000)]
    shared_vocab: usize,
    #[arg(long, default_value_t = 0.7)]
    signal_prob: f64,
    /// inclusive token-count range, e.g. "80-120"
    #[arg(long, default_value = "80-120")]
    doc_len: String,
    #[arg(long, default_value_t = 1_000_000)]
    target_bytes: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BreakevenArgs {
    /// baseline quality rate of the faster algorithm A
    #[arg(long)]
    alpha: f64,
    /// quality margin of the slower algorithm B
    #[arg(long)]
    epsilon: f64,
    /// cost model of A, e.g. "linear:12"
    #[arg(long)]
    cost_a: String,
    /// cost model of B, e.g. "linearithmic:2"
    #[arg(long)]
    cost_b: String,
}

fn parse_doc_len(s: &str) -> Result<(usize, usize)> {
    let (lo, hi) = s
        .split_once('-')
        .ok_or_else(|| Error::InvalidConfig(format!("doc-len must be LO-HI, got {s:?}")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidConfig(format!("bad doc-len bound {v:?}")))
    };
    Ok((parse(lo)?, parse(hi)?))
}

fn parse_cost(s: &str, alpha: f64, epsilon: f64) -> Result<CostModel> {
    let (form, c) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidCostModel(format!("expected FORM:CONSTANT, got {s:?}")))?;
    let form = match form {
        "linear" => CostForm::Linear,
        "linearithmic" => CostForm::Linearithmic,
        "quadratic" => CostForm::Quadratic,
        other => return Err(Error::InvalidCostModel(format!("unknown cost form {other:?}"))),
    };
    let c: f64 = c
        .parse()
        .map_err(|_| Error::InvalidCostModel(format!("bad cost constant {c:?}")))?;
    CostModel::new(form, c, alpha, epsilon)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if let Some(sizes) = &args.sizes {
        cfg.sizes_mb = sizes
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidConfig(format!("bad size {s:?}")))
            })
            .collect::<Result<_>>()?;
    }
    if let Some(algos) = &args.algos {
        let chosen: Vec<Algorithm> =
            algos.split(',').map(|s| Algorithm::parse(s.trim())).collect::<Result<_>>()?;
        cfg.algorithms = chosen
            .into_iter()
            .map(|a| {
                cfg.algorithms
                    .iter()
                    .find(|h| h.algorithm == a)
                    .cloned()
                    .unwrap_or_else(|| Hyperparams::for_algorithm(a))
            })
            .collect();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(basis) = &args.time_basis {
        cfg.time_basis = TimeBasis::parse(basis)?;
    }
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    cfg.parallel |= args.parallel;
    cfg.validate()?;

    let result = harness::run_experiment(&cfg)?;
    let out_dir = cfg.output_dir.clone();
    let files = harness::emit_reports(&result, &out_dir)?;
    let complete = result
        .runs
        .iter()
        .filter(|c| matches!(c, harness::RunCell::Complete { .. }))
        .count();
    let failed = result.runs.len() - complete;
    eprintln!("{complete} runs complete, {failed} failed; reports in {}", out_dir.display());
    for f in files {
        eprintln!("  {}", f.display());
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let spec = SyntheticSpec {
        num_classes: args.classes,
        vocab_per_class: args.vocab_per_class,
        shared_vocab: args.shared_vocab,
        signal_prob: args.signal_prob,
        doc_len_range: parse_doc_len(&args.doc_len)?,
        target_bytes: args.target_bytes,
        seed: args.seed,
    };
    let corpus = generate_synthetic(&spec)?;
    std::fs::write(&args.out, corpus.to_tsv())?;
    eprintln!(
        "wrote {} documents ({} bytes, {} classes) to {}",
        corpus.len(),
        corpus.total_bytes(),
        corpus.classes().len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_breakeven(args: BreakevenArgs) -> Result<()> {
    let a = parse_cost(&args.cost_a, args.alpha, 0.0)?;
    let b = parse_cost(&args.cost_b, args.alpha, args.epsilon)?;
    let result = break_even(&a, &b)?;
    println!("{}", serde_json::to_string_pretty(&result).expect("serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Breakeven(args) => cmd_breakeven(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
