use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use regevo_cli::commands::{
    self, read_inputs, run_classify, run_evaluate, run_evolve, run_hybrid_eval,
};
use regevo_cli::config::{CategorySelection, RunConfig};
use regevo_cli::CliError;

#[derive(Parser)]
#[command(
    name = "regevo",
    version,
    about = "Evolve, evaluate and run interpretable proximity-rule text classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve rule vectors per category and score them on the held-out split
    Evolve(EvolveArgs),
    /// Evaluate rule files against a corpus split
    Evaluate(EvaluateArgs),
    /// Classify texts with rule files, one JSON line per input
    Classify(ClassifyArgs),
    /// Compare the probabilistic baseline with the hybrid protocol
    HybridEval(HybridEvalArgs),
}

#[derive(Args)]
struct CommonConfig {
    /// Run configuration file (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed of the config
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory of the config
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonConfig {
    fn load(&self, categories: &[String]) -> Result<RunConfig, CliError> {
        let mut config = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        if !categories.is_empty() {
            config.categories = CategorySelection::List(categories.to_vec());
        }
        Ok(config)
    }
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: CommonConfig,
    /// Restrict the run to these categories (repeatable)
    #[arg(long = "category")]
    categories: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Test,
    All,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: CommonConfig,
    /// Rule files to evaluate
    #[arg(long, required = true, num_args = 1..)]
    rules: Vec<PathBuf>,
    /// Which side of the train/test split to score against
    #[arg(long, value_enum, default_value = "test")]
    split: SplitArg,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Rule files; block order defines the priority order
    #[arg(long, required = true, num_args = 1..)]
    rules: Vec<PathBuf>,
    /// Classify a single text
    #[arg(long, conflicts_with = "input")]
    text: Option<String>,
    /// Classify one text per line of this file
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write JSON lines here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep the original casing of tokens
    #[arg(long)]
    no_lowercase: bool,
}

#[derive(Args)]
struct HybridEvalArgs {
    #[command(flatten)]
    common: CommonConfig,
    /// Rule files backing the baseline
    #[arg(long, required = true, num_args = 1..)]
    rules: Vec<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Evolve(args) => {
            let config = args.common.load(&args.categories)?;
            let report = run_evolve(&config)?;
            for (category, metrics) in &report.metrics.per_category {
                println!(
                    "{category}: precision {:.4} recall {:.4} f {:.4}",
                    metrics.precision, metrics.recall, metrics.f_beta
                );
            }
            println!(
                "macro: precision {:.4} recall {:.4} f {:.4}",
                report.metrics.macro_precision(),
                report.metrics.macro_recall(),
                report.metrics.macro_f()
            );
            println!("outputs in {}", report.output_dir.display());
            Ok(())
        }
        Command::Evaluate(args) => {
            let config = args.common.load(&[])?;
            let split = match args.split {
                SplitArg::Train => commands::SplitChoice::Train,
                SplitArg::Test => commands::SplitChoice::Test,
                SplitArg::All => commands::SplitChoice::All,
            };
            let metrics = run_evaluate(&config, &args.rules, split)?;
            for (category, m) in &metrics.per_category {
                println!(
                    "{category}: precision {:.4} recall {:.4} f {:.4}",
                    m.precision, m.recall, m.f_beta
                );
            }
            println!(
                "macro: precision {:.4} recall {:.4} f {:.4}",
                metrics.macro_precision(),
                metrics.macro_recall(),
                metrics.macro_f()
            );
            Ok(())
        }
        Command::Classify(args) => {
            let texts: Vec<String> = match (&args.text, &args.input) {
                (Some(text), None) => vec![text.clone()],
                (None, Some(path)) => read_inputs(path)?,
                (None, None) | (Some(_), Some(_)) => {
                    return Err(CliError::usage(
                        "classify needs exactly one of --text or --input",
                    ));
                }
            };
            let lowercase = !args.no_lowercase;
            match &args.out {
                Some(path) => {
                    let file = std::fs::File::create(path)
                        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
                    run_classify(&args.rules, &texts, lowercase, file)
                }
                None => run_classify(&args.rules, &texts, lowercase, std::io::stdout().lock()),
            }
        }
        Command::HybridEval(args) => {
            let config = args.common.load(&[])?;
            let report = run_hybrid_eval(&config, &args.rules)?;
            for row in &report.rows {
                println!(
                    "{},{}: precision {:.4} recall {:.4}",
                    row.category, row.solution, row.precision, row.recall
                );
            }
            println!(
                "provenance: baseline {} regex-override {} baseline-fallback {} (total {})",
                report.provenance.baseline,
                report.provenance.regex_override,
                report.provenance.baseline_fallback,
                report.provenance.total
            );
            Ok(())
        }
    }
}
