//! `slu`: expand a training corpus, train, parse, evaluate, describe corpora
//! and run the HTTP service. Flags override the `--config` TOML file.
//!
//! Exit codes: 0 success, 1 failure, 2 usage error or missing input.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use slu_core::corpus::{build_vocabulary, corpus_stats, read_corpus, write_corpus, Corpus, Provenance};
use slu_core::metrics::EvalReport;
use slu_core::pipeline::{Pipeline, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "slu",
    version,
    about = "Semantic frame parsing robust to unseen words and descriptive spans"
)]
struct Cli {
    /// TOML config file; flags win over its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for expansion sampling and training order.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a training corpus with delexicalized and <unk>-substituted variants.
    Expand {
        /// Training corpus (default: paths.train).
        #[arg(long, value_name = "PATH")]
        train: Option<PathBuf>,
        /// Where to write the expanded corpus (default: paths.expanded).
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Train the tagger on an expanded corpus; lexicons are saved beside the model.
    Train {
        /// Expanded corpus (default: paths.expanded).
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Parse text into frames, one JSON document per line on stdout.
    Parse {
        #[command(flatten)]
        model: ModelArgs,
        /// Text to parse.
        #[arg(long, conflicts_with = "input")]
        text: Option<String>,
        /// File with one utterance per line.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        /// Print the Replace/Expand/Merge working sequences to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Score a model on a gold test corpus, overall and on the OOD/OOV subsets.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        /// Gold test corpus (default: paths.test).
        #[arg(long, value_name = "PATH")]
        test: Option<PathBuf>,
        /// Also train and score the baseline (no expansion, single-pass decoding) on --train.
        #[arg(long)]
        baseline: bool,
        /// Training corpus for --baseline (default: paths.train).
        #[arg(long, value_name = "PATH")]
        train: Option<PathBuf>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Corpus statistics: intents, tag ratios, OOD and OOV proportions.
    Stats {
        /// Corpus to describe (default: paths.train).
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        /// Count OOV tokens against the vocabulary of this corpus.
        #[arg(long, value_name = "PATH")]
        vocab_from: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Interface to bind; the default keeps the service local.
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, value_name = "PATH", default_value = "slu-data")]
        data_dir: PathBuf,
        /// Static assets (the web console) served under /.
        #[arg(long, value_name = "PATH")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Model file (default: paths.model).
    #[arg(long, value_name = "PATH")]
    model: Option<PathBuf>,
    /// Lexicon directory (default: paths.lexicons, else <model>.lexicons).
    #[arg(long, value_name = "DIR")]
    lexicons: Option<PathBuf>,
}

/// A required input that is not configured or does not exist; exit code 2.
#[derive(Debug)]
struct MissingInput(String);

impl std::fmt::Display for MissingInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for MissingInput {}

fn existing(flag: Option<PathBuf>, configured: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    let Some(path) = flag.or_else(|| configured.clone()) else {
        return Err(MissingInput(format!("no {what} given (flag or config paths)")).into());
    };
    if !path.exists() {
        return Err(MissingInput(format!("{what} {} does not exist", path.display())).into());
    }
    Ok(path)
}

fn target(flag: Option<PathBuf>, configured: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    flag.or_else(|| configured.clone())
        .ok_or_else(|| MissingInput(format!("no {what} given (flag or config paths)")).into())
}

fn lexicon_dir(model: &Path, flag: Option<PathBuf>, cfg: &PipelineConfig) -> PathBuf {
    flag.or_else(|| cfg.paths.lexicons.clone())
        .unwrap_or_else(|| model.with_extension("lexicons"))
}

fn load_pipeline(args: ModelArgs, cfg: &PipelineConfig) -> Result<Pipeline> {
    let model = existing(args.model, &cfg.paths.model, "model file")?;
    let lexicons = lexicon_dir(&model, args.lexicons, cfg);
    if !lexicons.is_dir() {
        return Err(MissingInput(format!("lexicon directory {} does not exist", lexicons.display())).into());
    }
    Ok(Pipeline::load(&model, &lexicons, &cfg.delex, &cfg.inference)?)
}

fn read(path: &Path) -> Result<Corpus> {
    read_corpus(path).with_context(|| format!("reading {}", path.display()))
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) if !p.exists() => return Err(MissingInput(format!("config {} does not exist", p.display())).into()),
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn gains(full: &EvalReport, base: &EvalReport) -> serde_json::Value {
    let d = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(a, b)| 100.0 * (a - b));
    serde_json::json!({
        "overall": d(Some(full.slots.f1), Some(base.slots.f1)),
        "ood": d(full.ood.slots.map(|s| s.f1), base.ood.slots.map(|s| s.f1)),
        "oov": d(full.oov.slots.map(|s| s.f1), base.oov.slots.map(|s| s.f1)),
    })
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli)?;
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Expand { train, output } => {
            let train = read(&existing(train, &cfg.paths.train, "training corpus")?)?;
            let output = target(output, &cfg.paths.expanded, "output path")?;
            let expanded = cfg.expand(&train);
            ensure_parent(&output)?;
            write_corpus(&output, &expanded)?;
            let count = |p: Provenance| expanded.utterances().iter().filter(|u| u.provenance() == p).count();
            writeln!(out, "original     {}", count(Provenance::Original))?;
            writeln!(out, "ood_variant  {}", count(Provenance::OodVariant))?;
            writeln!(out, "oov_variant  {}", count(Provenance::OovVariant))?;
            writeln!(out, "total        {} -> {}", expanded.len(), output.display())?;
        }
        Command::Train { input, model } => {
            let expanded = read(&existing(input, &cfg.paths.expanded, "expanded corpus")?)?;
            let model_path = target(model.model, &cfg.paths.model, "model path")?;
            let lexicons = lexicon_dir(&model_path, model.lexicons, &cfg);
            let pipeline = Pipeline::train_expanded(&expanded, &cfg)?;
            ensure_parent(&model_path)?;
            pipeline.save(&model_path, &lexicons)?;
            let report = pipeline.model().report();
            writeln!(
                out,
                "trained on {} utterances, {} epochs, final loss {:.4}, token accuracy {:.4}",
                expanded.len(),
                report.epoch_losses.len(),
                report.epoch_losses.last().copied().unwrap_or(f64::NAN),
                report.token_accuracy
            )?;
            writeln!(out, "model {}  lexicons {}", model_path.display(), lexicons.display())?;
        }
        Command::Parse {
            model,
            text,
            input,
            trace,
        } => {
            let lines: Vec<String> = match (text, input) {
                (Some(t), _) => vec![t],
                (None, Some(p)) => {
                    let p = existing(Some(p), &None, "input file")?;
                    let file = std::fs::File::open(&p).with_context(|| format!("opening {}", p.display()))?;
                    std::io::BufReader::new(file).lines().collect::<Result<_, _>>()?
                }
                (None, None) => return Err(MissingInput("parse needs --text or --input".into()).into()),
            };
            let pipeline = load_pipeline(model, &cfg)?;
            for (n, line) in lines.iter().enumerate() {
                if line.trim().is_empty() {
                    eprintln!("warning: line {} is empty, skipped", n + 1);
                    continue;
                }
                let (frame, steps) = pipeline.parse_traced(line)?;
                if trace {
                    eprintln!("{steps}\n");
                }
                writeln!(out, "{}", serde_json::to_string(&frame)?)?;
            }
        }
        Command::Eval {
            model,
            test,
            baseline,
            train,
            json,
        } => {
            let test = read(&existing(test, &cfg.paths.test, "test corpus")?)?;
            let full = load_pipeline(model, &cfg)?.evaluate(&test)?;
            let base = if baseline {
                let train = read(&existing(train, &cfg.paths.train, "training corpus")?)?;
                Some(Pipeline::train_baseline(&train, &cfg)?.evaluate(&test)?)
            } else {
                None
            };
            match (&base, json) {
                (None, true) => writeln!(out, "{}", serde_json::to_string_pretty(&full)?)?,
                (None, false) => write!(out, "{full}")?,
                (Some(b), true) => {
                    let doc = serde_json::json!({ "full": full, "baseline": b, "gain": gains(&full, b) });
                    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
                }
                (Some(b), false) => {
                    writeln!(out, "baseline (no expansion, single pass)\n{b}")?;
                    writeln!(out, "full pipeline\n{full}")?;
                    let g = gains(&full, b);
                    let fmt = |v: &serde_json::Value| v.as_f64().map_or("n/a".into(), |x| format!("{x:+.2}"));
                    writeln!(
                        out,
                        "F1 gain: overall {}  ood {}  oov {}",
                        fmt(&g["overall"]),
                        fmt(&g["ood"]),
                        fmt(&g["oov"])
                    )?;
                }
            }
        }
        Command::Stats {
            input,
            vocab_from,
            json,
        } => {
            let corpus = read(&existing(input, &cfg.paths.train, "corpus")?)?;
            let vocab = match vocab_from {
                Some(p) => Some(build_vocabulary(
                    &read(&existing(Some(p), &None, "vocabulary corpus")?)?,
                    cfg.delex.min_count,
                )),
                None => None,
            };
            let stats = corpus_stats(&corpus, vocab.as_ref(), &cfg.delex.descriptive_slot_classes());
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&stats)?)?;
            } else {
                write!(out, "{stats}")?;
            }
        }
        Command::Serve {
            port,
            host,
            data_dir,
            static_dir,
        } => {
            if let Some(dir) = &static_dir {
                if !dir.is_dir() {
                    bail!(MissingInput(format!("static dir {} does not exist", dir.display())));
                }
            }
            let opts = slu_service::ServeOptions {
                host,
                port,
                data_dir,
                static_dir,
            };
            tokio::runtime::Runtime::new()?.block_on(slu_service::serve(opts))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<MissingInput>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
