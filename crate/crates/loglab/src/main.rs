use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use loglab::baseline::BaselineKind;
use loglab::cli::{run_build, run_evaluate, run_mine, run_predict, run_report};
use loglab::config::RunConfig;
use loglab::dataset::Split;

#[derive(Parser)]
#[command(name = "loglab", version, about = "Log-statement dataset builder, baselines and evaluator")]
struct Cli {
    /// TOML config file; CLI flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// RNG seed (also overridable via LOGLAB_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Walk repository roots and extract methods from Log4j projects.
    Mine {
        /// Directories containing cloned repositories.
        #[arg(long, num_args = 1..)]
        roots: Vec<PathBuf>,
        /// Output JSONL file of methods.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra logger receiver names to treat as log calls.
        #[arg(long)]
        receiver: Vec<String>,
        /// Glob patterns (relative to each repo) to skip.
        #[arg(long)]
        exclude: Vec<String>,
    },
    /// Build the P1/P2/FT datasets and the train/valid/test split.
    Build {
        /// Methods JSONL produced by `mine`.
        #[arg(long)]
        methods: Option<PathBuf>,
        /// Output directory for the dataset files.
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Fraction of token positions masked per P1 instance.
        #[arg(long)]
        mask_ratio: Option<f64>,
        /// Fraction of logged methods routed to P2 (rest go to FT).
        #[arg(long)]
        p2_share: Option<f64>,
        /// Route every logged method to both P2 and FT pools.
        #[arg(long)]
        both_pools: bool,
    },
    /// Run a non-neural baseline over FT instances of one split.
    Predict {
        /// Which baseline: heuristic or retrieval.
        #[arg(long)]
        baseline: BaselineKind,
        /// Split to predict on: train, valid or test.
        #[arg(long, default_value = "test")]
        split: Split,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Output predictions JSONL.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a predictions file and write the aggregated report.
    Evaluate {
        #[arg(long)]
        preds: PathBuf,
        #[arg(long, default_value = "test")]
        split: Split,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Output report JSON.
        #[arg(long)]
        out: PathBuf,
        /// Optional markdown rendering of the report.
        #[arg(long)]
        markdown: Option<PathBuf>,
    },
    /// Evaluate several prediction files and write a comparison table.
    Report {
        #[arg(long, num_args = 1..)]
        preds: Vec<PathBuf>,
        #[arg(long, default_value = "test")]
        split: Split,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> loglab::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.apply_env()?;
    cfg.validate()?;
    if cfg.jobs > 0 {
        // Best effort: the global pool can only be configured once.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global();
    }

    match cli.command {
        Command::Mine { roots, out, receiver, exclude } => {
            if !roots.is_empty() {
                cfg.roots = roots;
            }
            if let Some(out) = out {
                cfg.methods_file = out;
            }
            cfg.receiver_extra.extend(receiver);
            cfg.exclude_globs.extend(exclude);
            let summary = run_mine(&cfg)?;
            println!(
                "mined {} methods ({} with logs) from {} repos ({} skipped, {} files skipped) -> {}",
                summary.methods,
                summary.methods_with_log,
                summary.repos_kept,
                summary.repos_skipped,
                summary.files_skipped,
                cfg.methods_file.display()
            );
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Build { methods, data_dir, mask_ratio, p2_share, both_pools } => {
            if let Some(m) = methods {
                cfg.methods_file = m;
            }
            if let Some(d) = data_dir {
                cfg.data_dir = d;
            }
            if let Some(r) = mask_ratio {
                cfg.mask_ratio = r;
            }
            if let Some(s) = p2_share {
                cfg.p2_share = s;
            }
            if both_pools {
                cfg.both_pools = true;
            }
            cfg.validate()?;
            let stats = run_build(&cfg)?;
            println!(
                "kept {}/{} methods ({} logged); instances: {} P1, {} P2, {} FT -> {}",
                stats.methods_kept,
                stats.methods_in,
                stats.methods_logged,
                stats.p1_instances,
                stats.p2_instances,
                stats.ft_instances,
                cfg.data_dir.display()
            );
        }
        Command::Predict { baseline, split, data_dir, out } => {
            if let Some(d) = data_dir {
                cfg.data_dir = d;
            }
            let n = run_predict(&cfg, baseline, split, &out)?;
            println!("wrote {n} predictions -> {}", out.display());
        }
        Command::Evaluate { preds, split, data_dir, out, markdown } => {
            if let Some(d) = data_dir {
                cfg.data_dir = d;
            }
            let report = run_evaluate(&cfg, split, &preds, &out, markdown.as_deref())?;
            println!(
                "scored {}/{} instances; mean BLEU-4 {:.4} -> {}",
                report.scored_count,
                report.total_instances,
                report.mean_bleu4,
                out.display()
            );
        }
        Command::Report { preds, split, data_dir, out } => {
            if let Some(d) = data_dir {
                cfg.data_dir = d;
            }
            run_report(&cfg, split, &preds, &out)?;
            println!("wrote comparison of {} prediction files -> {}", preds.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
