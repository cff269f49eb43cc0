use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use walkbench::eval::{EvalReport, Failure};
use walkbench::pipeline::{assemble_report, run_pipeline, run_prepare, run_walk_stages, ExperimentConfig, StageSet};
use walkbench::Error;

/// Biased random-walk embedding benchmark for link prediction.
#[derive(Parser, Debug)]
#[command(name = "walkbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every stage and write the report.
    Run(Opts),
    /// Load graphs, keep the largest component and hold out labeled edges.
    Prepare(Opts),
    /// Generate walk corpora from prepared graphs.
    Walk(Opts),
    /// Train embeddings from corpora.
    Embed(Opts),
    /// Score labeled edges with trained embeddings.
    Score(Opts),
    /// Aggregate score files into report.json, correlation CSVs and plot data.
    Report(Opts),
}

/// Every flag overrides the matching key of the config file.
#[derive(Args, Debug, Default)]
struct Opts {
    /// Key-value config file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Edge-list path or manifest name; repeatable.
    #[arg(short, long = "graph")]
    graphs: Vec<String>,
    /// Comma-separated walk list, e.g. "RW, TSAW, N2V(1.5, 0.5)".
    #[arg(long)]
    walks: Option<String>,
    #[arg(long)]
    walks_per_node: Option<String>,
    #[arg(long)]
    walk_length: Option<String>,
    #[arg(long)]
    split_fraction: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    negatives: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long)]
    lr_start: Option<String>,
    #[arg(long)]
    lr_end: Option<String>,
    #[arg(long)]
    noise_power: Option<String>,
    #[arg(long = "seed")]
    master_seed: Option<String>,
    #[arg(short, long)]
    output_dir: Option<String>,
    /// Worker threads for graph/walk tasks (0 = all cores).
    #[arg(long)]
    threads: Option<String>,
    /// deterministic or async.
    #[arg(long)]
    mode: Option<String>,
    /// Threads for async training; implies --mode async.
    #[arg(long)]
    train_threads: Option<String>,
    #[arg(long)]
    manifest: Option<String>,
    #[arg(long)]
    cache_dir: Option<String>,
}

impl Opts {
    fn config(&self) -> walkbench::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path).map_err(|e| match e {
                Error::Io { .. } => Error::Config(e.to_string()),
                other => other,
            })?,
            None => ExperimentConfig::default(),
        };
        if !self.graphs.is_empty() {
            cfg.graphs = self.graphs.clone();
        }
        let overrides = [
            ("walks", &self.walks),
            ("walks_per_node", &self.walks_per_node),
            ("walk_length", &self.walk_length),
            ("split_fraction", &self.split_fraction),
            ("dim", &self.dim),
            ("window", &self.window),
            ("negatives", &self.negatives),
            ("epochs", &self.epochs),
            ("lr_start", &self.lr_start),
            ("lr_end", &self.lr_end),
            ("noise_power", &self.noise_power),
            ("master_seed", &self.master_seed),
            ("output_dir", &self.output_dir),
            ("threads", &self.threads),
            ("mode", &self.mode),
            ("train_threads", &self.train_threads),
            ("manifest", &self.manifest),
            ("cache_dir", &self.cache_dir),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.apply(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(command: &Command) -> walkbench::Result<Vec<Failure>> {
    match command {
        Command::Run(o) => run_pipeline(&o.config()?).map(summarize),
        Command::Prepare(o) => run_prepare(&o.config()?).map(|(_, f)| f),
        Command::Walk(o) => run_walk_stages(&o.config()?, StageSet::Walk),
        Command::Embed(o) => run_walk_stages(&o.config()?, StageSet::Embed),
        Command::Score(o) => run_walk_stages(&o.config()?, StageSet::Score),
        Command::Report(o) => assemble_report(&o.config()?, Vec::new()).map(summarize),
    }
}

fn summarize(report: EvalReport) -> Vec<Failure> {
    if let Some(summary) = &report.summary {
        println!("{:<16} {:>10} {:>10}", "walk", "AUC", "AUC-PR");
        for row in &summary.rows {
            println!("{:<16} {:>10.4} {:>10.4}", row.walk, row.median_auc, row.median_auc_pr);
        }
    }
    report.failures
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in &failures {
                eprintln!(
                    "failed: {} {} [{}]: {}",
                    f.graph,
                    f.walk.as_deref().unwrap_or("-"),
                    f.stage,
                    f.message
                );
            }
            ExitCode::from(1)
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
