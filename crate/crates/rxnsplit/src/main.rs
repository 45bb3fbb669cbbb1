use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rxnsplit::config::RunConfig;
use rxnsplit::demo::DemoParams;
use rxnsplit::error::{Error, Result};
use rxnsplit::pipeline::{self, Family, PredictionSource};
use rxnsplit_core::eval::EvalMode;
use rxnsplit_core::splits::{ReactionTypePreset, Role};

/// Clean reaction corpora, build document, author, time and
/// reaction-type splits, score predictions and measure distribution shift.
#[derive(Parser, Debug)]
#[command(name = "rxnsplit", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Raw corpus for `clean`, cleaned corpus otherwise.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Never changes outputs.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Log and skip malformed input lines instead of aborting.
    #[arg(long, global = true)]
    lenient: bool,
    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic raw corpus as JSONL.
    DemoCorpus {
        /// Destination file.
        output: PathBuf,
        #[arg(long, default_value_t = DemoParams::default().records)]
        records: usize,
        /// Leave out duplicates, filter failures and malformed lines.
        #[arg(long)]
        no_noise: bool,
    },
    /// Standardize, filter and deduplicate a raw corpus.
    Clean,
    /// Per-year counts of a cleaned corpus.
    Stats,
    /// Build split manifests.
    Split {
        #[command(subcommand)]
        family: SplitCommand,
    },
    /// Score predictions for one role of a manifest.
    Eval(EvalArgs),
    /// Nearest-neighbour distances from a test role to the training roles.
    Shift(ShiftArgs),
}

#[derive(Subcommand, Debug)]
enum SplitCommand {
    Random,
    DocAuthor,
    Time,
    ReactionType {
        #[arg(long)]
        preset: Option<ReactionTypePreset>,
    },
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Take training records from this manifest instead.
    #[arg(long)]
    train_manifest: Option<PathBuf>,
    #[arg(long)]
    role: Option<Role>,
    /// Score the built-in nearest-neighbour baseline.
    #[arg(long, conflicts_with = "predictions", required_unless_present = "predictions")]
    baseline: bool,
    /// Ranked predictions as `record_id<TAB>rank<TAB>smiles`.
    #[arg(long)]
    predictions: Option<PathBuf>,
    #[arg(long = "mode")]
    modes: Vec<EvalMode>,
    #[arg(long = "k")]
    ks: Vec<usize>,
    #[arg(long)]
    beam_width: Option<usize>,
}

#[derive(Args, Debug)]
struct ShiftArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    train_manifest: Option<PathBuf>,
    #[arg(long)]
    test_role: Option<Role>,
    #[arg(long)]
    k: Option<usize>,
}

fn config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(c) = &g.corpus {
        cfg.corpus = Some(c.clone());
    }
    if let Some(o) = &g.out {
        cfg.output = o.clone();
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if g.workers.is_some() {
        cfg.workers = g.workers;
    }
    if g.lenient {
        cfg.strict = false;
    }
    Ok(cfg)
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("{}", f.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = config(&cli.global)?;
    let pool = pipeline::thread_pool(cfg.workers)?;
    match cli.command {
        Command::DemoCorpus { output, records, no_noise } => {
            let params = DemoParams { records, seed: cfg.seed, noise: !no_noise, ..DemoParams::default() };
            let n = pipeline::cmd_demo(&output, &params)?;
            log::info!("wrote {n} records");
            println!("{}", output.display());
        }
        Command::Clean => {
            let r = pipeline::cmd_clean(&cfg, &pool)?;
            let c = &r.outcome.counts;
            eprintln!(
                "input {} skipped {} rejected {} duplicates {} kept {}",
                c.input, c.skipped, c.rejected, c.duplicates, c.kept
            );
            print_files(&r.files);
        }
        Command::Stats => print_files(&pipeline::cmd_stats(&cfg, &pool)?),
        Command::Split { family } => {
            let family = match family {
                SplitCommand::Random => Family::Random,
                SplitCommand::DocAuthor => Family::DocAuthor,
                SplitCommand::Time => Family::Time,
                SplitCommand::ReactionType { preset } => {
                    if let Some(p) = preset {
                        cfg.split.reaction_type.preset = p;
                    }
                    Family::ReactionType
                }
            };
            print_files(&pipeline::cmd_split(&cfg, family, &pool)?);
        }
        Command::Eval(a) => {
            if !a.modes.is_empty() {
                cfg.eval.modes = a.modes;
            }
            if !a.ks.is_empty() {
                cfg.eval.ks = a.ks;
            }
            if let Some(b) = a.beam_width {
                cfg.eval.beam_width = b;
            }
            let role = a.role.or(cfg.eval.role).unwrap_or(Role::IdTest);
            let source = match a.predictions {
                Some(p) => PredictionSource::File(p),
                None => PredictionSource::Baseline,
            };
            let r = pipeline::cmd_eval(&cfg, &a.manifest, role, a.train_manifest.as_deref(), &source, &pool)?;
            for rep in &r.reports {
                for t in &rep.topk {
                    eprintln!("{} top-{}: {}/{} = {:.4}", rep.mode, t.k, t.hits, t.total, t.accuracy);
                }
            }
            print_files(&r.files);
        }
        Command::Shift(a) => {
            if let Some(k) = a.k {
                cfg.shift.k = k;
            }
            let role = a.test_role.or(cfg.shift.test_role).unwrap_or(Role::IdTest);
            let r = pipeline::cmd_shift(&cfg, &a.manifest, role, a.train_manifest.as_deref(), &pool)?;
            eprintln!(
                "median distance: reactant {:.4}, reaction {:.4}",
                r.report.reactant.median, r.report.reaction.median
            );
            print_files(&r.files);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code() as u8
}
