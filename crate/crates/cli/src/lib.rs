//! `layman-eval` command-line front end.
//!
//! [`run`] is the whole program minus process plumbing, so tests can drive
//! it in-process with their own environment and output buffers.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use layman_eval::datapipe::{ChatProviderKind, Level};
use layman_eval::embedkit::ProviderKind;

use config::{Overrides, RunConfig};

/// Exit status 1: bad arguments, configuration or input data.
/// Exit status 2: provider, network or filesystem failure at run time.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    pub(crate) fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "layman-eval", version, about = "Build layman-style report datasets and evaluate generated reports")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EmbedKindArg {
    Local,
    Remote,
    Table,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ChatKindArg {
    Mock,
    Remote,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Sentence,
    Report,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// JSON config file (default: ./layman-eval.json when present)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write data output here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Write the one-line JSON summary here instead of stderr
    #[arg(long, global = true)]
    summary: Option<PathBuf>,
    /// Suppress progress messages
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Print the resolved configuration and exit
    #[arg(long, global = true)]
    show_config: bool,
    /// Embedding provider
    #[arg(long, global = true, value_enum)]
    provider: Option<EmbedKindArg>,
    #[arg(long, global = true)]
    embed_dim: Option<usize>,
    #[arg(long, global = true)]
    embed_url: Option<String>,
    #[arg(long, global = true)]
    embed_model: Option<String>,
    /// JSON table of precomputed vectors (implies --provider table)
    #[arg(long, global = true)]
    embed_table: Option<PathBuf>,
    /// Text prepended to every input of a remote embedding model
    #[arg(long, global = true)]
    embed_instruction: Option<String>,
    /// Chat provider
    #[arg(long, global = true, value_enum)]
    chat: Option<ChatKindArg>,
    #[arg(long, global = true)]
    chat_url: Option<String>,
    #[arg(long, global = true)]
    chat_model: Option<String>,
    /// Mock chat: TSV of professional<TAB>layman phrases
    #[arg(long, global = true)]
    glossary: Option<PathBuf>,
    /// Mock chat: TSV of layman<TAB>revised self-check fixes
    #[arg(long, global = true)]
    fix_table: Option<PathBuf>,
    /// Persistent embedding cache file
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Similarity threshold for acceptance and matching
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Similarity above which a sentence counts as a near-duplicate
    #[arg(long, global = true)]
    dedup_threshold: Option<f64>,
    #[arg(long, global = true)]
    batch_size: Option<usize>,
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel stages
    #[arg(long, global = true)]
    parallelism: Option<usize>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            embed_kind: self.provider.map(|k| match k {
                EmbedKindArg::Local => ProviderKind::Local,
                EmbedKindArg::Remote => ProviderKind::RemoteHttp,
                EmbedKindArg::Table => ProviderKind::Table,
            }),
            embed_dim: self.embed_dim,
            embed_url: self.embed_url.clone(),
            embed_model: self.embed_model.clone(),
            embed_table: self.embed_table.clone(),
            embed_instruction: self.embed_instruction.clone(),
            chat_kind: self.chat.map(|k| match k {
                ChatKindArg::Mock => ChatProviderKind::MockGlossary,
                ChatKindArg::Remote => ChatProviderKind::RemoteHttp,
            }),
            chat_url: self.chat_url.clone(),
            chat_model: self.chat_model.clone(),
            glossary: self.glossary.clone(),
            fix_table: self.fix_table.clone(),
            cache: self.cache.clone(),
            theta: self.threshold,
            dedup_threshold: self.dedup_threshold,
            batch_size: self.batch_size,
            max_iterations: self.max_iters,
            seed: self.seed,
            parallelism: self.parallelism,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Drop near-duplicate sentences ({id, text} JSON lines)
    Dedup {
        #[arg(long)]
        input: PathBuf,
        /// Split each record into sentences first
        #[arg(long)]
        split: bool,
    },
    /// Translate sentences to plain language
    Translate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Translate and refine until the similarity and self-check gates pass
    Refine {
        #[arg(long)]
        input: PathBuf,
        /// Translate afresh every round instead of revising
        #[arg(long)]
        retranslate: bool,
    },
    /// Build a sentence- or report-level layman dataset (requires --output)
    BuildDataset {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "sentence")]
        level: LevelArg,
        /// Continue an interrupted run from its checkpoint
        #[arg(long)]
        resume: bool,
        #[arg(long)]
        retranslate: bool,
    },
    /// Score candidate reports against references
    Evaluate {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        references: PathBuf,
        /// Layman dataset used for substitution
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        no_substitute: bool,
        /// Comma-separated subset of bleu,rouge,meteor,semantic
        #[arg(long, default_value = "bleu,rouge,meteor,semantic")]
        metrics: String,
        /// Record each matched sentence's best counterpart instead of its first
        #[arg(long)]
        best_match: bool,
        /// Keep sentences whose best index similarity is below this value
        #[arg(long)]
        floor: Option<f64>,
        /// Write per-sentence best similarities ({id, sentence, score, matched})
        #[arg(long)]
        similarities_out: Option<PathBuf>,
    },
    /// Readability scores for texts
    Readability {
        #[arg(long, conflicts_with = "text", required_unless_present = "text")]
        input: Option<PathBuf>,
        #[arg(long)]
        text: Option<String>,
        /// Round scores to integers
        #[arg(long)]
        round: bool,
    },
    /// Pearson and Spearman correlation of metric scores with human scores
    Correlate {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        human: PathBuf,
    },
    /// Cohen's kappa between two annotators
    Kappa {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Equal-width bins for continuous scores in [0, 1]
        #[arg(long, default_value_t = 10)]
        bins: usize,
    },
    /// Histogram of similarity scores
    Hist {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        /// Range as lo,hi
        #[arg(long, default_value = "0,1")]
        range: String,
        /// Also write bin edges and counts as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Emit a text bar chart instead of JSON
        #[arg(long)]
        bars: bool,
    },
    /// Mean and variance of pairwise cosine between reports
    Diversity {
        #[arg(long)]
        input: PathBuf,
    },
    /// Seeded random sample of records for manual review
    SampleExport {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, short = 'n')]
        count: usize,
    },
}

/// Process-level inputs, injectable for tests.
pub struct Context<'a> {
    pub env: &'a dyn Fn(&str) -> Option<String>,
    pub cwd: PathBuf,
}

impl Context<'_> {
    pub fn from_process() -> Context<'static> {
        fn env(k: &str) -> Option<String> {
            std::env::var(k).ok()
        }
        Context {
            env: &env,
            cwd: std::env::current_dir().unwrap_or_else(|_| PathBuf::from(".")),
        }
    }
}

fn init_logging(quiet: bool) {
    let _ = env_logger::Builder::new()
        .filter_level(log::LevelFilter::Info)
        .format_target(false)
        .format_timestamp(None)
        .try_init();
    log::set_max_level(if quiet { log::LevelFilter::Warn } else { log::LevelFilter::Info });
}

/// Runs the program; returns the exit status.
pub fn run<I, T>(argv: I, ctx: &Context<'_>, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    init_logging(cli.global.quiet);
    match execute(&cli, ctx, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, ctx: &Context<'_>, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(cli.global.config.as_deref(), &ctx.cwd, ctx.env, &cli.global.overrides())?;
    if cli.global.show_config {
        let text = serde_json::to_string_pretty(&cfg).expect("config serializes");
        writeln!(stdout, "{text}").map_err(|e| CliError::Runtime(e.to_string()))?;
        return Ok(());
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Usage("no subcommand given; see --help".into()));
    };
    let mut io = commands::Io {
        global: &cli.global,
        cwd: &ctx.cwd,
        stdout,
        stderr,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    pool.install(|| commands::dispatch(command, &cfg, &mut io))
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Sentence => Level::Sentence,
            LevelArg::Report => Level::Report,
        }
    }
}
