use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cqcommit::quantum::Budget;
use cqcommit::runner::{error_json, run, Command, OutputFormat, RunConfig};
use cqcommit::Error;

#[derive(Parser)]
#[command(
    name = "cqcommit",
    version = concat!(env!("CARGO_PKG_VERSION"), " (interface revision 1)"),
    about = "Commitment capacity and commitment codes for classical-quantum channels"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, visible_alias = "epsilon1")]
    eps1: Option<f64>,
    #[arg(long, visible_alias = "epsilon2")]
    eps2: Option<f64>,
    /// Largest dense dimension dimⁿ.
    #[arg(long, default_value_t = 4096)]
    budget: usize,
    /// Largest number of enumerated input words.
    #[arg(long, default_value_t = 1 << 20)]
    max_enumeration: u64,
}

#[derive(Subcommand)]
enum Sub {
    /// Maximize H(X|Y) over input distributions.
    Capacity { channel: PathBuf },
    /// Closed-form capacity of a group-covariant channel.
    Symmetric { rep: PathBuf },
    /// Separator operators and their margins.
    Separators {
        channel: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Random code construction with a full security report.
    BuildCode {
        channel: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        /// Comma-separated input distribution (default uniform).
        #[arg(long, value_delimiter = ',')]
        input_dist: Option<Vec<f64>>,
        /// Also write the code table to this file.
        #[arg(long)]
        code_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Security parameters of an existing code.
    Audit {
        channel: PathBuf,
        code: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Honest and cheating protocol runs, exact and sampled.
    Simulate {
        channel: PathBuf,
        code: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Converse inequality for a code.
    ConverseCheck {
        channel: PathBuf,
        code: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn apply(cfg: &mut RunConfig, c: Common) {
    cfg.seed = c.seed;
    cfg.alpha = c.alpha;
    cfg.eps1 = c.eps1;
    cfg.eps2 = c.eps2;
    cfg.budget = Budget {
        max_dense_dim: c.budget,
        max_enumeration: c.max_enumeration,
    };
}

fn config(cli: &Cli) -> RunConfig {
    let mut cfg = match &cli.command {
        Sub::Capacity { channel } => {
            let mut c = RunConfig::new(Command::Capacity);
            c.channel = Some(channel.clone());
            c
        }
        Sub::Symmetric { rep } => {
            let mut c = RunConfig::new(Command::Symmetric);
            c.rep = Some(rep.clone());
            c
        }
        Sub::Separators { channel, common } => {
            let mut c = RunConfig::new(Command::Separators);
            c.channel = Some(channel.clone());
            apply(&mut c, common.clone());
            c
        }
        Sub::BuildCode {
            channel,
            n,
            r1,
            r2,
            input_dist,
            code_out,
            common,
        } => {
            let mut c = RunConfig::new(Command::BuildCode);
            c.channel = Some(channel.clone());
            c.n = Some(*n);
            c.r1 = Some(*r1);
            c.r2 = Some(*r2);
            c.input_dist = input_dist.clone();
            c.code_out = code_out.clone();
            apply(&mut c, common.clone());
            c
        }
        Sub::Audit { channel, code, common } | Sub::ConverseCheck { channel, code, common } => {
            let cmd = if matches!(cli.command, Sub::Audit { .. }) {
                Command::Audit
            } else {
                Command::ConverseCheck
            };
            let mut c = RunConfig::new(cmd);
            c.channel = Some(channel.clone());
            c.code = Some(code.clone());
            apply(&mut c, common.clone());
            c
        }
        Sub::Simulate {
            channel,
            code,
            trials,
            common,
        } => {
            let mut c = RunConfig::new(Command::Simulate);
            c.channel = Some(channel.clone());
            c.code = Some(code.clone());
            c.trials = *trials;
            apply(&mut c, common.clone());
            c
        }
    };
    cfg.format = match cli.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    cfg
}

fn fail(e: &Error) -> ExitCode {
    eprint!("{}", error_json(e));
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            return fail(&Error::Validation("threads must be positive".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return fail(&Error::Validation(e.to_string()));
        }
    }
    let cfg = config(&cli);
    let text = match run(&cfg) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    match &cli.output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                return fail(&Error::Io(format!("{}: {e}", p.display())));
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
