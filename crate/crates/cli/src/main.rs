//! `sqperm`: experiments on uniform square permutations.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sqperm_core::local::Roots;
use sqperm_core::Regularity;

const FORMATS_HELP: &str = "\
Output formats:
  json   report {schema_version, command, config, result}; floats carry 12
         significant digits and rationals are strings \"p/q\"
  plain  sample: one permutation per line; enumerate: the count;
         encode: X, Y and z0 on three lines; decode: the permutation
  csv    header row then one row per record:
           sample              index,z0,permutation
           permuton-distance   index,z0,z,distance
           fluctuations        moment,time,target,estimate,stderr,pass
           local-stats         pattern,root,count,frequency,quenched,annealed,z_quenched,z_annealed
           pattern-stats       index,z0,occ,occ_stderr,coc

Environment: SQPERM_SEED and SQPERM_THREADS set --seed and --threads;
flags take precedence. Exit status is 0 only when the command and all of
its checks succeed; errors are one JSON line on stderr.";

#[derive(Parser, Serialize)]
#[command(name = "sqperm", version, about = "Uniform square permutations: sampling, encoding and scaling limits", after_help = FORMATS_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Master seed; replicate k uses ChaCha stream k of this seed.
    #[arg(long, global = true, env = "SQPERM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (1 = serial reference mode). Results do not depend on it.
    #[arg(long, global = true, env = "SQPERM_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Write the payload here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Which proposals the sampler accepts.
    #[arg(long, global = true, value_enum, default_value_t = Policy::Auto)]
    pub regularity: Policy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Plain,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Petrov conditions and the n^.9 margin.
    Strict,
    /// The n^.9 margin only.
    Margin,
    /// Any pair whose reconstruction is valid.
    Constructive,
    /// margin when the margin is nonempty, else constructive.
    Auto,
}

impl From<Policy> for Regularity {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Strict => Regularity::Strict,
            Policy::Margin => Regularity::Margin,
            Policy::Constructive => Regularity::Constructive,
            Policy::Auto => Regularity::Auto,
        }
    }
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Draw square permutations.
    Sample(SampleArgs),
    /// Count Sq(n) by formula and, for n <= 10, exhaustively.
    Enumerate(EnumerateArgs),
    /// Project a square permutation to its anchored pair.
    Encode(EncodeArgs),
    /// Rebuild a permutation from an anchored pair.
    Decode(DecodeArgs),
    /// Grid box distance between samples and the limiting permuton.
    PermutonDistance(PermutonArgs),
    /// Limit values attached to a pattern.
    PatternLimit(PatternLimitArgs),
    /// Endpoint moments of the rescaled boundary paths.
    Fluctuations(FluctuationArgs),
    /// Rooted window frequencies of one sample against the local limits.
    LocalStats(LocalArgs),
    /// Pattern and consecutive pattern proportions in samples.
    PatternStats(PatternStatsArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

fn positive_u64(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    positive_u64(s).map(|v| v as usize)
}

fn parse_roots(s: &str) -> Result<Roots, String> {
    if s == "all" {
        Ok(Roots::All)
    } else {
        positive_u64(s).map(Roots::Sample)
    }
}

#[derive(Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, value_parser = positive_usize)]
    pub size: usize,
    #[arg(long, default_value_t = 1, value_parser = positive_u64)]
    pub count: u64,
    /// Condition on sigma^{-1}(1) = z0.
    #[arg(long)]
    pub z0: Option<usize>,
    /// Exactly uniform draws from the full list of Sq(n), n <= 10.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Serialize)]
pub struct EnumerateArgs {
    #[arg(long, value_parser = positive_usize)]
    pub size: usize,
}

#[derive(Args, Serialize)]
pub struct EncodeArgs {
    /// Permutation as "2413" or "2 4 1 3".
    #[arg(long)]
    pub perm: String,
}

#[derive(Args, Serialize)]
pub struct DecodeArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    pub z0: usize,
}

#[derive(Args, Serialize)]
pub struct PermutonArgs {
    #[arg(long, value_parser = positive_usize)]
    pub size: usize,
    #[arg(long, default_value_t = 64, value_parser = positive_usize)]
    pub grid: usize,
    #[arg(long, default_value_t = 1, value_parser = positive_u64)]
    pub samples: u64,
}

#[derive(Args, Serialize)]
pub struct PatternLimitArgs {
    #[arg(long)]
    pub pattern: String,
    /// Anchor fraction u = z0/n for the quenched and permuton values.
    #[arg(long)]
    pub anchor_frac: Option<f64>,
    /// Monte Carlo draws for the permuton pattern density.
    #[arg(long, default_value_t = 100_000, value_parser = positive_u64)]
    pub trials: u64,
}

#[derive(Args, Serialize)]
pub struct FluctuationArgs {
    #[arg(long, value_parser = positive_usize)]
    pub size: usize,
    /// z0 = floor(F n); F in (0.5, 1).
    #[arg(long, default_value_t = 0.7)]
    pub anchor_frac: f64,
    #[arg(long, default_value_t = 100, value_parser = positive_usize)]
    pub replicates: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.75, 1.0])]
    pub times: Vec<f64>,
}

#[derive(Args, Serialize)]
pub struct LocalArgs {
    #[arg(long, value_parser = positive_usize)]
    pub size: usize,
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    /// "all" or a number of uniformly drawn roots.
    #[arg(long, default_value = "all", value_parser = parse_roots)]
    pub roots: Roots,
    /// z0 = floor(F n); drawn by the sampler when absent.
    #[arg(long)]
    pub anchor_frac: Option<f64>,
}

#[derive(Args, Serialize)]
pub struct PatternStatsArgs {
    #[arg(long, value_parser = positive_usize)]
    pub size: usize,
    #[arg(long)]
    pub pattern: String,
    #[arg(long, default_value_t = 10, value_parser = positive_u64)]
    pub samples: u64,
    /// Subset draws when exact counting is too expensive.
    #[arg(long, value_parser = positive_u64)]
    pub mc_samples: Option<u64>,
}

#[derive(Args, Serialize)]
pub struct VerifyArgs {
    /// Largest size checked exhaustively (at most 9).
    #[arg(long, default_value_t = 7)]
    pub max_size: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("{}", report::error_line("invalid_config", first));
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("{}", report::error_line("invalid_config", &e.to_string()));
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(out) => {
            if let Err(e) = report::write_payload(&out.payload, cli.output.as_deref()) {
                eprintln!("{}", report::error_line("io", &e.to_string()));
                return ExitCode::from(1);
            }
            if out.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}", report::error_line(e.kind, &e.message));
            ExitCode::from(e.code)
        }
    }
}
