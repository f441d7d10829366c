//! `lgc`: encode, decode and check propositional knowledge over GF(2).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lgc_core::{CodecKind, Scenario};

#[derive(Parser, Debug)]
#[command(name = "lgc", version, about = "Knowledge transmission over GF(2) algebraic sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encode a statement file into a transmission
    Encode(EncodeArgs),
    /// Decode a transmission (or a concatenation of them) into statements
    Decode(DecodeArgs),
    /// Check whether the knowledge entails the query; exit 0 iff it does
    Prove(ProveArgs),
    /// Measure coding rates on random instances
    Simulate(SimulateArgs),
    /// Print the rate limit and the finite-length upper bound
    Bounds(BoundsArgs),
    /// Emit a CSV comparing the partition limit with naive coding
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Scenario,
    /// Sender's statements
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Background shared with the receiver (t2, t3, t5)
    #[arg(long)]
    pub background: Option<PathBuf>,
    /// Target query (t4, t5)
    #[arg(long)]
    pub query: Option<PathBuf>,
    /// Number of variables; defaults to the largest index used
    #[arg(long)]
    pub vars: Option<usize>,
    #[arg(long, value_parser = parse_codec, default_value = "linear")]
    pub codec: CodecKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Partition law p_a,p_b (t4) or p_a,p_b,p_a',p_b' (t5, inside and
    /// outside the background); defaults to the instance's own fractions
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub law: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub background: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Brute,
    Groebner,
    Both,
}

#[derive(Args, Debug)]
pub struct ProveArgs {
    #[arg(long)]
    pub knowledge: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long, value_enum, default_value_t = Engine::Both)]
    pub engine: Engine,
    #[arg(long)]
    pub vars: Option<usize>,
}

/// Per-point law. Which flags apply depends on the scenario:
/// t1 `--ps`; t2/t3 `--ps --pr`; t4 `--ps --pq`;
/// t5 `--pr --ps --pq --ps-out --pq-out`.
#[derive(Args, Debug, Clone)]
pub struct LawArgs {
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Scenario,
    /// Probability that a point is a zero of s (for t5: given it is a zero of r)
    #[arg(long)]
    pub ps: Option<f64>,
    /// Probability that a point is a zero of q (for t5: given it is a zero of r)
    #[arg(long)]
    pub pq: Option<f64>,
    /// Probability that a point is a zero of r
    #[arg(long)]
    pub pr: Option<f64>,
    /// t5: probability that a point outside Z(r) is a zero of s
    #[arg(long)]
    pub ps_out: Option<f64>,
    /// t5: probability that a point outside Z(r) is a zero of q
    #[arg(long)]
    pub pq_out: Option<f64>,
    #[arg(long, default_value_t = 12)]
    pub m: usize,
    #[arg(long, value_parser = parse_codec, default_value = "linear")]
    pub codec: CodecKind,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub law: LawArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// start:step:end, applied to both p_a and p_b
    #[arg(long, default_value = "0.02:0.02:0.4")]
    pub grid: String,
    /// Block length for the linear-code column; asymptotic rate when absent
    #[arg(long)]
    pub n: Option<usize>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse()
}

fn parse_codec(s: &str) -> Result<CodecKind, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(commands::Failure::Usage(err)) => err.exit(),
        Err(commands::Failure::Domain(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
