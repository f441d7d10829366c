use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::CommandFactory;
use lgc_core::protocols::{self, CodecId, PartitionOptions, Scenario};
use lgc_core::simlab::{self, LawSpec};
use lgc_core::{algset, groebner, parse_statements, AlgSetError, GroebnerError, ParseError, PolySet, ProtocolError, SimError};
use thiserror::Error;

use crate::{BoundsArgs, Cli, Command, DecodeArgs, EncodeArgs, Engine, LawArgs, ProveArgs, SimulateArgs, SweepArgs};

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    AlgSet(#[from] AlgSetError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("entailment engines disagree: brute force says {brute}, Gröbner says {groebner}")]
    EngineDisagreement { brute: bool, groebner: bool },
}

pub enum Failure {
    Usage(clap::Error),
    Domain(DomainError),
}

impl<E: Into<DomainError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(Cli::command().error(kind, msg))
}

pub fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Prove(a) => prove(a),
        Command::Simulate(a) => simulate(a),
        Command::Bounds(a) => bounds(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn read_text(path: &Path) -> Result<String, DomainError> {
    fs::read_to_string(path).map_err(|source| DomainError::Read {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), DomainError> {
    fs::write(path, bytes).map_err(|source| DomainError::Write {
        path: path.to_owned(),
        source,
    })
}

fn read_statements(path: &Path, vars: Option<usize>) -> Result<PolySet, DomainError> {
    parse_statements(&read_text(path)?, vars).map_err(|source| DomainError::Parse {
        path: path.to_owned(),
        source,
    })
}

/// Reads every file and lifts them to a common universe: `vars` if given,
/// else the widest file.
fn read_all(paths: &[&Path], vars: Option<usize>) -> Result<Vec<PolySet>, DomainError> {
    let sets = paths
        .iter()
        .map(|p| read_statements(p, vars))
        .collect::<Result<Vec<_>, _>>()?;
    let m = vars.unwrap_or_else(|| sets.iter().map(PolySet::num_vars).max().unwrap_or(0));
    Ok(sets.into_iter().map(|s| s.with_num_vars(m)).collect())
}

fn codec_name(c: CodecId) -> &'static str {
    match c {
        CodecId::Enumerative => "enumerative",
        CodecId::Partition(k) => k.name(),
    }
}

fn encode(a: EncodeArgs) -> Result<ExitCode, Failure> {
    let sc = a.scenario;
    if sc.needs_background() && a.background.is_none() {
        return Err(usage(ErrorKind::MissingRequiredArgument, format!("{sc} requires --background")));
    }
    if sc.needs_query() && a.query.is_none() {
        return Err(usage(ErrorKind::MissingRequiredArgument, format!("{sc} requires --query")));
    }
    let law = match a.law.as_deref() {
        None => None,
        Some(&[pa, pb]) if sc == Scenario::T4 => Some([pa, pb, 0.0, 0.0]),
        Some(&[pa, pb, pa2, pb2]) if sc == Scenario::T5 => Some([pa, pb, pa2, pb2]),
        Some(_) if sc.needs_query() => {
            return Err(usage(
                ErrorKind::WrongNumberOfValues,
                format!("--law takes {} values for {sc}", if sc == Scenario::T4 { 2 } else { 4 }),
            ))
        }
        Some(_) => return Err(usage(ErrorKind::ArgumentConflict, format!("--law does not apply to {sc}"))),
    };

    let mut paths: Vec<&Path> = vec![&a.input];
    paths.extend(a.query.as_deref());
    paths.extend(a.background.as_deref());
    let sets = read_all(&paths, a.vars)?;
    let s = &sets[0];
    let mut opts = PartitionOptions::new(a.codec, a.seed);
    if let Some(law) = law {
        opts = opts.with_law(law);
    }
    let tx = match sc {
        Scenario::T1 => protocols::t1_encode(s)?,
        Scenario::T2 => protocols::t2_encode(s, &sets[1])?,
        Scenario::T3 => protocols::t3_encode(s, &sets[1])?,
        Scenario::T4 => protocols::t4_encode(s, &sets[1], opts)?,
        Scenario::T5 => protocols::t5_encode(s, &sets[1], &sets[2], opts)?,
    };
    write_file(&a.out, &tx.to_bytes())?;
    println!("scenario={sc}");
    println!("codec={}", codec_name(tx.header.codec));
    println!("m={}", tx.header.m);
    println!("payload_bits={}", tx.payload_bits());
    Ok(ExitCode::SUCCESS)
}

fn decode(a: DecodeArgs) -> Result<ExitCode, Failure> {
    let bytes = fs::read(&a.input).map_err(|source| DomainError::Read {
        path: a.input.clone(),
        source,
    })?;
    let background = a.background.as_deref().map(|p| read_statements(p, None)).transpose()?;
    let decoded = protocols::decode_all(&bytes, background.as_ref())?;
    let single = decoded.len() == 1;
    let mut text = String::new();
    for (k, d) in decoded.iter().enumerate() {
        let what = if d.header.scenario == Scenario::T3 { "delta" } else { "s_hat" };
        if !single {
            text.push_str(&format!("# transmission {}: {} {what}\n", k + 1, d.header.scenario));
        }
        text.push_str(&d.knowledge.to_text());
        println!(
            "scenario={} m={} payload_bits={} statements={}",
            d.header.scenario,
            d.header.m,
            d.payload_bits,
            d.knowledge.len()
        );
    }
    write_file(&a.out, text.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn prove(a: ProveArgs) -> Result<ExitCode, Failure> {
    let sets = read_all(&[&a.knowledge, &a.query], a.vars)?;
    let (k, q) = (&sets[0], &sets[1]);
    let brute = matches!(a.engine, Engine::Brute | Engine::Both)
        .then(|| algset::entails(k, q))
        .transpose()?;
    let gb = matches!(a.engine, Engine::Groebner | Engine::Both)
        .then(|| groebner::entails_groebner(k, q))
        .transpose()?;
    let entailed = match (brute, gb) {
        (Some(b), Some(g)) if b != g => {
            return Err(DomainError::EngineDisagreement { brute: b, groebner: g }.into());
        }
        (Some(b), _) => b,
        (None, Some(g)) => g,
        (None, None) => unreachable!("an engine is always selected"),
    };
    println!("entailed={entailed}");
    Ok(if entailed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn require(v: Option<f64>, flag: &str, sc: Scenario) -> Result<f64, Failure> {
    v.ok_or_else(|| usage(ErrorKind::MissingRequiredArgument, format!("{sc} requires --{flag}")))
}

fn law_spec(a: &LawArgs) -> Result<LawSpec, Failure> {
    let sc = a.scenario;
    let law = match sc {
        Scenario::T1 => LawSpec::single(require(a.ps, "ps", sc)?),
        Scenario::T2 | Scenario::T3 => LawSpec::nested(require(a.ps, "ps", sc)?, require(a.pr, "pr", sc)?),
        Scenario::T4 => LawSpec::nested(require(a.ps, "ps", sc)?, require(a.pq, "pq", sc)?),
        Scenario::T5 => LawSpec::conditional(
            require(a.pr, "pr", sc)?,
            require(a.ps, "ps", sc)?,
            require(a.pq, "pq", sc)?,
            require(a.ps_out, "ps-out", sc)?,
            require(a.pq_out, "pq-out", sc)?,
        ),
    };
    law.map_err(|e| usage(ErrorKind::ValueValidation, e))
}

fn simulate(a: SimulateArgs) -> Result<ExitCode, Failure> {
    let law = law_spec(&a.law)?;
    if a.trials == 0 {
        return Err(usage(ErrorKind::ValueValidation, "--trials must be positive"));
    }
    let codec = a.law.scenario.needs_query().then_some(a.law.codec);
    let report = simlab::run_trials(a.law.scenario, &law, a.law.m, a.trials, codec, a.seed)?;
    println!("{report}");
    Ok(ExitCode::SUCCESS)
}

fn bounds(a: BoundsArgs) -> Result<ExitCode, Failure> {
    let law = law_spec(&a.law)?;
    let sc = a.law.scenario;
    let codec = sc.needs_query().then_some(a.law.codec);
    let b = simlab::bounds_table(sc, &law, a.law.m, codec)?;
    let limit_key = match sc {
        Scenario::T1 => "entropy",
        Scenario::T2 | Scenario::T3 => "background_entropy",
        Scenario::T4 | Scenario::T5 => "lambda",
    };
    println!("scenario={sc}");
    println!("law={law}");
    println!("m={}", a.law.m);
    println!("codec={}", codec.map_or("enumerative", |c| c.name()));
    println!("{limit_key}={:.6}", b.lower);
    println!("upper={:.6}", b.upper);
    Ok(ExitCode::SUCCESS)
}

fn sweep(a: SweepArgs) -> Result<ExitCode, Failure> {
    let parts: Vec<f64> = a
        .grid
        .split(':')
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|e| usage(ErrorKind::ValueValidation, format!("--grid: {e}")))?;
    let &[start, step, end] = parts.as_slice() else {
        return Err(usage(ErrorKind::ValueValidation, "--grid expects start:step:end"));
    };
    let grid = simlab::simplex_grid(start, step, end).map_err(|e| usage(ErrorKind::ValueValidation, e))?;
    let csv = simlab::sweep_lambda_vs_naive(&grid, a.n)?;
    match a.out {
        Some(path) => write_file(&path, csv.as_bytes())?,
        None => {
            let mut out = std::io::stdout().lock();
            // a closed pipe is not worth an error
            let _ = out.write_all(csv.as_bytes());
        }
    }
    Ok(ExitCode::SUCCESS)
}
