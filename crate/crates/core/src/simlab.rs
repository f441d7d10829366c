//! Monte-Carlo rate measurement against the analytic limits.
//!
//! Instances are drawn from per-point independent laws, encoded with the
//! scenario's protocol, decoded, and checked against the scenario's semantic
//! contract on every trial. Rates are payload bits per point (`2^m` points).

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::algset::{self, AlgSet, AlgSetError};
use crate::partition::{self, binary_entropy, lambda, pos_log2, splitmix64, CodecKind, PartitionError};
use crate::poly::PolySet;
use crate::protocols::{self, PartitionOptions, ProtocolError, Scenario};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("invalid law: {0}")]
    InvalidLaw(String),
    #[error("{scenario} cannot be driven by a {law} law")]
    LawMismatch { scenario: Scenario, law: &'static str },
    #[error("{scenario} needs a partition codec")]
    MissingCodec { scenario: Scenario },
    #[error("contract violated on trial {trial}: {detail}")]
    ContractViolation { trial: usize, detail: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    AlgSet(#[from] AlgSetError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Per-point membership laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LawSpec {
    /// Each point is in `Z(S)` with probability `p`.
    Single { p: f64 },
    /// Each point is in both sets with probability `inner`, in the outer set
    /// only with probability `outer - inner`.
    Nested { inner: f64, outer: f64 },
    /// Points join `Z(R)` with probability `p_r`; then a nested law
    /// `(s_r, q_r)` applies inside `Z(R)` and `(s_rc, q_rc)` outside.
    Conditional { p_r: f64, s_r: f64, q_r: f64, s_rc: f64, q_rc: f64 },
}

fn check_prob(name: &str, v: f64) -> Result<(), SimError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(SimError::InvalidLaw(format!("{name} = {v} is not a probability")))
    }
}

fn check_nested(a: &str, inner: f64, b: &str, outer: f64) -> Result<(), SimError> {
    check_prob(a, inner)?;
    check_prob(b, outer)?;
    if inner > outer {
        return Err(SimError::InvalidLaw(format!("{a} = {inner} exceeds {b} = {outer}")));
    }
    Ok(())
}

impl LawSpec {
    pub fn single(p: f64) -> Result<Self, SimError> {
        check_prob("p_s", p)?;
        Ok(LawSpec::Single { p })
    }

    pub fn nested(inner: f64, outer: f64) -> Result<Self, SimError> {
        check_nested("inner", inner, "outer", outer)?;
        Ok(LawSpec::Nested { inner, outer })
    }

    pub fn conditional(p_r: f64, s_r: f64, q_r: f64, s_rc: f64, q_rc: f64) -> Result<Self, SimError> {
        check_prob("p_r", p_r)?;
        check_nested("p_s|r", s_r, "p_q|r", q_r)?;
        check_nested("p_s|~r", s_rc, "p_q|~r", q_rc)?;
        Ok(LawSpec::Conditional { p_r, s_r, q_r, s_rc, q_rc })
    }

    pub fn validate(&self) -> Result<(), SimError> {
        match *self {
            LawSpec::Single { p } => LawSpec::single(p).map(|_| ()),
            LawSpec::Nested { inner, outer } => LawSpec::nested(inner, outer).map(|_| ()),
            LawSpec::Conditional { p_r, s_r, q_r, s_rc, q_rc } => {
                LawSpec::conditional(p_r, s_r, q_r, s_rc, q_rc).map(|_| ())
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LawSpec::Single { .. } => "single",
            LawSpec::Nested { .. } => "nested",
            LawSpec::Conditional { .. } => "conditional",
        }
    }

    /// `(p_s, p_r)` for the background scenarios. A conditional law with no
    /// sender points outside the background is accepted as well.
    fn background_pair(&self, scenario: Scenario) -> Result<(f64, f64), SimError> {
        match *self {
            LawSpec::Nested { inner, outer } => Ok((inner, outer)),
            LawSpec::Conditional { p_r, s_r, s_rc: 0.0, .. } => Ok((p_r * s_r, p_r)),
            _ => Err(SimError::LawMismatch { scenario, law: self.kind() }),
        }
    }

    /// The `(p_a, p_b)` pairs of the partition sources, inside and outside
    /// the background.
    fn partition_law(&self, scenario: Scenario) -> Result<[f64; 4], SimError> {
        match (*self, scenario) {
            (LawSpec::Nested { inner, outer }, Scenario::T4) => Ok([inner, 1.0 - outer, 0.0, 0.0]),
            (LawSpec::Conditional { s_r, q_r, s_rc, q_rc, .. }, Scenario::T5) => {
                Ok([s_r, 1.0 - q_r, s_rc, 1.0 - q_rc])
            }
            _ => Err(SimError::LawMismatch { scenario, law: self.kind() }),
        }
    }

    fn check_scenario(&self, scenario: Scenario) -> Result<(), SimError> {
        match scenario {
            Scenario::T1 => match self {
                LawSpec::Single { .. } => Ok(()),
                _ => Err(SimError::LawMismatch { scenario, law: self.kind() }),
            },
            Scenario::T2 | Scenario::T3 => self.background_pair(scenario).map(|_| ()),
            Scenario::T4 | Scenario::T5 => self.partition_law(scenario).map(|_| ()),
        }
    }
}

impl fmt::Display for LawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LawSpec::Single { p } => write!(f, "single({p})"),
            LawSpec::Nested { inner, outer } => write!(f, "nested({inner},{outer})"),
            LawSpec::Conditional { p_r, s_r, q_r, s_rc, q_rc } => {
                write!(f, "conditional({p_r},{s_r},{q_r},{s_rc},{q_rc})")
            }
        }
    }
}

/// One draw of a law: the sender's set, the outer set (query or background)
/// and, for conditional laws, the conditioning set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub inner: AlgSet,
    pub outer: Option<AlgSet>,
    pub condition: Option<AlgSet>,
}

impl Sample {
    /// The σ-reconstructed statement sets, in the order inner, outer,
    /// condition.
    pub fn polysets(&self) -> Vec<PolySet> {
        std::iter::once(&self.inner)
            .chain(self.outer.as_ref())
            .chain(self.condition.as_ref())
            .map(algset::sigma)
            .collect()
    }
}

/// Draws every point independently according to `law`.
pub fn sample(law: &LawSpec, m: usize, seed: u64) -> Result<Sample, SimError> {
    law.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inner = AlgSet::empty(m)?;
    let n = inner.universe_size();
    match *law {
        LawSpec::Single { p } => {
            for i in 0..n {
                if rng.gen::<f64>() < p {
                    inner.insert(i);
                }
            }
            Ok(Sample { inner, outer: None, condition: None })
        }
        LawSpec::Nested { inner: a, outer: b } => {
            let mut outer = AlgSet::empty(m)?;
            for i in 0..n {
                nested_point(&mut rng, a, b, i, &mut inner, &mut outer);
            }
            Ok(Sample { inner, outer: Some(outer), condition: None })
        }
        LawSpec::Conditional { p_r, s_r, q_r, s_rc, q_rc } => {
            let mut outer = AlgSet::empty(m)?;
            let mut condition = AlgSet::empty(m)?;
            for i in 0..n {
                if rng.gen::<f64>() < p_r {
                    condition.insert(i);
                    nested_point(&mut rng, s_r, q_r, i, &mut inner, &mut outer);
                } else {
                    nested_point(&mut rng, s_rc, q_rc, i, &mut inner, &mut outer);
                }
            }
            Ok(Sample {
                inner,
                outer: Some(outer),
                condition: Some(condition),
            })
        }
    }
}

fn nested_point(rng: &mut ChaCha8Rng, a: f64, b: f64, i: usize, inner: &mut AlgSet, outer: &mut AlgSet) {
    let u: f64 = rng.gen();
    if u < a {
        inner.insert(i);
        outer.insert(i);
    } else if u < b {
        outer.insert(i);
    }
}

/// Seed of trial `t`, independent of how trials are scheduled.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    splitmix64(seed ^ splitmix64(trial as u64))
}

/// Analytic limit and finite-length upper bound for one configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

/// Achievability bound of a partition codec over `n` symbols, scaled back to
/// total bits.
fn partition_bits(codec: CodecKind, n: f64, p_a: f64, p_b: f64) -> Result<f64, SimError> {
    if n < 1.0 {
        return Ok(0.0);
    }
    let k = n as usize;
    let per_symbol = match codec {
        CodecKind::Random => partition::shannon_partition_bounds(k, p_a, p_b)?.1,
        CodecKind::Linear => partition::linear_code_bound(k, p_a, p_b)?,
        CodecKind::Naive => partition::naive_code_bound(k, p_a, p_b)?,
    };
    Ok(per_symbol * n)
}

/// `H(p) + (log₂(pN) + 2·log₂ log₂(pN) + 4) / N`, the size-header plus
/// enumerative-rank cost, logarithms floored at zero.
fn enumerative_upper(n: f64, limit_bits_per_point: f64, expected_size: f64) -> f64 {
    let l = pos_log2(expected_size);
    limit_bits_per_point + (l + 2.0 * pos_log2(l) + 4.0) / n
}

/// The scenario's limit (lower bound) and the finite-`m` upper bound of the
/// implemented codec. `codec` selects the partition codec for T4/T5 and is
/// ignored otherwise.
pub fn bounds_table(scenario: Scenario, law: &LawSpec, m: usize, codec: Option<CodecKind>) -> Result<Bounds, SimError> {
    law.validate()?;
    law.check_scenario(scenario)?;
    let n = (1u64 << m) as f64;
    Ok(match scenario {
        Scenario::T1 => {
            let LawSpec::Single { p } = *law else { unreachable!() };
            let h = binary_entropy(p);
            Bounds {
                lower: h,
                upper: enumerative_upper(n, h, p * n),
            }
        }
        Scenario::T2 | Scenario::T3 => {
            let (p_s, p_r) = law.background_pair(scenario)?;
            let c = if p_r > 0.0 { p_s / p_r } else { 0.0 };
            let limit = p_r * binary_entropy(c);
            Bounds {
                lower: limit,
                upper: enumerative_upper(n, limit, p_s * n),
            }
        }
        Scenario::T4 | Scenario::T5 => {
            let codec = codec.unwrap_or(CodecKind::Random);
            let l = law.partition_law(scenario)?;
            let p_r = match *law {
                LawSpec::Conditional { p_r, .. } => p_r,
                _ => 1.0,
            };
            let lower = p_r * lambda(l[0], l[1])? + (1.0 - p_r) * lambda(l[2], l[3])?;
            let upper = (partition_bits(codec, p_r * n, l[0], l[1])?
                + partition_bits(codec, (1.0 - p_r) * n, l[2], l[3])?)
                / n;
            Bounds { lower, upper }
        }
    })
}

/// Outcome of a batch of simulated transmissions.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub scenario: Scenario,
    pub law: LawSpec,
    pub m: usize,
    pub codec: Option<CodecKind>,
    pub trials: usize,
    /// Mean payload bits per point.
    pub mean: f64,
    /// Sample standard deviation of the per-trial rate.
    pub std_dev: f64,
    pub lower: f64,
    pub upper: f64,
    pub below_lower: bool,
    pub above_upper: bool,
}

impl RateReport {
    pub fn std_error(&self) -> f64 {
        self.std_dev / (self.trials as f64).sqrt()
    }

    pub fn has_violation(&self) -> bool {
        self.below_lower || self.above_upper
    }
}

impl fmt::Display for RateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario={}", self.scenario)?;
        writeln!(f, "law={}", self.law)?;
        writeln!(f, "m={}", self.m)?;
        writeln!(f, "codec={}", self.codec.map_or("enumerative", |c| c.name()))?;
        writeln!(f, "trials={}", self.trials)?;
        writeln!(f, "mean={:.6}", self.mean)?;
        writeln!(f, "std_dev={:.6}", self.std_dev)?;
        writeln!(f, "std_error={:.6}", self.std_error())?;
        writeln!(f, "lower={:.6}", self.lower)?;
        writeln!(f, "upper={:.6}", self.upper)?;
        writeln!(f, "gap_to_lower={:.6}", self.mean - self.lower)?;
        writeln!(f, "below_lower={}", self.below_lower)?;
        write!(f, "above_upper={}", self.above_upper)
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn violation(trial: usize, detail: impl Into<String>) -> SimError {
    SimError::ContractViolation {
        trial,
        detail: detail.into(),
    }
}

/// Encodes, decodes and checks one sampled instance; returns payload bits.
fn run_trial(
    scenario: Scenario,
    law: &LawSpec,
    m: usize,
    codec: Option<CodecKind>,
    trial: usize,
    seed: u64,
) -> Result<usize, SimError> {
    let draw = sample(law, m, seed)?;
    let wire_m = m as u16;
    let zs = &draw.inner;
    let sigma = algset::sigma;
    match scenario {
        Scenario::T1 => {
            let tx = protocols::t1_encode_set(zs, wire_m)?;
            let z = algset::zeros(&protocols::t1_decode(&tx)?)?;
            if &z != zs {
                return Err(violation(trial, "decoded zeros differ from Z(s)"));
            }
            Ok(tx.payload_bits())
        }
        Scenario::T2 | Scenario::T3 => {
            let zr = draw.condition.as_ref().or(draw.outer.as_ref()).expect("nested sample");
            let r = sigma(zr);
            let tx = protocols::t2_encode_sets(scenario, zs, zr, wire_m)?;
            if scenario == Scenario::T2 {
                let z = algset::zeros(&protocols::t2_decode(&tx, &r)?)?;
                if &z != zs {
                    return Err(violation(trial, "decoded zeros differ from Z(s)"));
                }
            } else {
                let d = protocols::t3_decode(&tx, &r)?;
                if &algset::zeros(&d.union(&r))? != zs {
                    return Err(violation(trial, "Z(delta ∪ r) differs from Z(s)"));
                }
                for w in &d {
                    if algset::entails(&r, &PolySet::from_polys(m, [w.clone()]))? {
                        return Err(violation(trial, format!("delta member {w} already follows from r")));
                    }
                }
            }
            Ok(tx.payload_bits())
        }
        Scenario::T4 | Scenario::T5 => {
            let codec = codec.ok_or(SimError::MissingCodec { scenario })?;
            let zq = draw.outer.as_ref().expect("nested sample");
            let opts = PartitionOptions::new(codec, seed).with_law(law.partition_law(scenario)?);
            let (tx, s_hat) = if scenario == Scenario::T4 {
                let tx = protocols::t4_encode_sets(zs, zq, wire_m, opts)?;
                let s_hat = protocols::t4_decode(&tx)?;
                (tx, s_hat)
            } else {
                let zr = draw.condition.as_ref().expect("conditional sample");
                let tx = protocols::t5_encode_sets(zs, zq, zr, wire_m, opts)?;
                let s_hat = protocols::t5_decode(&tx, &sigma(zr))?;
                (tx, s_hat)
            };
            let z = algset::zeros(&s_hat)?;
            if !zs.is_subset(&z) || !z.is_subset(zq) {
                return Err(violation(trial, "decoded zeros are not sandwiched between Z(s) and Z(q)"));
            }
            Ok(tx.payload_bits())
        }
    }
}

/// Runs `trials` independent instances in parallel and summarizes their
/// rates. Results do not depend on the thread count.
pub fn run_trials(
    scenario: Scenario,
    law: &LawSpec,
    m: usize,
    trials: usize,
    codec: Option<CodecKind>,
    seed: u64,
) -> Result<RateReport, SimError> {
    if trials == 0 {
        return Err(SimError::Domain("at least one trial is required".into()));
    }
    if scenario.needs_query() && codec.is_none() {
        return Err(SimError::MissingCodec { scenario });
    }
    let bounds = bounds_table(scenario, law, m, codec)?;
    let n = (1u64 << m) as f64;
    let rates: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(scenario, law, m, codec, t, trial_seed(seed, t)).map(|bits| bits as f64 / n))
        .collect::<Result<_, _>>()?;
    let mean = compensated_sum(&rates) / trials as f64;
    let std_dev = if trials > 1 {
        let dev: Vec<f64> = rates.iter().map(|r| (r - mean) * (r - mean)).collect();
        (compensated_sum(&dev) / (trials - 1) as f64).sqrt()
    } else {
        0.0
    };
    let se = std_dev / (trials as f64).sqrt();
    Ok(RateReport {
        scenario,
        law: *law,
        m,
        codec: if scenario.needs_query() { codec } else { None },
        trials,
        mean,
        std_dev,
        lower: bounds.lower,
        upper: bounds.upper,
        below_lower: mean < bounds.lower - 3.0 * se,
        above_upper: mean > bounds.upper + 3.0 * se,
    })
}

pub const SWEEP_HEADER: &str = "p_a,p_b,h_p_a,h_p_b,linear_rate,lambda";

/// All pairs `(a, b)` with `a, b` on the grid `start, start+step, …, ≤ end`
/// and `a + b ≤ 1`.
pub fn simplex_grid(start: f64, step: f64, end: f64) -> Result<Vec<(f64, f64)>, SimError> {
    if step.is_nan() || step <= 0.0 || start < 0.0 || end > 1.0 || start > end {
        return Err(SimError::Domain(format!("bad grid {start}:{step}:{end}")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    let values: Vec<f64> = (0..count).map(|k| start + k as f64 * step).collect();
    Ok(values
        .iter()
        .flat_map(|&a| values.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| a + b <= 1.0 + 1e-9)
        .collect())
}

/// CSV comparing `Λ(p_a, p_b)` with the naive costs `H(p_a)`, `H(p_b)` and
/// the linear-code rate. With `n` the linear column includes the finite-`n`
/// overhead; otherwise it is the asymptotic `p_a + p_b`.
pub fn sweep_lambda_vs_naive(grid: &[(f64, f64)], n: Option<usize>) -> Result<String, SimError> {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for &(a, b) in grid {
        if a < 0.0 || b < 0.0 || a + b > 1.0 + 1e-9 {
            return Err(SimError::Domain(format!("({a}, {b}) is outside the simplex")));
        }
        let linear = match n {
            Some(n) => partition::linear_code_bound(n, a, b.min(1.0 - a))?,
            None => a + b,
        };
        out.push_str(&format!(
            "{a:.6},{b:.6},{:.6},{:.6},{linear:.6},{:.6}\n",
            binary_entropy(a),
            binary_entropy(b),
            lambda(a, b)?
        ));
    }
    Ok(out)
}
