//! End-to-end encoders and decoders for the five communication scenarios.
//!
//! | tag | sender knows | receiver knows | payload |
//! |-----|--------------|----------------|---------|
//! | T1  | `s`          | nothing        | `Z(s)` as a subset of all points |
//! | T2  | `s ⊨ r`      | `r`            | `Z(s)` as a subset of `Z(r)` |
//! | T3  | `s ⊨ r`      | `r`            | as T2; the receiver keeps only what `r` lacks |
//! | T4  | `s ⊨ q`      | nothing        | a partition sandwiched between `Z(s)` and `Z(q)` |
//! | T5  | `s ⊨ q`      | `r`            | as T4, coded separately inside and outside `Z(r)` |
//!
//! Every transmission starts with a 24-byte header:
//!
//! ```text
//! "LGC1" | tag u8 | codec u8 | m u16 | seed u64 | law[4] u16   (big-endian)
//! ```
//!
//! Law parameters are fixed-point fractions `v / 65536`. The payload follows
//! MSB-first and is zero-padded to a byte boundary, so transmissions can be
//! concatenated.

use thiserror::Error;

use crate::algset::{self, AlgSet, AlgSetError};
use crate::bitcodec::{self, BitReader, BitWriter, Bitstream, CodecError};
use crate::groebner::{self, GroebnerError};
use crate::partition::{CodecKind, PartitionCoder, PartitionError, PartitionVector, SharedRandomness, Ternary, TernaryVector};
use crate::poly::PolySet;

pub const MAGIC: [u8; 4] = *b"LGC1";
pub const HEADER_LEN: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("precondition violated: {0}")]
    NotEntailed(&'static str),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("scenario {0} needs the receiver's background knowledge")]
    MissingBackground(Scenario),
    #[error("background uses x{var} but the transmission has only {m} variables")]
    BackgroundTooWide { var: usize, m: usize },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    AlgSet(#[from] AlgSetError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    T1,
    T2,
    T3,
    T4,
    T5,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [Scenario::T1, Scenario::T2, Scenario::T3, Scenario::T4, Scenario::T5];

    pub fn tag(self) -> u8 {
        match self {
            Scenario::T1 => 1,
            Scenario::T2 => 2,
            Scenario::T3 => 3,
            Scenario::T4 => 4,
            Scenario::T5 => 5,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Scenario::ALL.into_iter().find(|s| s.tag() == tag)
    }

    pub fn needs_background(self) -> bool {
        matches!(self, Scenario::T2 | Scenario::T3 | Scenario::T5)
    }

    pub fn needs_query(self) -> bool {
        matches!(self, Scenario::T4 | Scenario::T5)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "T{}", self.tag())
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.strip_prefix('t').unwrap_or(&t);
        t.parse::<u8>()
            .ok()
            .and_then(Scenario::from_tag)
            .ok_or_else(|| format!("unknown scenario '{s}' (expected t1..t5)"))
    }
}

/// Codec byte of the header.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodecId {
    Enumerative,
    Partition(CodecKind),
}

impl CodecId {
    pub fn byte(self) -> u8 {
        match self {
            CodecId::Enumerative => 0,
            CodecId::Partition(CodecKind::Random) => 1,
            CodecId::Partition(CodecKind::Linear) => 2,
            CodecId::Partition(CodecKind::Naive) => 3,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            0 => CodecId::Enumerative,
            1 => CodecId::Partition(CodecKind::Random),
            2 => CodecId::Partition(CodecKind::Linear),
            3 => CodecId::Partition(CodecKind::Naive),
            _ => return None,
        })
    }
}

/// `round(v · 65536)`, saturating at 65535 and kept nonzero for `v > 0`.
pub fn quantize(v: f64) -> u16 {
    let q = (v.clamp(0.0, 1.0) * 65536.0).round();
    if v > 0.0 {
        q.clamp(1.0, 65535.0) as u16
    } else {
        0
    }
}

pub fn dequantize(q: u16) -> f64 {
    q as f64 / 65536.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Header {
    pub scenario: Scenario,
    pub codec: CodecId,
    pub m: u16,
    pub seed: u64,
    pub law: [u16; 4],
}

impl Header {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&MAGIC);
        out[4] = self.scenario.tag();
        out[5] = self.codec.byte();
        out[6..8].copy_from_slice(&self.m.to_be_bytes());
        out[8..16].copy_from_slice(&self.seed.to_be_bytes());
        for (k, q) in self.law.iter().enumerate() {
            out[16 + 2 * k..18 + 2 * k].copy_from_slice(&q.to_be_bytes());
        }
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Header, ProtocolError> {
        if bytes.len() < HEADER_LEN {
            return Err(ProtocolError::MalformedHeader(format!(
                "{} bytes, expected at least {HEADER_LEN}",
                bytes.len()
            )));
        }
        if bytes[..4] != MAGIC {
            return Err(ProtocolError::MalformedHeader("bad magic".into()));
        }
        let scenario = Scenario::from_tag(bytes[4])
            .ok_or_else(|| ProtocolError::MalformedHeader(format!("unknown scenario tag {}", bytes[4])))?;
        let codec = CodecId::from_byte(bytes[5])
            .ok_or_else(|| ProtocolError::MalformedHeader(format!("unknown codec id {}", bytes[5])))?;
        let m = u16::from_be_bytes([bytes[6], bytes[7]]);
        if m as usize > algset::M_MAX {
            return Err(ProtocolError::MalformedHeader(format!("{m} variables exceed {}", algset::M_MAX)));
        }
        let seed = u64::from_be_bytes(bytes[8..16].try_into().unwrap());
        let mut law = [0u16; 4];
        for (k, q) in law.iter_mut().enumerate() {
            *q = u16::from_be_bytes([bytes[16 + 2 * k], bytes[17 + 2 * k]]);
        }
        Ok(Header { scenario, codec, m, seed, law })
    }

    fn partition_coder(&self, side: usize) -> Result<PartitionCoder, ProtocolError> {
        let CodecId::Partition(kind) = self.codec else {
            return Err(ProtocolError::MalformedHeader(format!("{} needs a partition codec", self.scenario)));
        };
        let seed = if side == 0 { self.seed } else { complement_seed(self.seed) };
        let shared = SharedRandomness::for_law(
            seed,
            dequantize(self.law[2 * side]),
            dequantize(self.law[2 * side + 1]),
        );
        Ok(PartitionCoder::new(kind, shared))
    }
}

fn complement_seed(seed: u64) -> u64 {
    seed ^ 0x6C62_272E_07BB_0142
}

/// A header and its payload bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transmission {
    pub header: Header,
    pub payload: Bitstream,
}

impl Transmission {
    pub fn payload_bits(&self) -> usize {
        self.payload.len()
    }

    /// Header bytes followed by the byte-padded payload.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header.to_bytes().to_vec();
        out.extend_from_slice(self.payload.as_bytes());
        out
    }

    /// Parses one transmission whose payload runs to the end of `bytes`.
    pub fn from_bytes(bytes: &[u8]) -> Result<Transmission, ProtocolError> {
        let header = Header::parse(bytes)?;
        Ok(Transmission {
            header,
            payload: Bitstream::from_bytes(bytes[HEADER_LEN..].to_vec()),
        })
    }
}

/// Optional settings for the partition-coded scenarios.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartitionOptions {
    pub codec: CodecKind,
    pub seed: u64,
    /// `(p_a, p_b)` per side; the empirical fractions of the instance when
    /// absent. T4 uses the first pair only.
    pub law: Option<[f64; 4]>,
}

impl PartitionOptions {
    pub fn new(codec: CodecKind, seed: u64) -> Self {
        PartitionOptions { codec, seed, law: None }
    }

    pub fn with_law(mut self, law: [f64; 4]) -> Self {
        self.law = Some(law);
        self
    }
}

fn common_universe(sets: &[&PolySet]) -> usize {
    sets.iter().map(|s| s.num_vars()).max().unwrap_or(0)
}

fn check_m(m: usize) -> Result<u16, ProtocolError> {
    if m > algset::M_MAX {
        return Err(AlgSetError::UniverseTooLarge { m, max: algset::M_MAX }.into());
    }
    Ok(m as u16)
}

fn background(r: &PolySet, m: usize) -> Result<PolySet, ProtocolError> {
    if r.num_vars() > m {
        if let Some(var) = r.iter().map(|p| p.max_var()).max().filter(|&v| v > m) {
            return Err(ProtocolError::BackgroundTooWide { var, m });
        }
    }
    Ok(r.with_num_vars(m))
}

/// The ternary source of `(s, q)`: `0` on `Z(s)`, `1` outside `Z(q)`, `⊗`
/// elsewhere.
pub fn psi(s: &PolySet, q: &PolySet) -> Result<TernaryVector, ProtocolError> {
    let m = common_universe(&[s, q]);
    let zs = algset::zeros(&s.with_num_vars(m))?;
    let zq = algset::zeros(&q.with_num_vars(m))?;
    psi_from_sets(&zs, &zq)
}

pub fn psi_from_sets(zs: &AlgSet, zq: &AlgSet) -> Result<TernaryVector, ProtocolError> {
    if !zs.is_subset(zq) {
        return Err(ProtocolError::NotEntailed("s must entail q"));
    }
    Ok(TernaryVector::new(
        (0..zs.universe_size())
            .map(|i| {
                if zs.contains(i) {
                    Ternary::Zero
                } else if zq.contains(i) {
                    Ternary::Free
                } else {
                    Ternary::One
                }
            })
            .collect(),
    ))
}

fn points(set: &AlgSet) -> Vec<u64> {
    set.iter().map(|i| i as u64).collect()
}

fn header(scenario: Scenario, codec: CodecId, m: u16, seed: u64, law: [u16; 4]) -> Header {
    Header { scenario, codec, m, seed, law }
}

// --- T1 -------------------------------------------------------------------

pub fn t1_encode(s: &PolySet) -> Result<Transmission, ProtocolError> {
    let m = check_m(s.num_vars())?;
    let zs = algset::zeros(s)?;
    t1_encode_set(&zs, m)
}

pub(crate) fn t1_encode_set(zs: &AlgSet, m: u16) -> Result<Transmission, ProtocolError> {
    let mut w = BitWriter::new();
    bitcodec::sized_subset_write(&mut w, zs.universe_size() as u64, &points(zs))?;
    Ok(Transmission {
        header: header(Scenario::T1, CodecId::Enumerative, m, 0, [0; 4]),
        payload: w.finish(),
    })
}

fn t1_payload(r: &mut BitReader<'_>, m: usize) -> Result<AlgSet, ProtocolError> {
    let pts = bitcodec::sized_subset_read(r, 1u64 << m)?;
    Ok(AlgSet::from_points(m, pts.into_iter().map(|p| p as usize))?)
}

pub fn t1_decode(tx: &Transmission) -> Result<PolySet, ProtocolError> {
    expect(tx, &[Scenario::T1])?;
    let zs = t1_payload(&mut tx.payload.reader(), tx.header.m as usize)?;
    Ok(algset::sigma(&zs))
}

// --- T2 / T3 --------------------------------------------------------------

pub fn t2_encode(s: &PolySet, r: &PolySet) -> Result<Transmission, ProtocolError> {
    encode_relative(Scenario::T2, s, r)
}

/// Same payload as [`t2_encode`]; only the tag differs, asking the receiver
/// to keep just the part not already implied by its background.
pub fn t3_encode(s: &PolySet, r: &PolySet) -> Result<Transmission, ProtocolError> {
    encode_relative(Scenario::T3, s, r)
}

fn encode_relative(scenario: Scenario, s: &PolySet, r: &PolySet) -> Result<Transmission, ProtocolError> {
    let m = common_universe(&[s, r]);
    let wire_m = check_m(m)?;
    let zs = algset::zeros(&s.with_num_vars(m))?;
    let zr = algset::zeros(&r.with_num_vars(m))?;
    t2_encode_sets(scenario, &zs, &zr, wire_m)
}

pub(crate) fn t2_encode_sets(scenario: Scenario, zs: &AlgSet, zr: &AlgSet, m: u16) -> Result<Transmission, ProtocolError> {
    if !zs.is_subset(zr) {
        return Err(ProtocolError::NotEntailed("s must entail r"));
    }
    // positions of Z(s) within the ascending enumeration of Z(r)
    let idx: Vec<u64> = zr
        .iter()
        .enumerate()
        .filter(|&(_, p)| zs.contains(p))
        .map(|(k, _)| k as u64)
        .collect();
    let mut w = BitWriter::new();
    bitcodec::sized_subset_write(&mut w, zr.len() as u64, &idx)?;
    Ok(Transmission {
        header: header(scenario, CodecId::Enumerative, m, 0, [0; 4]),
        payload: w.finish(),
    })
}

fn t2_payload(r: &mut BitReader<'_>, zr: &AlgSet) -> Result<AlgSet, ProtocolError> {
    let members: Vec<usize> = zr.iter().collect();
    let idx = bitcodec::sized_subset_read(r, members.len() as u64)?;
    Ok(AlgSet::from_points(zr.num_vars(), idx.into_iter().map(|k| members[k as usize]))?)
}

pub fn t2_decode(tx: &Transmission, r: &PolySet) -> Result<PolySet, ProtocolError> {
    expect(tx, &[Scenario::T2, Scenario::T3])?;
    let m = tx.header.m as usize;
    let zr = algset::zeros(&background(r, m)?)?;
    Ok(algset::sigma(&t2_payload(&mut tx.payload.reader(), &zr)?))
}

/// Decodes a T2/T3 payload and returns `Δ`: the part of the sender's
/// knowledge that `r` does not already imply.
pub fn t3_decode(tx: &Transmission, r: &PolySet) -> Result<PolySet, ProtocolError> {
    let s_hat = t2_decode(tx, r)?;
    Ok(groebner::delta(&s_hat, &background(r, tx.header.m as usize)?)?)
}

// --- T4 / T5 --------------------------------------------------------------

fn empirical_law(x: &TernaryVector) -> (f64, f64) {
    if x.is_empty() {
        return (0.0, 0.0);
    }
    let n = x.len() as f64;
    (
        x.positions_of(Ternary::Zero).len() as f64 / n,
        x.positions_of(Ternary::One).len() as f64 / n,
    )
}

pub fn t4_encode(s: &PolySet, q: &PolySet, opts: PartitionOptions) -> Result<Transmission, ProtocolError> {
    let m = common_universe(&[s, q]);
    let wire_m = check_m(m)?;
    let zs = algset::zeros(&s.with_num_vars(m))?;
    let zq = algset::zeros(&q.with_num_vars(m))?;
    t4_encode_sets(&zs, &zq, wire_m, opts)
}

pub(crate) fn t4_encode_sets(zs: &AlgSet, zq: &AlgSet, m: u16, opts: PartitionOptions) -> Result<Transmission, ProtocolError> {
    let x = psi_from_sets(zs, zq)?;
    let (pa, pb) = match opts.law {
        Some(l) => (l[0], l[1]),
        None => empirical_law(&x),
    };
    let h = header(Scenario::T4, CodecId::Partition(opts.codec), m, opts.seed, [quantize(pa), quantize(pb), 0, 0]);
    let mut w = BitWriter::new();
    h.partition_coder(0)?.encode(&x, &mut w)?;
    Ok(Transmission {
        header: h,
        payload: w.finish(),
    })
}

fn t4_payload(r: &mut BitReader<'_>, h: &Header) -> Result<AlgSet, ProtocolError> {
    let m = h.m as usize;
    let y = h.partition_coder(0)?.decode(1 << m, r)?;
    Ok(inside(m, &y, None))
}

fn inside(m: usize, y: &PartitionVector, positions: Option<&[usize]>) -> AlgSet {
    let mut set = AlgSet::empty(m).expect("m checked by the header");
    for i in y.inside() {
        set.insert(positions.map_or(i, |p| p[i]));
    }
    set
}

pub fn t4_decode(tx: &Transmission) -> Result<PolySet, ProtocolError> {
    expect(tx, &[Scenario::T4])?;
    Ok(algset::sigma(&t4_payload(&mut tx.payload.reader(), &tx.header)?))
}

pub fn t5_encode(s: &PolySet, q: &PolySet, r: &PolySet, opts: PartitionOptions) -> Result<Transmission, ProtocolError> {
    let m = common_universe(&[s, q, r]);
    let wire_m = check_m(m)?;
    let zs = algset::zeros(&s.with_num_vars(m))?;
    let zq = algset::zeros(&q.with_num_vars(m))?;
    let zr = algset::zeros(&r.with_num_vars(m))?;
    t5_encode_sets(&zs, &zq, &zr, wire_m, opts)
}

fn split(zr: &AlgSet) -> [Vec<usize>; 2] {
    let inner: Vec<usize> = zr.iter().collect();
    let outer: Vec<usize> = zr.complement().iter().collect();
    [inner, outer]
}

pub(crate) fn t5_encode_sets(
    zs: &AlgSet,
    zq: &AlgSet,
    zr: &AlgSet,
    m: u16,
    opts: PartitionOptions,
) -> Result<Transmission, ProtocolError> {
    let x = psi_from_sets(zs, zq)?;
    let sides = split(zr);
    let parts = [x.select(&sides[0]), x.select(&sides[1])];
    let law = match opts.law {
        Some(l) => l,
        None => {
            let (a, b) = empirical_law(&parts[0]);
            let (c, d) = empirical_law(&parts[1]);
            [a, b, c, d]
        }
    };
    let h = header(Scenario::T5, CodecId::Partition(opts.codec), m, opts.seed, law.map(quantize));
    let mut w = BitWriter::new();
    for (side, part) in parts.iter().enumerate() {
        if !part.is_empty() {
            h.partition_coder(side)?.encode(part, &mut w)?;
        }
    }
    Ok(Transmission {
        header: h,
        payload: w.finish(),
    })
}

fn t5_payload(r: &mut BitReader<'_>, h: &Header, zr: &AlgSet) -> Result<AlgSet, ProtocolError> {
    let m = h.m as usize;
    let mut set = AlgSet::empty(m)?;
    for (side, positions) in split(zr).iter().enumerate() {
        if positions.is_empty() {
            continue;
        }
        let y = h.partition_coder(side)?.decode(positions.len(), r)?;
        set = set.union(&inside(m, &y, Some(positions)));
    }
    Ok(set)
}

pub fn t5_decode(tx: &Transmission, r: &PolySet) -> Result<PolySet, ProtocolError> {
    expect(tx, &[Scenario::T5])?;
    let m = tx.header.m as usize;
    let zr = algset::zeros(&background(r, m)?)?;
    Ok(algset::sigma(&t5_payload(&mut tx.payload.reader(), &tx.header, &zr)?))
}

fn expect(tx: &Transmission, allowed: &[Scenario]) -> Result<(), ProtocolError> {
    if allowed.contains(&tx.header.scenario) {
        Ok(())
    } else {
        Err(ProtocolError::MalformedHeader(format!(
            "expected a {} transmission, found {}",
            allowed.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("/"),
            tx.header.scenario
        )))
    }
}

/// Result of decoding one transmission.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub header: Header,
    /// `ŝ`, or `Δ` for T3.
    pub knowledge: PolySet,
    pub payload_bits: usize,
}

/// Decodes any scenario; `background` is required for T2, T3 and T5.
pub fn decode(tx: &Transmission, background_set: Option<&PolySet>) -> Result<PolySet, ProtocolError> {
    let bytes = tx.to_bytes();
    let mut all = decode_all(&bytes, background_set)?;
    Ok(all.remove(0).knowledge)
}

/// Decodes every transmission in a concatenation, stopping at the end of
/// input. Each payload is read up to its own end and then skipped to the
/// next byte boundary.
pub fn decode_all(bytes: &[u8], background_set: Option<&PolySet>) -> Result<Vec<Decoded>, ProtocolError> {
    let mut out = Vec::new();
    let mut offset = 0;
    while offset < bytes.len() {
        let h = Header::parse(&bytes[offset..])?;
        let body = &bytes[offset + HEADER_LEN..];
        let mut r = BitReader::new(body);
        let m = h.m as usize;
        let zr = match (h.scenario.needs_background(), background_set) {
            (false, _) => None,
            (true, None) => return Err(ProtocolError::MissingBackground(h.scenario)),
            (true, Some(b)) => Some(algset::zeros(&background(b, m)?)?),
        };
        let z = match h.scenario {
            Scenario::T1 => t1_payload(&mut r, m)?,
            Scenario::T2 | Scenario::T3 => t2_payload(&mut r, zr.as_ref().unwrap())?,
            Scenario::T4 => t4_payload(&mut r, &h)?,
            Scenario::T5 => t5_payload(&mut r, &h, zr.as_ref().unwrap())?,
        };
        let payload_bits = r.position();
        let s_hat = algset::sigma(&z);
        let knowledge = if h.scenario == Scenario::T3 {
            groebner::delta(&s_hat, &background(background_set.unwrap(), m)?)?
        } else {
            s_hat
        };
        out.push(Decoded {
            header: h,
            knowledge,
            payload_bits,
        });
        offset += HEADER_LEN + payload_bits.div_ceil(8);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algset::{entails, zeros};
    use crate::logic::parse_statements;

    fn set(text: &str, m: usize) -> PolySet {
        parse_statements(text, Some(m)).unwrap()
    }

    fn mixed_facts() -> PolySet {
        set("x1*x2*x3 = 0\n(1+x1)*(1+x2)*(1+x3) = 0", 3)
    }

    #[test]
    fn header_round_trip() {
        let h = Header {
            scenario: Scenario::T5,
            codec: CodecId::Partition(CodecKind::Linear),
            m: 12,
            seed: 0x0123_4567_89AB_CDEF,
            law: [1, 2, 65535, 0],
        };
        let bytes = h.to_bytes();
        assert_eq!(&bytes[..4], b"LGC1");
        assert_eq!(bytes[4], 5);
        assert_eq!(bytes[5], 2);
        assert_eq!(&bytes[6..8], &[0, 12]);
        assert_eq!(&bytes[8..16], &[0x01, 0x23, 0x45, 0x67, 0x89, 0xAB, 0xCD, 0xEF]);
        assert_eq!(Header::parse(&bytes).unwrap(), h);
        let mut bad = bytes;
        bad[0] = b'X';
        assert!(matches!(Header::parse(&bad), Err(ProtocolError::MalformedHeader(_))));
        assert!(matches!(Header::parse(&bytes[..10]), Err(ProtocolError::MalformedHeader(_))));
    }

    #[test]
    fn quantization() {
        assert_eq!(quantize(0.25), 16384);
        assert_eq!(quantize(1.0), 65535);
        assert_eq!(quantize(1e-9), 1);
        assert_eq!(quantize(0.0), 0);
        assert_eq!(dequantize(16384), 0.25);
    }

    #[test]
    fn psi_examples() {
        let x = psi(&set("x1 = 0\nx2 = 0", 2), &set("x1*x2 = 0", 2)).unwrap();
        assert_eq!(
            x.entries(),
            &[Ternary::Zero, Ternary::Free, Ternary::Free, Ternary::One]
        );
        let s = mixed_facts();
        assert!(psi(&s, &s).unwrap().constrained().len() == 8);
        let x = psi(&set("1 = 0", 2), &PolySet::new(2)).unwrap();
        assert!(x.constrained().is_empty());
        assert!(matches!(
            psi(&set("x1*x2 = 0", 2), &set("x1 = 0", 2)),
            Err(ProtocolError::NotEntailed(_))
        ));
    }

    #[test]
    fn t1_mixed_facts() {
        let s = mixed_facts();
        let tx = t1_encode(&s).unwrap();
        // elias(7) is 5 bits, then a rank among C(8, 6) = 28 in 5 bits
        assert_eq!(tx.payload_bits(), 10);
        let s_hat = t1_decode(&tx).unwrap();
        assert_ne!(s_hat, s);
        assert_eq!(zeros(&s_hat).unwrap(), zeros(&s).unwrap());
        let round = Transmission::from_bytes(&tx.to_bytes()).unwrap();
        assert_eq!(t1_decode(&round).unwrap(), s_hat);
    }

    #[test]
    fn t1_extremes() {
        let tx = t1_encode(&set("1 = 0", 4)).unwrap();
        assert_eq!(tx.payload.to_bit_string(), "1");
        assert!(t1_decode(&tx).unwrap().iter().next().unwrap().is_one());
        let tx = t1_encode(&PolySet::new(4)).unwrap();
        assert_eq!(tx.payload_bits(), bitcodec::elias_delta_len(17));
        assert_eq!(t1_decode(&tx).unwrap().normalize_set(), PolySet::new(4));
    }

    #[test]
    fn t2_and_t3() {
        let r = set("x1*x2 = 0", 3);
        let s = set("x1*x2 = 0\nx1 = 0", 3);
        let tx2 = t2_encode(&s, &r).unwrap();
        assert_eq!(zeros(&t2_decode(&tx2, &r).unwrap()).unwrap(), zeros(&s).unwrap());
        let tx3 = t3_encode(&s, &r).unwrap();
        assert_eq!(tx3.payload, tx2.payload);
        let d = t3_decode(&tx3, &r).unwrap();
        assert_eq!(zeros(&d.union(&r)).unwrap(), zeros(&s).unwrap());
        assert!(t3_decode(&t3_encode(&r, &r).unwrap(), &r).unwrap().is_empty());
        assert!(matches!(t2_encode(&r, &s), Err(ProtocolError::NotEntailed(_))));

        // with no background constraints T2 sends exactly the T1 payload
        let empty = PolySet::new(3);
        assert_eq!(t2_encode(&s, &empty).unwrap().payload, t1_encode(&s).unwrap().payload);
        // Z(s) = Z(r): only the size header
        assert_eq!(t2_encode(&r, &r).unwrap().payload_bits(), bitcodec::elias_delta_len(7));
    }

    #[test]
    fn t4_and_t5_sandwich() {
        let s = set("x1 = 0\nx2 = 0", 3);
        let q = set("x1*x2 = 0", 3);
        let r = set("x3 = 0", 3);
        for codec in [CodecKind::Linear, CodecKind::Naive, CodecKind::Random] {
            let opts = PartitionOptions::new(codec, 5);
            let tx = t4_encode(&s, &q, opts).unwrap();
            let s_hat = t4_decode(&tx).unwrap();
            assert!(entails(&s, &s_hat).unwrap() && entails(&s_hat, &q).unwrap(), "{codec:?}");
            let tx = t5_encode(&s, &q, &r, opts).unwrap();
            let s_hat = t5_decode(&tx, &r).unwrap();
            assert!(entails(&s, &s_hat).unwrap() && entails(&s_hat, &q).unwrap(), "{codec:?}");
        }
        // no slack: decoded exactly
        let tx = t4_encode(&s, &s, PartitionOptions::new(CodecKind::Linear, 1)).unwrap();
        assert_eq!(zeros(&t4_decode(&tx).unwrap()).unwrap(), zeros(&s).unwrap());
    }

    #[test]
    fn t5_with_full_background_matches_t4() {
        let s = set("x1 = 0\nx2 = 0", 3);
        let q = set("x1*x2 = 0", 3);
        let opts = PartitionOptions::new(CodecKind::Linear, 77).with_law([0.25, 0.25, 0.1, 0.1]);
        let t4 = t4_encode(&s, &q, opts).unwrap();
        let t5 = t5_encode(&s, &q, &PolySet::new(3), opts).unwrap();
        assert_eq!(t4.payload, t5.payload);
    }

    #[test]
    fn concatenated_transmissions_decode_in_order() {
        let s = mixed_facts();
        let r = PolySet::new(3);
        let a = t1_encode(&s).unwrap();
        let b = t4_encode(&s, &PolySet::new(3), PartitionOptions::new(CodecKind::Linear, 3)).unwrap();
        let c = t3_encode(&s, &r).unwrap();
        let mut bytes = a.to_bytes();
        bytes.extend(b.to_bytes());
        bytes.extend(c.to_bytes());
        let out = decode_all(&bytes, Some(&r)).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].knowledge, t1_decode(&a).unwrap());
        assert_eq!(out[0].payload_bits, a.payload_bits());
        assert_eq!(out[1].knowledge, t4_decode(&b).unwrap());
        assert_eq!(zeros(&out[2].knowledge).unwrap(), zeros(&s).unwrap());
        assert!(matches!(decode_all(&c.to_bytes(), None), Err(ProtocolError::MissingBackground(Scenario::T3))));
    }

    #[test]
    fn encoding_is_deterministic() {
        let s = set("x1 = 0", 4);
        let q = set("x1*x2 = 0", 4);
        let opts = PartitionOptions::new(CodecKind::Random, 99);
        assert_eq!(t4_encode(&s, &q, opts).unwrap().to_bytes(), t4_encode(&s, &q, opts).unwrap().to_bytes());
    }
}
