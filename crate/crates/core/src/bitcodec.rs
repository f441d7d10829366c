//! Bit-exact coding primitives: an MSB-first bitstream, the Elias δ integer
//! code, exact binomials, and colexicographic ranking of k-subsets.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("bitstream ended after {available} bits while reading {wanted} more")]
    TruncatedStream { wanted: usize, available: usize },
    #[error("malformed codeword: {0}")]
    MalformedCodeword(&'static str),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("rank is outside the enumeration")]
    RankOutOfRange,
    #[error("value needs more than {width} bits")]
    WidthOverflow { width: usize },
}

/// A finite bit sequence packed MSB-first into bytes, zero-padded at the end.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bitstream {
    bytes: Vec<u8>,
    len: usize,
}

impl Bitstream {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every bit of `bytes`.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let len = bytes.len() * 8;
        Bitstream { bytes, len }
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn from_bit_str(s: &str) -> Self {
        let mut w = BitWriter::new();
        for c in s.chars() {
            match c {
                '0' => w.write_bit(false),
                '1' => w.write_bit(true),
                _ => panic!("not a bit: {c:?}"),
            }
        }
        w.finish()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes; the final byte is zero-padded.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.bytes[i / 8] >> (7 - i % 8) & 1 == 1
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader::with_len(&self.bytes, self.len)
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }
}

impl std::fmt::Debug for Bitstream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Bitstream({})", self.to_bit_string())
    }
}

#[derive(Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn write_bit(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Writes the low `width` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, width: usize) {
        assert!(width <= 64);
        for i in (0..width).rev() {
            self.write_bit(value >> i & 1 == 1);
        }
    }

    pub fn write_bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_bits(b as u64, 8);
        }
    }

    pub fn extend(&mut self, bits: &Bitstream) {
        for i in 0..bits.len() {
            self.write_bit(bits.get(i));
        }
    }

    /// Zero-pads up to the next byte boundary.
    pub fn align(&mut self) {
        self.len = self.bytes.len() * 8;
    }

    pub fn finish(self) -> Bitstream {
        Bitstream {
            bytes: self.bytes,
            len: self.len,
        }
    }
}

#[derive(Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    len: usize,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self::with_len(bytes, bytes.len() * 8)
    }

    pub fn with_len(bytes: &'a [u8], len: usize) -> Self {
        assert!(len <= bytes.len() * 8);
        BitReader { bytes, len, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.len - self.pos
    }

    fn need(&self, wanted: usize) -> Result<(), CodecError> {
        if wanted > self.remaining() {
            Err(CodecError::TruncatedStream {
                wanted,
                available: self.remaining(),
            })
        } else {
            Ok(())
        }
    }

    pub fn read_bit(&mut self) -> Result<bool, CodecError> {
        self.need(1)?;
        let bit = self.bytes[self.pos / 8] >> (7 - self.pos % 8) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: usize) -> Result<u64, CodecError> {
        assert!(width <= 64);
        self.need(width)?;
        let mut v = 0u64;
        for _ in 0..width {
            v = v << 1 | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn read_bytes(&mut self, n: usize) -> Result<Vec<u8>, CodecError> {
        self.need(n * 8)?;
        (0..n).map(|_| self.read_bits(8).map(|b| b as u8)).collect()
    }

    /// Skips to the next byte boundary (no-op when already aligned).
    pub fn align(&mut self) {
        self.pos = (self.pos.div_ceil(8) * 8).min(self.len);
    }
}

/// Length in bits of the Elias δ codeword for `n ≥ 1`:
/// `⌊log₂ n⌋ + 2⌊log₂(1 + ⌊log₂ n⌋)⌋ + 1`.
pub fn elias_delta_len(n: u64) -> usize {
    assert!(n >= 1);
    let l = n.ilog2() as u64;
    (l + 2 * (1 + l).ilog2() as u64 + 1) as usize
}

pub fn elias_delta_write(w: &mut BitWriter, n: u64) -> Result<(), CodecError> {
    if n == 0 {
        return Err(CodecError::Domain("Elias delta codes start at 1".into()));
    }
    let bits = n.ilog2() as usize + 1;
    let len_bits = bits.ilog2() as usize;
    // gamma code of the bit length, then n without its leading 1
    w.write_bits(0, len_bits);
    w.write_bits(bits as u64, len_bits + 1);
    w.write_bits(n, bits - 1);
    Ok(())
}

pub fn elias_delta_encode(n: u64) -> Result<Bitstream, CodecError> {
    let mut w = BitWriter::new();
    elias_delta_write(&mut w, n)?;
    Ok(w.finish())
}

pub fn elias_delta_read(r: &mut BitReader<'_>) -> Result<u64, CodecError> {
    let mut zeros = 0;
    while !r.read_bit()? {
        zeros += 1;
        if zeros > 6 {
            return Err(CodecError::MalformedCodeword("length prefix exceeds 64-bit range"));
        }
    }
    let bits = (1u64 << zeros) | r.read_bits(zeros)?;
    if bits > 64 {
        return Err(CodecError::MalformedCodeword("value exceeds 64 bits"));
    }
    let rest = r.read_bits(bits as usize - 1)?;
    Ok(if bits == 64 { (1 << 63) | rest } else { (1 << (bits - 1)) | rest })
}

/// Decodes one codeword from the start of `b`, returning the value and the
/// number of bits consumed.
pub fn elias_delta_decode(b: &Bitstream) -> Result<(u64, usize), CodecError> {
    let mut r = b.reader();
    let n = elias_delta_read(&mut r)?;
    Ok((n, r.position()))
}

/// Exact binomial coefficient.
pub fn binom(n: u64, k: u64) -> Result<BigUint, CodecError> {
    if k > n {
        return Err(CodecError::Domain(format!("binom({n}, {k}) needs k <= n")));
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    Ok(acc)
}

/// Number of bits of the fixed-length rank field: `⌈log₂ count⌉`, zero when
/// the enumeration has a single element.
pub fn fixed_width(count: &BigUint) -> usize {
    assert!(!count.is_zero());
    (count - 1u32).bits() as usize
}

pub fn fixed_width_write(w: &mut BitWriter, value: &BigUint, width: usize) -> Result<(), CodecError> {
    if value.bits() as usize > width {
        return Err(CodecError::WidthOverflow { width });
    }
    for i in (0..width as u64).rev() {
        w.write_bit(value.bit(i));
    }
    Ok(())
}

pub fn fixed_width_read(r: &mut BitReader<'_>, width: usize) -> Result<BigUint, CodecError> {
    if width > r.remaining() {
        return Err(CodecError::TruncatedStream {
            wanted: width,
            available: r.remaining(),
        });
    }
    let pad = (8 - width % 8) % 8;
    let mut bytes = vec![0u8; (width + pad) / 8];
    for i in 0..width {
        if r.read_bit()? {
            let j = i + pad;
            bytes[j / 8] |= 0x80 >> (j % 8);
        }
    }
    Ok(BigUint::from_bytes_be(&bytes))
}

/// Running value of `C(p, j)` that can be walked one step at a time with a
/// single small multiply and divide per step.
struct BinomWalker {
    p: u64,
    j: u64,
    value: BigUint,
}

impl BinomWalker {
    fn new(p: u64, j: u64) -> Self {
        let value = if p < j { BigUint::zero() } else { binom(p, j).unwrap() };
        BinomWalker { p, j, value }
    }

    /// `C(p, j) -> C(p + 1, j)`.
    fn inc_p(&mut self) {
        self.p += 1;
        if self.p == self.j {
            self.value = BigUint::one();
        } else if self.p > self.j {
            self.value *= self.p;
            self.value /= self.p - self.j;
        }
    }

    /// `C(p, j) -> C(p + 1, j + 1)`.
    fn inc_both(&mut self) {
        self.p += 1;
        self.j += 1;
        if self.p >= self.j {
            self.value *= self.p;
            self.value /= self.j;
        }
    }

    /// `C(p, j) -> C(p - 1, j)`.
    fn dec_p(&mut self) {
        if self.p >= self.j && !self.value.is_zero() {
            self.value *= self.p - self.j;
            self.value /= self.p;
        }
        self.p -= 1;
    }

    /// `C(p, j) -> C(p - 1, j - 1)`.
    fn dec_both(&mut self) {
        if self.p >= self.j && !self.value.is_zero() {
            self.value *= self.j;
            self.value /= self.p;
        }
        self.p -= 1;
        self.j -= 1;
    }
}

/// Colexicographic rank of a k-subset of `[0, n)`: for the sorted elements
/// `c_0 < c_1 < ... < c_{k-1}` the rank is `Σ C(c_i, i + 1)`.
pub fn subset_rank(n: u64, subset: &[u64]) -> Result<BigUint, CodecError> {
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CodecError::Domain("subset must be strictly ascending".into()));
    }
    if subset.last().is_some_and(|&c| c >= n) {
        return Err(CodecError::Domain(format!("subset element outside [0, {n})")));
    }
    let mut rank = BigUint::zero();
    let Some(&first) = subset.first() else {
        return Ok(rank);
    };
    let mut walker = BinomWalker::new(first, 1);
    rank += &walker.value;
    for (i, pair) in subset.windows(2).enumerate() {
        walker.inc_both();
        for _ in pair[0] + 1..pair[1] {
            walker.inc_p();
        }
        debug_assert_eq!((walker.p, walker.j), (pair[1], i as u64 + 2));
        rank += &walker.value;
    }
    Ok(rank)
}

/// Inverse of [`subset_rank`].
pub fn subset_unrank(n: u64, k: u64, rank: &BigUint) -> Result<Vec<u64>, CodecError> {
    if k > n {
        return Err(CodecError::Domain(format!("cannot choose {k} of {n}")));
    }
    if *rank >= binom(n, k)? {
        return Err(CodecError::RankOutOfRange);
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut rest = rank.clone();
    let mut out = vec![0u64; k as usize];
    let mut walker = BinomWalker::new(n - 1, k);
    for i in (0..k as usize).rev() {
        while walker.value > rest {
            walker.dec_p();
        }
        out[i] = walker.p;
        rest -= &walker.value;
        if i > 0 {
            walker.dec_both();
        }
    }
    Ok(out)
}

/// Writes a k-subset of `[0, n)` as its fixed-width colex rank.
pub fn subset_write(w: &mut BitWriter, n: u64, subset: &[u64]) -> Result<(), CodecError> {
    let count = binom(n, subset.len() as u64)?;
    let rank = subset_rank(n, subset)?;
    fixed_width_write(w, &rank, fixed_width(&count))
}

pub fn subset_read(r: &mut BitReader<'_>, n: u64, k: u64) -> Result<Vec<u64>, CodecError> {
    let count = binom(n, k)?;
    let rank = fixed_width_read(r, fixed_width(&count))?;
    if rank >= count {
        return Err(CodecError::RankOutOfRange);
    }
    subset_unrank(n, k, &rank)
}

/// Size-prefixed subset code: `elias_δ(k + 1)` followed by the fixed-width
/// rank among `C(n, k)`. Self-delimiting given `n`.
pub fn sized_subset_write(w: &mut BitWriter, n: u64, subset: &[u64]) -> Result<(), CodecError> {
    elias_delta_write(w, subset.len() as u64 + 1)?;
    subset_write(w, n, subset)
}

pub fn sized_subset_read(r: &mut BitReader<'_>, n: u64) -> Result<Vec<u64>, CodecError> {
    let k = elias_delta_read(r)? - 1;
    if k > n {
        return Err(CodecError::MalformedCodeword("subset larger than its universe"));
    }
    subset_read(r, n, k)
}
