//! Partition compression: describe a set `M` that contains `A` and excludes
//! `B` at zero distortion.
//!
//! The source is a ternary vector over `{0, 1, ⊗}`: `0` marks elements of `A`,
//! `1` marks elements of `B`, `⊗` marks free positions. Every decoder outputs
//! a binary vector `Y` with `Y_i = 0` meaning "inside `M`"; a codec is correct
//! when `Y` agrees with the source on every non-`⊗` position.
//!
//! Codecs provided:
//! * naive: send `A` (or `B`) as a size-prefixed enumerative subset code;
//! * random: scan a shared random matrix with biased entries for the first
//!   row matching the constrained positions and send its index;
//! * linear: find the shortest prefix `G_J` of a shared uniform matrix for
//!   which `[M · G_J]_Ψ = X_Ψ` is solvable and send `J` and `M`.

use thiserror::Error;

use crate::bitcodec::{self, elias_delta_len, elias_delta_read, elias_delta_write, BitReader, BitWriter, CodecError};
use crate::bits::BitVec;
use crate::gf2::IncrementalSolver;

/// Largest row index the random codec will scan before giving up.
pub const J_MAX: u64 = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no matching codeword among the first {limit} rows")]
    SearchExhausted { limit: u64 },
    #[error("matrix has duplicate columns")]
    DuplicateColumns,
    #[error("matrix columns do not share a common weight")]
    UnequalColumnWeights,
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// `Λ(a, b) = (a + b) · H(a / (a + b))` in bits, zero when either argument is.
pub fn lambda(a: f64, b: f64) -> Result<f64, PartitionError> {
    if !(a >= 0.0 && b >= 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(PartitionError::Domain(format!("lambda({a}, {b}) needs finite non-negative arguments")));
    }
    if a == 0.0 || b == 0.0 {
        return Ok(0.0);
    }
    Ok((a + b) * binary_entropy(a / (a + b)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ternary {
    Zero,
    One,
    Free,
}

impl Ternary {
    pub fn symbol(self) -> char {
        match self {
            Ternary::Zero => '0',
            Ternary::One => '1',
            Ternary::Free => '⊗',
        }
    }
}

/// Per-symbol distortion: 1 exactly when a hard constraint is violated.
pub fn rho(x: Ternary, y: bool) -> u8 {
    match (x, y) {
        (Ternary::Zero, true) | (Ternary::One, false) => 1,
        _ => 0,
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TernaryVector(Vec<Ternary>);

impl TernaryVector {
    pub fn new(entries: Vec<Ternary>) -> Self {
        TernaryVector(entries)
    }

    /// Parses `0`, `1` and `*` (or `⊗`) characters.
    pub fn parse(s: &str) -> Result<Self, PartitionError> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Ternary::Zero),
                '1' => Ok(Ternary::One),
                '*' | '⊗' | 'x' => Ok(Ternary::Free),
                _ => Err(PartitionError::Domain(format!("not a ternary symbol: {c:?}"))),
            })
            .collect::<Result<_, _>>()
            .map(TernaryVector)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Ternary {
        self.0[i]
    }

    pub fn entries(&self) -> &[Ternary] {
        &self.0
    }

    /// Positions carrying a hard constraint (`Ψ`).
    pub fn constrained(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] != Ternary::Free).collect()
    }

    pub fn positions_of(&self, symbol: Ternary) -> Vec<u64> {
        (0..self.0.len()).filter(|&i| self.0[i] == symbol).map(|i| i as u64).collect()
    }

    /// Entries at the given positions, in order.
    pub fn select(&self, positions: &[usize]) -> TernaryVector {
        TernaryVector(positions.iter().map(|&i| self.0[i]).collect())
    }
}

impl std::fmt::Debug for TernaryVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = self.0.iter().map(|t| t.symbol()).collect();
        write!(f, "TernaryVector({s})")
    }
}

/// Decoder output: bit `i` set means position `i` is outside `M`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PartitionVector(BitVec);

impl PartitionVector {
    pub fn from_bits(bits: BitVec) -> Self {
        PartitionVector(bits)
    }

    pub fn zeros(n: usize) -> Self {
        PartitionVector(BitVec::zeros(n))
    }

    pub fn ones(n: usize) -> Self {
        PartitionVector(BitVec::ones(n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0.get(i)
    }

    pub fn bits(&self) -> &BitVec {
        &self.0
    }

    /// Positions with `Y_i = 0`, i.e. the members of `M`.
    pub fn inside(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| !self.0.get(i)).collect()
    }
}

/// Total distortion `Σ ρ(x_i, y_i)`.
pub fn distortion(x: &TernaryVector, y: &PartitionVector) -> usize {
    assert_eq!(x.len(), y.len());
    (0..x.len()).map(|i| rho(x.get(i), y.get(i)) as usize).sum()
}

pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random matrices shared by encoder and decoder, addressable by
/// `(row, column)` without generating earlier entries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SharedRandomness {
    seed: u64,
    zero_threshold: u64,
}

impl SharedRandomness {
    /// `bias` is the probability that an entry of the biased matrix is 0.
    pub fn new(seed: u64, bias: f64) -> Self {
        let bias = bias.clamp(0.0, 1.0);
        SharedRandomness {
            seed,
            zero_threshold: (bias * (1u64 << 53) as f64) as u64,
        }
    }

    /// Bias `p_a / (p_a + p_b)`; 1/2 when both are zero.
    pub fn for_law(seed: u64, p_a: f64, p_b: f64) -> Self {
        let bias = if p_a + p_b > 0.0 { p_a / (p_a + p_b) } else { 0.5 };
        Self::new(seed, bias)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn word(&self, row: u64, block: u64) -> u64 {
        let h = splitmix64(self.seed);
        let h = splitmix64(h ^ row);
        splitmix64(h ^ block.wrapping_mul(0xD1B5_4A32_D192_ED03))
    }

    /// Sixty-four uniform bits: columns `64·block .. 64·block + 63` of `row`.
    pub fn fair_word(&self, row: u64, block: u64) -> u64 {
        self.word(row, block)
    }

    /// Entry `(row, col)` of the biased matrix; `false` (a 0) with
    /// probability `bias`. Uses the top 53 bits of the keyed hash.
    pub fn biased_bit(&self, row: u64, col: u64) -> bool {
        (self.word(row, col) >> 11) >= self.zero_threshold
    }

    fn fair_row(&self, row: u64, n: usize) -> BitVec {
        let mut bits = BitVec::zeros(n);
        for (b, w) in bits.words_mut().iter_mut().enumerate() {
            *w = self.fair_word(row, b as u64);
        }
        if !n.is_multiple_of(64) {
            let last = bits.words_mut().last_mut().unwrap();
            *last &= (1u64 << (n % 64)) - 1;
        }
        bits
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn symbol(self) -> Ternary {
        match self {
            Side::A => Ternary::Zero,
            Side::B => Ternary::One,
        }
    }
}

/// Sends `A` (or `B`) itself: `elias_δ(|side| + 1)` then the fixed-width
/// rank of the side set.
pub fn naive_encode(x: &TernaryVector, side: Side, w: &mut BitWriter) -> Result<(), PartitionError> {
    let set = x.positions_of(side.symbol());
    bitcodec::sized_subset_write(w, x.len() as u64, &set)?;
    Ok(())
}

pub fn naive_decode(r: &mut BitReader<'_>, n: usize, side: Side) -> Result<PartitionVector, PartitionError> {
    let set = bitcodec::sized_subset_read(r, n as u64)?;
    let mut y = match side {
        Side::A => BitVec::ones(n),
        Side::B => BitVec::zeros(n),
    };
    for i in set {
        y.flip(i as usize);
    }
    Ok(PartitionVector(y))
}

/// Exact length of [`naive_encode`] for a side set of size `k` out of `n`.
pub fn naive_len(n: usize, k: usize) -> usize {
    let count = bitcodec::binom(n as u64, k as u64).expect("k <= n");
    elias_delta_len(k as u64 + 1) + bitcodec::fixed_width(&count)
}

/// Cheaper of the two naive codes, preceded by one bit naming the side.
pub fn naive_best_encode(x: &TernaryVector, w: &mut BitWriter) -> Result<Side, PartitionError> {
    let n = x.len();
    let a = naive_len(n, x.positions_of(Ternary::Zero).len());
    let b = naive_len(n, x.positions_of(Ternary::One).len());
    let side = if b < a { Side::B } else { Side::A };
    w.write_bit(side == Side::B);
    naive_encode(x, side, w)?;
    Ok(side)
}

pub fn naive_best_decode(r: &mut BitReader<'_>, n: usize) -> Result<PartitionVector, PartitionError> {
    let side = if r.read_bit()? { Side::B } else { Side::A };
    naive_decode(r, n, side)
}

/// Random-coding achievability scheme: emits `elias_δ(J)` for the first row
/// `J ≥ 1` of the biased matrix that agrees with `x` on every constrained
/// position. Returns `J`.
pub fn random_encode(x: &TernaryVector, shared: &SharedRandomness, w: &mut BitWriter) -> Result<u64, PartitionError> {
    let constraints: Vec<(u64, bool)> = x
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, t)| **t != Ternary::Free)
        .map(|(i, &t)| (i as u64, t == Ternary::One))
        .collect();
    for row in 1..=J_MAX {
        if constraints.iter().all(|&(col, bit)| shared.biased_bit(row, col) == bit) {
            elias_delta_write(w, row)?;
            return Ok(row);
        }
    }
    Err(PartitionError::SearchExhausted { limit: J_MAX })
}

pub fn random_decode(r: &mut BitReader<'_>, n: usize, shared: &SharedRandomness) -> Result<PartitionVector, PartitionError> {
    let row = elias_delta_read(r)?;
    Ok(PartitionVector(BitVec::from_fn(n, |i| shared.biased_bit(row, i as u64))))
}

/// Linear-code scheme: finds the smallest `J` such that `[M · G_J]_Ψ = X_Ψ`
/// has a solution over GF(2), then emits `elias_δ(J)` and the `J` bits of
/// `M`. Returns `J`.
pub fn linear_encode(x: &TernaryVector, shared: &SharedRandomness, w: &mut BitWriter) -> Result<u64, PartitionError> {
    let psi = x.constrained();
    let target = BitVec::from_fn(psi.len(), |k| x.get(psi[k]) == Ternary::One);
    let mut solver = IncrementalSolver::new(target);
    let blocks = x.len().div_ceil(64);
    let limit = psi.len() as u64 + 4096;
    let mut words = vec![0u64; blocks];
    for row in 1..=limit {
        for (b, word) in words.iter_mut().enumerate() {
            *word = shared.fair_word(row, b as u64);
        }
        let restricted = BitVec::from_fn(psi.len(), |k| words[psi[k] / 64] >> (psi[k] % 64) & 1 == 1);
        if solver.push_row(restricted) {
            let m = solver.solution().expect("solvable");
            elias_delta_write(w, row)?;
            for bit in m {
                w.write_bit(bit);
            }
            return Ok(row);
        }
    }
    Err(PartitionError::SearchExhausted { limit })
}

pub fn linear_decode(r: &mut BitReader<'_>, n: usize, shared: &SharedRandomness) -> Result<PartitionVector, PartitionError> {
    let rows = elias_delta_read(r)?;
    if rows as usize > r.remaining() {
        return Err(CodecError::TruncatedStream {
            wanted: rows as usize,
            available: r.remaining(),
        }
        .into());
    }
    let mut y = BitVec::zeros(n);
    for row in 1..=rows {
        if r.read_bit()? {
            y.xor_assign(&shared.fair_row(row, n));
        }
    }
    Ok(PartitionVector(y))
}

/// Partition codec selector used by the protocol layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodecKind {
    Random,
    Linear,
    Naive,
}

impl CodecKind {
    pub fn name(self) -> &'static str {
        match self {
            CodecKind::Random => "random",
            CodecKind::Linear => "linear",
            CodecKind::Naive => "naive",
        }
    }
}

impl std::str::FromStr for CodecKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(CodecKind::Random),
            "linear" => Ok(CodecKind::Linear),
            "naive" => Ok(CodecKind::Naive),
            other => Err(format!("unknown codec '{other}' (expected random, linear or naive)")),
        }
    }
}

/// A codec together with its shared randomness.
#[derive(Clone, Copy, Debug)]
pub struct PartitionCoder {
    pub kind: CodecKind,
    pub shared: SharedRandomness,
}

impl PartitionCoder {
    pub fn new(kind: CodecKind, shared: SharedRandomness) -> Self {
        PartitionCoder { kind, shared }
    }

    pub fn encode(&self, x: &TernaryVector, w: &mut BitWriter) -> Result<(), PartitionError> {
        match self.kind {
            CodecKind::Random => random_encode(x, &self.shared, w).map(|_| ()),
            CodecKind::Linear => linear_encode(x, &self.shared, w).map(|_| ()),
            CodecKind::Naive => naive_best_encode(x, w).map(|_| ()),
        }
    }

    pub fn decode(&self, n: usize, r: &mut BitReader<'_>) -> Result<PartitionVector, PartitionError> {
        match self.kind {
            CodecKind::Random => random_decode(r, n, &self.shared),
            CodecKind::Linear => linear_decode(r, n, &self.shared),
            CodecKind::Naive => naive_best_decode(r, n),
        }
    }
}

/// A dense binary matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: Vec<Vec<bool>>,
    cols: usize,
}

impl BinaryMatrix {
    pub fn from_rows(rows: Vec<Vec<bool>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        BinaryMatrix { rows, cols }
    }

    /// Parses whitespace-separated rows of `0`/`1` characters.
    pub fn parse(text: &str) -> Self {
        let rows = text
            .split(['\n', '/'])
            .map(|line| line.chars().filter(|c| *c == '0' || *c == '1').map(|c| c == '1').collect::<Vec<_>>())
            .filter(|r| !r.is_empty())
            .collect();
        Self::from_rows(rows)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row][col]
    }

    pub fn column(&self, col: usize) -> Vec<bool> {
        self.rows.iter().map(|r| r[col]).collect()
    }

    /// The common column weight, if every column has the same one.
    pub fn column_weight(&self) -> Result<usize, PartitionError> {
        let weights: Vec<usize> = (0..self.cols).map(|c| self.column(c).iter().filter(|&&b| b).count()).collect();
        match weights.split_first() {
            None => Ok(0),
            Some((&w, rest)) if rest.iter().all(|&v| v == w) => Ok(w),
            _ => Err(PartitionError::UnequalColumnWeights),
        }
    }

    /// A row with a 0 in column `a` and a 1 in column `b`: the partition it
    /// describes puts `a` inside `M` and `b` outside.
    pub fn separating_row(&self, a: usize, b: usize) -> Option<usize> {
        (0..self.rows.len()).find(|&k| !self.rows[k][a] && self.rows[k][b])
    }
}

/// A `t × n` matrix whose columns are the first `n` weight-`w` patterns of
/// length `t` in colex order.
pub fn cw_matrix(t: usize, n: usize, w: usize) -> Result<BinaryMatrix, PartitionError> {
    if w > t {
        return Err(PartitionError::Domain(format!("weight {w} exceeds column length {t}")));
    }
    let available = bitcodec::binom(t as u64, w as u64)?;
    if available < n.into() {
        return Err(PartitionError::DuplicateColumns);
    }
    let mut rows = vec![vec![false; n]; t];
    for col in 0..n {
        for bit in bitcodec::subset_unrank(t as u64, w as u64, &col.into())? {
            let row: &mut Vec<bool> = &mut rows[bit as usize];
            row[col] = true;
        }
    }
    Ok(BinaryMatrix::from_rows(rows))
}

/// Whether every ordered pair of distinct columns is separated by some row,
/// i.e. shows both the `0 1` and the `1 0` pattern.
pub fn cw_check(matrix: &BinaryMatrix) -> bool {
    let n = matrix.num_cols();
    (0..n).all(|a| (0..n).all(|b| a == b || matrix.separating_row(a, b).is_some()))
}

/// `(Λ(p_a, p_b), Λ + 2·log₂(nΛ)/n + 3/n)`. The logarithm is floored at zero
/// when `nΛ < 1`.
pub fn shannon_partition_bounds(n: usize, p_a: f64, p_b: f64) -> Result<(f64, f64), PartitionError> {
    check_law(p_a, p_b)?;
    let l = lambda(p_a, p_b)?;
    let n = n as f64;
    Ok((l, l + 2.0 * pos_log2(n * l) / n + 3.0 / n))
}

/// Expected-rate bound of the linear codec:
/// `p_a + p_b + (log₂(n(p_a+p_b) + 2) + 2·log₂ log₂(n(p_a+p_b) + 2) + 5) / n`.
pub fn linear_code_bound(n: usize, p_a: f64, p_b: f64) -> Result<f64, PartitionError> {
    check_law(p_a, p_b)?;
    let n = n as f64;
    let x = n * (p_a + p_b) + 2.0;
    Ok(p_a + p_b + (x.log2() + 2.0 * x.log2().log2() + 5.0) / n)
}

/// Expected-rate bound of the best-side naive codec (flag bit included).
pub fn naive_code_bound(n: usize, p_a: f64, p_b: f64) -> Result<f64, PartitionError> {
    check_law(p_a, p_b)?;
    let nf = n as f64;
    let side = |p: f64| {
        let x = nf * p + 1.0;
        binary_entropy(p) + (pos_log2(x) + 2.0 * pos_log2(pos_log2(x)) + 5.0) / nf
    };
    Ok(side(p_a).min(side(p_b)))
}

fn check_law(p_a: f64, p_b: f64) -> Result<(), PartitionError> {
    if !(0.0..=1.0).contains(&p_a) || !(0.0..=1.0).contains(&p_b) || p_a + p_b > 1.0 + 1e-12 {
        return Err(PartitionError::Domain(format!(
            "({p_a}, {p_b}) is not a sub-probability pair"
        )));
    }
    Ok(())
}

pub(crate) fn pos_log2(x: f64) -> f64 {
    if x > 1.0 {
        x.log2()
    } else {
        0.0
    }
}
