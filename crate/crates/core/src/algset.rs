//! Algebraic sets over `{0,1}^m`: common zeros of a polynomial set, semantic
//! entailment, and reconstruction of a polynomial from a prescribed zero set.
//!
//! Point `i` is the assignment with `x_j = (i >> (j - 1)) & 1`, so `x1` is
//! the least significant bit of the index. Points are enumerated in
//! ascending index order everywhere, including on the wire.

use thiserror::Error;

use crate::bits::BitVec;
use crate::poly::{Monomial, Poly, PolySet};

/// Largest universe handled by exhaustive evaluation (16M points).
pub const M_MAX: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgSetError {
    #[error("universe of {m} variables exceeds the exhaustive limit of {max}")]
    UniverseTooLarge { m: usize, max: usize },
}

/// An index into `{0,1}^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub u32);

impl Point {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Value of `x_var` (1-based) at this point.
    pub fn value(self, var: usize) -> bool {
        self.0 >> (var - 1) & 1 == 1
    }
}

/// A subset of `{0,1}^m` stored as a `2^m`-bit membership vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgSet {
    m: usize,
    members: BitVec,
}

impl AlgSet {
    pub fn empty(m: usize) -> Result<Self, AlgSetError> {
        check_universe(m)?;
        Ok(AlgSet {
            m,
            members: BitVec::zeros(1 << m),
        })
    }

    pub fn full(m: usize) -> Result<Self, AlgSetError> {
        check_universe(m)?;
        Ok(AlgSet {
            m,
            members: BitVec::ones(1 << m),
        })
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(m: usize, points: I) -> Result<Self, AlgSetError> {
        let mut set = AlgSet::empty(m)?;
        for p in points {
            set.insert(p);
        }
        Ok(set)
    }

    /// Wraps a membership vector of length `2^m`.
    pub fn from_members(m: usize, members: BitVec) -> Result<Self, AlgSetError> {
        check_universe(m)?;
        assert_eq!(members.len(), 1 << m, "membership vector length must be 2^m");
        Ok(AlgSet { m, members })
    }

    pub fn num_vars(&self) -> usize {
        self.m
    }

    /// `2^m`.
    pub fn universe_size(&self) -> usize {
        1 << self.m
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_zero()
    }

    pub fn contains(&self, point: usize) -> bool {
        self.members.get(point)
    }

    pub fn insert(&mut self, point: usize) {
        self.members.set(point, true);
    }

    pub fn remove(&mut self, point: usize) {
        self.members.set(point, false);
    }

    pub fn members(&self) -> &BitVec {
        &self.members
    }

    /// Member indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter_ones()
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.iter().map(|i| Point(i as u32))
    }

    pub fn is_subset(&self, other: &AlgSet) -> bool {
        assert_eq!(self.m, other.m);
        self.members.is_subset(&other.members)
    }

    pub fn complement(&self) -> AlgSet {
        AlgSet {
            m: self.m,
            members: self.members.not(),
        }
    }

    pub fn intersection(&self, other: &AlgSet) -> AlgSet {
        assert_eq!(self.m, other.m);
        let mut members = self.members.clone();
        members.and_assign(&other.members);
        AlgSet { m: self.m, members }
    }

    pub fn union(&self, other: &AlgSet) -> AlgSet {
        assert_eq!(self.m, other.m);
        let mut members = self.members.clone();
        members.or_assign(&other.members);
        AlgSet { m: self.m, members }
    }
}

impl std::fmt::Debug for AlgSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AlgSet(m={}, ", self.m)?;
        f.debug_set().entries(self.iter()).finish()?;
        f.write_str(")")
    }
}

fn check_universe(m: usize) -> Result<(), AlgSetError> {
    if m > M_MAX {
        Err(AlgSetError::UniverseTooLarge { m, max: M_MAX })
    } else {
        Ok(())
    }
}

/// In-place GF(2) zeta/Möbius transform over the subset lattice of `m`
/// variables: afterwards bit `x` holds the XOR of the input bits at every
/// `t ⊆ x`. The transform is an involution, so the same routine maps
/// algebraic normal form to truth table and back.
pub(crate) fn subset_transform(bits: &mut BitVec, m: usize) {
    const MASKS: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0F0F_0F0F_0F0F_0F0F,
        0x00FF_00FF_00FF_00FF,
        0x0000_FFFF_0000_FFFF,
        0x0000_0000_FFFF_FFFF,
    ];
    let words = bits.words_mut();
    for (i, &mask) in MASKS.iter().enumerate().take(m.min(6)) {
        let shift = 1 << i;
        for w in words.iter_mut() {
            *w ^= (*w & mask) << shift;
        }
    }
    for i in 6..m {
        let step = 1 << (i - 6);
        let mut block = 0;
        while block < words.len() {
            for j in block..block + step {
                words[j + step] ^= words[j];
            }
            block += 2 * step;
        }
    }
}

/// Truth table of `p` over `{0,1}^m` (bit `i` is `p` at point `i`).
pub fn truth_table(p: &Poly, m: usize) -> Result<BitVec, AlgSetError> {
    check_universe(m)?;
    assert!(p.max_var() <= m, "polynomial uses variables above x{m}");
    let mut bits = BitVec::zeros(1 << m);
    for t in p.terms() {
        bits.set(t.mask() as usize, true);
    }
    subset_transform(&mut bits, m);
    Ok(bits)
}

/// The common zeros of every member of `s`.
pub fn zeros(s: &PolySet) -> Result<AlgSet, AlgSetError> {
    let mut set = AlgSet::full(s.num_vars())?;
    for p in s {
        let tt = truth_table(p, s.num_vars())?;
        set.members.and_assign(&tt.not());
    }
    Ok(set)
}

/// `s ⊨ t`: every common zero of `s` is a common zero of `t`. Both sets are
/// read over the larger of their two universes.
pub fn entails(s: &PolySet, t: &PolySet) -> Result<bool, AlgSetError> {
    let m = s.num_vars().max(t.num_vars());
    let zs = zeros(&s.with_num_vars(m))?;
    let zt = zeros(&t.with_num_vars(m))?;
    Ok(zs.is_subset(&zt))
}

/// A single polynomial whose zero set is exactly `a`:
/// `1 + Σ_{c ∈ a} Π_i (x_i + c_i + 1)`, i.e. the algebraic normal form of the
/// indicator of the complement of `a`.
pub fn sigma_poly(a: &AlgSet) -> Poly {
    let mut anf = a.members.not();
    subset_transform(&mut anf, a.m);
    Poly::from_sorted_unchecked({
        let mut terms: Vec<Monomial> = anf.iter_ones().map(|t| Monomial::from_mask(t as u64)).collect();
        terms.sort_unstable();
        terms
    })
}

/// `{sigma_poly(a)}` over the universe of `a`.
pub fn sigma(a: &AlgSet) -> PolySet {
    PolySet::from_polys(a.m, [sigma_poly(a)])
}
