//! Multilinear polynomials over GF(2).
//!
//! Every variable satisfies `x^2 = x`, so a monomial is just the set of
//! variables it mentions and is stored as a bit mask (bit `i - 1` is `x_i`).
//! A polynomial is a set of monomials with XOR-sum semantics. All arithmetic
//! happens in the quotient ring `GF(2)[x_1..x_m] / (x_i^2 + x_i)`, which makes
//! the field polynomials implicit.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// Largest supported variable index.
pub const MAX_VARS: usize = 64;

/// A product of distinct variables; the empty product is the constant `1`.
///
/// Ordering is graded reverse lexicographic with `x1 < x2 < ... < xm`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_mask(mask: u64) -> Self {
        Monomial(mask)
    }

    /// The monomial `x_index` (1-based).
    pub fn var(index: usize) -> Self {
        assert!((1..=MAX_VARS).contains(&index), "variable index out of range");
        Monomial(1 << (index - 1))
    }

    pub fn from_vars<I: IntoIterator<Item = usize>>(vars: I) -> Self {
        vars.into_iter().fold(Monomial::ONE, |acc, v| acc * Monomial::var(v))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    /// 1-based indices of the variables in this monomial, ascending.
    pub fn vars(self) -> impl Iterator<Item = usize> {
        let mut mask = self.0;
        std::iter::from_fn(move || {
            if mask == 0 {
                return None;
            }
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i + 1)
        })
    }

    /// Highest variable index used, 0 for the constant.
    pub fn max_var(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn divides(self, other: Monomial) -> bool {
        self.0 & !other.0 == 0
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient(self, other: Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        Monomial(other.0 & !self.0)
    }

    pub fn lcm(self, other: Monomial) -> Monomial {
        Monomial(self.0 | other.0)
    }

    pub fn is_coprime(self, other: Monomial) -> bool {
        self.0 & other.0 == 0
    }

    /// Value at a point encoded as an index (bit `i - 1` is `x_i`).
    pub fn eval(self, point: u64) -> bool {
        self.0 & !point == 0
    }

    fn order_key(self) -> (u32, u64) {
        // Equal degree: the monomial holding the lowest differing variable is
        // the smaller one, which is exactly the reversed-bit integer order
        // turned upside down.
        (self.degree(), !self.0.reverse_bits())
    }
}

impl std::ops::Mul for Monomial {
    type Output = Monomial;
    // x_i² = x_i, so the product is the union of the variable sets
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Monomial) -> Monomial {
        Monomial(self.0 | rhs.0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (k, v) in self.vars().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "x{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A multilinear polynomial over GF(2).
///
/// Terms are kept strictly ascending in monomial order, so the leading
/// monomial is the last one.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: Vec<Monomial>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::from(Monomial::ONE)
    }

    pub fn var(index: usize) -> Self {
        Poly::from(Monomial::var(index))
    }

    /// Builds a polynomial from monomials, cancelling repeated ones in pairs.
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(monomials: I) -> Self {
        let mut terms: Vec<Monomial> = monomials.into_iter().collect();
        normalize_terms(&mut terms);
        Poly { terms }
    }

    /// Builds a polynomial from terms already strictly ascending.
    pub(crate) fn from_sorted_unchecked(terms: Vec<Monomial>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0] < w[1]));
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].is_one()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<Monomial> {
        self.terms.last().copied()
    }

    pub fn contains(&self, m: Monomial) -> bool {
        self.terms.binary_search(&m).is_ok()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.degree()).max()
    }

    pub fn max_var(&self) -> usize {
        self.terms.iter().map(|t| t.max_var()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        Poly {
            terms: symmetric_merge(&self.terms, &other.terms),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &a in &self.terms {
            for &b in &other.terms {
                terms.push(a * b);
            }
        }
        normalize_terms(&mut terms);
        Poly { terms }
    }

    pub fn mul_monomial(&self, m: Monomial) -> Poly {
        if m.is_one() {
            return self.clone();
        }
        let mut terms: Vec<Monomial> = self.terms.iter().map(|&t| t * m).collect();
        normalize_terms(&mut terms);
        Poly { terms }
    }

    /// Evaluates at a point encoded as an index (bit `i - 1` is `x_i`).
    pub fn eval(&self, point: u64) -> bool {
        self.terms.iter().filter(|t| t.eval(point)).count() % 2 == 1
    }

    /// Evaluates at an explicit assignment `(x_1, ..., x_m)`.
    pub fn eval_assignment(&self, assignment: &[bool]) -> bool {
        let point = assignment
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
        self.eval(point)
    }

    /// Terms in the canonical text order: higher degree first, then by
    /// variable indices ascending.
    pub fn display_terms(&self) -> Vec<Monomial> {
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| b.degree().cmp(&a.degree()).then(a.cmp(b)));
        terms
    }
}

impl From<Monomial> for Poly {
    fn from(m: Monomial) -> Self {
        Poly { terms: vec![m] }
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::add(self, rhs)
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, t) in self.display_terms().into_iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// Canonical text rendering of a polynomial.
pub fn poly_to_text(p: &Poly) -> String {
    p.to_string()
}

/// Sorts ascending and drops monomials that occur an even number of times.
fn normalize_terms(terms: &mut Vec<Monomial>) {
    terms.sort_unstable();
    let mut out = 0;
    let mut i = 0;
    while i < terms.len() {
        let mut j = i + 1;
        while j < terms.len() && terms[j] == terms[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            terms[out] = terms[i];
            out += 1;
        }
        i = j;
    }
    terms.truncate(out);
}

fn symmetric_merge(a: &[Monomial], b: &[Monomial]) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A set of polynomials over `x_1..x_m`, read as the equations `p = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PolySet {
    m: usize,
    polys: BTreeSet<Poly>,
}

impl PolySet {
    pub fn new(m: usize) -> Self {
        assert!(m <= MAX_VARS, "too many variables");
        PolySet {
            m,
            polys: BTreeSet::new(),
        }
    }

    /// Panics if a polynomial mentions a variable above `m`.
    pub fn from_polys<I: IntoIterator<Item = Poly>>(m: usize, polys: I) -> Self {
        let mut set = PolySet::new(m);
        for p in polys {
            set.insert(p);
        }
        set
    }

    pub fn insert(&mut self, p: Poly) -> bool {
        assert!(p.max_var() <= self.m, "polynomial uses a variable above x{}", self.m);
        self.polys.insert(p)
    }

    pub fn num_vars(&self) -> usize {
        self.m
    }

    /// The same set over a larger universe.
    pub fn with_num_vars(&self, m: usize) -> PolySet {
        assert!(m >= self.m && m <= MAX_VARS);
        PolySet {
            m,
            polys: self.polys.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Poly> {
        self.polys.iter()
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.polys.contains(p)
    }

    /// Union of two sets over the larger of the two universes.
    pub fn union(&self, other: &PolySet) -> PolySet {
        let mut out = PolySet::new(self.m.max(other.m));
        out.polys = self.polys.union(&other.polys).cloned().collect();
        out
    }

    /// Drops the zero polynomial, which constrains nothing.
    pub fn normalize_set(&self) -> PolySet {
        PolySet {
            m: self.m,
            polys: self.polys.iter().filter(|p| !p.is_zero()).cloned().collect(),
        }
    }

    /// Statement-file rendering: one `p = 0` line per member.
    pub fn to_text(&self) -> String {
        self.polys.iter().map(|p| format!("{p} = 0\n")).collect()
    }
}

impl fmt::Debug for PolySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolySet(m={}, ", self.m)?;
        f.debug_set().entries(self.polys.iter().map(|p| p.to_string())).finish()?;
        f.write_str(")")
    }
}

impl<'a> IntoIterator for &'a PolySet {
    type Item = &'a Poly;
    type IntoIter = std::collections::btree_set::Iter<'a, Poly>;
    fn into_iter(self) -> Self::IntoIter {
        self.polys.iter()
    }
}
