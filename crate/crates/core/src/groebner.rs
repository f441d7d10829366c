//! Boolean Gröbner bases in `GF(2)[x_1..x_m] / (x_i² + x_i)`.
//!
//! Completion is Buchberger's algorithm run in the multilinear quotient ring.
//! Besides the usual S-pairs, every element `g` is paired with the field
//! polynomials `x_i² + x_i` for each `x_i` in its leading monomial, which in
//! the quotient amounts to reducing `x_i · g`. Pairs are taken by the normal
//! strategy (smallest lcm first, degree then order), the product and chain
//! criteria discard redundant pairs, and the result is minimized and
//! inter-reduced, so the basis of an ideal is unique.
//!
//! Internally polynomials are dense bit vectors indexed by the rank of each
//! monomial in the degrevlex order, which makes the leading term the highest
//! set bit and turns reduction into a downward sweep.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use thiserror::Error;

use crate::algset::{self, AlgSetError};
use crate::bits::BitVec;
use crate::poly::{Monomial, Poly, PolySet};

/// Largest variable count handled by the dense completion engine.
pub const GB_MAX_VARS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroebnerError {
    #[error("{m} variables exceed the Gröbner engine limit of {max}")]
    UniverseTooLarge { m: usize, max: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    AlgSet(#[from] AlgSetError),
}

/// Degrevlex ranks of all `2^m` multilinear monomials.
#[derive(Debug)]
struct OrderTable {
    rank_of: Vec<u32>,
    mask_of: Vec<u64>,
}

impl OrderTable {
    fn new(m: usize) -> Self {
        let mut mask_of: Vec<u64> = (0..1u64 << m).collect();
        mask_of.sort_unstable_by_key(|&mask| Monomial::from_mask(mask));
        let mut rank_of = vec![0u32; mask_of.len()];
        for (r, &mask) in mask_of.iter().enumerate() {
            rank_of[mask as usize] = r as u32;
        }
        OrderTable { rank_of, mask_of }
    }

    fn size(&self) -> usize {
        self.mask_of.len()
    }

    fn rank(&self, mask: u64) -> usize {
        self.rank_of[mask as usize] as usize
    }
}

#[derive(Clone, Debug)]
struct Element {
    lm: u64,
    terms: Vec<u64>,
}

/// Reducer state: the current generators plus a table mapping every monomial
/// to a generator whose leading monomial divides it.
#[derive(Debug)]
struct Reducer {
    m: usize,
    order: OrderTable,
    elems: Vec<Element>,
    divisor: Vec<u32>,
}

impl Reducer {
    fn new(m: usize) -> Self {
        let order = OrderTable::new(m);
        let divisor = vec![0; order.size()];
        Reducer {
            m,
            order,
            elems: Vec::new(),
            divisor,
        }
    }

    fn full_mask(&self) -> u64 {
        if self.m == 64 {
            u64::MAX
        } else {
            (1u64 << self.m) - 1
        }
    }

    fn dense(&self, p: &Poly) -> BitVec {
        let mut v = BitVec::zeros(self.order.size());
        for t in p.terms() {
            v.flip(self.order.rank(t.mask()));
        }
        v
    }

    fn sparse(&self, v: &BitVec) -> Element {
        let terms: Vec<u64> = v.iter_ones().map(|r| self.order.mask_of[r]).collect();
        Element {
            lm: *terms.last().expect("nonzero polynomial"),
            terms,
        }
    }

    fn to_poly(&self, v: &BitVec) -> Poly {
        Poly::from_sorted_unchecked(v.iter_ones().map(|r| Monomial::from_mask(self.order.mask_of[r])).collect())
    }

    fn add_multiple(&self, v: &mut BitVec, t: u64, g: &Element) {
        for &u in &g.terms {
            v.flip(self.order.rank(u | t));
        }
    }

    /// Full reduction in place: afterwards no term of `v` is divisible by a
    /// leading monomial of the generators.
    fn reduce(&self, v: &mut BitVec) {
        let mut cursor = self.order.size();
        while cursor > 0 {
            let Some(r) = v.prev_one(cursor - 1) else { break };
            let mask = self.order.mask_of[r];
            match self.divisor[mask as usize] {
                0 => cursor = r,
                d => {
                    let g = &self.elems[d as usize - 1];
                    // t is coprime to LM(g), so LM(t·g) = t·LM(g) = mask and
                    // every other term of t·g lands strictly below rank r.
                    self.add_multiple(v, mask & !g.lm, g);
                }
            }
        }
    }

    fn push(&mut self, e: Element) -> usize {
        let idx = self.elems.len();
        let comp = self.full_mask() & !e.lm;
        let mut sub = 0u64;
        loop {
            let slot = &mut self.divisor[(e.lm | sub) as usize];
            if *slot == 0 {
                *slot = idx as u32 + 1;
            }
            sub = sub.wrapping_sub(comp) & comp;
            if sub == 0 {
                break;
            }
        }
        self.elems.push(e);
        idx
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum PairKind {
    /// `x_var · g_i`, the pair of `g_i` with the field polynomial of `x_var`.
    Field { i: usize, var: u32 },
    Regular { i: usize, j: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Pair {
    degree: u32,
    rank: usize,
    kind: PairKind,
}

/// A reduced Boolean Gröbner basis.
#[derive(Debug)]
pub struct GroebnerBasis {
    polys: Vec<Poly>,
    reducer: Reducer,
}

impl GroebnerBasis {
    pub fn num_vars(&self) -> usize {
        self.reducer.m
    }

    /// Basis elements in ascending order of leading monomial.
    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// The unit ideal: every statement follows.
    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_one()
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.polys.iter().map(|p| p.leading().expect("basis elements are nonzero"))
    }

    pub fn normal_form(&self, p: &Poly) -> Poly {
        assert!(p.max_var() <= self.reducer.m, "polynomial uses variables above x{}", self.reducer.m);
        let mut v = self.reducer.dense(p);
        self.reducer.reduce(&mut v);
        self.reducer.to_poly(&v)
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.normal_form(p).is_zero()
    }
}

fn check_vars(m: usize) -> Result<(), GroebnerError> {
    if m > GB_MAX_VARS {
        Err(GroebnerError::UniverseTooLarge { m, max: GB_MAX_VARS })
    } else {
        Ok(())
    }
}

/// The reduced Gröbner basis of the ideal generated by `v` together with the
/// field polynomials of its `m` variables.
pub fn groebner_basis(v: &PolySet) -> Result<GroebnerBasis, GroebnerError> {
    let m = v.num_vars();
    check_vars(m)?;
    let mut red = Reducer::new(m);
    let mut heap: BinaryHeap<Reverse<Pair>> = BinaryHeap::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();

    for p in v {
        let mut d = red.dense(p);
        red.reduce(&mut d);
        if !d.is_zero() {
            let e = red.sparse(&d);
            add_generator(&mut red, e, &mut heap, &mut pending);
        }
    }

    while let Some(Reverse(pair)) = heap.pop() {
        let mut s = BitVec::zeros(red.order.size());
        match pair.kind {
            PairKind::Field { i, var } => {
                let g = &red.elems[i];
                red.add_multiple(&mut s, 1 << var, g);
            }
            PairKind::Regular { i, j } => {
                pending.remove(&(i, j));
                let (gi, gj) = (&red.elems[i], &red.elems[j]);
                let lcm = gi.lm | gj.lm;
                if chain_criterion(&red, i, j, lcm, &pending) {
                    continue;
                }
                red.add_multiple(&mut s, lcm & !gi.lm, gi);
                red.add_multiple(&mut s, lcm & !gj.lm, gj);
            }
        }
        red.reduce(&mut s);
        if !s.is_zero() {
            let e = red.sparse(&s);
            let unit = e.lm == 0;
            add_generator(&mut red, e, &mut heap, &mut pending);
            if unit {
                break;
            }
        }
    }
    Ok(finish(red))
}

/// Some earlier generator `k` whose leading monomial divides `lcm` has
/// already had both its pairs with `i` and `j` treated.
fn chain_criterion(red: &Reducer, i: usize, j: usize, lcm: u64, pending: &HashSet<(usize, usize)>) -> bool {
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    red.elems.iter().enumerate().any(|(k, g)| {
        k != i
            && k != j
            && g.lm & !lcm == 0
            && !pending.contains(&key(i, k))
            && !pending.contains(&key(j, k))
    })
}

fn add_generator(
    red: &mut Reducer,
    e: Element,
    heap: &mut BinaryHeap<Reverse<Pair>>,
    pending: &mut HashSet<(usize, usize)>,
) {
    let lm = e.lm;
    let idx = red.push(e);
    let degree = lm.count_ones();
    let rank = red.order.rank(lm);
    for var in 0..red.m as u32 {
        if lm >> var & 1 == 1 {
            heap.push(Reverse(Pair {
                degree: degree + 1,
                rank,
                kind: PairKind::Field { i: idx, var },
            }));
        }
    }
    for i in 0..idx {
        let other = red.elems[i].lm;
        // product criterion: coprime leading monomials
        if other & lm == 0 {
            continue;
        }
        let lcm = other | lm;
        pending.insert((i, idx));
        heap.push(Reverse(Pair {
            degree: lcm.count_ones(),
            rank: red.order.rank(lcm),
            kind: PairKind::Regular { i, j: idx },
        }));
    }
}

/// Minimizes and inter-reduces the completed generator list.
fn finish(mut red: Reducer) -> GroebnerBasis {
    let mut elems = std::mem::take(&mut red.elems);
    elems.sort_by_key(|e| red.order.rank(e.lm));
    let mut minimal: Vec<Element> = Vec::new();
    for e in elems {
        if !minimal.iter().any(|k| k.lm & !e.lm == 0) {
            minimal.push(e);
        }
    }
    red.divisor.iter_mut().for_each(|d| *d = 0);
    for e in &minimal {
        red.push(e.clone());
    }
    // No tail term is divisible by its own leading monomial, so reducing the
    // tail against the minimal basis leaves every leading monomial in place.
    let mut polys = Vec::with_capacity(minimal.len());
    for i in 0..red.elems.len() {
        let lm_rank = red.order.rank(red.elems[i].lm);
        let mut v = BitVec::zeros(red.order.size());
        for &t in &red.elems[i].terms {
            v.flip(red.order.rank(t));
        }
        v.flip(lm_rank);
        red.reduce(&mut v);
        v.flip(lm_rank);
        polys.push(red.to_poly(&v));
        red.elems[i] = red.sparse(&v);
    }
    GroebnerBasis { polys, reducer: red }
}

/// Normal form of `p` modulo `g`.
pub fn normal_form(p: &Poly, g: &GroebnerBasis) -> Poly {
    g.normal_form(p)
}

/// `s ⊨ t` decided by ideal membership: every member of `t` reduces to zero
/// modulo the basis of `s`.
pub fn entails_groebner(s: &PolySet, t: &PolySet) -> Result<bool, GroebnerError> {
    let m = s.num_vars().max(t.num_vars());
    let gb = groebner_basis(&s.with_num_vars(m))?;
    Ok(t.iter().all(|p| gb.contains(p)))
}

/// The part of `u` not already implied by `v`: normal forms of the members of
/// `u` modulo the basis of `v`, zeros dropped. Requires `u ⊨ v`.
pub fn delta(u: &PolySet, v: &PolySet) -> Result<PolySet, GroebnerError> {
    let m = u.num_vars().max(v.num_vars());
    check_vars(m)?;
    if !algset::entails(u, v)? {
        return Err(GroebnerError::PreconditionViolated("u does not entail v".into()));
    }
    let gb = groebner_basis(&v.with_num_vars(m))?;
    Ok(PolySet::from_polys(
        m,
        u.iter().map(|p| gb.normal_form(p)).filter(|p| !p.is_zero()),
    ))
}
