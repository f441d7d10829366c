//! Incremental GF(2) consistency test for `M · R = t`, where the rows of `R`
//! arrive one at a time.
//!
//! Each accepted basis vector is indexed by its lowest set bit and carries the
//! combination of original rows that produced it. The target is kept fully
//! reduced against the basis, so the system is solvable exactly when the
//! residual target is zero, and the target's combination is then a solution.

use crate::bits::BitVec;

struct BasisRow {
    bits: BitVec,
    combo: Vec<u64>,
}

pub struct IncrementalSolver {
    width: usize,
    basis: Vec<Option<BasisRow>>,
    residual: BitVec,
    residual_combo: Vec<u64>,
    rows: usize,
}

fn xor_combo(dst: &mut Vec<u64>, src: &[u64]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), 0);
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

impl IncrementalSolver {
    /// A solver for rows of `target.len()` bits.
    pub fn new(target: BitVec) -> Self {
        let width = target.len();
        IncrementalSolver {
            width,
            basis: (0..width).map(|_| None).collect(),
            residual: target,
            residual_combo: Vec::new(),
            rows: 0,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn rank(&self) -> usize {
        self.basis.iter().filter(|b| b.is_some()).count()
    }

    pub fn is_solvable(&self) -> bool {
        self.residual.is_zero()
    }

    /// Appends the next row of `R`; returns whether the system is now solvable.
    pub fn push_row(&mut self, row: BitVec) -> bool {
        assert_eq!(row.len(), self.width);
        let index = self.rows;
        self.rows += 1;
        let mut bits = row;
        let mut combo = vec![0u64; index / 64 + 1];
        combo[index / 64] |= 1 << (index % 64);
        let mut from = 0;
        while let Some(p) = bits.next_one(from) {
            match &self.basis[p] {
                Some(b) => {
                    bits.xor_assign(&b.bits);
                    xor_combo(&mut combo, &b.combo);
                    from = p + 1;
                }
                None => {
                    self.basis[p] = Some(BasisRow { bits, combo });
                    self.reduce_residual(p);
                    return self.is_solvable();
                }
            }
        }
        self.is_solvable()
    }

    fn reduce_residual(&mut self, start: usize) {
        let mut from = start;
        while let Some(p) = self.residual.next_one(from) {
            if let Some(b) = &self.basis[p] {
                self.residual.xor_assign(&b.bits);
                xor_combo(&mut self.residual_combo, &b.combo);
            }
            from = p + 1;
        }
    }

    /// A solution `M` (one bit per pushed row) once the system is solvable.
    pub fn solution(&self) -> Option<Vec<bool>> {
        if !self.is_solvable() {
            return None;
        }
        Some(
            (0..self.rows)
                .map(|i| self.residual_combo.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1))
                .collect(),
        )
    }
}
