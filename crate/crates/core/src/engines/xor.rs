//! Linear systems over the two-element field.

use super::{Engine, SatResult};
use crate::model::{Assignment, Formula, Var};
use crate::propagate::{normalize, Cons};

/// Equations `a · x = b` (over the local coordinates) whose solution set is
/// `tuples`, which must be non-empty and closed under `x ⊕ y ⊕ z`.
pub(crate) fn affine_equations(r: usize, tuples: &[u64]) -> Vec<(u64, bool)> {
    let t0 = tuples[0];
    // reduced row echelon basis of the direction space
    let mut basis: Vec<(usize, u64)> = Vec::new();
    for &t in tuples {
        let mut d = t ^ t0;
        for &(p, row) in &basis {
            if (d >> p) & 1 == 1 {
                d ^= row;
            }
        }
        if d == 0 {
            continue;
        }
        let p = d.trailing_zeros() as usize;
        for (_, row) in basis.iter_mut() {
            if (*row >> p) & 1 == 1 {
                *row ^= d;
            }
        }
        basis.push((p, d));
    }
    let pivots: u64 = basis.iter().fold(0, |acc, &(p, _)| acc | (1 << p));
    (0..r)
        .filter(|&j| (pivots >> j) & 1 == 0)
        .map(|j| {
            let a = basis
                .iter()
                .filter(|&&(_, row)| (row >> j) & 1 == 1)
                .fold(1u64 << j, |acc, &(p, _)| acc | (1 << p));
            (a, (a & t0).count_ones() % 2 == 1)
        })
        .collect()
}

struct Row {
    bits: Vec<u64>,
    rhs: bool,
}

impl Row {
    fn get(&self, i: usize) -> bool {
        (self.bits[i / 64] >> (i % 64)) & 1 == 1
    }

    fn flip(&mut self, i: usize) {
        self.bits[i / 64] ^= 1 << (i % 64);
    }

    fn add(&mut self, other: &Row) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
        self.rhs ^= other.rhs;
    }
}

/// Caller guarantees every relation is closed under `x ⊕ y ⊕ z`.
pub(super) fn solve(f: &Formula) -> SatResult {
    let order: Vec<Var> = f.vars.iter().copied().collect();
    let mut index = vec![usize::MAX; f.var_bound()];
    for (i, v) in order.iter().enumerate() {
        index[v.index()] = i;
    }
    let n = order.len();
    let words = n.div_ceil(64).max(1);
    let mut rows: Vec<Row> = Vec::new();
    let mut push = |vars: &[Var], coeffs: u64, rhs: bool| {
        let mut row = Row { bits: vec![0; words], rhs };
        for (k, v) in vars.iter().enumerate() {
            if k >= 64 || (coeffs >> k) & 1 == 1 {
                row.flip(index[v.index()]);
            }
        }
        rows.push(row);
    };
    for atom in &f.atoms {
        match normalize(atom) {
            None => {}
            Some(Cons::False) => return SatResult::unsat(Engine::Xor),
            Some(Cons::Xor(vs, p)) => push(&vs, u64::MAX, p),
            Some(Cons::Clause(lits)) => {
                assert!(lits.len() <= 1, "clause of width {} is not affine", lits.len());
                let (v, s) = lits[0];
                push(&[v], 1, s);
            }
            Some(Cons::Table(vs, tuples)) => {
                for (a, b) in affine_equations(vs.len(), &tuples) {
                    push(&vs, a, b);
                }
            }
        }
    }

    let mut pivot_of = vec![usize::MAX; n];
    let mut r = 0;
    for (col, slot) in pivot_of.iter_mut().enumerate() {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = std::mem::replace(&mut rows[r], Row { bits: Vec::new(), rhs: false });
        for row in rows.iter_mut() {
            if !row.bits.is_empty() && row.get(col) {
                row.add(&pivot);
            }
        }
        rows[r] = pivot;
        *slot = r;
        r += 1;
    }
    if rows[r..].iter().any(|row| row.rhs) {
        return SatResult::unsat(Engine::Xor);
    }
    let mut model = Assignment::new();
    for (i, &v) in order.iter().enumerate() {
        let val = pivot_of[i] != usize::MAX && rows[pivot_of[i]].rhs;
        model.set(v, val);
    }
    SatResult::sat(model, Engine::Xor)
}
