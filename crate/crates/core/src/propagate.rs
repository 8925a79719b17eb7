//! Unit propagation over clause, parity, equality and table atoms.

use crate::model::{Assignment, Atom, Formula, RelationKind, Var};

/// Constraint after normalisation: duplicate arguments merged, tautologies
/// removed, equalities turned into parity constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Cons {
    Clause(Vec<(Var, bool)>),
    Xor(Vec<Var>, bool),
    /// Distinct arguments, tuple bit `i` is argument `i`.
    Table(Vec<Var>, Vec<u64>),
    False,
}

impl Cons {
    pub(crate) fn vars(&self) -> Vec<Var> {
        match self {
            Cons::Clause(lits) => lits.iter().map(|l| l.0).collect(),
            Cons::Xor(vs, _) | Cons::Table(vs, _) => vs.clone(),
            Cons::False => Vec::new(),
        }
    }
}

/// `None` for constraints that are always true.
pub(crate) fn normalize(atom: &Atom) -> Option<Cons> {
    match atom.relation.kind() {
        RelationKind::Clause(signs) => {
            let mut lits: Vec<(Var, bool)> = Vec::with_capacity(signs.len());
            for (&v, &s) in atom.args.iter().zip(signs) {
                match lits.iter().find(|l| l.0 == v) {
                    Some(l) if l.1 != s => return None,
                    Some(_) => {}
                    None => lits.push((v, s)),
                }
            }
            Some(Cons::Clause(lits))
        }
        RelationKind::Unit(s) => Some(Cons::Clause(vec![(atom.args[0], *s)])),
        RelationKind::Equality | RelationKind::Xor(_) => {
            let parity = match atom.relation.kind() {
                RelationKind::Xor(p) => *p,
                _ => false,
            };
            let mut vs: Vec<Var> = Vec::new();
            for &v in &atom.args {
                match vs.iter().position(|&u| u == v) {
                    Some(i) => {
                        vs.swap_remove(i);
                    }
                    None => vs.push(v),
                }
            }
            vs.sort();
            if vs.is_empty() {
                return if parity { Some(Cons::False) } else { None };
            }
            Some(Cons::Xor(vs, parity))
        }
        RelationKind::Table(tuples) => {
            let mut distinct: Vec<Var> = Vec::new();
            let mut pos = Vec::with_capacity(atom.args.len());
            for &v in &atom.args {
                match distinct.iter().position(|&u| u == v) {
                    Some(i) => pos.push(i),
                    None => {
                        pos.push(distinct.len());
                        distinct.push(v);
                    }
                }
            }
            let mut projected: Vec<u64> = Vec::new();
            'tuples: for &t in tuples {
                let mut p = 0u64;
                let mut set = 0u64;
                for (i, &j) in pos.iter().enumerate() {
                    let bit = (t >> i) & 1;
                    if (set >> j) & 1 == 1 {
                        if (p >> j) & 1 != bit {
                            continue 'tuples;
                        }
                    } else {
                        set |= 1 << j;
                        p |= bit << j;
                    }
                }
                projected.push(p);
            }
            projected.sort_unstable();
            projected.dedup();
            if projected.is_empty() {
                return Some(Cons::False);
            }
            if distinct.len() < 64 && projected.len() as u64 == 1u64 << distinct.len() {
                return None;
            }
            Some(Cons::Table(distinct, projected))
        }
    }
}

/// Propagation state with a trail for assumptions.
#[derive(Debug, Clone)]
pub(crate) struct Propagator {
    cons: Vec<Cons>,
    occ: Vec<Vec<u32>>,
    values: Vec<Option<bool>>,
    trail: Vec<Var>,
    head: usize,
    conflict: bool,
}

impl Propagator {
    pub(crate) fn new(f: &Formula) -> Self {
        let n = f.var_bound();
        let mut p = Propagator {
            cons: Vec::with_capacity(f.atoms.len()),
            occ: vec![Vec::new(); n],
            values: vec![None; n],
            trail: Vec::new(),
            head: 0,
            conflict: false,
        };
        for atom in &f.atoms {
            if let Some(c) = normalize(atom) {
                p.add(c);
            }
        }
        p
    }

    fn add(&mut self, c: Cons) {
        let id = self.cons.len() as u32;
        for v in c.vars() {
            if self.occ.len() <= v.index() {
                self.occ.resize(v.index() + 1, Vec::new());
                self.values.resize(v.index() + 1, None);
            }
            self.occ[v.index()].push(id);
        }
        self.cons.push(c);
    }

    pub(crate) fn value(&self, v: Var) -> Option<bool> {
        self.values.get(v.index()).copied().flatten()
    }

    pub(crate) fn trail_len(&self) -> usize {
        self.trail.len()
    }

    pub(crate) fn trail(&self) -> &[Var] {
        &self.trail
    }

    /// Checks every constraint once and propagates to the fixpoint.
    pub(crate) fn propagate_all(&mut self) -> bool {
        if self.conflict {
            return false;
        }
        for id in 0..self.cons.len() {
            if !self.check(id) {
                self.conflict = true;
                return false;
            }
        }
        self.run()
    }

    /// Assigns `v := b` and propagates. Returns `false` on conflict.
    pub(crate) fn assign(&mut self, v: Var, b: bool) -> bool {
        if self.conflict {
            return false;
        }
        if !self.set(v, b) {
            self.conflict = true;
            return false;
        }
        self.run()
    }

    /// Undoes assignments made after the trail had length `len`.
    pub(crate) fn backtrack(&mut self, len: usize) {
        for v in self.trail.drain(len..) {
            self.values[v.index()] = None;
        }
        self.head = self.head.min(len);
        self.conflict = false;
    }

    fn set(&mut self, v: Var, b: bool) -> bool {
        if self.values.len() <= v.index() {
            self.values.resize(v.index() + 1, None);
            self.occ.resize(v.index() + 1, Vec::new());
        }
        match self.values[v.index()] {
            Some(old) => old == b,
            None => {
                self.values[v.index()] = Some(b);
                self.trail.push(v);
                true
            }
        }
    }

    fn run(&mut self) -> bool {
        while self.head < self.trail.len() {
            let v = self.trail[self.head];
            self.head += 1;
            for k in 0..self.occ[v.index()].len() {
                let id = self.occ[v.index()][k] as usize;
                if !self.check(id) {
                    self.conflict = true;
                    return false;
                }
            }
        }
        true
    }

    /// Re-examines one constraint, forcing what it implies.
    fn check(&mut self, id: usize) -> bool {
        match &self.cons[id] {
            Cons::False => false,
            Cons::Clause(lits) => {
                let mut free = None;
                let mut n_free = 0;
                for &(v, s) in lits {
                    match self.values[v.index()] {
                        Some(b) if b == s => return true,
                        Some(_) => {}
                        None => {
                            n_free += 1;
                            free = Some((v, s));
                        }
                    }
                }
                match n_free {
                    0 => false,
                    1 => {
                        let (v, s) = free.unwrap();
                        self.set(v, s)
                    }
                    _ => true,
                }
            }
            Cons::Xor(vs, parity) => {
                let mut acc = *parity;
                let mut free = None;
                let mut n_free = 0;
                for &v in vs {
                    match self.values[v.index()] {
                        Some(b) => acc ^= b,
                        None => {
                            n_free += 1;
                            free = Some(v);
                        }
                    }
                }
                match n_free {
                    0 => !acc,
                    1 => self.set(free.unwrap(), acc),
                    _ => true,
                }
            }
            Cons::Table(vs, tuples) => {
                let mut fixed_mask = 0u64;
                let mut fixed_val = 0u64;
                for (i, &v) in vs.iter().enumerate() {
                    if let Some(b) = self.values[v.index()] {
                        fixed_mask |= 1 << i;
                        fixed_val |= (b as u64) << i;
                    }
                }
                let mut and = u64::MAX;
                let mut or = 0u64;
                let mut any = false;
                for &t in tuples {
                    if t & fixed_mask == fixed_val {
                        any = true;
                        and &= t;
                        or |= t;
                    }
                }
                if !any {
                    return false;
                }
                let forced: Vec<(Var, bool)> = vs
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| (fixed_mask >> i) & 1 == 0 && ((and ^ or) >> i) & 1 == 0)
                    .map(|(i, &v)| (v, (and >> i) & 1 == 1))
                    .collect();
                forced.into_iter().all(|(v, b)| self.set(v, b))
            }
        }
    }

    /// Current values as an assignment.
    pub(crate) fn assignment(&self) -> Assignment {
        Assignment::from_pairs(self.trail.iter().map(|&v| (v, self.values[v.index()].unwrap())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropagationStatus {
    Ok,
    Conflict,
}

/// `f ≡ residual ∧ forced` when the status is `Ok`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationResult {
    pub residual: Formula,
    pub forced: Assignment,
    pub status: PropagationStatus,
}

impl PropagationResult {
    pub fn is_conflict(&self) -> bool {
        self.status == PropagationStatus::Conflict
    }
}

/// Exhaustive unit propagation.
pub fn unit_propagate(f: &Formula) -> PropagationResult {
    let mut p = Propagator::new(f);
    let ok = p.propagate_all();
    let forced = p.assignment();
    if !ok {
        let vars = f.vars.iter().copied().filter(|&v| forced.get(v).is_none()).collect();
        return PropagationResult {
            residual: Formula::with_vars(vec![Atom::always_false()], vars),
            forced,
            status: PropagationStatus::Conflict,
        };
    }
    PropagationResult {
        residual: f.condition(|v| forced.get(v)),
        forced,
        status: PropagationStatus::Ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate, Relation};
    use std::sync::Arc;

    #[test]
    fn chain() {
        let (x, y) = (Var(0), Var(1));
        let r = unit_propagate(&Formula::new(vec![Atom::unit(x, true), Atom::implication(x, y)]));
        assert_eq!(r.status, PropagationStatus::Ok);
        assert_eq!(r.forced.get(x), Some(true));
        assert_eq!(r.forced.get(y), Some(true));
        assert!(r.residual.atoms.is_empty());
    }

    #[test]
    fn opposite_units_conflict() {
        let x = Var(0);
        let r = unit_propagate(&Formula::new(vec![Atom::unit(x, true), Atom::unit(x, false)]));
        assert!(r.is_conflict());
    }

    #[test]
    fn parity_forces() {
        let (x, y) = (Var(0), Var(1));
        let r = unit_propagate(&Formula::new(vec![Atom::unit(x, true), Atom::xor(vec![x, y], true)]));
        assert_eq!(r.status, PropagationStatus::Ok);
        assert_eq!(r.forced.get(y), Some(false));
    }

    #[test]
    fn table_forces_agreeing_coordinate() {
        // tuples 110, 111 after fixing nothing: coordinates 0 and 1 forced
        let rel = Arc::new(Relation::table("R", 3, [0b011, 0b111]));
        let f = Formula::new(vec![Atom::new(rel, vec![Var(0), Var(1), Var(2)])]);
        let r = unit_propagate(&f);
        assert_eq!(r.forced.get(Var(0)), Some(true));
        assert_eq!(r.forced.get(Var(1)), Some(true));
        assert_eq!(r.forced.get(Var(2)), None);
        assert_eq!(r.residual.vars, [Var(2)].into());
    }

    #[test]
    fn residual_plus_units_preserves_models() {
        let (a, b, c) = (Var(0), Var(1), Var(2));
        let f = Formula::new(vec![
            Atom::unit(a, true),
            Atom::clause(&[(a, false), (b, true), (c, true)]),
            Atom::xor(vec![b, c], false),
        ]);
        let r = unit_propagate(&f);
        for bits in 0..8u32 {
            let asg = Assignment::from_pairs((0..3).map(|i| (Var(i), (bits >> i) & 1 == 1)));
            let lhs = evaluate(&f, &asg).unwrap();
            let units_hold = r.forced.assigned().all(|(v, val)| asg.get(v) == Some(val));
            let rhs = units_hold && evaluate(&r.residual, &asg).unwrap();
            assert_eq!(lhs, rhs, "bits {bits:03b}");
        }
    }

    #[test]
    fn repeated_variable_parity() {
        let x = Var(0);
        let f = Formula::new(vec![Atom::xor(vec![x, x], true)]);
        assert!(unit_propagate(&f).is_conflict());
    }
}
