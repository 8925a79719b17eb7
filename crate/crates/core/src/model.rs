//! Relations, formulas, assignments and abduction instances.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Dense variable index, assigned in first-occurrence order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub type VarSet = BTreeSet<Var>;

/// Name table for the variables of one instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    lookup: HashMap<String, Var>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the variable for `name`, creating it if needed.
    pub fn intern(&mut self, name: &str) -> Var {
        if let Some(&v) = self.lookup.get(name) {
            return v;
        }
        let v = Var(self.names.len() as u32);
        self.names.push(name.to_string());
        self.lookup.insert(name.to_string(), v);
        v
    }

    pub fn get(&self, name: &str) -> Option<Var> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// A name starting with `prefix` that is not yet taken.
    pub fn fresh_name(&self, prefix: &str) -> String {
        if !self.lookup.contains_key(prefix) {
            return prefix.to_string();
        }
        (1..)
            .map(|i| format!("{prefix}{i}"))
            .find(|n| !self.lookup.contains_key(n))
            .expect("unbounded name supply")
    }

    pub fn fresh(&mut self, prefix: &str) -> Var {
        let name = self.fresh_name(prefix);
        self.intern(&name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn set_names(&self, set: &VarSet) -> Vec<String> {
        set.iter().map(|&v| self.name(v).to_string()).collect()
    }
}

/// Syntactic form of a relation. Tuples are packed into `u64` with bit `i`
/// holding coordinate `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RelationKind {
    /// Disjunction of literals; `true` marks a positive literal.
    Clause(Vec<bool>),
    /// `x_1 ⊕ … ⊕ x_r = parity`.
    Xor(bool),
    Equality,
    Unit(bool),
    Table(BTreeSet<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    name: String,
    arity: usize,
    kind: RelationKind,
}

pub const MAX_ARITY: usize = 64;

impl Relation {
    pub fn clause(signs: Vec<bool>) -> Self {
        if signs.len() == 1 {
            return Relation::unit(signs[0]);
        }
        let name = format!(
            "clause({})",
            signs.iter().map(|&s| if s { '+' } else { '-' }).collect::<String>()
        );
        Relation {
            name,
            arity: signs.len(),
            kind: RelationKind::Clause(signs),
        }
    }

    pub fn xor(arity: usize, parity: bool) -> Self {
        Relation {
            name: format!("xor{arity}={}", parity as u8),
            arity,
            kind: RelationKind::Xor(parity),
        }
    }

    pub fn equality() -> Self {
        Relation {
            name: "eq".into(),
            arity: 2,
            kind: RelationKind::Equality,
        }
    }

    pub fn unit(sign: bool) -> Self {
        Relation {
            name: if sign { "unit(+)" } else { "unit(-)" }.into(),
            arity: 1,
            kind: RelationKind::Unit(sign),
        }
    }

    /// Explicit tuple set. Panics if a tuple has bits beyond `arity`.
    pub fn table(name: impl Into<String>, arity: usize, tuples: impl IntoIterator<Item = u64>) -> Self {
        assert!(arity <= MAX_ARITY, "arity {arity} exceeds {MAX_ARITY}");
        let tuples: BTreeSet<u64> = tuples.into_iter().collect();
        if arity < 64 {
            assert!(tuples.iter().all(|&t| t >> arity == 0), "tuple wider than arity");
        }
        Relation {
            name: name.into(),
            arity,
            kind: RelationKind::Table(tuples),
        }
    }

    /// The nullary relation that is always false.
    pub fn always_false() -> Self {
        Relation::table("false", 0, [])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> &RelationKind {
        &self.kind
    }

    pub fn is_table(&self) -> bool {
        matches!(self.kind, RelationKind::Table(_))
    }

    /// Membership of a packed argument tuple.
    pub fn contains(&self, bits: u64) -> bool {
        match &self.kind {
            RelationKind::Clause(signs) => signs
                .iter()
                .enumerate()
                .any(|(i, &s)| ((bits >> i) & 1 == 1) == s),
            RelationKind::Xor(parity) => {
                let mask = if self.arity >= 64 { u64::MAX } else { (1u64 << self.arity) - 1 };
                ((bits & mask).count_ones() % 2 == 1) == *parity
            }
            RelationKind::Equality => (bits & 1) == ((bits >> 1) & 1),
            RelationKind::Unit(s) => ((bits & 1) == 1) == *s,
            RelationKind::Table(t) => t.contains(&bits),
        }
    }

    /// Enumerates the tuple set in increasing packed order.
    ///
    /// Panics for arities above 24; use [`Relation::contains`] for wide clauses.
    pub fn tuples(&self) -> Vec<u64> {
        if let RelationKind::Table(t) = &self.kind {
            return t.iter().copied().collect();
        }
        assert!(self.arity <= 24, "refusing to enumerate {} tuples", self.arity);
        (0..1u64 << self.arity).filter(|&b| self.contains(b)).collect()
    }

    pub fn tuple_count(&self) -> u64 {
        match &self.kind {
            RelationKind::Table(t) => t.len() as u64,
            RelationKind::Clause(_) => (1u64 << self.arity) - 1,
            RelationKind::Xor(_) if self.arity == 0 => self.contains(0) as u64,
            RelationKind::Xor(_) => 1u64 << (self.arity - 1),
            RelationKind::Equality => 2,
            RelationKind::Unit(_) => 1,
        }
    }

    /// Same arity and same tuple set, ignoring name and syntactic kind.
    pub fn same_tuples(&self, other: &Relation) -> bool {
        if self.arity != other.arity {
            return false;
        }
        if self.kind == other.kind {
            return true;
        }
        if self.tuple_count() != other.tuple_count() {
            return false;
        }
        self.tuples().into_iter().all(|t| other.contains(t))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A relation applied to a variable sequence. Repeated variables are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub relation: Arc<Relation>,
    pub args: Vec<Var>,
}

/// Outcome of conditioning an atom on a partial assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conditioned {
    True,
    False,
    Atom(Atom),
}

impl Atom {
    pub fn new(relation: Arc<Relation>, args: Vec<Var>) -> Self {
        assert_eq!(relation.arity(), args.len(), "arity mismatch for {}", relation.name());
        Atom { relation, args }
    }

    pub fn clause(lits: &[(Var, bool)]) -> Self {
        let rel = Relation::clause(lits.iter().map(|l| l.1).collect());
        Atom::new(Arc::new(rel), lits.iter().map(|l| l.0).collect())
    }

    pub fn unit(v: Var, sign: bool) -> Self {
        Atom::new(Arc::new(Relation::unit(sign)), vec![v])
    }

    pub fn implication(from: Var, to: Var) -> Self {
        Atom::clause(&[(from, false), (to, true)])
    }

    pub fn equality(a: Var, b: Var) -> Self {
        Atom::new(Arc::new(Relation::equality()), vec![a, b])
    }

    pub fn xor(args: Vec<Var>, parity: bool) -> Self {
        Atom::new(Arc::new(Relation::xor(args.len(), parity)), args)
    }

    pub fn always_false() -> Self {
        Atom::new(Arc::new(Relation::always_false()), vec![])
    }

    /// Packs the argument values into a tuple.
    pub fn tuple_under(&self, value: impl Fn(Var) -> bool) -> u64 {
        self.args
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| acc | ((value(v) as u64) << i))
    }

    pub fn holds(&self, value: impl Fn(Var) -> bool) -> bool {
        self.relation.contains(self.tuple_under(value))
    }

    /// Fixes the variables that `value` knows about and simplifies.
    ///
    /// Syntactic kinds stay syntactic where possible: a clause drops false
    /// literals, a parity constraint folds fixed bits into its parity, and an
    /// equality with one side fixed becomes a unit.
    pub fn condition(&self, value: impl Fn(Var) -> Option<bool>) -> Conditioned {
        if self.args.iter().all(|&v| value(v).is_none()) {
            return Conditioned::Atom(self.clone());
        }
        match self.relation.kind() {
            RelationKind::Clause(signs) => {
                let mut rest = Vec::new();
                for (&v, &s) in self.args.iter().zip(signs) {
                    match value(v) {
                        Some(b) if b == s => return Conditioned::True,
                        Some(_) => {}
                        None => rest.push((v, s)),
                    }
                }
                if rest.is_empty() {
                    Conditioned::False
                } else {
                    Conditioned::Atom(Atom::clause(&rest))
                }
            }
            RelationKind::Unit(s) => match value(self.args[0]) {
                Some(b) if b == *s => Conditioned::True,
                _ => Conditioned::False,
            },
            RelationKind::Xor(parity) => {
                let mut parity = *parity;
                let mut rest = Vec::new();
                for &v in &self.args {
                    match value(v) {
                        Some(b) => parity ^= b,
                        None => rest.push(v),
                    }
                }
                match rest.len() {
                    0 if parity => Conditioned::False,
                    0 => Conditioned::True,
                    // x = parity
                    1 => Conditioned::Atom(Atom::unit(rest[0], parity)),
                    _ => Conditioned::Atom(Atom::xor(rest, parity)),
                }
            }
            RelationKind::Equality => {
                let (a, b) = (self.args[0], self.args[1]);
                match (value(a), value(b)) {
                    (Some(x), Some(y)) if x == y => Conditioned::True,
                    (Some(_), Some(_)) => Conditioned::False,
                    (Some(x), None) => Conditioned::Atom(Atom::unit(b, x)),
                    (None, Some(y)) => Conditioned::Atom(Atom::unit(a, y)),
                    (None, None) => unreachable!(),
                }
            }
            RelationKind::Table(tuples) => {
                let free: Vec<usize> = (0..self.args.len())
                    .filter(|&i| value(self.args[i]).is_none())
                    .collect();
                let fixed: Vec<(usize, bool)> = (0..self.args.len())
                    .filter_map(|i| value(self.args[i]).map(|b| (i, b)))
                    .collect();
                let projected: BTreeSet<u64> = tuples
                    .iter()
                    .filter(|&&t| fixed.iter().all(|&(i, b)| ((t >> i) & 1 == 1) == b))
                    .map(|&t| {
                        free.iter()
                            .enumerate()
                            .fold(0u64, |acc, (j, &i)| acc | (((t >> i) & 1) << j))
                    })
                    .collect();
                if projected.is_empty() {
                    Conditioned::False
                } else if free.is_empty() || projected.len() as u128 == 1u128 << free.len() {
                    Conditioned::True
                } else {
                    let rel = Relation::table(self.relation.name().to_string(), free.len(), projected);
                    Conditioned::Atom(Atom::new(
                        Arc::new(rel),
                        free.iter().map(|&i| self.args[i]).collect(),
                    ))
                }
            }
        }
    }
}

/// A conjunction of atoms over an explicit variable set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Formula {
    pub atoms: Vec<Atom>,
    pub vars: VarSet,
}

impl Formula {
    /// Variable set is the union of the atom arguments.
    pub fn new(atoms: Vec<Atom>) -> Self {
        let vars = atoms.iter().flat_map(|a| a.args.iter().copied()).collect();
        Formula { atoms, vars }
    }

    /// Formula over `vars`, which must contain every atom argument.
    pub fn with_vars(atoms: Vec<Atom>, mut vars: VarSet) -> Self {
        vars.extend(atoms.iter().flat_map(|a| a.args.iter().copied()));
        Formula { atoms, vars }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// One past the largest variable index mentioned.
    pub fn var_bound(&self) -> usize {
        self.vars.iter().next_back().map_or(0, |v| v.index() + 1)
    }

    /// Distinct relations, in first-occurrence order.
    pub fn relations(&self) -> Vec<Arc<Relation>> {
        let mut seen = std::collections::HashSet::new();
        self.atoms
            .iter()
            .filter(|a| seen.insert(a.relation.clone()))
            .map(|a| a.relation.clone())
            .collect()
    }

    /// Conjoins unit literals.
    pub fn with_units(&self, lits: impl IntoIterator<Item = (Var, bool)>) -> Formula {
        let mut f = self.clone();
        for (v, b) in lits {
            f.atoms.push(Atom::unit(v, b));
            f.vars.insert(v);
        }
        f
    }

    /// Conditions every atom on `value`; fixed variables leave the variable set.
    pub fn condition(&self, value: impl Fn(Var) -> Option<bool>) -> Formula {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for atom in &self.atoms {
            match atom.condition(&value) {
                Conditioned::True => {}
                Conditioned::False => atoms.push(Atom::always_false()),
                Conditioned::Atom(a) => atoms.push(a),
            }
        }
        let vars = self.vars.iter().copied().filter(|&v| value(v).is_none()).collect();
        Formula { atoms, vars }
    }

    /// Models of the result are the models of `self` with `v` fixed to `b`.
    pub fn restrict(&self, v: Var, b: bool) -> Formula {
        self.condition(|u| (u == v).then_some(b))
    }
}

/// Truth values for variables; `None` marks an unassigned variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, bool)>) -> Self {
        let mut a = Assignment::new();
        for (v, b) in pairs {
            a.set(v, b);
        }
        a
    }

    pub fn set(&mut self, v: Var, b: bool) {
        if self.values.len() <= v.index() {
            self.values.resize(v.index() + 1, None);
        }
        self.values[v.index()] = Some(b);
    }

    pub fn get(&self, v: Var) -> Option<bool> {
        self.values.get(v.index()).copied().flatten()
    }

    pub fn assigned(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.map(|b| (Var(i as u32), b)))
    }

    pub fn is_empty(&self) -> bool {
        self.values.iter().all(Option::is_none)
    }

    pub fn len(&self) -> usize {
        self.values.iter().filter(|b| b.is_some()).count()
    }
}

/// Whether `a` satisfies every atom of `f`.
pub fn evaluate(f: &Formula, a: &Assignment) -> Result<bool> {
    if let Some(v) = f.vars.iter().find(|&&v| a.get(v).is_none()) {
        return Err(Error::PartialAssignment(v.0));
    }
    Ok(f.atoms.iter().all(|atom| atom.holds(|v| a.get(v).unwrap())))
}

/// `(KB, H, M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbductionInstance {
    pub vars: VarTable,
    pub kb: Formula,
    pub hypotheses: VarSet,
    pub manifestations: VarSet,
}

impl AbductionInstance {
    pub fn new(vars: VarTable, kb: Formula, hypotheses: VarSet, manifestations: VarSet) -> Result<Self> {
        for (what, set) in [("hypothesis", &hypotheses), ("manifestation", &manifestations)] {
            if let Some(v) = set.iter().find(|v| !kb.vars.contains(v)) {
                let name = if v.index() < vars.len() { vars.name(*v).to_string() } else { v.to_string() };
                return Err(Error::Scope(format!(
                    "{what} `{name}` does not occur in the knowledge base"
                )));
            }
        }
        Ok(AbductionInstance {
            vars,
            kb,
            hypotheses,
            manifestations,
        })
    }

    pub fn name(&self, v: Var) -> &str {
        self.vars.name(v)
    }

    pub fn names(&self, set: &VarSet) -> Vec<String> {
        self.vars.set_names(set)
    }

    /// Looks a variable up by name.
    pub fn var(&self, name: &str) -> Option<Var> {
        self.vars.get(name)
    }
}

/// `(KB, H, M, x)` with `x ∈ H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetInstance {
    pub base: AbductionInstance,
    pub query: Var,
}

impl FacetInstance {
    pub fn new(base: AbductionInstance, query: Var) -> Result<Self> {
        if !base.hypotheses.contains(&query) {
            let name = if query.index() < base.vars.len() { base.name(query).to_string() } else { query.to_string() };
            return Err(Error::Scope(format!("query `{name}` is not a hypothesis")));
        }
        Ok(FacetInstance { base, query })
    }
}

/// `(KB, H, M, k)`; `k > |H|` is legal and trivially negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivInstance {
    pub base: AbductionInstance,
    pub k: usize,
}

/// Symmetric difference cardinality.
pub fn distance(e1: &VarSet, e2: &VarSet) -> usize {
    e1.symmetric_difference(e2).count()
}

/// Builds an instance by name, interning variables in first-occurrence order.
#[derive(Debug, Default)]
pub struct InstanceBuilder {
    vars: VarTable,
    atoms: Vec<Atom>,
    hypotheses: Vec<String>,
    manifestations: Vec<String>,
}

impl InstanceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&mut self, name: &str) -> Var {
        self.vars.intern(name)
    }

    pub fn atom(&mut self, relation: Arc<Relation>, args: &[&str]) -> &mut Self {
        let args = args.iter().map(|n| self.vars.intern(n)).collect();
        self.atoms.push(Atom::new(relation, args));
        self
    }

    /// Literals written as `"x"` or `"-x"`.
    pub fn clause(&mut self, lits: &[&str]) -> &mut Self {
        let lits: Vec<(Var, bool)> = lits
            .iter()
            .map(|l| match l.strip_prefix('-') {
                Some(n) => (self.vars.intern(n), false),
                None => (self.vars.intern(l), true),
            })
            .collect();
        self.atoms.push(Atom::clause(&lits));
        self
    }

    pub fn eq(&mut self, a: &str, b: &str) -> &mut Self {
        let (a, b) = (self.vars.intern(a), self.vars.intern(b));
        self.atoms.push(Atom::equality(a, b));
        self
    }

    pub fn xor(&mut self, args: &[&str], parity: bool) -> &mut Self {
        let args = args.iter().map(|n| self.vars.intern(n)).collect();
        self.atoms.push(Atom::xor(args, parity));
        self
    }

    pub fn hyp(&mut self, names: &[&str]) -> &mut Self {
        self.hypotheses.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn man(&mut self, names: &[&str]) -> &mut Self {
        self.manifestations.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn build(&self) -> Result<AbductionInstance> {
        let resolve = |names: &[String]| -> Result<VarSet> {
            names
                .iter()
                .map(|n| {
                    self.vars
                        .get(n)
                        .ok_or_else(|| Error::Scope(format!("`{n}` does not occur in the knowledge base")))
                })
                .collect()
        };
        AbductionInstance::new(
            self.vars.clone(),
            Formula::new(self.atoms.clone()),
            resolve(&self.hypotheses)?,
            resolve(&self.manifestations)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assignment(pairs: &[(u32, bool)]) -> Assignment {
        Assignment::from_pairs(pairs.iter().map(|&(v, b)| (Var(v), b)))
    }

    #[test]
    fn implication_falsified() {
        let f = Formula::new(vec![Atom::implication(Var(0), Var(1))]);
        assert!(!evaluate(&f, &assignment(&[(0, true), (1, false)])).unwrap());
        assert!(evaluate(&f, &assignment(&[(0, false), (1, false)])).unwrap());
    }

    #[test]
    fn partial_assignment_is_an_error() {
        let f = Formula::new(vec![Atom::implication(Var(0), Var(1))]);
        assert_eq!(
            evaluate(&f, &assignment(&[(0, true)])),
            Err(Error::PartialAssignment(1))
        );
    }

    #[test]
    fn one_in_three_membership() {
        let r = Arc::new(Relation::table("OneInThree", 3, [0b100, 0b010, 0b001]));
        let f = Formula::new(vec![Atom::new(r, vec![Var(0), Var(1), Var(2)])]);
        assert!(evaluate(&f, &assignment(&[(0, false), (1, true), (2, false)])).unwrap());
        assert!(!evaluate(&f, &assignment(&[(0, true), (1, true), (2, false)])).unwrap());
    }

    #[test]
    fn restrict_examples() {
        let (x, y) = (Var(0), Var(1));
        let imp = Formula::new(vec![Atom::implication(x, y)]);
        let r0 = imp.restrict(x, false);
        assert!(r0.atoms.is_empty());
        assert_eq!(r0.vars, VarSet::from([y]));
        assert_eq!(imp.restrict(x, true).atoms, vec![Atom::unit(y, true)]);

        let parity = Formula::new(vec![Atom::xor(vec![x, y], true)]);
        assert_eq!(parity.restrict(y, true).atoms, vec![Atom::unit(x, false)]);
    }

    #[test]
    fn restricting_to_an_empty_relation_leaves_a_false_atom() {
        let x = Var(0);
        let f = Formula::new(vec![Atom::unit(x, true)]).restrict(x, false);
        assert_eq!(f.atoms, vec![Atom::always_false()]);
        assert!(!evaluate(&f, &Assignment::new()).unwrap());
    }

    #[test]
    fn repeated_arguments_project() {
        // R(x, x, y) with R = ¬a ∨ ¬b ∨ c is x → y
        let r = Arc::new(Relation::clause(vec![false, false, true]));
        let (x, y) = (Var(0), Var(1));
        let f = Formula::new(vec![Atom::new(r, vec![x, x, y])]);
        assert!(!evaluate(&f, &assignment(&[(0, true), (1, false)])).unwrap());
        assert!(evaluate(&f, &assignment(&[(0, true), (1, true)])).unwrap());
    }

    #[test]
    fn builder_rejects_unknown_hypothesis() {
        let err = InstanceBuilder::new().hyp(&["a"]).build().unwrap_err();
        assert!(matches!(err, Error::Scope(_)));
    }

    #[test]
    fn distance_examples() {
        let s = |v: &[u32]| v.iter().map(|&i| Var(i)).collect::<VarSet>();
        assert_eq!(distance(&s(&[0, 1]), &s(&[0, 2])), 2);
        assert_eq!(distance(&s(&[0, 1, 2]), &s(&[])), 3);
        assert_eq!(distance(&s(&[4]), &s(&[4])), 0);
    }
}
