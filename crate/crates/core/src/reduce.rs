//! Answer-preserving instance transformers.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::eval::Compiled;
use crate::model::{
    AbductionInstance, Atom, DivInstance, FacetInstance, Formula, Relation, RelationKind, Var,
    VarSet, VarTable,
};

const MAX_DEF_VARS: usize = 20;
const MAX_DEF_FREE: usize = 16;

/// `target(x_1..x_r) ≡ ∃y_1..y_n. body`, without the free equality relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfppDefinition {
    pub name: String,
    pub target: Arc<Relation>,
    /// Local names of the free and existential variables.
    pub vars: VarTable,
    pub free: Vec<Var>,
    pub exist: Vec<Var>,
    pub body: Formula,
}

impl EfppDefinition {
    /// Checks by enumeration that the body projects onto `declared`; without
    /// a declared relation the projection itself becomes the target.
    pub fn new(
        name: String,
        declared: Option<Arc<Relation>>,
        vars: VarTable,
        free: Vec<Var>,
        exist: Vec<Var>,
        body: Formula,
    ) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidDefinition { name: name.clone(), reason };
        if free.len() > MAX_DEF_FREE || free.len() + exist.len() > MAX_DEF_VARS {
            return Err(invalid(format!(
                "{} free and {} existential variables are too many to check",
                free.len(),
                exist.len()
            )));
        }
        let mut order = free.clone();
        order.extend(&exist);
        if let Some(v) = body.vars.iter().find(|v| !order.contains(v)) {
            return Err(invalid(format!("body mentions undeclared variable {v}")));
        }
        if body.atoms.iter().any(|a| *a.relation.kind() == RelationKind::Equality) {
            return Err(invalid("the body uses equality".into()));
        }
        let compiled = Compiled::new(&body, &order);
        let r = free.len();
        let free_mask = (1u64 << r) - 1;
        let mut projection = std::collections::BTreeSet::new();
        for mask in 0..1u64 << order.len() {
            if compiled.eval(mask) {
                projection.insert(mask & free_mask);
            }
        }
        let target = match declared {
            Some(rel) => {
                if rel.arity() != r {
                    return Err(invalid(format!(
                        "`{}` has arity {} but the definition has {r} free variables",
                        rel.name(),
                        rel.arity()
                    )));
                }
                let agree = (0..1u64 << r).all(|t| rel.contains(t) == projection.contains(&t));
                if !agree {
                    return Err(invalid(format!("the body does not project onto `{}`", rel.name())));
                }
                rel
            }
            None => Arc::new(Relation::table(name.clone(), r, projection)),
        };
        Ok(EfppDefinition { name, target, vars, free, exist, body })
    }

    /// Whether this definition applies to atoms over `rel`.
    pub fn defines(&self, rel: &Relation) -> bool {
        self.target.same_tuples(rel)
    }

    /// Body atoms for `args`, with fresh variables for the existentials.
    fn instantiate(&self, args: &[Var], table: &mut VarTable) -> Vec<Atom> {
        let mut map: HashMap<Var, Var> = self.free.iter().copied().zip(args.iter().copied()).collect();
        for &y in &self.exist {
            map.insert(y, table.fresh("_e"));
        }
        self.body
            .atoms
            .iter()
            .map(|a| Atom::new(a.relation.clone(), a.args.iter().map(|v| map[v]).collect()))
            .collect()
    }
}

fn substitute_atoms(
    kb: &Formula,
    table: &mut VarTable,
    defs: &[EfppDefinition],
) -> Result<Formula> {
    let mut atoms = Vec::new();
    for atom in &kb.atoms {
        if let Some(def) = defs.iter().find(|d| d.defines(&atom.relation)) {
            atoms.extend(def.instantiate(&atom.args, table));
            continue;
        }
        let base = !atom.relation.is_table()
            || defs
                .iter()
                .flat_map(|d| d.body.atoms.iter())
                .any(|b| b.relation.same_tuples(&atom.relation));
        if !base {
            return Err(Error::MissingDefinition(atom.relation.name().to_string()));
        }
        atoms.push(atom.clone());
    }
    Ok(Formula::with_vars(atoms, kb.vars.clone()))
}

/// Replaces every defined atom by its body; existential variables become
/// fresh non-hypothesis variables.
pub fn efpp_substitute(inst: &AbductionInstance, defs: &[EfppDefinition]) -> Result<AbductionInstance> {
    let mut table = inst.vars.clone();
    let kb = substitute_atoms(&inst.kb, &mut table, defs)?;
    AbductionInstance::new(table, kb, inst.hypotheses.clone(), inst.manifestations.clone())
}

pub fn efpp_substitute_facet(fi: &FacetInstance, defs: &[EfppDefinition]) -> Result<FacetInstance> {
    FacetInstance::new(efpp_substitute(&fi.base, defs)?, fi.query)
}

/// Atoms expressing `a = b` in the language of `kb`.
fn equality_atoms(
    kb: &Formula,
    a: Var,
    b: Var,
    table: &mut VarTable,
    eq_def: Option<&EfppDefinition>,
) -> Result<Vec<Atom>> {
    let rels = kb.relations();
    let eq = Relation::equality();
    if let Some(rel) = rels.iter().find(|r| r.same_tuples(&eq)) {
        return Ok(vec![Atom::new(rel.clone(), vec![a, b])]);
    }
    let forward = Relation::clause(vec![false, true]);
    let backward = Relation::clause(vec![true, false]);
    for (pattern, swap) in [(&forward, false), (&backward, true)] {
        if let Some(rel) = rels.iter().find(|r| r.same_tuples(pattern)) {
            let mk = |from: Var, to: Var| {
                let args = if swap { vec![to, from] } else { vec![from, to] };
                Atom::new(rel.clone(), args)
            };
            return Ok(vec![mk(a, b), mk(b, a)]);
        }
    }
    match eq_def {
        Some(def) if def.defines(&eq) => Ok(def.instantiate(&[a, b], table)),
        Some(def) => Err(Error::InvalidDefinition {
            name: def.name.clone(),
            reason: "does not define equality".into(),
        }),
        None => Err(Error::NoEquality),
    }
}

fn add_equality_gadget(
    inst: &AbductionInstance,
    eq_def: Option<&EfppDefinition>,
) -> Result<(AbductionInstance, Var)> {
    let mut table = inst.vars.clone();
    let x = table.fresh("x");
    let y = table.fresh("y");
    let m = table.fresh("m");
    let mut atoms = inst.kb.atoms.clone();
    atoms.extend(equality_atoms(&inst.kb, x, m, &mut table, eq_def)?);
    atoms.extend(equality_atoms(&inst.kb, y, m, &mut table, eq_def)?);
    let mut vars = inst.kb.vars.clone();
    vars.extend([x, y, m]);
    let mut hyp = inst.hypotheses.clone();
    hyp.extend([x, y]);
    let mut man = inst.manifestations.clone();
    man.insert(m);
    Ok((AbductionInstance::new(table, Formula::with_vars(atoms, vars), hyp, man)?, x))
}

/// `KB ∪ {x = m, y = m}` with fresh `x, y, m`; the source has an explanation
/// iff `x` is a facet.
///
/// Equality is taken from the language itself, else built from two
/// implications, else from `eq_def`.
pub fn abd_to_isfacet(inst: &AbductionInstance, eq_def: Option<&EfppDefinition>) -> Result<FacetInstance> {
    let (target, x) = add_equality_gadget(inst, eq_def)?;
    FacetInstance::new(target, x)
}

/// The same construction with `k = 2` in place of the query.
pub fn abd_to_div(inst: &AbductionInstance, eq_def: Option<&EfppDefinition>) -> Result<DivInstance> {
    let (base, _) = add_equality_gadget(inst, eq_def)?;
    Ok(DivInstance { base, k: 2 })
}

/// Either a transformed instance or a fixed answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction<T> {
    Instance(T),
    Resolved(bool),
}

fn unit_sign(rel: &Relation) -> Option<bool> {
    if rel.arity() != 1 {
        return None;
    }
    match (rel.contains(0), rel.contains(1)) {
        (false, true) => Some(true),
        (true, false) => Some(false),
        _ => None,
    }
}

fn rename(atoms: &[Atom], map: impl Fn(Var) -> Var) -> Vec<Atom> {
    atoms
        .iter()
        .map(|a| Atom::new(a.relation.clone(), a.args.iter().map(|&v| map(v)).collect()))
        .collect()
}

/// Identifies all positive-unit variables with one fresh `t ∈ H ∩ M` and
/// drops the units.
pub fn elim_pos_units(fi: &FacetInstance) -> Result<Reduction<FacetInstance>> {
    let inst = &fi.base;
    let units: VarSet = inst
        .kb
        .atoms
        .iter()
        .filter(|a| unit_sign(&a.relation) == Some(true))
        .map(|a| a.args[0])
        .collect();
    if units.contains(&fi.query) {
        return Ok(Reduction::Resolved(false));
    }
    if units.is_empty() {
        return Ok(Reduction::Instance(fi.clone()));
    }
    let mut table = inst.vars.clone();
    let t = table.fresh("t");
    let kept: Vec<Atom> = inst
        .kb
        .atoms
        .iter()
        .filter(|a| unit_sign(&a.relation) != Some(true))
        .cloned()
        .collect();
    let map = |v: Var| if units.contains(&v) { t } else { v };
    let atoms = rename(&kept, map);
    let mut vars: VarSet = inst.kb.vars.iter().copied().filter(|v| !units.contains(v)).collect();
    vars.insert(t);
    let lift = |set: &VarSet| -> VarSet {
        let mut out: VarSet = set.iter().copied().filter(|v| !units.contains(v)).collect();
        out.insert(t);
        out
    };
    let base = AbductionInstance::new(
        table,
        Formula::with_vars(atoms, vars),
        lift(&inst.hypotheses),
        lift(&inst.manifestations),
    )?;
    Ok(Reduction::Instance(FacetInstance::new(base, fi.query)?))
}

/// `φ ∧ ⋀_{v ∈ V} (z → v) ∧ (x → m) ∧ (y → m)` where `KB = φ ∧ (¬z)` after
/// identifying all negative-unit variables with `z`, and
/// `V = var(φ) ∪ H ∪ M ∪ {x, y, m}`.
pub fn neg_unit_to_facet(inst: &AbductionInstance) -> Result<FacetInstance> {
    let negs: VarSet = inst
        .kb
        .atoms
        .iter()
        .filter(|a| unit_sign(&a.relation) == Some(false))
        .map(|a| a.args[0])
        .collect();
    let Some(&z) = negs.iter().next() else {
        return Err(Error::NoNegUnit);
    };
    let map = |v: Var| if negs.contains(&v) { z } else { v };
    let phi_atoms: Vec<Atom> = inst
        .kb
        .atoms
        .iter()
        .filter(|a| unit_sign(&a.relation) != Some(false))
        .cloned()
        .collect();
    let phi_atoms = rename(&phi_atoms, map);
    if let Some(a) = phi_atoms.iter().find(|a| !a.relation.contains(all_ones(a.relation.arity()))) {
        return Err(Error::NotOneValid(a.relation.name().to_string()));
    }
    let phi = Formula::new(phi_atoms);
    let hyp: VarSet = inst.hypotheses.iter().map(|&v| map(v)).collect();
    let man: VarSet = inst.manifestations.iter().map(|&v| map(v)).collect();

    let mut table = inst.vars.clone();
    let x = table.fresh("x");
    let y = table.fresh("y");
    let m = table.fresh("m");
    let mut scope: VarSet = phi.vars.clone();
    scope.extend(hyp.iter().chain(&man));
    scope.extend([x, y, m]);
    let mut atoms = phi.atoms.clone();
    atoms.extend(scope.iter().filter(|&&v| v != z).map(|&v| Atom::implication(z, v)));
    atoms.push(Atom::implication(x, m));
    atoms.push(Atom::implication(y, m));
    let mut vars = scope;
    vars.insert(z);
    let mut h2 = hyp;
    h2.extend([x, y]);
    let mut m2 = man;
    m2.insert(m);
    let base = AbductionInstance::new(table, Formula::with_vars(atoms, vars), h2, m2)?;
    FacetInstance::new(base, x)
}

fn all_ones(arity: usize) -> u64 {
    if arity >= 64 { u64::MAX } else { (1u64 << arity) - 1 }
}

/// `KB = ⋀_i ⋀_{x ∈ C_i} (x → c_i)`, `H = var(φ)`, `M = {c_i}`: explanations
/// are exactly the models of the positive 2-CNF `φ`.
pub fn pos2sat_to_div(vars: &VarTable, phi: &Formula, k: usize) -> Result<DivInstance> {
    let mut table = vars.clone();
    let mut atoms = Vec::new();
    let mut man = VarSet::new();
    for atom in &phi.atoms {
        let ok = matches!(atom.relation.kind(), RelationKind::Clause(s) if s.len() == 2 && s[0] && s[1]);
        if !ok {
            return Err(Error::NotPos2Cnf(format!("`{}` is not a positive 2-clause", atom.relation.name())));
        }
        if atom.args[0] == atom.args[1] {
            return Err(Error::NotPos2Cnf(format!(
                "clause repeats `{}`",
                vars.name(atom.args[0])
            )));
        }
        let c = table.fresh("c");
        man.insert(c);
        atoms.extend(atom.args.iter().map(|&v| Atom::implication(v, c)));
    }
    let kb = Formula::with_vars(atoms, phi.vars.iter().copied().chain(man.iter().copied()).collect());
    let base = AbductionInstance::new(table, kb, phi.vars.clone(), man)?;
    Ok(DivInstance { base, k })
}
