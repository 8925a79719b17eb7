//! Polymorphism closure, language profiles and the complexity verdict table.

use std::fmt;
use std::sync::Arc;

use crate::model::{Formula, Relation, RelationKind};

/// Operations used to place a language in Post's lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolyOp {
    Const0,
    Const1,
    Not,
    And2,
    Or2,
    Maj3,
    Xor3,
}

impl PolyOp {
    pub const ALL: [PolyOp; 7] = [
        PolyOp::Const0,
        PolyOp::Const1,
        PolyOp::Not,
        PolyOp::And2,
        PolyOp::Or2,
        PolyOp::Maj3,
        PolyOp::Xor3,
    ];

    pub fn arity(self) -> usize {
        match self {
            PolyOp::Const0 | PolyOp::Const1 => 0,
            PolyOp::Not => 1,
            PolyOp::And2 | PolyOp::Or2 => 2,
            PolyOp::Maj3 | PolyOp::Xor3 => 3,
        }
    }

    /// Applies the operation coordinate-wise to packed tuples of width `arity`.
    pub fn apply(self, args: &[u64], arity: usize) -> u64 {
        let mask = if arity >= 64 { u64::MAX } else { (1u64 << arity) - 1 };
        match self {
            PolyOp::Const0 => 0,
            PolyOp::Const1 => mask,
            PolyOp::Not => !args[0] & mask,
            PolyOp::And2 => args[0] & args[1],
            PolyOp::Or2 => args[0] | args[1],
            PolyOp::Maj3 => (args[0] & args[1]) | (args[0] & args[2]) | (args[1] & args[2]),
            PolyOp::Xor3 => args[0] ^ args[1] ^ args[2],
        }
    }
}

/// Exhaustive check over all `t^a` tuple combinations.
pub fn closed_under_exhaustive(rel: &Relation, op: PolyOp) -> bool {
    let tuples = rel.tuples();
    let r = rel.arity();
    match op.arity() {
        0 => rel.contains(op.apply(&[], r)),
        1 => tuples.iter().all(|&a| rel.contains(op.apply(&[a], r))),
        2 => tuples
            .iter()
            .all(|&a| tuples.iter().all(|&b| rel.contains(op.apply(&[a, b], r)))),
        _ => tuples.iter().all(|&a| {
            tuples
                .iter()
                .all(|&b| tuples.iter().all(|&c| rel.contains(op.apply(&[a, b, c], r))))
        }),
    }
}

/// Whether `rel` is closed under `op`. Syntactic kinds are decided by their
/// known characterisation, tables exhaustively.
pub fn relation_closed_under(rel: &Relation, op: PolyOp) -> bool {
    let r = rel.arity();
    match rel.kind() {
        RelationKind::Table(_) => closed_under_exhaustive(rel, op),
        RelationKind::Equality => true,
        RelationKind::Unit(s) => match op {
            PolyOp::Const0 => !s,
            PolyOp::Const1 => *s,
            PolyOp::Not => false,
            _ => true,
        },
        // arity 0 is the empty disjunction
        RelationKind::Clause(_) if r == 0 => op.arity() > 0,
        RelationKind::Clause(signs) => {
            let pos = signs.iter().filter(|&&s| s).count();
            let neg = r - pos;
            match op {
                PolyOp::Const0 => neg > 0,
                PolyOp::Const1 => pos > 0,
                PolyOp::Not => false,
                PolyOp::And2 => pos <= 1,
                PolyOp::Or2 => neg <= 1,
                PolyOp::Maj3 => r <= 2,
                PolyOp::Xor3 => r <= 1,
            }
        }
        RelationKind::Xor(parity) => {
            let empty = r == 0 && *parity;
            match op {
                PolyOp::Const0 => !parity,
                PolyOp::Const1 => *parity == (r % 2 == 1),
                PolyOp::Not => empty || r.is_multiple_of(2),
                PolyOp::And2 | PolyOp::Or2 => r <= 1 || (r == 2 && !parity),
                PolyOp::Maj3 => r <= 2,
                PolyOp::Xor3 => true,
            }
        }
    }
}

/// Every relation is closed under `op`.
pub fn closed_under<'a>(rels: impl IntoIterator<Item = &'a Relation>, op: PolyOp) -> bool {
    rels.into_iter().all(|r| relation_closed_under(r, op))
}

/// Semantic flags and syntactic tags of a language.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LanguageProfile {
    pub zero_valid: bool,
    pub one_valid: bool,
    pub complementive: bool,
    pub horn: bool,
    pub dualhorn: bool,
    pub bijunctive: bool,
    pub affine: bool,

    pub all_implication: bool,
    pub en_form: bool,
    pub ep_form: bool,
    pub affine2_form: bool,
    pub has_pos_unit: bool,
    pub has_neg_unit: bool,
    /// Some clause `(x_1 ∧ … ∧ x_n → y)` with `n ≥ 2`.
    pub has_ie_clause: bool,
    pub max_arity: usize,
}

impl LanguageProfile {
    pub fn is_schaefer(&self) -> bool {
        self.horn || self.dualhorn || self.bijunctive || self.affine
    }
}

fn is_implication(rel: &Relation) -> bool {
    matches!(rel.kind(), RelationKind::Clause(s) if s.len() == 2 && s[0] != s[1])
}

pub fn profile<'a>(rels: impl IntoIterator<Item = &'a Relation> + Clone) -> LanguageProfile {
    let all = |p: &dyn Fn(&Relation) -> bool| rels.clone().into_iter().all(p);
    let any = |p: &dyn Fn(&Relation) -> bool| rels.clone().into_iter().any(p);
    let closed = |op| closed_under(rels.clone(), op);
    LanguageProfile {
        zero_valid: closed(PolyOp::Const0),
        one_valid: closed(PolyOp::Const1),
        complementive: closed(PolyOp::Not),
        horn: closed(PolyOp::And2),
        dualhorn: closed(PolyOp::Or2),
        bijunctive: closed(PolyOp::Maj3),
        affine: closed(PolyOp::Xor3),
        all_implication: all(&is_implication),
        en_form: all(&|r| match r.kind() {
            RelationKind::Clause(s) => s.iter().all(|&b| !b),
            RelationKind::Unit(_) | RelationKind::Equality => true,
            _ => false,
        }),
        ep_form: all(&|r| match r.kind() {
            RelationKind::Clause(s) => s.iter().all(|&b| b),
            RelationKind::Unit(_) | RelationKind::Equality => true,
            _ => false,
        }),
        affine2_form: all(&|r| match r.kind() {
            RelationKind::Unit(_) | RelationKind::Equality => true,
            RelationKind::Xor(_) => r.arity() <= 2,
            _ => false,
        }),
        has_pos_unit: any(&|r| matches!(r.kind(), RelationKind::Unit(true))),
        has_neg_unit: any(&|r| matches!(r.kind(), RelationKind::Unit(false))),
        has_ie_clause: any(&|r| match r.kind() {
            RelationKind::Clause(s) => {
                s.iter().filter(|&&b| b).count() == 1 && s.len() >= 3
            }
            _ => false,
        }),
        max_arity: rels.clone().into_iter().map(Relation::arity).max().unwrap_or(0),
    }
}

/// Profile of the relations occurring in `f`.
pub fn profile_formula(f: &Formula) -> LanguageProfile {
    let rels: Vec<Arc<Relation>> = f.relations();
    profile(rels.iter().map(|r| r.as_ref()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Abd,
    IsFacet,
    Relevance,
    DivAbd,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Abd => "ABD",
            Problem::IsFacet => "ISFACET",
            Problem::Relevance => "RELEVANCE",
            Problem::DivAbd => "DIVABD",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Complexity {
    P,
    NpComplete,
    Sigma2pComplete,
    Open,
    Unknown,
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Complexity::P => "P",
            Complexity::NpComplete => "NP_COMPLETE",
            Complexity::Sigma2pComplete => "SIGMA2P_COMPLETE",
            Complexity::Open => "OPEN_PAPER",
            Complexity::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityVerdict {
    pub problem: Problem,
    pub verdict: Complexity,
    pub justification: Vec<&'static str>,
}

fn v(problem: Problem, verdict: Complexity, justification: Vec<&'static str>) -> ComplexityVerdict {
    ComplexityVerdict { problem, verdict, justification }
}

/// First matching rule of the verdict table.
pub fn verdict(p: &LanguageProfile, problem: Problem) -> ComplexityVerdict {
    match problem {
        Problem::IsFacet | Problem::Relevance => facet_verdict(p, problem),
        Problem::DivAbd => div_verdict(p),
        Problem::Abd => abd_verdict(p),
    }
}

fn facet_verdict(p: &LanguageProfile, problem: Problem) -> ComplexityVerdict {
    let relevance = problem == Problem::Relevance;
    let mut why = Vec::new();
    if p.en_form {
        why.push("isfacet-en-poly");
    }
    if p.dualhorn {
        why.extend(["unit-elimination", "isfacet-dualhorn-poly"]);
    }
    if p.affine2_form {
        why.push("isfacet-affine2-poly");
    }
    if p.all_implication {
        why.push("isfacet-implication-poly");
    }
    if !why.is_empty() {
        why.push("efpp-substitution");
        if relevance {
            why.push("relevance-drops-dispensability");
        }
        return v(problem, Complexity::P, why);
    }
    let with_rel = |mut w: Vec<&'static str>| {
        if relevance {
            w.push("relevance-carries-over");
        }
        w
    };
    if p.affine && p.one_valid {
        return v(
            problem,
            Complexity::Open,
            with_rel(vec!["open-even-affine", "parity-length-wording-differs", "facet-in-np"]),
        );
    }
    if p.horn && p.has_ie_clause {
        return v(
            problem,
            Complexity::NpComplete,
            with_rel(vec!["ie-hardness", "facet-in-np", "equality-expressible"]),
        );
    }
    if p.bijunctive && !p.horn && !p.dualhorn && !p.affine {
        return v(
            problem,
            Complexity::NpComplete,
            with_rel(vec!["abd-to-isfacet", "facet-in-np", "equality-expressible"]),
        );
    }
    if !p.is_schaefer() {
        return v(
            problem,
            Complexity::Sigma2pComplete,
            with_rel(vec!["in-hardness", "facet-in-sigma2p", "equality-expressible"]),
        );
    }
    v(problem, Complexity::Unknown, Vec::new())
}

fn div_verdict(p: &LanguageProfile) -> ComplexityVerdict {
    let problem = Problem::DivAbd;
    if p.affine2_form || p.ep_form {
        return v(problem, Complexity::P, vec!["div-affine2-ep-poly"]);
    }
    if p.all_implication {
        return v(problem, Complexity::NpComplete, vec!["div-pos2sat-hardness", "div-in-np"]);
    }
    if !p.is_schaefer() {
        return v(
            problem,
            Complexity::Sigma2pComplete,
            vec!["div-in-hardness", "equality-expressible"],
        );
    }
    v(problem, Complexity::Unknown, Vec::new())
}

fn abd_verdict(p: &LanguageProfile) -> ComplexityVerdict {
    let problem = Problem::Abd;
    if p.dualhorn {
        return v(problem, Complexity::P, vec!["abd-dualhorn-poly"]);
    }
    if p.en_form {
        return v(problem, Complexity::P, vec!["abd-en-poly"]);
    }
    if p.horn && p.has_ie_clause && p.has_pos_unit && p.has_neg_unit {
        return v(problem, Complexity::NpComplete, vec!["abd-horn-np"]);
    }
    if !p.is_schaefer() && !p.zero_valid && !p.one_valid && !p.complementive {
        return v(problem, Complexity::Sigma2pComplete, vec!["abd-general-sigma2p"]);
    }
    v(problem, Complexity::Unknown, Vec::new())
}
