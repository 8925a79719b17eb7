//! Satisfiability and entailment for the tractable fragments, with an
//! exhaustive fallback.

mod brute;
mod twosat;
mod xor;

use std::fmt;

use crate::error::{Error, Fragment, Result};
use crate::lattice::{closed_under, PolyOp};
use crate::model::{evaluate, AbductionInstance, Assignment, Formula, Var, VarSet};
use crate::par::ExecMode;
use crate::propagate::Propagator;

pub use brute::brute_force;

/// Which solver `sat` should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Engine {
    #[default]
    Auto,
    Horn,
    DualHorn,
    TwoSat,
    Xor,
    Brute,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Auto => "AUTO",
            Engine::Horn => "HORN",
            Engine::DualHorn => "DUALHORN",
            Engine::TwoSat => "TWOSAT",
            Engine::Xor => "XOR",
            Engine::Brute => "BRUTE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SatConfig {
    /// Largest number of assignments the exhaustive engine may evaluate.
    pub budget: u64,
    pub mode: ExecMode,
}

impl Default for SatConfig {
    fn default() -> Self {
        SatConfig {
            budget: 1 << 22,
            mode: ExecMode::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SatStatus {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub status: SatStatus,
    /// Total on `var(f)` when satisfiable.
    pub model: Option<Assignment>,
    /// Engine that produced the answer.
    pub engine: Engine,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        self.status == SatStatus::Sat
    }

    fn sat(model: Assignment, engine: Engine) -> Self {
        SatResult { status: SatStatus::Sat, model: Some(model), engine }
    }

    fn unsat(engine: Engine) -> Self {
        SatResult { status: SatStatus::Unsat, model: None, engine }
    }
}

fn fragment_of(engine: Engine) -> Option<(Fragment, PolyOp)> {
    match engine {
        Engine::Horn => Some((Fragment::Horn, PolyOp::And2)),
        Engine::DualHorn => Some((Fragment::DualHorn, PolyOp::Or2)),
        Engine::TwoSat => Some((Fragment::TwoSat, PolyOp::Maj3)),
        Engine::Xor => Some((Fragment::Affine, PolyOp::Xor3)),
        Engine::Auto | Engine::Brute => None,
    }
}

/// Picks the first fragment engine whose closure property holds.
pub fn select_engine(f: &Formula) -> Engine {
    let rels = f.relations();
    let rels = || rels.iter().map(|r| r.as_ref());
    [Engine::Horn, Engine::DualHorn, Engine::TwoSat, Engine::Xor]
        .into_iter()
        .find(|&e| closed_under(rels(), fragment_of(e).unwrap().1))
        .unwrap_or(Engine::Brute)
}

fn check_fragment(f: &Formula, engine: Engine) -> Result<()> {
    if let Some((fragment, op)) = fragment_of(engine) {
        if let Some(bad) = f.relations().iter().find(|r| !closed_under([r.as_ref()], op)) {
            return Err(Error::wrong_fragment(
                fragment,
                format!("relation `{}` is not closed under {op:?}", bad.name()),
            ));
        }
    }
    Ok(())
}

/// Propagate, then give every unassigned variable `fill`. Sound for
/// languages closed under AND (`fill = false`) or OR (`fill = true`).
fn propagate_and_fill(f: &Formula, fill: bool, engine: Engine) -> SatResult {
    let mut p = Propagator::new(f);
    if !p.propagate_all() {
        return SatResult::unsat(engine);
    }
    let model = Assignment::from_pairs(f.vars.iter().map(|&v| (v, p.value(v).unwrap_or(fill))));
    debug_assert_eq!(evaluate(f, &model), Ok(true));
    SatResult::sat(model, engine)
}

pub fn sat(f: &Formula, hint: Engine) -> Result<SatResult> {
    sat_with(f, hint, &SatConfig::default())
}

pub fn sat_with(f: &Formula, hint: Engine, config: &SatConfig) -> Result<SatResult> {
    let engine = match hint {
        Engine::Auto => select_engine(f),
        e => {
            check_fragment(f, e)?;
            e
        }
    };
    Ok(match engine {
        Engine::Horn => propagate_and_fill(f, false, engine),
        Engine::DualHorn => propagate_and_fill(f, true, engine),
        Engine::TwoSat => twosat::solve(f),
        Engine::Xor => xor::solve(f),
        Engine::Brute => brute_force(f, config)?,
        Engine::Auto => unreachable!(),
    })
}

/// `f ⊨ m`.
pub fn entails(f: &Formula, m: Var) -> Result<bool> {
    entails_with(f, m, Engine::Auto, &SatConfig::default())
}

pub fn entails_with(f: &Formula, m: Var, hint: Engine, config: &SatConfig) -> Result<bool> {
    let g = f.with_units([(m, false)]);
    Ok(!sat_with(&g, hint, config)?.is_sat())
}

/// `KB ∧ E` is satisfiable and entails every manifestation.
pub fn verify_explanation(inst: &AbductionInstance, e: &VarSet) -> Result<bool> {
    verify_explanation_with(inst, e, &SatConfig::default())
}

pub fn verify_explanation_with(inst: &AbductionInstance, e: &VarSet, config: &SatConfig) -> Result<bool> {
    if !e.is_subset(&inst.hypotheses) {
        return Err(Error::NotSubsetOfH);
    }
    let f = inst.kb.with_units(e.iter().map(|&h| (h, true)));
    if !sat_with(&f, Engine::Auto, config)?.is_sat() {
        return Ok(false);
    }
    for &m in &inst.manifestations {
        if !entails_with(&f, m, Engine::Auto, config)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Clauses equivalent to a relation closed under majority: its unary and
/// binary projections.
pub(crate) fn bijunctive_clauses(r: usize, tuples: &[u64]) -> Vec<Vec<(usize, bool)>> {
    if tuples.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..r {
        let seen: [bool; 2] = [0, 1].map(|b| tuples.iter().any(|&t| (t >> i) & 1 == b));
        for b in 0..2 {
            if !seen[b as usize] {
                out.push(vec![(i, b == 0)]);
            }
        }
        for j in i + 1..r {
            for bits in 0..4u64 {
                let (bi, bj) = (bits & 1, bits >> 1);
                if !tuples.iter().any(|&t| (t >> i) & 1 == bi && (t >> j) & 1 == bj) {
                    out.push(vec![(i, bi == 0), (j, bj == 0)]);
                }
            }
        }
    }
    out
}
