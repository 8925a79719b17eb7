//! IsFacet for implications and unit-free dualHorn knowledge bases, where a
//! single hypothesis always suffices to entail a manifestation.

use std::collections::BTreeMap;

use super::{preprocess_units, require, Preprocessed};
use crate::error::{Fragment, Result};
use crate::model::{AbductionInstance, FacetInstance, Var, VarSet};
use crate::propagate::Propagator;

/// `h(m)` for every manifestation and the set `M_x` explained by `x` alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpAnalysis {
    /// Hypotheses `h` with `KB ∧ h ⊨ m`, for every `m` not already entailed by `KB`.
    pub h_map: BTreeMap<Var, VarSet>,
    pub m_x: VarSet,
    /// Manifestations entailed by the knowledge base alone.
    pub entailed: VarSet,
}

impl ImpAnalysis {
    /// Requires a satisfiable knowledge base closed under disjunction.
    pub fn compute(inst: &AbductionInstance, x: Var) -> Self {
        let mut p = Propagator::new(&inst.kb);
        p.propagate_all();
        let start = p.trail_len();
        let mut h_map = BTreeMap::new();
        let mut entailed = VarSet::new();
        for &m in &inst.manifestations {
            if p.value(m) == Some(true) || !p.assign(m, false) {
                entailed.insert(m);
            } else {
                let h: VarSet = p.trail()[start..]
                    .iter()
                    .copied()
                    .filter(|&v| p.value(v) == Some(false) && inst.hypotheses.contains(&v))
                    .collect();
                h_map.insert(m, h);
            }
            p.backtrack(start);
        }
        let m_x = h_map.iter().filter(|(_, h)| h.contains(&x)).map(|(&m, _)| m).collect();
        ImpAnalysis { h_map, m_x, entailed }
    }

    /// `KB ∧ E ⊨ m` for a non-empty `E`.
    fn explains(&self, e: &VarSet, m: Var) -> bool {
        self.h_map.get(&m).is_none_or(|h| !e.is_disjoint(h))
    }
}

/// Record of one run of the implication algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpTrace {
    pub analysis: ImpAnalysis,
    /// Last explanation found in which `x` is indispensable.
    pub candidate: Option<VarSet>,
    /// Some explanation avoids `x`.
    pub dispensable: bool,
    pub answer: bool,
}

fn run(inst: &AbductionInstance, x: Var) -> ImpTrace {
    let analysis = ImpAnalysis::compute(inst, x);
    let others: Vec<&VarSet> = analysis
        .h_map
        .iter()
        .filter(|(m, _)| !analysis.m_x.contains(m))
        .map(|(_, h)| h)
        .collect();
    let mut last = None;
    for m in &analysis.m_x {
        let hm = &analysis.h_map[m];
        // H ∖ h(m) meets h(m') exactly when h(m') ⊄ h(m)
        if others.iter().all(|h| !h.is_subset(hm)) {
            last = Some(*m);
        }
    }
    let candidate = last.map(|m| {
        let hm = &analysis.h_map[&m];
        let mut e: VarSet = inst.hypotheses.difference(hm).copied().collect();
        e.insert(x);
        e
    });
    debug_assert!(candidate
        .as_ref()
        .is_none_or(|e| inst.manifestations.iter().all(|&m| analysis.explains(e, m))));
    let dispensable = analysis.h_map.values().all(|h| h.iter().any(|&v| v != x));
    let answer = candidate.is_some() && dispensable;
    ImpTrace { analysis, candidate, dispensable, answer }
}

fn check_imp(fi: &FacetInstance) -> Result<()> {
    require(fi, Fragment::Implication, |p| p.all_implication)
}

/// IsFacet for knowledge bases of binary implications.
pub fn isfacet_imp(fi: &FacetInstance) -> Result<bool> {
    Ok(isfacet_imp_traced(fi)?.answer)
}

pub fn isfacet_imp_traced(fi: &FacetInstance) -> Result<ImpTrace> {
    check_imp(fi)?;
    Ok(run(&fi.base, fi.query))
}

pub(super) fn relevant_imp(fi: &FacetInstance) -> Result<bool> {
    check_imp(fi)?;
    Ok(run(&fi.base, fi.query).candidate.is_some())
}

fn reduced_dualhorn(fi: &FacetInstance) -> Result<Option<ImpTrace>> {
    require(fi, Fragment::DualHorn, |p| p.dualhorn)?;
    Ok(match preprocess_units(fi) {
        Preprocessed::Resolved(_) => None,
        Preprocessed::Reduced { instance, .. } => Some(run(&instance.base, instance.query)),
    })
}

/// IsFacet for knowledge bases closed under disjunction.
pub fn isfacet_dualhorn(fi: &FacetInstance) -> Result<bool> {
    Ok(reduced_dualhorn(fi)?.is_some_and(|t| t.answer))
}

pub(super) fn relevant_dualhorn(fi: &FacetInstance) -> Result<bool> {
    Ok(reduced_dualhorn(fi)?.is_some_and(|t| t.candidate.is_some()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::InstanceBuilder;
    use crate::parse::parse_instance;

    fn facet(b: &mut InstanceBuilder, x: &str) -> FacetInstance {
        let inst = b.build().unwrap();
        let q = inst.var(x).unwrap();
        FacetInstance::new(inst, q).unwrap()
    }

    #[test]
    fn two_alternatives_make_a_facet() {
        let mut b = InstanceBuilder::new();
        b.clause(&["-x", "m"]).clause(&["-y", "m"]).hyp(&["x", "y"]).man(&["m"]);
        let t = isfacet_imp_traced(&facet(&mut b, "x")).unwrap();
        assert!(t.answer);
        assert_eq!(t.analysis.m_x.len(), 1);
    }

    #[test]
    fn necessary_hypothesis_is_not_a_facet() {
        let mut b = InstanceBuilder::new();
        b.clause(&["-x", "m"]).hyp(&["x"]).man(&["m"]);
        assert!(!isfacet_imp(&facet(&mut b, "x")).unwrap());
        let mut b = InstanceBuilder::new();
        b.clause(&["-x", "m"]).clause(&["-y", "m"]).hyp(&["x"]).man(&["m"]);
        assert!(!isfacet_imp(&facet(&mut b, "x")).unwrap());
    }

    #[test]
    fn chains_reach_through_non_hypotheses() {
        let mut b = InstanceBuilder::new();
        b.clause(&["-x", "u"]).clause(&["-u", "m"]).clause(&["-y", "m"]).hyp(&["x", "y"]).man(&["m"]);
        let fi = facet(&mut b, "x");
        let t = isfacet_imp_traced(&fi).unwrap();
        let m = fi.base.var("m").unwrap();
        assert_eq!(fi.base.names(&t.analysis.h_map[&m]), vec!["x", "y"]);
        assert!(t.answer);
    }

    #[test]
    fn imp_rejects_other_atoms() {
        let mut b = InstanceBuilder::new();
        b.clause(&["x", "m"]).hyp(&["x"]).man(&["m"]);
        assert!(matches!(
            isfacet_imp(&facet(&mut b, "x")),
            Err(Error::WrongFragment { fragment: Fragment::Implication, .. })
        ));
    }

    #[test]
    fn dualhorn_positive_clause() {
        let mut b = InstanceBuilder::new();
        b.clause(&["-w", "c", "s"]).clause(&["-c", "m"]).clause(&["-s", "m"]).hyp(&["c", "s"]).man(&["m"]);
        assert!(isfacet_dualhorn(&facet(&mut b, "c")).unwrap());
    }

    #[test]
    fn dualhorn_rejects_sailing() {
        let text = "clause -w r\nclause -w -c n\nclause -w -s n\nhyp w c s r\nman n\nquery c\n";
        let Ok(crate::parse::Parsed::Facet(fi)) = parse_instance(text) else { panic!() };
        assert!(matches!(
            isfacet_dualhorn(&fi),
            Err(Error::WrongFragment { fragment: Fragment::DualHorn, .. })
        ));
    }

    #[test]
    fn dualhorn_forced_query() {
        let mut b = InstanceBuilder::new();
        b.clause(&["x"]).clause(&["-x", "m"]).hyp(&["x"]).man(&["m"]);
        assert!(!isfacet_dualhorn(&facet(&mut b, "x")).unwrap());
    }

    #[test]
    fn entailed_manifestation_needs_no_hypothesis() {
        let mut b = InstanceBuilder::new();
        b.clause(&["m", "a"]).clause(&["m", "-a"]).clause(&["-x", "n"]).clause(&["-y", "n"]);
        b.hyp(&["x", "y"]).man(&["m", "n"]);
        let fi = facet(&mut b, "x");
        assert!(isfacet_dualhorn(&fi).unwrap());
        let t = reduced_dualhorn(&fi).unwrap().unwrap();
        assert_eq!(t.analysis.entailed.len(), 1);
    }
}
