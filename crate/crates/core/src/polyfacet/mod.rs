//! Polynomial IsFacet and relevance algorithms for the tractable fragments.

pub(crate) mod clusters;
mod imp;

use crate::error::{Error, Fragment, Result};
use crate::lattice::{profile_formula, LanguageProfile};
use crate::model::{AbductionInstance, Assignment, FacetInstance};
use crate::propagate::unit_propagate;

pub use clusters::{build_clusters, isfacet_affine2, isfacet_en, ClusterStructure};
pub use imp::{isfacet_dualhorn, isfacet_imp, isfacet_imp_traced, ImpAnalysis, ImpTrace};

/// Outcome of unit preprocessing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preprocessed {
    /// Unit-free instance with the forced values removed from `H` and `M`.
    Reduced { instance: FacetInstance, forced: Assignment },
    /// The query is decided without further work.
    Resolved(bool),
}

/// Propagates unit clauses and removes every forced variable from the instance.
pub fn preprocess_units(fi: &FacetInstance) -> Preprocessed {
    let base = &fi.base;
    let r = unit_propagate(&base.kb);
    if r.is_conflict() {
        return Preprocessed::Resolved(false);
    }
    let forced = r.forced;
    if forced.get(fi.query).is_some() || base.manifestations.iter().any(|&m| forced.get(m) == Some(false)) {
        return Preprocessed::Resolved(false);
    }
    let free = |set: &crate::model::VarSet| set.iter().copied().filter(|&v| forced.get(v).is_none()).collect();
    let instance = FacetInstance {
        base: AbductionInstance {
            vars: base.vars.clone(),
            kb: r.residual,
            hypotheses: free(&base.hypotheses),
            manifestations: free(&base.manifestations),
        },
        query: fi.query,
    };
    Preprocessed::Reduced { instance, forced }
}

fn require(fi: &FacetInstance, fragment: Fragment, ok: impl Fn(&LanguageProfile) -> bool) -> Result<()> {
    if ok(&profile_formula(&fi.base.kb)) {
        Ok(())
    } else {
        Err(Error::wrong_fragment(fragment, "knowledge base uses a relation outside the fragment"))
    }
}

/// Relevance of the query: the matching IsFacet algorithm without its
/// dispensability step.
pub fn relevance_poly(fi: &FacetInstance, fragment: Fragment) -> Result<bool> {
    match fragment {
        Fragment::Implication => imp::relevant_imp(fi),
        Fragment::DualHorn => imp::relevant_dualhorn(fi),
        Fragment::Affine2 => clusters::relevant_affine2(fi),
        Fragment::EssentiallyNegative => clusters::relevant_en(fi),
        other => Err(Error::wrong_fragment(other, "no polynomial relevance algorithm for this fragment")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InstanceBuilder;

    fn facet(b: &mut InstanceBuilder, x: &str) -> FacetInstance {
        let inst = b.build().unwrap();
        let q = inst.var(x).unwrap();
        FacetInstance::new(inst, q).unwrap()
    }

    #[test]
    fn negative_manifestation_resolves_false() {
        let mut b = InstanceBuilder::new();
        b.clause(&["-n"]).clause(&["-x", "y"]).hyp(&["x"]).man(&["n"]);
        assert_eq!(preprocess_units(&facet(&mut b, "x")), Preprocessed::Resolved(false));
    }

    #[test]
    fn forced_query_resolves_false() {
        let mut b = InstanceBuilder::new();
        b.clause(&["x"]).clause(&["-x", "m"]).hyp(&["x"]).man(&["m"]);
        assert_eq!(preprocess_units(&facet(&mut b, "x")), Preprocessed::Resolved(false));
    }

    #[test]
    fn unit_free_instance_is_unchanged() {
        let mut b = InstanceBuilder::new();
        b.clause(&["-x", "m"]).clause(&["-y", "m"]).hyp(&["x", "y"]).man(&["m"]);
        let fi = facet(&mut b, "x");
        match preprocess_units(&fi) {
            Preprocessed::Reduced { instance, forced } => {
                assert!(forced.is_empty());
                assert_eq!(instance.base.hypotheses, fi.base.hypotheses);
                assert_eq!(instance.base.manifestations, fi.base.manifestations);
                assert_eq!(instance.base.kb.atoms.len(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn forced_manifestation_is_dropped() {
        let mut b = InstanceBuilder::new();
        b.clause(&["y"]).clause(&["-y", "m"]).clause(&["-x", "n"]).hyp(&["x", "y"]).man(&["m", "n"]);
        let fi = facet(&mut b, "x");
        match preprocess_units(&fi) {
            Preprocessed::Reduced { instance, .. } => {
                assert_eq!(instance.base.names(&instance.base.hypotheses), vec!["x"]);
                assert_eq!(instance.base.names(&instance.base.manifestations), vec!["n"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn relevance_examples() {
        let mut b = InstanceBuilder::new();
        b.clause(&["-x", "m"]).clause(&["-y", "m"]).hyp(&["x", "y"]).man(&["m"]);
        assert!(relevance_poly(&facet(&mut b, "x"), Fragment::Implication).unwrap());
        let mut b = InstanceBuilder::new();
        b.clause(&["-x", "m"]).clause(&["-y", "m"]).hyp(&["x"]).man(&["m"]);
        assert!(relevance_poly(&facet(&mut b, "x"), Fragment::Implication).unwrap());
        let mut b = InstanceBuilder::new();
        b.clause(&["-y", "m"]).clause(&["-x", "z"]).hyp(&["x", "y"]).man(&["m"]);
        assert!(!relevance_poly(&facet(&mut b, "x"), Fragment::Implication).unwrap());
    }

    #[test]
    fn relevance_rejects_other_fragments() {
        let mut b = InstanceBuilder::new();
        b.clause(&["-x", "m"]).hyp(&["x"]).man(&["m"]);
        assert!(matches!(
            relevance_poly(&facet(&mut b, "x"), Fragment::Horn),
            Err(Error::WrongFragment { fragment: Fragment::Horn, .. })
        ));
    }
}
