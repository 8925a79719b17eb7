//! Div-ABD: pairs of explanations at large symmetric difference.

use crate::error::{Error, Fragment, Result};
use crate::lattice::profile_formula;
use crate::model::{distance, Assignment, DivInstance, VarSet};
use crate::oracle::{ExplanationSpace, OracleConfig};
use crate::polyfacet::build_clusters;
use crate::polyfacet::clusters::{cluster, Accept};
use crate::propagate::unit_propagate;

/// Two explanations and their distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiversityWitness {
    pub e1: VarSet,
    pub e2: VarSet,
    pub d: usize,
}

impl DiversityWitness {
    fn new(e1: VarSet, e2: VarSet) -> Self {
        let d = distance(&e1, &e2);
        DiversityWitness { e1, e2, d }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivOutcome {
    /// Two explanations at distance at least `k` exist.
    pub diverse: bool,
    /// A pair at maximum distance, present whenever an explanation exists.
    pub best: Option<DiversityWitness>,
}

impl DivOutcome {
    fn from_best(best: Option<DiversityWitness>, k: usize) -> Self {
        DivOutcome { diverse: best.as_ref().is_some_and(|w| w.d >= k), best }
    }
}

/// Exhaustive decision through the explanation oracle.
pub fn div_oracle(di: &DivInstance) -> Result<DivOutcome> {
    div_oracle_with(di, &OracleConfig::default())
}

pub fn div_oracle_with(di: &DivInstance, config: &OracleConfig) -> Result<DivOutcome> {
    let best = ExplanationSpace::compute(&di.base, config)?
        .max_diverse_pair(config)?
        .map(|p| DiversityWitness { e1: p.e1, e2: p.e2, d: p.d });
    Ok(DivOutcome::from_best(best, di.k))
}

/// Unit propagation shared by both constructions. `None` when no explanation
/// can exist; otherwise the forced values and the hypotheses forced true.
fn propagate(di: &DivInstance) -> Option<(crate::model::Formula, Assignment, VarSet)> {
    let base = &di.base;
    let r = unit_propagate(&base.kb);
    if r.is_conflict() || base.manifestations.iter().any(|&m| r.forced.get(m) == Some(false)) {
        return None;
    }
    let forced_true = base.hypotheses.iter().copied().filter(|&h| r.forced.get(h) == Some(true)).collect();
    Some((r.residual, r.forced, forced_true))
}

/// Splits the hypotheses of one manifestation class so that both parts
/// are non-empty and differ as much as possible.
fn split_required(hyps: &VarSet, e1: &mut VarSet, e2: &mut VarSet) {
    let mut it = hyps.iter().copied();
    let first = it.next().expect("manifestation class without hypothesis");
    e1.insert(first);
    let rest: Vec<_> = it.collect();
    if rest.is_empty() {
        e2.insert(first);
    } else {
        e2.extend(rest);
    }
}

/// Maximum-distance construction for units, equalities and binary parity
/// constraints.
pub fn div_affine2(di: &DivInstance) -> Result<DivOutcome> {
    if !profile_formula(&di.base.kb).affine2_form {
        return Err(Error::wrong_fragment(Fragment::Affine2, "knowledge base uses a relation outside the fragment"));
    }
    let Some((residual, forced, forced_true)) = propagate(di) else { return Ok(DivOutcome::from_best(None, di.k)) };
    let free = |v: &_| forced.get(*v).is_none();
    let hyps: VarSet = di.base.hypotheses.iter().filter(|v| free(v)).copied().collect();
    let mans: VarSet = di.base.manifestations.iter().filter(|v| free(v)).copied().collect();
    let s = match build_clusters(&residual, &mans) {
        Err(Error::UnsatStructure) => return Ok(DivOutcome::from_best(None, di.k)),
        r => r?,
    };
    let in_h = |c: usize| -> VarSet { s.classes[c].intersection(&hyps).copied().collect() };
    let m_ids: Vec<usize> = s.m_classes.iter().map(|&(c, _)| c).collect();
    let blocked = |c: usize| s.m_classes.iter().any(|&(m, p)| m == c || p == Some(c));
    if s.m_classes.iter().any(|&(c, p)| in_h(c).is_empty() || p.is_some_and(|p| m_ids.contains(&p))) {
        return Ok(DivOutcome::from_best(None, di.k));
    }
    let mut e1 = forced_true;
    let mut e2 = VarSet::new();
    for &c in &m_ids {
        split_required(&in_h(c), &mut e1, &mut e2);
    }
    for c in 0..s.classes.len() {
        if blocked(c) {
            continue;
        }
        match s.partner(c) {
            Some(p) if p < c => {}
            Some(p) => {
                let (a, b) = (in_h(c), in_h(p));
                let (large, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                e1.extend(large);
                e2.extend(small);
            }
            None => e1.extend(in_h(c)),
        }
    }
    Ok(DivOutcome::from_best(Some(DiversityWitness::new(e1, e2)), di.k))
}

/// Maximum-distance construction for positive clauses, negative units and
/// equalities.
pub fn div_ep(di: &DivInstance) -> Result<DivOutcome> {
    if !profile_formula(&di.base.kb).ep_form {
        return Err(Error::wrong_fragment(
            Fragment::EssentiallyPositive,
            "knowledge base uses a relation outside the fragment",
        ));
    }
    let Some((residual, forced, forced_true)) = propagate(di) else { return Ok(DivOutcome::from_best(None, di.k)) };
    let free = |v: &_| forced.get(*v).is_none();
    let hyps: VarSet = di.base.hypotheses.iter().filter(|v| free(v)).copied().collect();
    let mans: VarSet = di.base.manifestations.iter().filter(|v| free(v)).copied().collect();
    let (s, positive) = cluster(&residual, &mans, Accept::EssentiallyPositive)?;
    // a class containing a whole positive clause cannot be false
    let mut entailed = vec![false; s.classes.len()];
    for c in &positive {
        let k = s.class_of(c[0]).unwrap();
        if c.iter().all(|&v| s.class_of(v) == Some(k)) {
            entailed[k] = true;
        }
    }
    let in_h = |c: usize| -> VarSet { s.classes[c].intersection(&hyps).copied().collect() };
    let required: Vec<usize> = s.m_classes.iter().map(|&(c, _)| c).filter(|&c| !entailed[c]).collect();
    if required.iter().any(|&c| in_h(c).is_empty()) {
        return Ok(DivOutcome::from_best(None, di.k));
    }
    let mut e1 = forced_true;
    let mut e2 = VarSet::new();
    for c in 0..s.classes.len() {
        if required.contains(&c) {
            split_required(&in_h(c), &mut e1, &mut e2);
        } else {
            e1.extend(in_h(c));
        }
    }
    Ok(DivOutcome::from_best(Some(DiversityWitness::new(e1, e2)), di.k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::verify_explanation;
    use crate::model::InstanceBuilder;
    use crate::parse::parse_instance;

    fn div(b: &mut InstanceBuilder, k: usize) -> DivInstance {
        DivInstance { base: b.build().unwrap(), k }
    }

    fn sailing(k: usize) -> DivInstance {
        let base = parse_instance("clause -w r\nclause -w -c n\nclause -w -s n\nhyp w c s r\nman n\n")
            .unwrap()
            .into_base();
        DivInstance { base, k }
    }

    fn valid(di: &DivInstance, w: &DiversityWitness) -> bool {
        verify_explanation(&di.base, &w.e1).unwrap()
            && verify_explanation(&di.base, &w.e2).unwrap()
            && w.d == distance(&w.e1, &w.e2)
    }

    #[test]
    fn oracle_on_sailing() {
        let r = div_oracle(&sailing(3)).unwrap();
        assert!(r.diverse);
        assert_eq!(r.best.unwrap().d, 3);
        assert!(!div_oracle(&sailing(4)).unwrap().diverse);
        assert!(div_oracle(&sailing(0)).unwrap().diverse);
    }

    #[test]
    fn affine2_examples() {
        let mut b = InstanceBuilder::new();
        b.eq("x", "m").eq("z", "m").hyp(&["x", "z"]).man(&["m"]);
        let di = div(&mut b, 2);
        let r = div_affine2(&di).unwrap();
        assert!(r.diverse);
        let w = r.best.unwrap();
        assert!(valid(&di, &w));
        assert_eq!(w.d, 2);

        let mut b = InstanceBuilder::new();
        b.eq("x", "m").hyp(&["x"]).man(&["m"]);
        assert!(!div_affine2(&div(&mut b, 1)).unwrap().diverse);

        let mut b = InstanceBuilder::new();
        b.eq("x", "m").eq("y", "y").hyp(&["x", "y"]).man(&["m"]);
        let r = div_affine2(&div(&mut b, 2)).unwrap();
        assert!(!r.diverse);
        assert_eq!(r.best.unwrap().d, 1);
    }

    #[test]
    fn affine2_cluster_sides() {
        let mut b = InstanceBuilder::new();
        b.eq("x", "m").xor(&["a", "b"], true).eq("c", "a").hyp(&["x", "a", "b", "c"]).man(&["m"]);
        let di = div(&mut b, 3);
        let w = div_affine2(&di).unwrap().best.unwrap();
        assert!(valid(&di, &w));
        assert_eq!(w.d, 3);
        assert_eq!(div_oracle(&di).unwrap().best.unwrap().d, 3);
    }

    #[test]
    fn ep_examples() {
        let mut b = InstanceBuilder::new();
        b.eq("a", "m").eq("b", "m").hyp(&["a", "b"]).man(&["m"]);
        let di = div(&mut b, 2);
        let r = div_ep(&di).unwrap();
        assert!(r.diverse);
        assert!(valid(&di, r.best.as_ref().unwrap()));

        let mut b = InstanceBuilder::new();
        b.clause(&["a", "b"]).eq("a", "m").hyp(&["a"]).man(&["m"]);
        assert!(!div_ep(&div(&mut b, 1)).unwrap().diverse);

        let mut b = InstanceBuilder::new();
        b.clause(&["-a"]).eq("a", "m").hyp(&["a"]).man(&["m"]);
        let r = div_ep(&div(&mut b, 0)).unwrap();
        assert!(!r.diverse);
        assert_eq!(r.best, None);
    }

    #[test]
    fn ep_entailed_class() {
        let mut b = InstanceBuilder::new();
        b.clause(&["a", "m"]).eq("a", "m").hyp(&["a"]).man(&["m"]);
        let di = div(&mut b, 1);
        let r = div_ep(&di).unwrap();
        assert!(r.diverse);
        assert!(valid(&di, r.best.as_ref().unwrap()));
    }

    #[test]
    fn wrong_fragment() {
        assert!(matches!(div_affine2(&sailing(1)), Err(Error::WrongFragment { .. })));
        assert!(matches!(div_ep(&sailing(1)), Err(Error::WrongFragment { .. })));
    }
}
