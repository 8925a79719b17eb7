//! Equivalence classes and clusters for 2-affine and essentially negative
//! knowledge bases.

use std::collections::BTreeMap;

use super::{preprocess_units, require, Preprocessed};
use crate::error::{Error, Fragment, Result};
use crate::model::{FacetInstance, Formula, Var, VarSet};
use crate::propagate::{normalize, Cons};

/// Union-find storing each variable's parity relative to its parent.
struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityUnionFind {
    fn new(n: usize) -> Self {
        ParityUnionFind { parent: (0..n).collect(), parity: vec![false; n] }
    }

    fn find(&mut self, v: usize) -> (usize, bool) {
        let mut path = Vec::new();
        let mut cur = v;
        while self.parent[cur] != cur {
            path.push(cur);
            cur = self.parent[cur];
        }
        let root = cur;
        // compress from the top so each parity is relative to the root
        for &u in path.iter().rev() {
            let p = self.parent[u];
            if p != root {
                self.parity[u] ^= self.parity[p];
            }
            self.parent[u] = root;
        }
        (root, if v == root { false } else { self.parity[v] })
    }

    /// Records `a ⊕ b = p`; `false` on contradiction.
    fn union(&mut self, a: usize, b: usize, p: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == p;
        }
        self.parent[rb] = ra;
        self.parity[rb] = pa ^ pb ^ p;
        true
    }
}

/// Classes of variables forced equal, paired into clusters of classes forced
/// opposite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterStructure {
    pub classes: Vec<VarSet>,
    /// Pairs of class indices, smaller index first.
    pub pairing: Vec<(usize, usize)>,
    /// Classes meeting the manifestations, each with its partner class.
    pub m_classes: Vec<(usize, Option<usize>)>,
    class_of: BTreeMap<Var, usize>,
}

impl ClusterStructure {
    pub fn class_of(&self, v: Var) -> Option<usize> {
        self.class_of.get(&v).copied()
    }

    pub fn partner(&self, c: usize) -> Option<usize> {
        self.pairing.iter().find_map(|&(a, b)| {
            if a == c {
                Some(b)
            } else if b == c {
                Some(a)
            } else {
                None
            }
        })
    }

    fn is_m_class(&self, c: usize) -> bool {
        self.m_classes.iter().any(|&(m, _)| m == c)
    }

    /// Some explanation exists: every manifestation class holds a hypothesis
    /// and no two manifestation classes are opposite.
    fn explainable(&self, h: &VarSet) -> bool {
        self.m_classes.iter().all(|&(c, partner)| {
            !self.classes[c].is_disjoint(h) && partner.is_none_or(|p| !self.is_m_class(p))
        })
    }

    fn decide(&self, h: &VarSet, x: Var, dispensability: bool) -> bool {
        let Some(cx) = self.class_of(x) else { return false };
        if !self.explainable(h) || !self.is_m_class(cx) {
            return false;
        }
        !dispensability || self.classes[cx].iter().any(|&v| v != x && h.contains(&v))
    }
}

/// Residual constraints accepted by [`cluster`].
pub(crate) enum Accept {
    Affine2,
    EssentiallyNegative,
    EssentiallyPositive,
}

/// Returns the structure and, for EN and EP residuals, the clauses as
/// variable lists.
pub(crate) fn cluster(f: &Formula, manifestations: &VarSet, accept: Accept) -> Result<(ClusterStructure, Vec<Vec<Var>>)> {
    let fragment = match accept {
        Accept::Affine2 => Fragment::Affine2,
        Accept::EssentiallyNegative => Fragment::EssentiallyNegative,
        Accept::EssentiallyPositive => Fragment::EssentiallyPositive,
    };
    let clause_sign = match accept {
        Accept::Affine2 => None,
        Accept::EssentiallyNegative => Some(false),
        Accept::EssentiallyPositive => Some(true),
    };
    let bound = f.var_bound().max(manifestations.iter().next_back().map_or(0, |v| v.index() + 1));
    let mut uf = ParityUnionFind::new(bound);
    let mut clauses = Vec::new();
    for atom in &f.atoms {
        let Some(c) = normalize(atom) else { continue };
        let edge = match c {
            Cons::False => return Err(Error::UnsatStructure),
            Cons::Xor(vs, p) if vs.len() == 2 && (!p || matches!(accept, Accept::Affine2)) => (vs[0], vs[1], p),
            Cons::Table(vs, t) if vs.len() == 2 && t == [0b00, 0b11] => (vs[0], vs[1], false),
            Cons::Table(vs, t) if vs.len() == 2 && t == [0b01, 0b10] && matches!(accept, Accept::Affine2) => {
                (vs[0], vs[1], true)
            }
            Cons::Clause(lits) if lits.len() >= 2 && lits.iter().all(|l| Some(l.1) == clause_sign) => {
                clauses.push(lits.into_iter().map(|l| l.0).collect());
                continue;
            }
            _ => {
                return Err(Error::wrong_fragment(
                    fragment,
                    format!("atom over `{}` is not allowed in a unit-free residual", atom.relation.name()),
                ))
            }
        };
        if !uf.union(edge.0.index(), edge.1.index(), edge.2) {
            return Err(Error::UnsatStructure);
        }
    }
    let mut key_to_class: BTreeMap<(usize, bool), usize> = BTreeMap::new();
    let mut classes: Vec<VarSet> = Vec::new();
    let mut class_of = BTreeMap::new();
    for &v in f.vars.iter().chain(manifestations.iter()) {
        if class_of.contains_key(&v) {
            continue;
        }
        let key = uf.find(v.index());
        let c = *key_to_class.entry(key).or_insert_with(|| {
            classes.push(VarSet::new());
            classes.len() - 1
        });
        classes[c].insert(v);
        class_of.insert(v, c);
    }
    let mut pairing: Vec<(usize, usize)> = key_to_class
        .iter()
        .filter(|&(&(root, side), _)| !side && key_to_class.contains_key(&(root, true)))
        .map(|(&(root, _), &c)| {
            let d = key_to_class[&(root, true)];
            (c.min(d), c.max(d))
        })
        .collect();
    pairing.sort_unstable();
    let mut s = ClusterStructure { classes, pairing, m_classes: Vec::new(), class_of };
    let mut m_ids: Vec<usize> = manifestations.iter().map(|&m| s.class_of[&m]).collect();
    m_ids.sort_unstable();
    m_ids.dedup();
    s.m_classes = m_ids.into_iter().map(|c| (c, s.partner(c))).collect();
    Ok((s, clauses))
}

/// Classes and clusters of a unit-free 2-affine formula.
pub fn build_clusters(f: &Formula, manifestations: &VarSet) -> Result<ClusterStructure> {
    Ok(cluster(f, manifestations, Accept::Affine2)?.0)
}

fn affine2(fi: &FacetInstance, dispensability: bool) -> Result<bool> {
    require(fi, Fragment::Affine2, |p| p.affine2_form)?;
    let Preprocessed::Reduced { instance, .. } = preprocess_units(fi) else { return Ok(false) };
    let base = &instance.base;
    match build_clusters(&base.kb, &base.manifestations) {
        Err(Error::UnsatStructure) => Ok(false),
        Err(e) => Err(e),
        Ok(s) => Ok(s.decide(&base.hypotheses, instance.query, dispensability)),
    }
}

/// IsFacet for knowledge bases of units, equalities and binary parity
/// constraints.
pub fn isfacet_affine2(fi: &FacetInstance) -> Result<bool> {
    affine2(fi, true)
}

pub(super) fn relevant_affine2(fi: &FacetInstance) -> Result<bool> {
    affine2(fi, false)
}

fn en(fi: &FacetInstance, dispensability: bool) -> Result<bool> {
    require(fi, Fragment::EssentiallyNegative, |p| p.en_form)?;
    let Preprocessed::Reduced { instance, .. } = preprocess_units(fi) else { return Ok(false) };
    let base = &instance.base;
    let (s, negative) = cluster(&base.kb, &base.manifestations, Accept::EssentiallyNegative)?;
    // setting every manifestation class true must leave each negative clause a false literal
    let violated = negative.iter().any(|c| c.iter().all(|&v| s.class_of(v).is_some_and(|k| s.is_m_class(k))));
    Ok(!violated && s.decide(&base.hypotheses, instance.query, dispensability))
}

/// IsFacet for knowledge bases of negative clauses, positive units and
/// equalities.
pub fn isfacet_en(fi: &FacetInstance) -> Result<bool> {
    en(fi, true)
}

pub(super) fn relevant_en(fi: &FacetInstance) -> Result<bool> {
    en(fi, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Atom, InstanceBuilder};

    fn facet(b: &mut InstanceBuilder, x: &str) -> FacetInstance {
        let inst = b.build().unwrap();
        let q = inst.var(x).unwrap();
        FacetInstance::new(inst, q).unwrap()
    }

    #[test]
    fn one_cluster() {
        let (x, m, y) = (Var(0), Var(1), Var(2));
        let f = Formula::new(vec![Atom::equality(x, m), Atom::xor(vec![x, y], true)]);
        let s = build_clusters(&f, &[m].into()).unwrap();
        assert_eq!(s.classes, vec![VarSet::from([x, m]), VarSet::from([y])]);
        assert_eq!(s.pairing, vec![(0, 1)]);
        assert_eq!(s.m_classes, vec![(0, Some(1))]);
    }

    #[test]
    fn chained_equalities() {
        let (x, y, z) = (Var(0), Var(1), Var(2));
        let f = Formula::new(vec![Atom::equality(x, y), Atom::equality(y, z)]);
        let s = build_clusters(&f, &VarSet::new()).unwrap();
        assert_eq!(s.classes, vec![VarSet::from([x, y, z])]);
        assert!(s.pairing.is_empty());
    }

    #[test]
    fn self_paired_class() {
        let x = Var(0);
        let f = Formula::new(vec![Atom::xor(vec![x, x], true)]);
        assert_eq!(build_clusters(&f, &VarSet::new()), Err(Error::UnsatStructure));
        let (a, b, c) = (Var(0), Var(1), Var(2));
        let odd = Formula::new(vec![
            Atom::xor(vec![a, b], true),
            Atom::xor(vec![b, c], true),
            Atom::xor(vec![a, c], true),
        ]);
        assert_eq!(build_clusters(&odd, &VarSet::new()), Err(Error::UnsatStructure));
    }

    #[test]
    fn units_are_rejected() {
        let f = Formula::new(vec![Atom::unit(Var(0), true)]);
        assert!(matches!(build_clusters(&f, &VarSet::new()), Err(Error::WrongFragment { .. })));
    }

    #[test]
    fn affine2_examples() {
        let mut b = InstanceBuilder::new();
        b.eq("x", "m").eq("z", "m").xor(&["x", "y"], true).hyp(&["x", "z"]).man(&["m"]);
        assert!(isfacet_affine2(&facet(&mut b, "x")).unwrap());
        let mut b = InstanceBuilder::new();
        b.eq("x", "m").xor(&["x", "y"], true).hyp(&["x", "y"]).man(&["m"]);
        assert!(!isfacet_affine2(&facet(&mut b, "x")).unwrap());
        let mut b = InstanceBuilder::new();
        b.eq("x", "m").xor(&["x", "y", "z"], true).hyp(&["y"]).man(&["m"]);
        assert!(matches!(isfacet_affine2(&facet(&mut b, "y")), Err(Error::WrongFragment { .. })));
        let mut b = InstanceBuilder::new();
        b.eq("x", "m").eq("y", "y").hyp(&["y"]).man(&["m"]);
        assert!(!isfacet_affine2(&facet(&mut b, "y")).unwrap());
    }

    #[test]
    fn opposite_manifestations_have_no_explanation() {
        let mut b = InstanceBuilder::new();
        b.eq("x", "m").eq("z", "n").xor(&["m", "n"], true).eq("y", "m").hyp(&["x", "y", "z"]).man(&["m", "n"]);
        assert!(!isfacet_affine2(&facet(&mut b, "x")).unwrap());
    }

    #[test]
    fn en_examples() {
        let mut b = InstanceBuilder::new();
        b.clause(&["-a", "-b"]).eq("a", "m").eq("b", "m").hyp(&["a", "b"]).man(&["m"]);
        assert!(!isfacet_en(&facet(&mut b, "a")).unwrap());
        let mut b = InstanceBuilder::new();
        b.clause(&["-a", "-b"]).eq("a", "m").eq("c", "m").hyp(&["a", "c"]).man(&["m"]);
        assert!(isfacet_en(&facet(&mut b, "a")).unwrap());
        let mut b = InstanceBuilder::new();
        b.eq("a", "m").hyp(&["a"]).man(&["m"]);
        assert!(!isfacet_en(&facet(&mut b, "a")).unwrap());
    }

    #[test]
    fn en_non_hypothesis_cannot_replace_query() {
        let mut b = InstanceBuilder::new();
        b.eq("a", "m").eq("u", "m").clause(&["-a", "-v"]).hyp(&["a"]).man(&["m"]);
        assert!(!isfacet_en(&facet(&mut b, "a")).unwrap());
        assert!(relevant_en(&facet(&mut b, "a")).unwrap());
    }
}
