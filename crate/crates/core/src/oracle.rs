//! Exhaustive reasoning over the explanation space.
//!
//! Every model of the knowledge base is enumerated once. A set `E ⊆ H` is an
//! explanation iff some model makes all of `E` true and every model that
//! makes all of `E` true also satisfies `M`; both conditions are superset
//! aggregates over the hypothesis projections of the models.

use crate::error::{Error, Result};
use crate::eval::Compiled;
use crate::model::{distance, AbductionInstance, FacetInstance, Var, VarSet};
use crate::par::{chunked_fold, map_collect, ExecMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_hypotheses: usize,
    pub max_vars: usize,
    /// Largest number of explanation pairs `max_diverse_pair` may compare.
    pub max_pairs: u64,
    pub mode: ExecMode,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_hypotheses: 20,
            max_vars: 22,
            max_pairs: 1 << 28,
            mode: ExecMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExplanationReport {
    /// In lexicographic subset order.
    pub explanations: Vec<VarSet>,
    /// In lexicographic subset order.
    pub minimal: Vec<VarSet>,
    pub relevant: VarSet,
    /// Empty when there is no explanation.
    pub necessary: VarSet,
    pub facets: VarSet,
}

/// Maximum-distance pair of explanations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiversePair {
    pub d: usize,
    pub e1: VarSet,
    pub e2: VarSet,
}

fn bit(words: &[u64], i: usize) -> bool {
    (words[i / 64] >> (i % 64)) & 1 == 1
}

fn set_bit(words: &mut [u64], i: usize) {
    words[i / 64] |= 1 << (i % 64);
}

/// Bit `s` of the result is the OR of bits `t ⊇ s` of the input.
fn superset_or(mut a: Vec<u64>, k: usize) -> Vec<u64> {
    let size = 1usize << k;
    for i in 0..k {
        let step = 1usize << i;
        for s in 0..size {
            if s & step == 0 && bit(&a, s | step) {
                set_bit(&mut a, s);
            }
        }
    }
    a
}

/// Bit `s` of the result is the OR of bits `t ⊆ s` of the input.
fn subset_or(mut a: Vec<u64>, k: usize) -> Vec<u64> {
    let size = 1usize << k;
    for i in 0..k {
        let step = 1usize << i;
        for s in 0..size {
            if s & step != 0 && bit(&a, s ^ step) {
                set_bit(&mut a, s);
            }
        }
    }
    a
}

/// The explanation family of one instance, as bitsets over subsets of `H`.
#[derive(Debug, Clone)]
pub struct ExplanationSpace {
    hyps: Vec<Var>,
    explanation: Vec<u64>,
    minimal: Vec<u64>,
}

impl ExplanationSpace {
    pub fn compute(inst: &AbductionInstance, config: &OracleConfig) -> Result<Self> {
        let k = inst.hypotheses.len();
        let n = inst.kb.vars.len();
        if k > config.max_hypotheses {
            return Err(Error::BudgetExceeded(format!(
                "{k} hypotheses exceed the oracle limit of {}",
                config.max_hypotheses
            )));
        }
        if n > config.max_vars {
            return Err(Error::BudgetExceeded(format!(
                "{n} variables exceed the oracle limit of {}",
                config.max_vars
            )));
        }
        let hyps: Vec<Var> = inst.hypotheses.iter().copied().collect();
        // hypotheses occupy the low bits
        let mut order = hyps.clone();
        order.extend(inst.kb.vars.iter().filter(|v| !inst.hypotheses.contains(v)));
        let compiled = Compiled::new(&inst.kb, &order);
        let man_mask = order
            .iter()
            .enumerate()
            .filter(|(_, v)| inst.manifestations.contains(v))
            .fold(0u64, |acc, (j, _)| acc | (1 << j));
        let h_mask = (1u64 << k) - 1;
        let words = (1usize << k).div_ceil(64);
        let total = 1u64 << n;

        // (has a model, has a model violating M), per hypothesis projection
        let (has, bad) = chunked_fold(
            total,
            (total / 64).max(1 << 12),
            config.mode,
            || (vec![0u64; words], vec![0u64; words]),
            |(has, bad), mask| {
                if compiled.eval(mask) {
                    let p = (mask & h_mask) as usize;
                    set_bit(has, p);
                    if mask & man_mask != man_mask {
                        set_bit(bad, p);
                    }
                }
            },
            |(mut h1, mut b1), (h2, b2)| {
                for (a, b) in h1.iter_mut().zip(h2) {
                    *a |= b;
                }
                for (a, b) in b1.iter_mut().zip(b2) {
                    *a |= b;
                }
                (h1, b1)
            },
        );
        let has = superset_or(has, k);
        let bad = superset_or(bad, k);
        let explanation: Vec<u64> = has.iter().zip(&bad).map(|(h, b)| h & !b).collect();
        let below = subset_or(explanation.clone(), k);
        let mut minimal = vec![0u64; words];
        for s in 0..1usize << k {
            if bit(&explanation, s) && (0..k).all(|i| s & (1 << i) == 0 || !bit(&below, s ^ (1 << i))) {
                set_bit(&mut minimal, s);
            }
        }
        Ok(ExplanationSpace { hyps, explanation, minimal })
    }

    pub fn hypotheses(&self) -> &[Var] {
        &self.hyps
    }

    fn mask_of(&self, e: &VarSet) -> Option<usize> {
        let mut mask = 0usize;
        for v in e {
            mask |= 1 << self.hyps.iter().position(|h| h == v)?;
        }
        Some(mask)
    }

    fn set_of(&self, mask: usize) -> VarSet {
        (0..self.hyps.len()).filter(|&i| mask & (1 << i) != 0).map(|i| self.hyps[i]).collect()
    }

    fn masks<'a>(&'a self, words: &'a [u64]) -> impl Iterator<Item = usize> + 'a {
        (0..1usize << self.hyps.len()).filter(move |&s| bit(words, s))
    }

    fn sorted_sets(&self, words: &[u64]) -> Vec<VarSet> {
        let mut out: Vec<VarSet> = self.masks(words).map(|s| self.set_of(s)).collect();
        out.sort();
        out
    }

    pub fn is_explanation(&self, e: &VarSet) -> Result<bool> {
        let mask = self.mask_of(e).ok_or(Error::NotSubsetOfH)?;
        Ok(bit(&self.explanation, mask))
    }

    pub fn has_explanation(&self) -> bool {
        self.explanation.iter().any(|&w| w != 0)
    }

    pub fn explanations(&self) -> Vec<VarSet> {
        self.sorted_sets(&self.explanation)
    }

    pub fn minimal(&self) -> Vec<VarSet> {
        self.sorted_sets(&self.minimal)
    }

    fn minimal_masks(&self) -> Vec<usize> {
        self.masks(&self.minimal).collect()
    }

    /// `x` belongs to some subset-minimal explanation.
    pub fn is_relevant(&self, x: Var) -> bool {
        match self.hyps.iter().position(|&h| h == x) {
            Some(i) => self.masks(&self.minimal).any(|s| s & (1 << i) != 0),
            None => false,
        }
    }

    /// `x` is relevant and some subset-minimal explanation avoids it.
    pub fn is_facet(&self, x: Var) -> bool {
        match self.hyps.iter().position(|&h| h == x) {
            Some(i) => {
                let (mut with, mut without) = (false, false);
                for s in self.masks(&self.minimal) {
                    if s & (1 << i) != 0 {
                        with = true;
                    } else {
                        without = true;
                    }
                }
                with && without
            }
            None => false,
        }
    }

    pub fn report(&self) -> ExplanationReport {
        let minimal_masks = self.minimal_masks();
        let union = minimal_masks.iter().fold(0, |a, &s| a | s);
        let inter = if minimal_masks.is_empty() {
            0
        } else {
            minimal_masks.iter().fold(usize::MAX, |a, &s| a & s)
        };
        ExplanationReport {
            explanations: self.explanations(),
            minimal: self.minimal(),
            relevant: self.set_of(union),
            necessary: self.set_of(inter),
            facets: self.set_of(union & !inter),
        }
    }

    /// Pair of explanations at maximum distance; ties go to the
    /// lexicographically first `(E1, E2)`.
    pub fn max_diverse_pair(&self, config: &OracleConfig) -> Result<Option<DiversePair>> {
        let sets = self.explanations();
        let e = sets.len() as u64;
        if e.saturating_mul(e) > config.max_pairs {
            return Err(Error::BudgetExceeded(format!(
                "{e} explanations give more than {} pairs",
                config.max_pairs
            )));
        }
        if sets.is_empty() {
            return Ok(None);
        }
        let masks: Vec<usize> = sets.iter().map(|s| self.mask_of(s).unwrap()).collect();
        let rows = map_collect(masks.len(), config.mode, |i| {
            let mut best = (0u32, 0usize);
            for (j, &m) in masks.iter().enumerate() {
                let d = (masks[i] ^ m).count_ones();
                if d > best.0 {
                    best = (d, j);
                }
            }
            best
        });
        let mut best = (0u32, 0usize, 0usize);
        for (i, &(d, j)) in rows.iter().enumerate() {
            if d > best.0 {
                best = (d, i, j);
            }
        }
        let (e1, e2) = (sets[best.1].clone(), sets[best.2].clone());
        debug_assert_eq!(distance(&e1, &e2), best.0 as usize);
        Ok(Some(DiversePair { d: best.0 as usize, e1, e2 }))
    }
}

pub fn all_explanations(inst: &AbductionInstance) -> Result<Vec<VarSet>> {
    Ok(ExplanationSpace::compute(inst, &OracleConfig::default())?.explanations())
}

pub fn minimal_explanations(inst: &AbductionInstance) -> Result<Vec<VarSet>> {
    Ok(ExplanationSpace::compute(inst, &OracleConfig::default())?.minimal())
}

pub fn report(inst: &AbductionInstance) -> Result<ExplanationReport> {
    Ok(ExplanationSpace::compute(inst, &OracleConfig::default())?.report())
}

pub fn is_facet_oracle(fi: &FacetInstance) -> Result<bool> {
    Ok(ExplanationSpace::compute(&fi.base, &OracleConfig::default())?.is_facet(fi.query))
}

pub fn is_relevant_oracle(fi: &FacetInstance) -> Result<bool> {
    Ok(ExplanationSpace::compute(&fi.base, &OracleConfig::default())?.is_relevant(fi.query))
}

pub fn max_diverse_pair(inst: &AbductionInstance) -> Result<Option<DiversePair>> {
    let config = OracleConfig::default();
    ExplanationSpace::compute(inst, &config)?.max_diverse_pair(&config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InstanceBuilder;
    use crate::parse::parse_instance;

    fn sailing() -> AbductionInstance {
        parse_instance("clause -w r\nclause -w -c n\nclause -w -s n\nhyp w c s r\nman n\n")
            .unwrap()
            .into_base()
    }

    fn names(inst: &AbductionInstance, sets: &[VarSet]) -> Vec<Vec<String>> {
        sets.iter().map(|s| inst.names(s)).collect()
    }

    #[test]
    fn sailing_report() {
        let inst = sailing();
        let r = report(&inst).unwrap();
        assert_eq!(r.explanations.len(), 6);
        assert_eq!(names(&inst, &r.minimal), vec![vec!["w", "c"], vec!["w", "s"]]);
        assert_eq!(inst.names(&r.relevant), vec!["w", "c", "s"]);
        assert_eq!(inst.names(&r.necessary), vec!["w"]);
        assert_eq!(inst.names(&r.facets), vec!["c", "s"]);
        assert!(!r.relevant.contains(&inst.var("r").unwrap()));
    }

    #[test]
    fn sailing_diversity() {
        let inst = sailing();
        let p = max_diverse_pair(&inst).unwrap().unwrap();
        assert_eq!(p.d, 3);
        assert_eq!(distance(&p.e1, &p.e2), 3);
    }

    #[test]
    fn unsat_kb_has_no_explanations() {
        let mut b = InstanceBuilder::new();
        b.clause(&["a"]).clause(&["-a"]).hyp(&["a"]);
        let inst = b.build().unwrap();
        assert!(all_explanations(&inst).unwrap().is_empty());
        assert_eq!(max_diverse_pair(&inst).unwrap(), None);
        let r = report(&inst).unwrap();
        assert!(r.necessary.is_empty());
    }

    #[test]
    fn empty_manifestations() {
        let mut b = InstanceBuilder::new();
        b.clause(&["a", "-a"]).hyp(&["a"]);
        let inst = b.build().unwrap();
        let a = inst.var("a").unwrap();
        assert_eq!(all_explanations(&inst).unwrap(), vec![VarSet::new(), VarSet::from([a])]);
    }

    #[test]
    fn equality_makes_both_facets() {
        let mut b = InstanceBuilder::new();
        b.eq("x", "y").clause(&["-x", "m"]).clause(&["-y", "m"]).hyp(&["x", "y"]).man(&["m"]);
        let inst = b.build().unwrap();
        assert_eq!(inst.names(&report(&inst).unwrap().facets), vec!["x", "y"]);

        let mut b = InstanceBuilder::new();
        b.clause(&["-x", "m"]).hyp(&["x"]).man(&["m"]);
        let inst = b.build().unwrap();
        let fi = FacetInstance::new(inst.clone(), inst.var("x").unwrap()).unwrap();
        assert!(!is_facet_oracle(&fi).unwrap());
        assert_eq!(names(&inst, &minimal_explanations(&inst).unwrap()), vec![vec!["x"]]);
        let p = max_diverse_pair(&inst).unwrap().unwrap();
        assert_eq!((p.d, p.e1 == p.e2), (0, true));
    }

    #[test]
    fn budget_is_enforced() {
        let inst = sailing();
        let config = OracleConfig { max_hypotheses: 3, ..OracleConfig::default() };
        assert!(matches!(ExplanationSpace::compute(&inst, &config), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn modes_agree() {
        let inst = sailing();
        let seq = OracleConfig { mode: ExecMode::Sequential, ..OracleConfig::default() };
        let par = OracleConfig { mode: ExecMode::Parallel, ..OracleConfig::default() };
        let a = ExplanationSpace::compute(&inst, &seq).unwrap();
        let b = ExplanationSpace::compute(&inst, &par).unwrap();
        assert_eq!(a.report(), b.report());
        assert_eq!(a.max_diverse_pair(&seq).unwrap(), b.max_diverse_pair(&par).unwrap());
    }
}
