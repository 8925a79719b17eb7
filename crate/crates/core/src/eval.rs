//! Bit-mask evaluation of formulas for the exhaustive engines.

use std::sync::Arc;

use crate::model::{Formula, Relation, Var};

/// A formula with variables mapped to bit positions of a `u64` assignment.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    atoms: Vec<(Arc<Relation>, Vec<u32>)>,
}

impl Compiled {
    /// `order[j]` is stored at bit `j`. Every variable of `f` must occur in
    /// `order`, which has at most 64 entries.
    pub(crate) fn new(f: &Formula, order: &[Var]) -> Self {
        assert!(order.len() <= 64);
        let mut pos = vec![u32::MAX; f.var_bound().max(order.iter().map(|v| v.index() + 1).max().unwrap_or(0))];
        for (j, v) in order.iter().enumerate() {
            pos[v.index()] = j as u32;
        }
        let atoms = f
            .atoms
            .iter()
            .map(|a| {
                let args = a
                    .args
                    .iter()
                    .map(|v| {
                        let p = pos[v.index()];
                        assert!(p != u32::MAX, "variable {v} missing from the order");
                        p
                    })
                    .collect();
                (a.relation.clone(), args)
            })
            .collect();
        Compiled { atoms }
    }

    #[inline]
    pub(crate) fn eval(&self, mask: u64) -> bool {
        self.atoms.iter().all(|(rel, args)| {
            let t = args
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &p)| acc | (((mask >> p) & 1) << i));
            rel.contains(t)
        })
    }
}
