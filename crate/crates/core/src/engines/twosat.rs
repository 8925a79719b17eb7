//! 2-SAT through strongly connected components of the implication graph.

use super::{bijunctive_clauses, Engine, SatResult};
use crate::model::{Assignment, Formula, Var};
use crate::propagate::{normalize, Cons};

/// Literal node: `2 * i` is `v_i = 0`, `2 * i + 1` is `v_i = 1`.
fn node(i: usize, b: bool) -> usize {
    2 * i + b as usize
}

/// Caller guarantees every relation is closed under majority.
pub(super) fn solve(f: &Formula) -> SatResult {
    let order: Vec<Var> = f.vars.iter().copied().collect();
    let mut index = vec![usize::MAX; f.var_bound()];
    for (i, v) in order.iter().enumerate() {
        index[v.index()] = i;
    }
    let n = order.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    let mut clause = |lits: &[(Var, bool)]| -> bool {
        match *lits {
            [] => false,
            [(a, s)] => {
                let i = index[a.index()];
                adj[node(i, !s)].push(node(i, s));
                true
            }
            [(a, sa), (b, sb)] => {
                let (i, j) = (index[a.index()], index[b.index()]);
                adj[node(i, !sa)].push(node(j, sb));
                adj[node(j, !sb)].push(node(i, sa));
                true
            }
            _ => unreachable!("clause wider than two literals"),
        }
    };
    for atom in &f.atoms {
        let ok = match normalize(atom) {
            None => true,
            Some(Cons::False) => false,
            Some(Cons::Clause(lits)) => clause(&lits),
            Some(Cons::Xor(vs, p)) => match vs.as_slice() {
                [a] => clause(&[(*a, p)]),
                // a ⊕ b = p
                [a, b] => clause(&[(*a, true), (*b, p)]) && clause(&[(*a, false), (*b, !p)]),
                _ => unreachable!("parity constraint wider than two"),
            },
            Some(Cons::Table(vs, tuples)) => bijunctive_clauses(vs.len(), &tuples)
                .iter()
                .all(|c| clause(&c.iter().map(|&(i, s)| (vs[i], s)).collect::<Vec<_>>())),
        };
        if !ok {
            return SatResult::unsat(Engine::TwoSat);
        }
    }
    let comp = tarjan(&adj);
    let mut model = Assignment::new();
    for (i, &v) in order.iter().enumerate() {
        let (c0, c1) = (comp[node(i, false)], comp[node(i, true)]);
        if c0 == c1 {
            return SatResult::unsat(Engine::TwoSat);
        }
        // components are numbered sinks first
        model.set(v, c1 < c0);
    }
    SatResult::sat(model, Engine::TwoSat)
}

/// Component id per node, in order of completion.
fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0;
    let mut n_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = n_comp;
                    if w == v {
                        break;
                    }
                }
                n_comp += 1;
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate, Atom};

    #[test]
    fn chain_model_is_valid() {
        let v: Vec<Var> = (0..4).map(Var).collect();
        let f = Formula::new(vec![
            Atom::clause(&[(v[0], true), (v[1], true)]),
            Atom::implication(v[1], v[2]),
            Atom::clause(&[(v[2], false), (v[3], false)]),
            Atom::unit(v[0], false),
        ]);
        let r = solve(&f);
        assert!(r.is_sat());
        assert!(evaluate(&f, r.model.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn forced_contradiction() {
        let (a, b) = (Var(0), Var(1));
        let f = Formula::new(vec![
            Atom::implication(a, b),
            Atom::implication(b, a),
            Atom::xor(vec![a, b], true),
        ]);
        assert!(!solve(&f).is_sat());
    }
}
