//! Exhaustive model search.

use super::{Engine, SatConfig, SatResult};
use crate::error::{Error, Result};
use crate::eval::Compiled;
use crate::model::{Assignment, Formula, Var};
use crate::par::find_first;

/// First model in lexicographic order of `var(f)`, the smallest variable
/// being the most significant.
pub fn brute_force(f: &Formula, config: &SatConfig) -> Result<SatResult> {
    let order: Vec<Var> = f.vars.iter().rev().copied().collect();
    let n = order.len();
    if n >= 63 || (1u64 << n) > config.budget {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive search over {n} variables exceeds {} assignments",
            config.budget
        )));
    }
    let compiled = Compiled::new(f, &order);
    Ok(match find_first(1u64 << n, config.mode, |mask| compiled.eval(mask)) {
        Some(mask) => {
            let model = Assignment::from_pairs(order.iter().enumerate().map(|(j, &v)| (v, (mask >> j) & 1 == 1)));
            SatResult::sat(model, Engine::Brute)
        }
        None => SatResult::unsat(Engine::Brute),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Atom;
    use crate::par::ExecMode;

    #[test]
    fn lexicographically_first_model() {
        let (a, b, c) = (Var(0), Var(1), Var(2));
        // a ∨ b, b → c: first model in order (a, b, c) is 0 1 1
        let f = Formula::new(vec![Atom::clause(&[(a, true), (b, true)]), Atom::implication(b, c)]);
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            let r = brute_force(&f, &SatConfig { mode, ..SatConfig::default() }).unwrap();
            let m = r.model.unwrap();
            assert_eq!((m.get(a), m.get(b), m.get(c)), (Some(false), Some(true), Some(true)));
        }
    }
}
