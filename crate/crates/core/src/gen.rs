//! Seeded random instances in a requested fragment, as instance text.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Instances up to this many variables may contain unit clauses.
const SMALL: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenFragment {
    Imp,
    DualHorn,
    Horn,
    Affine2,
    En,
    Ep,
    Pos2Cnf,
}

impl GenFragment {
    pub const ALL: [GenFragment; 7] = [
        GenFragment::Imp,
        GenFragment::DualHorn,
        GenFragment::Horn,
        GenFragment::Affine2,
        GenFragment::En,
        GenFragment::Ep,
        GenFragment::Pos2Cnf,
    ];
}

impl fmt::Display for GenFragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenFragment::Imp => "imp",
            GenFragment::DualHorn => "dualhorn",
            GenFragment::Horn => "horn",
            GenFragment::Affine2 => "affine2",
            GenFragment::En => "en",
            GenFragment::Ep => "ep",
            GenFragment::Pos2Cnf => "pos2cnf",
        })
    }
}

impl FromStr for GenFragment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GenFragment::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| Error::Scope(format!("unknown fragment `{s}`")))
    }
}

struct Gen {
    rng: ChaCha8Rng,
    n: usize,
    used: Vec<bool>,
    out: String,
}

impl Gen {
    fn var(&mut self) -> usize {
        let v = self.rng.random_range(0..self.n);
        self.used[v] = true;
        v
    }

    /// `k` distinct variables, or fewer when `n < k`.
    fn distinct(&mut self, k: usize) -> Vec<usize> {
        let vs: Vec<usize> = index::sample(&mut self.rng, self.n, k.min(self.n)).into_vec();
        for &v in &vs {
            self.used[v] = true;
        }
        vs
    }

    fn clause(&mut self, lits: &[(usize, bool)]) {
        self.out.push_str("clause");
        for &(v, s) in lits {
            let _ = write!(self.out, " {}v{v}", if s { "" } else { "-" });
        }
        self.out.push('\n');
    }

    fn unit(&mut self, sign: bool) {
        let v = self.var();
        self.clause(&[(v, sign)]);
    }

    /// Clause of 2 or 3 literals with at most one literal of sign `!major`.
    fn one_off_clause(&mut self, major: bool) {
        let len = self.rng.random_range(2..=3);
        let vs = self.distinct(len);
        let minority = self.rng.random_bool(0.7).then(|| self.rng.random_range(0..vs.len()));
        let lits: Vec<(usize, bool)> =
            vs.iter().enumerate().map(|(i, &v)| (v, if Some(i) == minority { !major } else { major })).collect();
        self.clause(&lits);
    }

    fn uniform_clause(&mut self, sign: bool, len: usize) {
        let vs = self.distinct(len);
        let lits: Vec<(usize, bool)> = vs.into_iter().map(|v| (v, sign)).collect();
        self.clause(&lits);
    }

    fn pair(&mut self, op: &str, parity: Option<bool>) {
        let vs = self.distinct(2);
        let _ = write!(self.out, "{op} v{} v{}", vs[0], vs[1]);
        if let Some(p) = parity {
            let _ = write!(self.out, " = {}", p as u8);
        }
        self.out.push('\n');
    }

    /// A two-variable atom inside `fragment`.
    fn binary(&mut self, fragment: GenFragment) {
        match fragment {
            GenFragment::Imp | GenFragment::DualHorn | GenFragment::Horn => {
                let vs = self.distinct(2);
                self.clause(&[(vs[0], false), (vs[1], true)]);
            }
            GenFragment::Affine2 | GenFragment::En | GenFragment::Ep => self.pair("eq", None),
            GenFragment::Pos2Cnf => self.uniform_clause(true, 2),
        }
    }

    fn atom(&mut self, fragment: GenFragment) {
        let units = self.n <= SMALL;
        let unit = units && self.rng.random_bool(0.15);
        match fragment {
            GenFragment::Imp => self.binary(fragment),
            GenFragment::DualHorn | GenFragment::Horn if unit => {
                let sign = self.rng.random_bool(0.5);
                self.unit(sign);
            }
            GenFragment::DualHorn => self.one_off_clause(true),
            GenFragment::Horn => self.one_off_clause(false),
            GenFragment::Affine2 if unit => {
                let sign = self.rng.random_bool(0.5);
                self.unit(sign);
            }
            GenFragment::Affine2 => {
                if self.rng.random_bool(0.35) {
                    self.pair("xor", Some(true))
                } else {
                    self.pair("eq", None)
                }
            }
            GenFragment::En | GenFragment::Ep => {
                let major = fragment == GenFragment::Ep;
                if unit {
                    self.unit(!major);
                } else if self.rng.random_bool(0.5) {
                    self.pair("eq", None);
                } else {
                    let len = self.rng.random_range(2..=3);
                    self.uniform_clause(major, len);
                }
            }
            GenFragment::Pos2Cnf => self.binary(fragment),
        }
    }
}

/// Deterministic random instance text: `n_atoms` atoms over `v0 … v{n-1}`,
/// with disjoint non-empty `H` and `M` drawn from the variables that occur.
/// Instances with more than 16 variables contain no unit clauses.
pub fn generate(fragment: GenFragment, n_vars: usize, n_atoms: usize, seed: u64) -> String {
    let n = n_vars.max(2);
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), n, used: vec![false; n], out: String::new() };
    for _ in 0..n_atoms {
        g.atom(fragment);
    }
    while g.used.iter().filter(|&&u| u).count() < 2 {
        g.binary(fragment);
    }
    let mut used: Vec<usize> = (0..n).filter(|&v| g.used[v]).collect();
    used.shuffle(&mut g.rng);
    let max_m = 3.min(used.len() - 1);
    let n_m = g.rng.random_range(1..=max_m);
    let rest = used.len() - n_m;
    let n_h = if n <= SMALL { g.rng.random_range(1..=rest.min(8)) } else { rest.div_ceil(2) };
    let (mans, tail) = used.split_at(n_m);
    let mut hyps = tail[..n_h].to_vec();
    let mut mans = mans.to_vec();
    hyps.sort_unstable();
    mans.sort_unstable();
    let list = |vs: &[usize]| vs.iter().map(|v| format!("v{v}")).collect::<Vec<_>>().join(" ");
    let _ = writeln!(g.out, "hyp {}", list(&hyps));
    let _ = writeln!(g.out, "man {}", list(&mans));
    g.out
}
