//! Exhaustive ground truth for small inputs. Nothing here prunes; every
//! routine enumerates its whole search space and refuses inputs beyond the
//! budget.

use std::fmt;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Instance};
use crate::quadratic::SignedQuadFn;
use crate::value::{ExtValue, Extended};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_evaluations: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_evaluations: 1_000_000 }
    }
}

impl OracleBudget {
    pub fn ensure(&self, needed: u128) -> Result<()> {
        if needed > self.max_evaluations {
            Err(Error::BudgetExceeded { needed, budget: self.max_evaluations })
        } else {
            Ok(())
        }
    }
}

/// Lexicographically first minimizer over the full product domain.
pub fn brute_force_min(inst: &Instance, budget: &OracleBudget) -> Result<(Assignment, ExtValue)> {
    budget.ensure(inst.assignment_count())?;
    let d = inst.domains();
    let mut x = vec![0usize; inst.vars()];
    let mut best = (x.clone(), inst.evaluate_unchecked(&x));
    loop {
        let mut k = x.len();
        loop {
            if k == 0 {
                return Ok((Assignment(best.0), best.1));
            }
            k -= 1;
            x[k] += 1;
            if x[k] < d[k] {
                break;
            }
            x[k] = 0;
        }
        let value = inst.evaluate_unchecked(&x);
        if value < best.1 {
            best = (x.clone(), value);
        }
    }
}

/// A dense table of `f : {0,1}^n -> R ∪ {+inf}`, indexed by bitmask (bit `i`
/// is coordinate `i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueTable {
    n: usize,
    values: Vec<Extended>,
}

impl ValueTable {
    pub fn from_fn(n: usize, budget: &OracleBudget, f: impl Fn(u64) -> Extended) -> Result<Self> {
        if n >= 64 {
            return Err(Error::BudgetExceeded { needed: u128::MAX, budget: budget.max_evaluations });
        }
        budget.ensure(1u128 << n)?;
        Ok(ValueTable { n, values: (0..1u64 << n).map(f).collect() })
    }

    pub fn of_quadratic(f: &SignedQuadFn, budget: &OracleBudget) -> Result<Self> {
        Self::from_fn(f.n(), budget, |mask| f.eval_mask(mask))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, mask: u64) -> &Extended {
        &self.values[mask as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleViolation {
    /// No `j` in `supp+(y - x) ∪ {0}` satisfies the exchange inequality for `i`.
    Exchange { x: u64, y: u64, i: usize },
    /// `f(z+i+j) + f(z+k) < min(f(z+j+k) + f(z+i), f(z+i+k) + f(z+j))`.
    Triple { z: u64, i: usize, j: usize, k: usize },
    /// `f(z+i+j) + f(z) < f(z+i) + f(z+j)`.
    Pair { z: u64, i: usize, j: usize },
}

impl fmt::Display for OracleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleViolation::Exchange { x, y, i } => {
                write!(f, "exchange fails for x = {x:#b}, y = {y:#b}, i = {}", i + 1)
            }
            OracleViolation::Triple { z, i, j, k } => {
                write!(f, "three-term condition fails at z = {z:#b}, (i, j, k) = ({}, {}, {})", i + 1, j + 1, k + 1)
            }
            OracleViolation::Pair { z, i, j } => {
                write!(f, "pair condition fails at z = {z:#b}, (i, j) = ({}, {})", i + 1, j + 1)
            }
        }
    }
}

/// The M♮-convex exchange axiom, checked over all `x`, `y` and `i`.
pub fn check_exchange_axiom(table: &ValueTable, budget: &OracleBudget) -> Result<Result<(), OracleViolation>> {
    let n = table.n;
    budget.ensure((1u128 << (2 * n)) * (n as u128).max(1))?;
    let full = 1u64 << n;
    for x in 0..full {
        for y in 0..full {
            let lhs = table.get(x) + table.get(y);
            if !lhs.is_finite() {
                continue;
            }
            for i in (0..n).filter(|&i| (x & !y) >> i & 1 == 1) {
                let bit_i = 1u64 << i;
                let candidates = std::iter::once(None)
                    .chain((0..n).filter(|&j| (y & !x) >> j & 1 == 1).map(Some));
                let ok = candidates.into_iter().any(|j| {
                    let bit_j = j.map_or(0, |j| 1u64 << j);
                    let rhs = table.get((x & !bit_i) | bit_j) + table.get((y | bit_i) & !bit_j);
                    lhs >= rhs
                });
                if !ok {
                    return Ok(Err(OracleViolation::Exchange { x, y, i }));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// The local characterization of M♮-convexity for functions with the zero
/// vector in the domain: a three-term condition on triples and a pairwise
/// supermodularity-style condition.
pub fn check_local_exchange(table: &ValueTable, budget: &OracleBudget) -> Result<Result<(), OracleViolation>> {
    let n = table.n;
    if !table.get(0).is_finite() {
        return Err(Error::Precondition("the zero vector is not in the domain".into()));
    }
    budget.ensure((1u128 << n) * (n as u128).pow(3).max(1))?;
    let f = |m: u64| table.get(m);
    for z in 0..1u64 << n {
        for i in 0..n {
            let bi = 1u64 << i;
            if z & bi != 0 {
                continue;
            }
            for j in i + 1..n {
                let bj = 1u64 << j;
                if z & bj != 0 {
                    continue;
                }
                if f(z | bi | bj) + f(z) < f(z | bi) + f(z | bj) {
                    return Ok(Err(OracleViolation::Pair { z, i, j }));
                }
                for k in (0..n).filter(|&k| k != i && k != j && z >> k & 1 == 0) {
                    let bk = 1u64 << k;
                    let lhs = f(z | bi | bj) + f(z | bk);
                    let a = f(z | bj | bk) + f(z | bi);
                    let b = f(z | bi | bk) + f(z | bj);
                    if lhs < a.min(b) {
                        return Ok(Err(OracleViolation::Triple { z, i, j, k }));
                    }
                }
            }
        }
    }
    Ok(Ok(()))
}
