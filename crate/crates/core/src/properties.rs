//! Structural checks with violation witnesses: the joint winner property,
//! Z-freeness, and the nonnegative anti-ultrametric characterization of
//! M♮-convex quadratics.

use std::fmt;

use crate::completion::{first_violating_triple, CompletedMatrix, Coefficients};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::quadratic::SignedQuadFn;
use crate::value::{ExtValue, Extended};

/// A concrete witness that an inequality fails. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `c_ij(a, b) < min(c_jk(b, c), c_ik(a, c))`.
    Jwp {
        i: usize,
        a: usize,
        j: usize,
        b: usize,
        k: usize,
        c: usize,
        /// `[c_ij(a, b), c_jk(b, c), c_ik(a, c)]`
        costs: [ExtValue; 3],
    },
    /// The 2x2 sub-table of `c_ij` on rows `{a, b}` and columns `{c, d}` has
    /// a unique minimum.
    ZFree {
        i: usize,
        j: usize,
        rows: [usize; 2],
        cols: [usize; 2],
        /// `[c_ij(a, c), c_ij(a, d), c_ij(b, c), c_ij(b, d)]`
        cells: [ExtValue; 4],
    },
    /// `h_ij < min(h_ik, h_jk)`.
    AntiUltrametric {
        i: usize,
        j: usize,
        k: usize,
        /// `[h_ij, h_ik, h_jk]`
        values: [Extended; 3],
    },
    /// `h_ij < 0`.
    Negative { i: usize, j: usize, value: Extended },
}

impl Violation {
    /// Re-evaluates a JWP or Z-free witness against `inst`; true when the
    /// cited inequality is strictly violated there.
    pub fn reproduces_in(&self, inst: &Instance) -> bool {
        match *self {
            Violation::Jwp { i, a, j, b, k, c, .. } => {
                let ij = inst.binary(i, a, j, b);
                ij < inst.binary(j, b, k, c) && ij < inst.binary(i, a, k, c)
            }
            Violation::ZFree { i, j, rows, cols, .. } => {
                let cells = [
                    inst.binary(i, rows[0], j, cols[0]),
                    inst.binary(i, rows[0], j, cols[1]),
                    inst.binary(i, rows[1], j, cols[0]),
                    inst.binary(i, rows[1], j, cols[1]),
                ];
                min_multiplicity(&cells) < 2
            }
            _ => false,
        }
    }

    /// Re-evaluates an anti-ultrametric witness against a matrix.
    pub fn reproduces_in_matrix<M: Coefficients>(&self, m: &M) -> bool {
        match *self {
            Violation::AntiUltrametric { i, j, k, .. } => match (m.code(i, j), m.code(i, k), m.code(j, k)) {
                (Some(ij), Some(ik), Some(jk)) => ij < ik && ij < jk,
                _ => false,
            },
            _ => false,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Jwp { i, a, j, b, k, c, costs } => write!(
                f,
                "JWP violated: c{},{}({},{}) = {} < min(c{},{}({},{}) = {}, c{},{}({},{}) = {})",
                i + 1,
                j + 1,
                a + 1,
                b + 1,
                costs[0],
                j + 1,
                k + 1,
                b + 1,
                c + 1,
                costs[1],
                i + 1,
                k + 1,
                a + 1,
                c + 1,
                costs[2]
            ),
            Violation::ZFree { i, j, rows, cols, cells } => write!(
                f,
                "Z-freeness violated: c{},{} on rows {{{}, {}}} x columns {{{}, {}}} = [[{}, {}], [{}, {}]] has a unique minimum",
                i + 1,
                j + 1,
                rows[0] + 1,
                rows[1] + 1,
                cols[0] + 1,
                cols[1] + 1,
                cells[0],
                cells[1],
                cells[2],
                cells[3]
            ),
            Violation::AntiUltrametric { i, j, k, values } => write!(
                f,
                "anti-ultrametric violated: h{a},{b} = {} < min(h{a},{c} = {}, h{b},{c} = {})",
                values[0],
                values[1],
                values[2],
                a = i + 1,
                b = j + 1,
                c = k + 1
            ),
            Violation::Negative { i, j, value } => {
                write!(f, "negative coefficient: h{},{} = {value}", i + 1, j + 1)
            }
        }
    }
}

fn min_multiplicity<T: Ord>(cells: &[T]) -> usize {
    let min = cells.iter().min().expect("nonempty");
    cells.iter().filter(|c| *c == min).count()
}

/// `c_ij(a, b) >= min(c_jk(b, c), c_ik(a, c))` for all distinct `i, j, k` and
/// all values. Scans `i < j`, then `k`, then `a, b, c`.
pub fn check_jwp(inst: &Instance) -> Result<(), Violation> {
    let r = inst.vars();
    let d = inst.domains();
    for i in 0..r {
        for j in i + 1..r {
            for k in (0..r).filter(|&k| k != i && k != j) {
                for a in 0..d[i] {
                    for b in 0..d[j] {
                        let ij = inst.binary(i, a, j, b);
                        if ij.is_infinite() {
                            continue;
                        }
                        for c in 0..d[k] {
                            let jk = inst.binary(j, b, k, c);
                            let ik = inst.binary(i, a, k, c);
                            if ij < jk && ij < ik {
                                return Err(Violation::Jwp {
                                    i,
                                    a,
                                    j,
                                    b,
                                    k,
                                    c,
                                    costs: [ij.clone(), jk.clone(), ik.clone()],
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Every 2x2 sub-table of every binary table attains its minimum at least
/// twice, counting positions.
pub fn check_zfree(inst: &Instance) -> Result<(), Violation> {
    let r = inst.vars();
    let d = inst.domains();
    for i in 0..r {
        for j in i + 1..r {
            for a in 0..d[i] {
                for b in a + 1..d[i] {
                    for c in 0..d[j] {
                        for e in c + 1..d[j] {
                            let cells = [
                                inst.binary(i, a, j, c),
                                inst.binary(i, a, j, e),
                                inst.binary(i, b, j, c),
                                inst.binary(i, b, j, e),
                            ];
                            if min_multiplicity(&cells) < 2 {
                                return Err(Violation::ZFree {
                                    i,
                                    j,
                                    rows: [a, b],
                                    cols: [c, e],
                                    cells: cells.map(Clone::clone),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// `h_ij >= min(h_ik, h_jk)` for all distinct triples. Runs in `O(n^2)` when
/// the matrix passes; the witness search on failure is an exhaustive scan.
pub fn check_anti_ultrametric(m: &CompletedMatrix) -> Result<(), Violation> {
    if m.is_anti_ultrametric() {
        return Ok(());
    }
    let (i, j, k) = m
        .first_anti_ultrametric_violation()
        .expect("fast and exhaustive anti-ultrametric checks disagree");
    let val = |p, q| m.get(p, q).to_extended();
    Err(Violation::AntiUltrametric { i, j, k, values: [val(i, j), val(i, k), val(j, k)] })
}

/// M♮-convexity of `sum h_i x_i + sum h_ij x_i x_j`: all `h_ij >= 0` and
/// anti-ultrametric. Linear coefficients must be finite.
pub fn check_mnatural_quadratic(f: &SignedQuadFn) -> Result<Result<(), Violation>> {
    if let Some(i) = f.linear().iter().position(|h| !h.is_finite()) {
        return Err(Error::Precondition(format!("linear coefficient h{} is not finite", i + 1)));
    }
    let n = f.n();
    for i in 0..n {
        for j in i + 1..n {
            let h = f.quad(i, j);
            if h.is_negative() {
                return Ok(Err(Violation::Negative { i, j, value: h.clone() }));
            }
        }
    }
    Ok(match first_violating_triple(n, |i, j| Some(f.quad(i, j))) {
        None => Ok(()),
        Some((i, j, k)) => Err(Violation::AntiUltrametric {
            i,
            j,
            k,
            values: [f.quad(i, j).clone(), f.quad(i, k).clone(), f.quad(j, k).clone()],
        }),
    })
}
