//! End-to-end minimization of Z-free instances, the completability
//! certificate, and a generator of instances that are valid by construction.

use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::completion::{complete, completable_oracle, CompletedMatrix, PartialMatrix};
use crate::error::{Error, Result};
use crate::instance::{Assignment, BitVec, Instance};
use crate::intersection::{ssp_intersect, Intersection, IterationTrace};
use crate::oracles::OracleBudget;
use crate::properties::{check_jwp, check_zfree, Violation};
use crate::quadratic::{build_overline_f, greedy_min_layer, Infeasible};
use crate::value::ExtValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    InfiniteMinimum,
    RejectedNotZFree,
    RejectedNotJwp,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::InfiniteMinimum => "infinite-minimum",
            Status::RejectedNotZFree => "rejected-not-zfree",
            Status::RejectedNotJwp => "rejected-not-jwp",
        }
    }

    pub fn is_rejected(&self) -> bool {
        matches!(self, Status::RejectedNotJwp | Status::RejectedNotZFree)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepTimings {
    pub validation: Duration,
    pub completion: Duration,
    pub greedy: Duration,
    pub intersection: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub status: Status,
    /// Present when `status` is [`Status::Optimal`].
    pub assignment: Option<Assignment>,
    pub value: ExtValue,
    /// Present when the instance was rejected.
    pub violation: Option<Violation>,
    /// Augmentations performed by the intersection step.
    pub iterations: usize,
    pub timings: StepTimings,
}

impl SolveReport {
    fn rejected(status: Status, violation: Violation, timings: StepTimings) -> Self {
        SolveReport {
            status,
            assignment: None,
            value: ExtValue::infinity(),
            violation: Some(violation),
            iterations: 0,
            timings,
        }
    }
}

/// How the joint winner property and Z-freeness are established before solving.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Validation {
    /// Scan every triple and every 2x2 sub-table.
    #[default]
    Exhaustive,
    /// Attempt the completion first; the instance is JWP and Z-free exactly
    /// when it succeeds. The exhaustive scans run only to produce a witness
    /// after a failure. Quadratic in `n` on valid instances.
    ByCompletion,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    pub validation: Validation,
}

pub fn minimize_zfree(inst: &Instance) -> Result<SolveReport> {
    minimize_zfree_with(inst, &SolveOptions::default(), &mut |_| {})
}

/// A one-hot start: for each variable the cheapest unary value, lowest on ties.
pub fn initial_one_hot(inst: &Instance) -> BitVec {
    let space = inst.space();
    let mut y = BitVec::zeros(space.len());
    for i in 0..inst.vars() {
        let row = inst.unary_row(i);
        let best = (0..row.len()).min_by(|&a, &b| row[a].cmp(&row[b])).expect("nonempty domain");
        y.add_unit(space.flat(i, best));
    }
    y
}

fn reject_with_witness(inst: &Instance) -> Option<(Status, Violation)> {
    if let Err(w) = check_jwp(inst) {
        return Some((Status::RejectedNotJwp, w));
    }
    if let Err(w) = check_zfree(inst) {
        return Some((Status::RejectedNotZFree, w));
    }
    None
}

pub fn minimize_zfree_with(
    inst: &Instance,
    opts: &SolveOptions,
    observer: &mut dyn FnMut(&IterationTrace<'_>),
) -> Result<SolveReport> {
    let mut timings = StepTimings::default();

    let started = Instant::now();
    if opts.validation == Validation::Exhaustive {
        if let Some((status, w)) = reject_with_witness(inst) {
            timings.validation = started.elapsed();
            return Ok(SolveReport::rejected(status, w, timings));
        }
    }
    timings.validation = started.elapsed();

    let started = Instant::now();
    let h = PartialMatrix::from_instance(inst);
    let completion = match complete(&h) {
        Ok(c) => c,
        Err(failure) => {
            if let Some((status, w)) = reject_with_witness(inst) {
                timings.completion = started.elapsed();
                return Ok(SolveReport::rejected(status, w, timings));
            }
            return Err(Error::Internal(format!("completion failed on a Z-free instance: {failure}")));
        }
    };
    let f = build_overline_f(inst, &completion)?;
    timings.completion = started.elapsed();

    let r = inst.vars();
    let started = Instant::now();
    let greedy = greedy_min_layer(&f, r);
    timings.greedy = started.elapsed();
    let x0 = match greedy {
        Ok(g) => g.x,
        Err(Infeasible) => {
            return Ok(SolveReport {
                status: Status::InfiniteMinimum,
                assignment: None,
                value: ExtValue::infinity(),
                violation: None,
                iterations: 0,
                timings,
            })
        }
    };

    let started = Instant::now();
    let y0 = initial_one_hot(inst);
    let outcome = ssp_intersect(&f, inst.space(), &x0, &y0, observer)?;
    timings.intersection = started.elapsed();
    match outcome {
        Intersection::Infeasible { iterations } => Ok(SolveReport {
            status: Status::InfiniteMinimum,
            assignment: None,
            value: ExtValue::infinity(),
            violation: None,
            iterations,
            timings,
        }),
        Intersection::Optimal { x, iterations } => {
            let assignment = inst.decode(&x)?;
            let value = inst.evaluate(&assignment)?;
            let lifted = f.eval(&x);
            if lifted != value {
                return Err(Error::Internal(format!(
                    "lifted value {lifted} differs from instance value {value} at {assignment}"
                )));
            }
            if value.is_infinite() {
                return Err(Error::Internal("intersection ended at an infinite point".into()));
            }
            Ok(SolveReport {
                status: Status::Optimal,
                assignment: Some(assignment),
                value,
                violation: None,
                iterations,
                timings,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompletabilityCertificate {
    pub jwp: bool,
    pub zfree: bool,
    /// From the chordless-cycle oracle on the induced partial matrix.
    pub completable: bool,
}

/// Runs the three predicates independently of each other.
pub fn certify_completability(inst: &Instance, budget: &OracleBudget) -> Result<CompletabilityCertificate> {
    let h = PartialMatrix::from_instance(inst);
    let completable = completable_oracle(&h, budget)?.is_yes();
    Ok(CompletabilityCertificate { jwp: check_jwp(inst).is_ok(), zfree: check_zfree(inst).is_ok(), completable })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub r: usize,
    /// Explicit domain sizes; when absent each is drawn from `1..=dmax`.
    pub domains: Option<Vec<usize>>,
    pub dmax: usize,
    /// Number of depth levels of the cluster hierarchy (and distinct binary values).
    pub levels: usize,
    pub seed: u64,
    /// Unary costs are drawn from `0..=unary_max`.
    pub unary_max: u64,
    /// Make the deepest level `+inf`.
    pub infinite_top: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { r: 3, domains: None, dmax: 3, levels: 3, seed: 0, unary_max: 9, infinite_top: false }
    }
}

/// Strictly increasing level values: gaps drawn from `1..=3`, starting in `0..=2`.
pub fn random_levels(levels: usize, infinite_top: bool, rng: &mut impl Rng) -> Vec<ExtValue> {
    let mut out = Vec::with_capacity(levels);
    let mut next = rng.random_range(0..=2u64);
    for _ in 0..levels {
        out.push(ExtValue::from_integer(next));
        next += rng.random_range(1..=3u64);
    }
    if infinite_top {
        if let Some(last) = out.last_mut() {
            *last = ExtValue::infinity();
        }
    }
    out
}

/// A random anti-ultrametric matrix: a random laminar hierarchy over `[n]`
/// with `levels.len()` depths, each pair taking the value of the deepest
/// cluster containing both. `levels` must be strictly increasing.
pub fn random_anti_ultrametric(n: usize, levels: &[ExtValue], rng: &mut impl Rng) -> CompletedMatrix {
    assert!(!levels.is_empty(), "need at least one level");
    assert!(levels.windows(2).all(|w| w[0] < w[1]), "levels must increase strictly");
    let mut depth = vec![0u8; n * n];
    let mut stack: Vec<(Vec<usize>, usize)> = vec![((0..n).collect(), 0)];
    while let Some((items, d)) = stack.pop() {
        if items.len() < 2 {
            continue;
        }
        if d + 1 == levels.len() {
            for &i in &items {
                for &j in &items {
                    depth[i * n + j] = d as u8;
                }
            }
            continue;
        }
        let parts = rng.random_range(1..=items.len().min(3));
        let mut groups = vec![Vec::new(); parts];
        for &i in &items {
            groups[rng.random_range(0..parts)].push(i);
        }
        for (a, ga) in groups.iter().enumerate() {
            for gb in &groups[a + 1..] {
                for &i in ga {
                    for &j in gb {
                        depth[i * n + j] = d as u8;
                        depth[j * n + i] = d as u8;
                    }
                }
            }
        }
        stack.extend(groups.into_iter().map(|g| (g, d + 1)));
    }
    CompletedMatrix::from_fn(n, |i, j| levels[depth[i * n + j] as usize].clone())
}

/// An instance whose binary tables are read off `matrix` across variables.
pub fn instance_from_matrix(
    domains: Vec<usize>,
    matrix: &CompletedMatrix,
    unary: Vec<Vec<ExtValue>>,
) -> Result<Instance> {
    let mut inst = Instance::new(domains, unary)?;
    let r = inst.vars();
    let space = inst.space().clone();
    if matrix.n() != space.len() {
        return Err(Error::DimensionMismatch("matrix does not match the index space".into()));
    }
    for i in 0..r {
        for j in i + 1..r {
            let table = space
                .block(i)
                .map(|u| space.block(j).map(|v| matrix.get(u, v).clone()).collect())
                .collect();
            inst.set_binary(i, j, table)?;
        }
    }
    Ok(inst)
}

/// A random instance that is JWP and Z-free by construction: its induced
/// partial matrix is completed by the anti-ultrametric matrix it was read from.
pub fn generate_instance(cfg: &GenConfig) -> Result<Instance> {
    if cfg.r == 0 || cfg.levels == 0 {
        return Err(Error::Validation("need r >= 1 and levels >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let domains = match &cfg.domains {
        Some(d) if d.len() == cfg.r => d.clone(),
        Some(_) => return Err(Error::DimensionMismatch("domains must have r entries".into())),
        None => {
            if cfg.dmax == 0 {
                return Err(Error::Validation("need dmax >= 1".into()));
            }
            (0..cfg.r).map(|_| rng.random_range(1..=cfg.dmax)).collect()
        }
    };
    let levels = random_levels(cfg.levels, cfg.infinite_top, &mut rng);
    let n = domains.iter().sum();
    let matrix = random_anti_ultrametric(n, &levels, &mut rng);
    let unary = domains
        .iter()
        .map(|&d| (0..d).map(|_| ExtValue::from_integer(rng.random_range(0..=cfg.unary_max))).collect())
        .collect();
    instance_from_matrix(domains, &matrix, unary)
}

/// Overwrites one random positive binary cell with a fresh strictly smaller
/// value (half of it, or one more than the largest finite value for `+inf`).
/// Returns false when every binary cell is 0.
pub fn perturb_cell(inst: &mut Instance, rng: &mut impl Rng) -> bool {
    let r = inst.vars();
    let d = inst.domains().to_vec();
    let mut cells = Vec::new();
    let mut largest = ExtValue::zero();
    for i in 0..r {
        for j in i + 1..r {
            for a in 0..d[i] {
                for b in 0..d[j] {
                    let c = inst.binary(i, a, j, b);
                    if !c.is_zero() {
                        cells.push((i, a, j, b));
                    }
                    if c.is_finite() && *c > largest {
                        largest = c.clone();
                    }
                }
            }
        }
    }
    let Some(&(i, a, j, b)) = cells.choose(rng) else { return false };
    let fresh = match inst.binary(i, a, j, b).as_finite() {
        Some(v) => ExtValue::from_rational(v / num_bigint::BigInt::from(2)).expect("nonnegative"),
        None => &largest + &ExtValue::from_integer(1),
    };
    inst.set_binary_cell(i, a, j, b, fresh);
    true
}
