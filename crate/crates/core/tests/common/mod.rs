#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zfree_core::{BitVec, ExtValue, Instance, PartialMatrix, QuadFn};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn v(x: u64) -> ExtValue {
    ExtValue::from_integer(x)
}

pub fn inf() -> ExtValue {
    ExtValue::infinity()
}

pub fn pick(rng: &mut impl Rng, palette: &[ExtValue]) -> ExtValue {
    palette[rng.random_range(0..palette.len())].clone()
}

/// Each off-diagonal entry is undefined with probability `undefined`.
pub fn random_partial(rng: &mut impl Rng, n: usize, palette: &[ExtValue], undefined: f64) -> PartialMatrix {
    let mut cells = vec![None; n * n];
    for i in 0..n {
        for j in i + 1..n {
            if !rng.random_bool(undefined) {
                cells[i * n + j] = Some(pick(rng, palette));
            }
        }
    }
    PartialMatrix::from_fn(n, |i, j| cells[i.min(j) * n + i.max(j)].clone())
}

/// Unrestricted random tables over `palette`; unary costs finite in `0..=3`.
pub fn random_instance(rng: &mut impl Rng, r: usize, dmax: usize, palette: &[ExtValue]) -> Instance {
    let domains: Vec<usize> = (0..r).map(|_| rng.random_range(1..=dmax)).collect();
    let unary = domains.iter().map(|&d| (0..d).map(|_| v(rng.random_range(0..=3))).collect()).collect();
    let mut inst = Instance::new(domains.clone(), unary).unwrap();
    for i in 0..r {
        for j in i + 1..r {
            let table = (0..domains[i]).map(|_| (0..domains[j]).map(|_| pick(rng, palette)).collect()).collect();
            inst.set_binary(i, j, table).unwrap();
        }
    }
    inst
}

pub fn mask_to_bits(n: usize, mask: u64) -> BitVec {
    BitVec::from_bits((0..n).map(|i| mask >> i & 1 == 1).collect())
}

/// Minimum of `f` over all vectors with exactly `r` ones.
pub fn layer_min(f: &QuadFn, r: usize) -> ExtValue {
    let n = f.n();
    (0..1u64 << n)
        .filter(|m| m.count_ones() as usize == r)
        .map(|m| f.eval(&mask_to_bits(n, m)))
        .min()
        .unwrap()
}
