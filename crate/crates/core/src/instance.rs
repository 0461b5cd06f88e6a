//! The binary VCSP instance model and its one-hot index space.
//!
//! Variables and values are 0-based in the API. The text formats and all
//! human-facing output use 1-based numbering.

use std::fmt;

use crate::error::{Error, Result};
use crate::value::ExtValue;

/// Flat numbering of the variable/value pairs `(i, a)`, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSpace {
    offsets: Vec<usize>,
    owner: Vec<usize>,
}

impl IndexSpace {
    pub fn new(domains: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(domains.len() + 1);
        let mut owner = Vec::new();
        offsets.push(0);
        for (i, &d) in domains.iter().enumerate() {
            owner.extend(std::iter::repeat_n(i, d));
            offsets.push(owner.len());
        }
        IndexSpace { offsets, owner }
    }

    /// `n`, the total number of pairs.
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn flat(&self, var: usize, val: usize) -> usize {
        debug_assert!(val < self.block_len(var));
        self.offsets[var] + val
    }

    pub fn pair(&self, u: usize) -> (usize, usize) {
        let var = self.owner[u];
        (var, u - self.offsets[var])
    }

    pub fn block_of(&self, u: usize) -> usize {
        self.owner[u]
    }

    pub fn block(&self, var: usize) -> std::ops::Range<usize> {
        self.offsets[var]..self.offsets[var + 1]
    }

    pub fn block_len(&self, var: usize) -> usize {
        self.offsets[var + 1] - self.offsets[var]
    }
}

/// A full assignment `x_i in D_i`, 0-based values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// Builds from 1-based values, as written in the text formats.
    pub fn from_one_based(values: &[usize]) -> Option<Self> {
        values
            .iter()
            .map(|&v| v.checked_sub(1))
            .collect::<Option<Vec<_>>>()
            .map(Assignment)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        f.write_str(")")
    }
}

/// A 0/1 vector over the flat index space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec(Vec<bool>);

impl BitVec {
    pub fn zeros(n: usize) -> Self {
        BitVec(vec![false; n])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitVec(bits)
    }

    pub fn from_support(n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(n);
        for u in support {
            v.0[u] = true;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, u: usize) -> bool {
        self.0[u]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Sets coordinate `u`, which must currently be 0.
    pub fn add_unit(&mut self, u: usize) {
        assert!(!self.0[u], "coordinate {u} already set");
        self.0[u] = true;
    }

    /// Clears coordinate `u`, which must currently be 1.
    pub fn sub_unit(&mut self, u: usize) {
        assert!(self.0[u], "coordinate {u} not set");
        self.0[u] = false;
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// `supp+(self)`, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(u, &b)| b.then_some(u))
            .collect()
    }

    /// `supp+(self - other)`.
    pub fn support_minus(&self, other: &BitVec) -> Vec<usize> {
        (0..self.len())
            .filter(|&u| self.0[u] && !other.0[u])
            .collect()
    }

    /// `||self - other||_1`.
    pub fn l1_distance(&self, other: &BitVec) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A binary VCSP: `f(x) = sum_i c_i(x_i) + sum_{i<j} c_ij(x_i, x_j)`.
///
/// Unary costs are finite. Binary tables are stored for `i < j` in row-major
/// `d_i x d_j` layout; absent pairs are the all-zeros table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    domains: Vec<usize>,
    space: IndexSpace,
    unary: Vec<Vec<ExtValue>>,
    binary: Vec<Option<Vec<ExtValue>>>,
    zero: ExtValue,
}

fn pair_slot(r: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < r);
    i * (2 * r - i - 1) / 2 + (j - i - 1)
}

impl Instance {
    pub fn new(domains: Vec<usize>, unary: Vec<Vec<ExtValue>>) -> Result<Self> {
        let r = domains.len();
        if r == 0 {
            return Err(Error::Validation("instance needs at least one variable".into()));
        }
        if let Some(i) = domains.iter().position(|&d| d == 0) {
            return Err(Error::Validation(format!("variable {} has an empty domain", i + 1)));
        }
        if unary.len() != r {
            return Err(Error::DimensionMismatch(format!(
                "{} unary rows for {r} variables",
                unary.len()
            )));
        }
        for (i, (row, &d)) in unary.iter().zip(&domains).enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "unary row {} has {} entries, domain size is {d}",
                    i + 1,
                    row.len()
                )));
            }
            if row.iter().any(ExtValue::is_infinite) {
                return Err(Error::Validation(format!(
                    "unary costs must be finite (variable {})",
                    i + 1
                )));
            }
        }
        let space = IndexSpace::new(&domains);
        Ok(Instance {
            binary: vec![None; r * (r - 1) / 2],
            domains,
            space,
            unary,
            zero: ExtValue::zero(),
        })
    }

    /// Sets the table `c_ij` as `d_i` rows of `d_j` values. Either orientation
    /// is accepted; `(j, i)` tables are transposed into place.
    pub fn set_binary(&mut self, i: usize, j: usize, table: Vec<Vec<ExtValue>>) -> Result<()> {
        let r = self.vars();
        if i == j || i >= r || j >= r {
            return Err(Error::Validation(format!("invalid variable pair ({}, {})", i + 1, j + 1)));
        }
        let (di, dj) = (self.domains[i], self.domains[j]);
        if table.len() != di || table.iter().any(|row| row.len() != dj) {
            return Err(Error::DimensionMismatch(format!(
                "table for ({}, {}) must be {di} x {dj}",
                i + 1,
                j + 1
            )));
        }
        let flat: Vec<ExtValue> = if i < j {
            table.into_iter().flatten().collect()
        } else {
            (0..dj)
                .flat_map(|b| table.iter().map(move |row| row[b].clone()))
                .collect()
        };
        self.binary[pair_slot(r, i.min(j), i.max(j))] = Some(flat);
        Ok(())
    }

    pub fn with_binary(mut self, i: usize, j: usize, table: Vec<Vec<ExtValue>>) -> Result<Self> {
        self.set_binary(i, j, table)?;
        Ok(self)
    }

    /// Overwrites one cell `c_ij(a, b)`, materializing the table if absent.
    pub fn set_binary_cell(&mut self, i: usize, a: usize, j: usize, b: usize, value: ExtValue) {
        let (i, a, j, b) = if i < j { (i, a, j, b) } else { (j, b, i, a) };
        let cols = self.domains[j];
        let cells = self.domains[i] * cols;
        let slot = pair_slot(self.vars(), i, j);
        let table = self.binary[slot].get_or_insert_with(|| vec![ExtValue::zero(); cells]);
        table[a * cols + b] = value;
    }

    pub fn set_unary(&mut self, i: usize, a: usize, value: ExtValue) -> Result<()> {
        if value.is_infinite() {
            return Err(Error::Validation("unary costs must be finite".into()));
        }
        self.unary[i][a] = value;
        Ok(())
    }

    pub fn vars(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[usize] {
        &self.domains
    }

    pub fn space(&self) -> &IndexSpace {
        &self.space
    }

    pub fn unary(&self, i: usize, a: usize) -> &ExtValue {
        &self.unary[i][a]
    }

    pub fn unary_row(&self, i: usize) -> &[ExtValue] {
        &self.unary[i]
    }

    /// `c_ij(a, b)`, symmetric in `(i, a) <-> (j, b)`.
    pub fn binary(&self, i: usize, a: usize, j: usize, b: usize) -> &ExtValue {
        debug_assert_ne!(i, j);
        let (i, a, j, b) = if i < j { (i, a, j, b) } else { (j, b, i, a) };
        match &self.binary[pair_slot(self.vars(), i, j)] {
            Some(t) => &t[a * self.domains[j] + b],
            None => &self.zero,
        }
    }

    /// Whether an explicit table is stored for the pair.
    pub fn has_binary(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i.min(j), i.max(j));
        self.binary[pair_slot(self.vars(), i, j)].is_some()
    }

    /// Number of assignments, saturating.
    pub fn assignment_count(&self) -> u128 {
        self.domains
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn validate(&self, x: &Assignment) -> Result<()> {
        if x.0.len() != self.vars() {
            return Err(Error::Validation(format!(
                "assignment has {} values for {} variables",
                x.0.len(),
                self.vars()
            )));
        }
        for (i, (&v, &d)) in x.0.iter().zip(&self.domains).enumerate() {
            if v >= d {
                return Err(Error::Validation(format!(
                    "value {} out of range for variable {} (domain size {d})",
                    v + 1,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<ExtValue> {
        self.validate(x)?;
        Ok(self.evaluate_unchecked(&x.0))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[usize]) -> ExtValue {
        let r = self.vars();
        let mut total: ExtValue = (0..r).map(|i| &self.unary[i][x[i]]).sum();
        for i in 0..r {
            for j in i + 1..r {
                let c = self.binary(i, x[i], j, x[j]);
                if c.is_infinite() {
                    return ExtValue::infinity();
                }
                if !c.is_zero() {
                    total = &total + c;
                }
            }
        }
        total
    }

    pub fn encode(&self, x: &Assignment) -> Result<BitVec> {
        self.validate(x)?;
        Ok(BitVec::from_support(
            self.space.len(),
            x.0.iter().enumerate().map(|(i, &a)| self.space.flat(i, a)),
        ))
    }

    /// Inverse of [`Instance::encode`]; succeeds exactly on one-hot vectors.
    pub fn decode(&self, v: &BitVec) -> Result<Assignment> {
        if v.len() != self.space.len() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for index space of size {}",
                v.len(),
                self.space.len()
            )));
        }
        let mut x = Vec::with_capacity(self.vars());
        for i in 0..self.vars() {
            let ones: Vec<usize> = self.space.block(i).filter(|&u| v.get(u)).collect();
            if ones.len() != 1 {
                return Err(Error::InfeasiblePoint { block: i, ones: ones.len() });
            }
            x.push(ones[0] - self.space.block(i).start);
        }
        Ok(Assignment(x))
    }

    /// Membership in `dom delta_U`.
    pub fn is_one_hot(&self, v: &BitVec) -> bool {
        self.decode(v).is_ok()
    }
}

pub fn one_hot_encode(inst: &Instance, x: &Assignment) -> Result<BitVec> {
    inst.encode(x)
}

pub fn one_hot_decode(inst: &Instance, v: &BitVec) -> Result<Assignment> {
    inst.decode(v)
}

pub fn evaluate_instance(inst: &Instance, x: &Assignment) -> Result<ExtValue> {
    inst.evaluate(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vals(v: &[u64]) -> Vec<ExtValue> {
        v.iter().map(|&x| ExtValue::from_integer(x)).collect()
    }

    fn zeros(domains: &[usize]) -> Instance {
        let unary = domains.iter().map(|&d| vec![ExtValue::zero(); d]).collect();
        Instance::new(domains.to_vec(), unary).unwrap()
    }

    fn x1(v: &[usize]) -> Assignment {
        Assignment::from_one_based(v).unwrap()
    }

    fn bits(v: &[u8]) -> BitVec {
        BitVec::from_bits(v.iter().map(|&b| b == 1).collect())
    }

    fn small_instance() -> Instance {
        Instance::new(vec![2, 2], vec![vals(&[0, 1]), vals(&[0, 2])])
            .unwrap()
            .with_binary(0, 1, vec![vals(&[5, 0]), vals(&[0, 0])])
            .unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(zeros(&[2, 3]).encode(&x1(&[2, 1])).unwrap(), bits(&[0, 1, 1, 0, 0]));
        assert_eq!(zeros(&[2]).encode(&x1(&[1])).unwrap(), bits(&[1, 0]));
        assert_eq!(
            zeros(&[2, 2, 2]).encode(&x1(&[1, 2, 1])).unwrap(),
            bits(&[1, 0, 0, 1, 1, 0])
        );
        assert!(zeros(&[2, 3]).encode(&x1(&[3, 1])).is_err());
    }

    #[test]
    fn decode_examples() {
        assert_eq!(zeros(&[2, 3]).decode(&bits(&[0, 1, 1, 0, 0])).unwrap(), x1(&[2, 1]));
        assert!(matches!(
            zeros(&[2, 2]).decode(&bits(&[1, 1, 0, 1])),
            Err(Error::InfeasiblePoint { block: 0, ones: 2 })
        ));
        assert!(matches!(
            zeros(&[2, 2]).decode(&bits(&[0, 0, 1, 0])),
            Err(Error::InfeasiblePoint { block: 0, ones: 0 })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let inst = small_instance();
        assert_eq!(inst.evaluate(&x1(&[2, 1])).unwrap(), ExtValue::from_integer(1));
        assert_eq!(inst.evaluate(&x1(&[1, 1])).unwrap(), ExtValue::from_integer(5));
        let mut inf = inst.clone();
        inf.set_binary_cell(0, 1, 1, 1, ExtValue::infinity());
        assert!(inf.evaluate(&x1(&[2, 2])).unwrap().is_infinite());
    }

    #[test]
    fn infinite_unary_rejected() {
        assert!(Instance::new(vec![1], vec![vec![ExtValue::infinity()]]).is_err());
        assert!(Instance::new(vec![0], vec![vec![]]).is_err());
        assert!(Instance::new(vec![2], vec![vals(&[1])]).is_err());
    }

    #[test]
    fn index_space_is_lexicographic() {
        let s = IndexSpace::new(&[2, 1, 3]);
        let flat: Vec<_> = (0..s.len()).map(|u| s.pair(u)).collect();
        assert_eq!(flat, vec![(0, 0), (0, 1), (1, 0), (2, 0), (2, 1), (2, 2)]);
        assert_eq!(s.flat(2, 1), 4);
    }

    fn arb_instance() -> impl Strategy<Value = (Vec<usize>, Vec<u64>, Vec<usize>)> {
        proptest::collection::vec(1usize..4, 1..5).prop_flat_map(|domains| {
            let n: usize = domains.iter().sum();
            let x: Vec<_> = domains.iter().map(|&d| 0..d).collect();
            (Just(domains), proptest::collection::vec(0u64..6, n * n), x)
        })
    }

    proptest! {
        #[test]
        fn decode_inverts_encode((domains, _, x) in arb_instance()) {
            let inst = zeros(&domains);
            let x = Assignment(x);
            let v = inst.encode(&x).unwrap();
            prop_assert_eq!(v.count_ones(), domains.len());
            prop_assert_eq!(inst.decode(&v).unwrap(), x);
        }

        #[test]
        fn decode_accepts_only_one_hot(domains in proptest::collection::vec(1usize..4, 1..4), mask in any::<u16>()) {
            let inst = zeros(&domains);
            let n: usize = domains.iter().sum();
            let v = BitVec::from_bits((0..n).map(|u| mask >> u & 1 == 1).collect());
            let one_hot = (0..domains.len())
                .all(|i| inst.space().block(i).filter(|&u| v.get(u)).count() == 1);
            prop_assert_eq!(inst.decode(&v).is_ok(), one_hot);
        }

        #[test]
        fn storage_orientation_is_irrelevant((domains, cells, x) in arb_instance()) {
            prop_assume!(domains.len() >= 2);
            let r = domains.len();
            let mut forward = zeros(&domains);
            let mut backward = zeros(&domains);
            let mut k = 0;
            for i in 0..r {
                for j in i + 1..r {
                    let (di, dj) = (domains[i], domains[j]);
                    let t: Vec<Vec<ExtValue>> = (0..di)
                        .map(|a| (0..dj).map(|b| ExtValue::from_integer(cells[(k + a * dj + b) % cells.len()])).collect())
                        .collect();
                    k += 1;
                    let transposed: Vec<Vec<ExtValue>> = (0..dj)
                        .map(|b| (0..di).map(|a| t[a][b].clone()).collect())
                        .collect();
                    forward.set_binary(i, j, t).unwrap();
                    backward.set_binary(j, i, transposed).unwrap();
                }
            }
            let x = Assignment(x);
            prop_assert_eq!(forward.evaluate(&x).unwrap(), backward.evaluate(&x).unwrap());
            prop_assert_eq!(forward, backward);
        }
    }
}
