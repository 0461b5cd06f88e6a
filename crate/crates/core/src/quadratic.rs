//! Quadratic set functions `f(x) = sum h_i x_i + sum_{i<j} h_ij x_i x_j` on
//! `{0,1}^n`, and the greedy minimizer over a cardinality layer.

use num_rational::BigRational;
use num_traits::Zero;

use crate::completion::{CompletedMatrix, PartialMatrix};
use crate::error::{Error, Result};
use crate::instance::{BitVec, Instance};
use crate::value::{ExtValue, Extended};

/// A quadratic with finite nonnegative linear part and a completed
/// nonnegative quadratic part. Each unordered pair `{i, j}` is counted once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadFn {
    linear: Vec<ExtValue>,
    quad: CompletedMatrix,
}

impl QuadFn {
    pub fn new(linear: Vec<ExtValue>, quad: CompletedMatrix) -> Result<Self> {
        if linear.len() != quad.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} linear coefficients for a {}x{} quadratic part",
                linear.len(),
                quad.n(),
                quad.n()
            )));
        }
        if let Some(i) = linear.iter().position(ExtValue::is_infinite) {
            return Err(Error::Validation(format!("linear coefficient h{} is not finite", i + 1)));
        }
        Ok(QuadFn { linear, quad })
    }

    pub fn n(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self, i: usize) -> &ExtValue {
        &self.linear[i]
    }

    pub fn quad(&self) -> &CompletedMatrix {
        &self.quad
    }

    pub fn eval(&self, v: &BitVec) -> ExtValue {
        assert_eq!(v.len(), self.n(), "vector length does not match the function");
        let support = v.support();
        let mut total = BigRational::zero();
        for (k, &i) in support.iter().enumerate() {
            total += self.linear[i].as_finite().expect("finite linear part");
            for &j in &support[k + 1..] {
                match self.quad.get(i, j).as_finite() {
                    Some(h) => total += h,
                    None => return ExtValue::infinity(),
                }
            }
        }
        ExtValue::from_rational(total).expect("sum of nonnegative terms")
    }

    pub fn restrict(&self, r: usize) -> LayerRestriction<'_> {
        LayerRestriction { base: self, r }
    }
}

/// `base` on vectors with exactly `r` ones, `+inf` elsewhere.
#[derive(Clone, Copy, Debug)]
pub struct LayerRestriction<'a> {
    pub base: &'a QuadFn,
    pub r: usize,
}

impl LayerRestriction<'_> {
    pub fn eval(&self, v: &BitVec) -> ExtValue {
        if v.count_ones() == self.r {
            self.base.eval(v)
        } else {
            ExtValue::infinity()
        }
    }
}

pub fn eval_quad(f: &QuadFn, v: &BitVec) -> ExtValue {
    f.eval(v)
}

pub fn eval_layer(layer: &LayerRestriction<'_>, v: &BitVec) -> ExtValue {
    layer.eval(v)
}

/// The function on `{0,1}^U` whose linear part is the unary costs and whose
/// quadratic part is `completion`, a completion of
/// [`PartialMatrix::from_instance`].
pub fn build_overline_f(inst: &Instance, completion: &CompletedMatrix) -> Result<QuadFn> {
    let n = inst.space().len();
    if completion.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "completion has size {}, index space has size {n}",
            completion.n()
        )));
    }
    debug_assert!(completion.extends(&PartialMatrix::from_instance(inst)));
    let linear = (0..inst.vars()).flat_map(|i| inst.unary_row(i).iter().cloned()).collect();
    QuadFn::new(linear, completion.clone())
}

/// A sum of extended values kept as its finite part plus the number of
/// infinite terms, so single terms can be removed again.
#[derive(Clone, Debug, Default)]
pub(crate) struct RunningSum {
    pub finite: BigRational,
    pub infinite: usize,
}

impl RunningSum {
    pub fn add(&mut self, v: &ExtValue) {
        match v.as_finite() {
            Some(r) => self.finite += r,
            None => self.infinite += 1,
        }
    }

    pub fn sub(&mut self, v: &ExtValue) {
        match v.as_finite() {
            Some(r) => self.finite -= r,
            None => self.infinite -= 1,
        }
    }

    pub fn value(&self) -> Option<&BigRational> {
        (self.infinite == 0).then_some(&self.finite)
    }
}

/// The minimum of `f|_r` is `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Infeasible;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyOutcome {
    pub x: BitVec,
    pub value: ExtValue,
    /// Coordinates in the order they were added.
    pub order: Vec<usize>,
    /// `f` after each addition; `prefix_values[k]` is the value on layer `k + 1`.
    pub prefix_values: Vec<ExtValue>,
}

/// Minimizes `f` over vectors with exactly `r` ones by adding, `r` times,
/// the coordinate whose addition is cheapest (lowest index on ties). Optimal
/// when `f` is M♮-convex.
pub fn greedy_min_layer(f: &QuadFn, r: usize) -> Result<GreedyOutcome, Infeasible> {
    let n = f.n();
    assert!(r <= n, "layer {r} exceeds dimension {n}");
    debug_assert!(f.quad().is_anti_ultrametric(), "greedy needs an M♮-convex function");
    // gain[u] = h_u + sum_{w in x} h_uw
    let mut gain: Vec<RunningSum> = (0..n)
        .map(|u| {
            let mut s = RunningSum::default();
            s.add(f.linear(u));
            s
        })
        .collect();
    let mut x = BitVec::zeros(n);
    let mut value = BigRational::zero();
    let mut order = Vec::with_capacity(r);
    let mut prefix_values = Vec::with_capacity(r);
    for _ in 0..r {
        let mut pick: Option<(usize, &BigRational)> = None;
        for (u, g) in gain.iter().enumerate() {
            if x.get(u) {
                continue;
            }
            if let Some(gv) = g.value() {
                if pick.is_none_or(|(_, best)| gv < best) {
                    pick = Some((u, gv));
                }
            }
        }
        let Some((u, gu)) = pick else { return Err(Infeasible) };
        value += gu;
        x.add_unit(u);
        order.push(u);
        prefix_values.push(ExtValue::from_rational(value.clone()).expect("nonnegative"));
        for (w, g) in gain.iter_mut().enumerate() {
            if !x.get(w) {
                g.add(f.quad().get(u, w));
            }
        }
    }
    Ok(GreedyOutcome {
        x,
        value: ExtValue::from_rational(value).expect("nonnegative"),
        order,
        prefix_values,
    })
}

/// A quadratic with arbitrary signed coefficients, for exercising the
/// M♮-convexity characterization outside the nonnegative setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedQuadFn {
    linear: Vec<Extended>,
    quad: Vec<Extended>,
}

impl SignedQuadFn {
    /// Quadratic part all zero.
    pub fn new(linear: Vec<Extended>) -> Self {
        let n = linear.len();
        SignedQuadFn { linear, quad: vec![Extended::zero(); n * n.saturating_sub(1) / 2] }
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let n = self.n();
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        assert!(i != j && j < n, "invalid pair ({i}, {j})");
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }

    pub fn n(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[Extended] {
        &self.linear
    }

    pub fn set_linear(&mut self, i: usize, h: Extended) {
        self.linear[i] = h;
    }

    pub fn quad(&self, i: usize, j: usize) -> &Extended {
        &self.quad[self.slot(i, j)]
    }

    pub fn set_quad(&mut self, i: usize, j: usize, h: Extended) {
        let s = self.slot(i, j);
        self.quad[s] = h;
    }

    /// Value at the 0/1 vector whose bit `i` is bit `i` of `mask`.
    pub fn eval_mask(&self, mask: u64) -> Extended {
        let n = self.n();
        let mut total = Extended::zero();
        for i in (0..n).filter(|&i| mask >> i & 1 == 1) {
            total = &total + &self.linear[i];
            for j in (i + 1..n).filter(|&j| mask >> j & 1 == 1) {
                total = &total + self.quad(i, j);
            }
        }
        total
    }
}

impl From<&QuadFn> for SignedQuadFn {
    fn from(f: &QuadFn) -> Self {
        let n = f.n();
        let mut g = SignedQuadFn::new(f.linear.iter().map(ExtValue::to_extended).collect());
        for i in 0..n {
            for j in i + 1..n {
                g.set_quad(i, j, f.quad.get(i, j).to_extended());
            }
        }
        g
    }
}
