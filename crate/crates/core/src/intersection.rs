//! Successive shortest paths for minimizing `f|_r + delta_U`, where `f|_r`
//! is a quadratic restricted to the layer `r` and `delta_U` the indicator of
//! one-hot vectors.
//!
//! Vertices of the auxiliary graph are the flat indices `0..n` of `U`, then
//! the source `n` and the sink `n + 1`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::{BitVec, IndexSpace};
use crate::quadratic::{QuadFn, RunningSum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArcKind {
    /// Exchange inside `x`: remove the tail, add the head.
    X,
    /// Exchange inside `y` within one variable block: add the tail, remove the head.
    Y,
    /// From the source into `supp+(x - y)`.
    Source,
    /// From `supp+(y - x)` into the sink.
    Sink,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxArc {
    pub tail: usize,
    pub head: usize,
    pub kind: ArcKind,
    /// `f|_r(x + e_head - e_tail) - f|_r(x)` on `X` arcs, zero elsewhere.
    pub length: BigRational,
}

#[derive(Clone, Debug)]
pub struct AuxGraph {
    n: usize,
    arcs: Vec<AuxArc>,
    out: Vec<Vec<usize>>,
}

impl AuxGraph {
    pub fn source(&self) -> usize {
        self.n
    }

    pub fn sink(&self) -> usize {
        self.n + 1
    }

    pub fn vertex_count(&self) -> usize {
        self.n + 2
    }

    pub fn arcs(&self) -> &[AuxArc] {
        &self.arcs
    }

    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn count(&self, kind: ArcKind) -> usize {
        self.arcs.iter().filter(|a| a.kind == kind).count()
    }

    pub fn reduced_length(&self, arc: usize, p: &Potential) -> BigRational {
        let a = &self.arcs[arc];
        &a.length + &p.values[a.tail] - &p.values[a.head]
    }

    /// Graphviz rendering; path arcs are drawn bold.
    pub fn to_dot(&self, space: &IndexSpace, p: &Potential, path: &[usize]) -> String {
        let label = |v: usize| -> String {
            if v == self.source() {
                "s".into()
            } else if v == self.sink() {
                "t".into()
            } else {
                let (i, a) = space.pair(v);
                format!("({},{})", i + 1, a + 1)
            }
        };
        let mut out = String::from("digraph aux {\n  rankdir=LR;\n");
        for v in 0..self.vertex_count() {
            let _ = writeln!(out, "  v{v} [label=\"{}\"];", label(v));
        }
        for (k, a) in self.arcs.iter().enumerate() {
            let style = if path.contains(&k) { ", style=bold" } else { "" };
            let _ = writeln!(
                out,
                "  v{} -> v{} [label=\"l={} lp={}\"{style}];",
                a.tail,
                a.head,
                a.length,
                self.reduced_length(k, p)
            );
        }
        out.push_str("}\n");
        out
    }
}

/// `h_u + sum_{w in supp+(x), w != u} h_uw` for every `u`.
fn exchange_sums(f: &QuadFn, x: &BitVec) -> Vec<RunningSum> {
    let support = x.support();
    (0..f.n())
        .map(|u| {
            let mut s = RunningSum::default();
            s.add(f.linear(u));
            for &w in support.iter().filter(|&&w| w != u) {
                s.add(f.quad().get(u, w));
            }
            s
        })
        .collect()
}

/// Builds the exchange graph for `x` in `dom f|_r` (with `r` the number of
/// blocks of `space`) and one-hot `y`.
pub fn build_aux_graph(f: &QuadFn, space: &IndexSpace, x: &BitVec, y: &BitVec) -> Result<AuxGraph> {
    let n = f.n();
    let r = space.blocks();
    if space.len() != n || x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch("function, index space and vectors differ in size".into()));
    }
    if x.count_ones() != r || f.eval(x).is_infinite() {
        return Err(Error::Precondition("x is not in the domain of the layer restriction".into()));
    }
    for i in 0..r {
        if space.block(i).filter(|&u| y.get(u)).count() != 1 {
            return Err(Error::Precondition("y is not one-hot".into()));
        }
    }

    let sums = exchange_sums(f, x);
    let support = x.support();
    let mut arcs = Vec::new();
    for &u in &support {
        let leave = sums[u].value().expect("x has finite value").clone();
        for v in (0..n).filter(|&v| !x.get(v)) {
            let mut enter = sums[v].clone();
            enter.sub(f.quad().get(u, v));
            if let Some(gain) = enter.value() {
                arcs.push(AuxArc { tail: u, head: v, kind: ArcKind::X, length: gain - &leave });
            }
        }
    }
    for i in 0..r {
        let block = space.block(i);
        let chosen = block.clone().find(|&u| y.get(u)).expect("one-hot");
        for u in block.filter(|&u| u != chosen) {
            arcs.push(AuxArc { tail: u, head: chosen, kind: ArcKind::Y, length: BigRational::zero() });
        }
    }
    for u in x.support_minus(y) {
        arcs.push(AuxArc { tail: n, head: u, kind: ArcKind::Source, length: BigRational::zero() });
    }
    for v in y.support_minus(x) {
        arcs.push(AuxArc { tail: v, head: n + 1, kind: ArcKind::Sink, length: BigRational::zero() });
    }
    let mut out = vec![Vec::new(); n + 2];
    for (k, a) in arcs.iter().enumerate() {
        out[a.tail].push(k);
    }
    Ok(AuxGraph { n, arcs, out })
}

/// Vertex potentials, starting at zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    pub values: Vec<BigRational>,
}

impl Potential {
    pub fn zero(vertices: usize) -> Self {
        Potential { values: vec![BigRational::zero(); vertices] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathResult {
    /// Reduced distance from the source, `None` when unreachable.
    pub dist: Vec<Option<BigRational>>,
    /// Arc count of the chosen shortest path to each reachable vertex.
    pub hops: Vec<usize>,
    /// Arc indices of the chosen source-sink path.
    pub path: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoPath;

/// Dijkstra from the source under the key (reduced distance, arc count),
/// lower vertex index first among equal keys. The returned path is a shortest
/// source-sink path with the fewest arcs.
///
/// Errors with [`Error::Internal`] if some reduced length is negative.
pub fn shortest_path_min_hops(g: &AuxGraph, p: &Potential) -> Result<Result<PathResult, NoPath>> {
    let reduced: Vec<BigRational> = (0..g.arcs.len()).map(|k| g.reduced_length(k, p)).collect();
    if let Some(k) = reduced.iter().position(|l| l.is_negative()) {
        let a = &g.arcs[k];
        return Err(Error::Internal(format!(
            "negative reduced length {} on arc {} -> {} ({:?})",
            reduced[k], a.tail, a.head, a.kind
        )));
    }
    let vertices = g.vertex_count();
    let mut dist: Vec<Option<BigRational>> = vec![None; vertices];
    let mut hops = vec![usize::MAX; vertices];
    let mut pred: Vec<Option<usize>> = vec![None; vertices];
    let mut done = vec![false; vertices];
    let mut heap = BinaryHeap::new();
    let s = g.source();
    dist[s] = Some(BigRational::zero());
    hops[s] = 0;
    heap.push(Reverse((BigRational::zero(), 0usize, s)));
    while let Some(Reverse((d, h, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &k in &g.out[v] {
            let w = g.arcs[k].head;
            if done[w] {
                continue;
            }
            let nd = &d + &reduced[k];
            let better = match &dist[w] {
                None => true,
                Some(cur) => (&nd, h + 1) < (cur, hops[w]),
            };
            if better {
                dist[w] = Some(nd.clone());
                hops[w] = h + 1;
                pred[w] = Some(k);
                heap.push(Reverse((nd, h + 1, w)));
            }
        }
    }
    let t = g.sink();
    if dist[t].is_none() {
        return Ok(Err(NoPath));
    }
    let mut path = Vec::with_capacity(hops[t]);
    let mut v = t;
    while let Some(k) = pred[v] {
        path.push(k);
        v = g.arcs[k].tail;
    }
    path.reverse();
    Ok(Ok(PathResult { dist, hops, path }))
}

/// One augmentation, reported to observers after `x`, `y` and `p` are updated.
#[derive(Debug)]
pub struct IterationTrace<'a> {
    pub iteration: usize,
    pub graph: &'a AuxGraph,
    /// The potential the reduced lengths of this iteration were taken against.
    pub potential: &'a Potential,
    pub shortest: &'a PathResult,
    pub l1_before: usize,
    pub l1_after: usize,
    pub x: &'a BitVec,
    pub y: &'a BitVec,
}

impl IterationTrace<'_> {
    pub fn min_reduced_length(&self) -> Option<BigRational> {
        (0..self.graph.arcs.len()).map(|k| self.graph.reduced_length(k, self.potential)).min()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    /// `x = y` minimizes `f|_r + delta_U`.
    Optimal { x: BitVec, iterations: usize },
    /// The sink became unreachable while `x != y`: the two domains are disjoint.
    Infeasible { iterations: usize },
}

/// Runs successive shortest paths from `x0`, a minimizer of `f|_r`, and a
/// one-hot `y0`, until the two vectors meet.
pub fn ssp_intersect(
    f: &QuadFn,
    space: &IndexSpace,
    x0: &BitVec,
    y0: &BitVec,
    observer: &mut dyn FnMut(&IterationTrace<'_>),
) -> Result<Intersection> {
    let r = space.blocks();
    let mut x = x0.clone();
    let mut y = y0.clone();
    let mut p = Potential::zero(f.n() + 2);
    let mut iterations = 0;
    while x != y {
        if iterations >= r {
            return Err(Error::Internal(format!("more than {r} augmentations")));
        }
        let g = build_aux_graph(f, space, &x, &y)?;
        let shortest = match shortest_path_min_hops(&g, &p)? {
            Ok(sp) => sp,
            Err(NoPath) => return Ok(Intersection::Infeasible { iterations }),
        };
        let l1_before = x.l1_distance(&y);
        for &k in &shortest.path {
            let a = &g.arcs[k];
            match a.kind {
                ArcKind::X => {
                    x.sub_unit(a.tail);
                    x.add_unit(a.head);
                }
                ArcKind::Y => {
                    y.add_unit(a.tail);
                    y.sub_unit(a.head);
                }
                ArcKind::Source | ArcKind::Sink => {}
            }
        }
        // Capped at the sink distance; unreachable vertices move with the sink.
        let previous = p.clone();
        let cap = shortest.dist[g.sink()].clone().expect("sink reached");
        for (pv, d) in p.values.iter_mut().zip(&shortest.dist) {
            match d {
                Some(d) if *d < cap => *pv += d,
                _ => *pv += &cap,
            }
        }
        iterations += 1;
        let l1_after = x.l1_distance(&y);
        if l1_after + 2 != l1_before {
            return Err(Error::Internal(format!("distance went from {l1_before} to {l1_after}")));
        }
        if x.count_ones() != r || f.eval(&x).is_infinite() {
            return Err(Error::Internal("x left the domain of the layer restriction".into()));
        }
        if (0..r).any(|i| space.block(i).filter(|&u| y.get(u)).count() != 1) {
            return Err(Error::Internal("y is no longer one-hot".into()));
        }
        observer(&IterationTrace {
            iteration: iterations,
            graph: &g,
            potential: &previous,
            shortest: &shortest,
            l1_before,
            l1_after,
            x: &x,
            y: &y,
        });
    }
    Ok(Intersection::Optimal { x, iterations })
}
