//! The M♮-convex completion problem.
//!
//! Matrices are symmetric with no diagonal. Entries are stored as codes into
//! a sorted palette of the distinct values, so every order-based computation
//! (forests, bottlenecks, threshold graphs, the anti-ultrametric test) runs on
//! `u32` comparisons. Completed values are always drawn from the palette.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracles::OracleBudget;
use crate::value::ExtValue;

const UNDEFINED: u32 = u32::MAX;

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(j < n && i != j);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn tri_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Collects values, then hands out codes that respect their order.
#[derive(Default)]
struct Interner {
    index: HashMap<ExtValue, u32>,
    values: Vec<ExtValue>,
}

impl Interner {
    fn intern(&mut self, v: &ExtValue) -> u32 {
        if let Some(&c) = self.index.get(v) {
            return c;
        }
        let c = self.values.len() as u32;
        self.index.insert(v.clone(), c);
        self.values.push(v.clone());
        c
    }

    /// Sorted palette plus the map from provisional to final codes.
    fn finish(self) -> (Vec<ExtValue>, Vec<u32>) {
        let mut order: Vec<u32> = (0..self.values.len() as u32).collect();
        order.sort_by(|&a, &b| self.values[a as usize].cmp(&self.values[b as usize]));
        let mut remap = vec![0; order.len()];
        for (rank, &c) in order.iter().enumerate() {
            remap[c as usize] = rank as u32;
        }
        let palette = order.iter().map(|&c| self.values[c as usize].clone()).collect();
        (palette, remap)
    }
}

fn build_codes(
    n: usize,
    mut cell: impl FnMut(usize, usize) -> Option<ExtValue>,
) -> (Vec<ExtValue>, Vec<u32>) {
    let mut interner = Interner::default();
    let mut codes = Vec::with_capacity(tri_len(n));
    for i in 0..n {
        for j in i + 1..n {
            codes.push(match cell(i, j) {
                Some(v) => interner.intern(&v),
                None => UNDEFINED,
            });
        }
    }
    let (palette, remap) = interner.finish();
    for c in codes.iter_mut().filter(|c| **c != UNDEFINED) {
        *c = remap[*c as usize];
    }
    (palette, codes)
}

/// Read access shared by partial and completed matrices.
pub trait Coefficients {
    fn size(&self) -> usize;

    /// Sorted distinct values; codes index into this.
    fn palette(&self) -> &[ExtValue];

    /// Order-preserving code of entry `{i, j}`, `None` if undefined.
    fn code(&self, i: usize, j: usize) -> Option<u32>;

    fn entry(&self, i: usize, j: usize) -> Option<&ExtValue> {
        self.code(i, j).map(|c| &self.palette()[c as usize])
    }
}

/// Symmetric off-diagonal coefficients, each defined and nonnegative or undefined.
#[derive(Clone, PartialEq, Eq)]
pub struct PartialMatrix {
    n: usize,
    palette: Vec<ExtValue>,
    codes: Vec<u32>,
}

impl PartialMatrix {
    /// All entries undefined.
    pub fn undefined(n: usize) -> Self {
        PartialMatrix { n, palette: Vec::new(), codes: vec![UNDEFINED; tri_len(n)] }
    }

    /// Entry `{i, j}` (called with `i < j`) from `cell`.
    pub fn from_fn(n: usize, cell: impl FnMut(usize, usize) -> Option<ExtValue>) -> Self {
        let (palette, codes) = build_codes(n, cell);
        PartialMatrix { n, palette, codes }
    }

    /// From 0-based `(i, j, value)` triples in either orientation.
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (usize, usize, ExtValue)>) -> Result<Self> {
        let mut cells: Vec<Option<ExtValue>> = vec![None; tri_len(n)];
        for (i, j, v) in entries {
            if i == j || i >= n || j >= n {
                return Err(Error::Validation(format!(
                    "invalid matrix entry ({}, {}) for n = {n}",
                    i + 1,
                    j + 1
                )));
            }
            let slot = &mut cells[tri_index(n, i, j)];
            if slot.is_some() {
                return Err(Error::Validation(format!("duplicate entry ({}, {})", i + 1, j + 1)));
            }
            *slot = Some(v);
        }
        Ok(Self::from_fn(n, |i, j| cells[tri_index(n, i, j)].take()))
    }

    /// The matrix with `h_{(i,a),(j,b)} = c_ij(a, b)` across variables and
    /// undefined within a variable.
    pub fn from_instance(inst: &Instance) -> Self {
        let space = inst.space();
        Self::from_fn(space.len(), |u, v| {
            let (i, a) = space.pair(u);
            let (j, b) = space.pair(v);
            (i != j).then(|| inst.binary(i, a, j, b).clone())
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&ExtValue> {
        self.entry(i, j)
    }

    pub fn defined_count(&self) -> usize {
        self.codes.iter().filter(|&&c| c != UNDEFINED).count()
    }

    pub fn graph(&self) -> AssignmentGraph<'_> {
        AssignmentGraph::new(self)
    }
}

impl Coefficients for PartialMatrix {
    fn size(&self) -> usize {
        self.n
    }

    fn palette(&self) -> &[ExtValue] {
        &self.palette
    }

    fn code(&self, i: usize, j: usize) -> Option<u32> {
        let c = self.codes[tri_index(self.n, i, j)];
        (c != UNDEFINED).then_some(c)
    }
}

impl fmt::Debug for PartialMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialMatrix(n={}", self.n)?;
        for i in 0..self.n {
            for j in i + 1..self.n {
                match self.get(i, j) {
                    Some(v) => write!(f, ", h{},{}={v}", i + 1, j + 1)?,
                    None => write!(f, ", h{},{}=?", i + 1, j + 1)?,
                }
            }
        }
        f.write_str(")")
    }
}

/// Symmetric off-diagonal coefficients, all defined.
#[derive(Clone, PartialEq, Eq)]
pub struct CompletedMatrix {
    n: usize,
    palette: Vec<ExtValue>,
    codes: Vec<u32>,
}

impl CompletedMatrix {
    pub fn from_fn(n: usize, mut cell: impl FnMut(usize, usize) -> ExtValue) -> Self {
        let (palette, codes) = build_codes(n, |i, j| Some(cell(i, j)));
        CompletedMatrix { n, palette, codes }
    }

    /// A constant matrix.
    pub fn constant(n: usize, value: ExtValue) -> Self {
        CompletedMatrix { n, palette: vec![value], codes: vec![0; tri_len(n)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &ExtValue {
        &self.palette[self.codes[tri_index(self.n, i, j)] as usize]
    }

    pub fn code_of(&self, i: usize, j: usize) -> u32 {
        self.codes[tri_index(self.n, i, j)]
    }

    /// Agreement with `h` on every entry `h` defines.
    pub fn extends(&self, h: &PartialMatrix) -> bool {
        self.n == h.n
            && (0..self.n).all(|i| (i + 1..self.n).all(|j| h.get(i, j).is_none_or(|v| v == self.get(i, j))))
    }

    /// Whether the anti-ultrametric inequality holds for every triple, in
    /// `O(n^2)`.
    ///
    /// A symmetric matrix is anti-ultrametric exactly when each entry equals
    /// the largest bottleneck over all paths between its endpoints, and on a
    /// complete graph those bottlenecks are read off a maximum spanning tree.
    pub fn is_anti_ultrametric(&self) -> bool {
        let n = self.n;
        if n < 3 {
            return true;
        }
        let tree = Forest::maximum_spanning_tree_dense(self);
        let mut best = vec![0u32; n];
        for src in 0..n {
            tree.bottlenecks_from(src, &mut best);
            if (src + 1..n).any(|j| best[j] != self.code_of(src, j)) {
                return false;
            }
        }
        true
    }

    /// Lexicographically first triple violating the anti-ultrametric
    /// inequality, by exhaustive scan.
    pub fn first_anti_ultrametric_violation(&self) -> Option<(usize, usize, usize)> {
        first_violating_triple(self.n, |i, j| Some(self.code_of(i, j)))
    }
}

impl Coefficients for CompletedMatrix {
    fn size(&self) -> usize {
        self.n
    }

    fn palette(&self) -> &[ExtValue] {
        &self.palette
    }

    fn code(&self, i: usize, j: usize) -> Option<u32> {
        Some(self.code_of(i, j))
    }
}

impl fmt::Debug for CompletedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CompletedMatrix(n={}", self.n)?;
        for i in 0..self.n {
            for j in i + 1..self.n {
                write!(f, ", h{},{}={}", i + 1, j + 1, self.get(i, j))?;
            }
        }
        f.write_str(")")
    }
}

/// Scans triples `i < j < k` in lexicographic order and returns the first
/// `(p, q, s)` with `h_pq < min(h_ps, h_qs)`, skipping triples with an
/// undefined entry.
pub(crate) fn first_violating_triple<T: Ord>(
    n: usize,
    get: impl Fn(usize, usize) -> Option<T>,
) -> Option<(usize, usize, usize)> {
    for i in 0..n {
        for j in i + 1..n {
            let Some(ij) = get(i, j) else { continue };
            for k in j + 1..n {
                let (Some(ik), Some(jk)) = (get(i, k), get(j, k)) else { continue };
                if ij < ik && ij < jk {
                    return Some((i, j, k));
                }
                if ik < ij && ik < jk {
                    return Some((i, k, j));
                }
                if jk < ij && jk < ik {
                    return Some((j, k, i));
                }
            }
        }
    }
    None
}

/// The assignment graph: vertices `[n]`, one edge per defined entry,
/// weighted by its value.
pub struct AssignmentGraph<'a> {
    matrix: &'a PartialMatrix,
    adjacency: Vec<Vec<usize>>,
}

impl<'a> AssignmentGraph<'a> {
    pub fn new(matrix: &'a PartialMatrix) -> Self {
        let n = matrix.n;
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if matrix.code(i, j).is_some() {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        AssignmentGraph { matrix, adjacency }
    }

    pub fn vertex_count(&self) -> usize {
        self.matrix.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.matrix.code(i, j).is_some()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<&ExtValue> {
        self.matrix.get(i, j)
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.matrix.n).flat_map(move |i| {
            self.adjacency[i].iter().copied().filter(move |&j| j > i).map(move |j| (i, j))
        })
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// A spanning forest with coded edge weights.
struct Forest {
    adjacency: Vec<Vec<(usize, u32)>>,
    component: Vec<usize>,
}

impl Forest {
    fn from_edges(n: usize, edges: &[(usize, usize, u32)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        let mut uf = UnionFind::new(n);
        for &(i, j, w) in edges {
            if uf.union(i, j) {
                adjacency[i].push((j, w));
                adjacency[j].push((i, w));
            }
        }
        let component = (0..n).map(|v| uf.find(v)).collect();
        Forest { adjacency, component }
    }

    /// Kruskal on the defined entries: heaviest first, ties in lexicographic
    /// edge order.
    fn maximum_spanning_forest<M: Coefficients>(m: &M) -> Self {
        let n = m.size();
        let mut edges: Vec<(usize, usize, u32)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if let Some(c) = m.code(i, j) {
                    edges.push((i, j, c));
                }
            }
        }
        edges.sort_by_key(|e| std::cmp::Reverse(e.2));
        Self::from_edges(n, &edges)
    }

    /// Prim on a complete coded matrix, `O(n^2)`.
    fn maximum_spanning_tree_dense(m: &CompletedMatrix) -> Self {
        let n = m.n;
        let mut in_tree = vec![false; n];
        let mut best: Vec<Option<(u32, usize)>> = vec![None; n];
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        in_tree[0] = true;
        for (v, b) in best.iter_mut().enumerate().skip(1) {
            *b = Some((m.code_of(0, v), 0));
        }
        for _ in 1..n {
            let mut pick: Option<usize> = None;
            for v in 0..n {
                if in_tree[v] {
                    continue;
                }
                if pick.is_none_or(|p| best[v].unwrap().0 > best[p].unwrap().0) {
                    pick = Some(v);
                }
            }
            let v = pick.expect("a vertex outside the tree");
            let (w, parent) = best[v].unwrap();
            in_tree[v] = true;
            edges.push((parent, v, w));
            for u in 0..n {
                if !in_tree[u] {
                    let c = m.code_of(v, u);
                    if c > best[u].unwrap().0 {
                        best[u] = Some((c, v));
                    }
                }
            }
        }
        Self::from_edges(n, &edges)
    }

    /// For every vertex reachable from `src`, the minimum edge code on the
    /// forest path; unreachable vertices are left untouched.
    fn bottlenecks_from(&self, src: usize, out: &mut [u32]) {
        let mut stack = vec![(src, usize::MAX, u32::MAX)];
        while let Some((v, parent, b)) = stack.pop() {
            out[v] = b;
            for &(u, w) in &self.adjacency[v] {
                if u != parent {
                    stack.push((u, v, b.min(w)));
                }
            }
        }
    }
}

/// Why a partial matrix has no M♮-convex completion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotCompletable {
    /// `h_ij < min(h_ik, h_jk)` in the attempted completion (or among
    /// defined entries).
    Triple {
        i: usize,
        j: usize,
        k: usize,
        values: [ExtValue; 3],
    },
    /// A chordless cycle of the assignment graph with a unique minimum edge.
    Cycle(ChordlessCycle),
}

impl fmt::Display for NotCompletable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotCompletable::Triple { i, j, k, values } => write!(
                f,
                "h{a},{b} = {} < min(h{a},{c} = {}, h{b},{c} = {})",
                values[0],
                values[1],
                values[2],
                a = i + 1,
                b = j + 1,
                c = k + 1
            ),
            NotCompletable::Cycle(c) => write!(f, "{c}"),
        }
    }
}

/// A chordless cycle `v_0 v_1 ... v_{m-1}` and its edge weights
/// `w(v_0 v_1), ..., w(v_{m-1} v_0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChordlessCycle {
    pub vertices: Vec<usize>,
    pub weights: Vec<ExtValue>,
}

impl ChordlessCycle {
    pub fn min_multiplicity(&self) -> usize {
        let Some(min) = self.weights.iter().min() else { return 0 };
        self.weights.iter().filter(|w| *w == min).count()
    }
}

impl fmt::Display for ChordlessCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("chordless cycle")?;
        for (v, w) in self.vertices.iter().zip(&self.weights) {
            write!(f, " {} -[{w}]-", v + 1)?;
        }
        match self.vertices.first() {
            Some(v) => write!(f, " {}", v + 1),
            None => Ok(()),
        }
    }
}

/// Nonnegativity holds by construction of [`ExtValue`]; checks the
/// anti-ultrametric inequality on every fully defined triple.
pub fn validate_partial(h: &PartialMatrix) -> Result<(), NotCompletable> {
    match first_violating_triple(h.n, |i, j| h.code(i, j)) {
        None => Ok(()),
        Some((i, j, k)) => Err(triple_witness(h, i, j, k)),
    }
}

fn triple_witness<M: Coefficients>(m: &M, i: usize, j: usize, k: usize) -> NotCompletable {
    let v = |a, b| m.entry(a, b).cloned().expect("defined entry");
    NotCompletable::Triple { i, j, k, values: [v(i, j), v(i, k), v(j, k)] }
}

/// Fills the undefined entries of `h` so that the result is anti-ultrametric.
///
/// A maximum-weight spanning forest of the assignment graph is built; an
/// undefined pair inside a component receives the bottleneck of its forest
/// path, and a pair across components the smallest defined value (0 when
/// nothing is defined). The result is verified before it is returned; a
/// failure yields the lexicographically first violating triple.
pub fn complete(h: &PartialMatrix) -> Result<CompletedMatrix, NotCompletable> {
    let n = h.n;
    let mut palette = h.palette.clone();
    if palette.is_empty() {
        palette.push(ExtValue::zero());
    }
    let forest = Forest::maximum_spanning_forest(h);
    let mut codes = h.codes.clone();
    let mut best = vec![0u32; n];
    for i in 0..n {
        let pending = (i + 1..n).any(|j| codes[tri_index(n, i, j)] == UNDEFINED);
        if !pending {
            continue;
        }
        forest.bottlenecks_from(i, &mut best);
        for j in i + 1..n {
            let slot = &mut codes[tri_index(n, i, j)];
            if *slot == UNDEFINED {
                *slot = if forest.component[i] == forest.component[j] { best[j] } else { 0 };
            }
        }
    }
    let completed = CompletedMatrix { n, palette, codes };
    debug_assert!(completed.extends(h));
    if completed.is_anti_ultrametric() {
        return Ok(completed);
    }
    let (i, j, k) = completed
        .first_anti_ultrametric_violation()
        .expect("fast and exhaustive anti-ultrametric checks disagree");
    Err(triple_witness(&completed, i, j, k))
}

/// Whether `h` is completable, decided by enumerating the chordless cycles
/// of its assignment graph: completable iff every chordless cycle attains
/// its minimum weight at least twice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Completability {
    Yes,
    No(ChordlessCycle),
}

impl Completability {
    pub fn is_yes(&self) -> bool {
        matches!(self, Completability::Yes)
    }
}

pub fn completable_oracle(h: &PartialMatrix, budget: &OracleBudget) -> Result<Completability> {
    let graph = h.graph();
    let mut found = None;
    let mut steps: u128 = 0;
    for_each_chordless_cycle(&graph, budget, &mut steps, &mut |cycle| {
        let weights: Vec<ExtValue> = (0..cycle.len())
            .map(|k| graph.weight(cycle[k], cycle[(k + 1) % cycle.len()]).unwrap().clone())
            .collect();
        let c = ChordlessCycle { vertices: cycle.to_vec(), weights };
        if c.min_multiplicity() < 2 {
            found = Some(c);
            false
        } else {
            true
        }
    })?;
    Ok(match found {
        Some(c) => Completability::No(c),
        None => Completability::Yes,
    })
}

/// Calls `visit` on every chordless cycle once (smallest vertex first,
/// second vertex smaller than the last). Stops when `visit` returns false.
pub fn for_each_chordless_cycle(
    graph: &AssignmentGraph<'_>,
    budget: &OracleBudget,
    steps: &mut u128,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> Result<()> {
    let n = graph.vertex_count();
    for s in 0..n {
        for &v1 in graph.neighbors(s) {
            if v1 < s {
                continue;
            }
            let mut path = vec![s, v1];
            if !extend_chordless(graph, &mut path, budget, steps, visit)? {
                return Ok(());
            }
        }
    }
    Ok(())
}

/// `path` is an induced path starting at its minimum vertex `path[0]`, with
/// only `path[1]` adjacent to `path[0]`. Returns false to stop.
fn extend_chordless(
    graph: &AssignmentGraph<'_>,
    path: &mut Vec<usize>,
    budget: &OracleBudget,
    steps: &mut u128,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> Result<bool> {
    *steps += 1;
    if *steps > budget.max_evaluations {
        return Err(Error::BudgetExceeded { needed: *steps, budget: budget.max_evaluations });
    }
    let s = path[0];
    let last = *path.last().unwrap();
    for &w in graph.neighbors(last) {
        if w <= s || path.contains(&w) {
            continue;
        }
        let interior = &path[1..path.len() - 1];
        if interior.iter().any(|&p| graph.is_edge(p, w)) {
            continue;
        }
        if graph.is_edge(s, w) {
            if path[1] < w {
                path.push(w);
                let keep_going = visit(path);
                path.pop();
                if !keep_going {
                    return Ok(false);
                }
            }
            continue;
        }
        path.push(w);
        let keep_going = extend_chordless(graph, path, budget, steps, visit)?;
        path.pop();
        if !keep_going {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Vertex sets of the connected components of the graph formed by the
/// defined entries with value at least `alpha`. Only vertices incident to
/// such an entry appear. Components are sorted, and listed by smallest vertex.
pub fn threshold_components<M: Coefficients>(m: &M, alpha: &ExtValue) -> Vec<Vec<usize>> {
    let n = m.size();
    let first = m.palette().partition_point(|v| v < alpha) as u32;
    let mut uf = UnionFind::new(n);
    let mut touched = vec![false; n];
    for i in 0..n {
        for j in i + 1..n {
            if m.code(i, j).is_some_and(|c| c >= first) {
                uf.union(i, j);
                touched[i] = true;
                touched[j] = true;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for v in (0..n).filter(|&v| touched[v]) {
        let root = uf.find(v);
        let g = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(v);
    }
    groups
}

/// Whether every pair inside `component` is an entry with value at least `alpha`.
pub fn is_threshold_clique<M: Coefficients>(m: &M, component: &[usize], alpha: &ExtValue) -> bool {
    component.iter().enumerate().all(|(k, &i)| {
        component[k + 1..]
            .iter()
            .all(|&j| m.entry(i, j).is_some_and(|v| v >= alpha))
    })
}
