//! The candidate edge graph `C`, its triangles, and the compatibility
//! graph `T(C)` with its components.

use std::collections::VecDeque;
use std::ops::ControlFlow;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::color::PERMUTATIONS_3;
use crate::graph::{Graph, VertexSet};
use crate::instance::LabeledInstance;
use crate::oracles::confusable;
use crate::scalar::Scalar;

/// Default cap on the number of triangles of `C`.
pub const DEFAULT_MAX_TRIANGLES: usize = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CandidateError {
    #[error("candidate graph has more than {cap} triangles")]
    TriangleCap { cap: usize },
    #[error("ε must lie in [0, 1)")]
    InvalidEpsilon,
}

/// `d_max − d_min ≤ 2ε · d_max`.
pub fn epsilon_similar_degree<T: Scalar>(h: &Graph, u: usize, v: usize, epsilon: T) -> bool {
    let (a, b) = (h.degree(u), h.degree(v));
    similar_degrees(a.max(b), a.min(b), epsilon)
}

fn similar_degrees<T: Scalar>(dmax: usize, dmin: usize, epsilon: T) -> bool {
    T::from_count(dmax - dmin) <= T::from_count(2) * epsilon * T::from_count(dmax)
}

/// Intersection window `(1 − 6ε) · d_max/2 ≤ I ≤ d_max / (2(1 − ε))`,
/// written without division.
fn intersection_in_window<T: Scalar>(dmax: usize, inter: usize, epsilon: T) -> bool {
    let one = T::one();
    let six = T::from_count(6);
    let two_i = T::from_count(2 * inter);
    let d = T::from_count(dmax);
    (one - six * epsilon) * d <= two_i && (one - epsilon) * two_i <= d
}

/// Whether `(u, v)` is an edge of `C`. Vertices of degree zero never are.
pub fn is_candidate_edge<T: Scalar>(h: &Graph, u: usize, v: usize, epsilon: T) -> bool {
    if u == v {
        return false;
    }
    let (a, b) = (h.degree(u), h.degree(v));
    let (dmax, dmin) = (a.max(b), a.min(b));
    dmin > 0
        && similar_degrees(dmax, dmin, epsilon)
        && intersection_in_window(dmax, h.intersection_size(u, v), epsilon)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateGraph<T> {
    pub epsilon: T,
    pub edges: Graph,
    /// Connected component of each vertex in `edges`, numbered by smallest
    /// member.
    pub component: Vec<usize>,
    pub component_count: usize,
}

pub fn build_candidate_graph<T: Scalar>(h: &Graph, epsilon: T) -> CandidateGraph<T> {
    let n = h.n();
    // With a positive lower bound only pairs at distance two qualify, and
    // counting common neighbors by walking 2-paths finds all of them.
    let needs_all_pairs = T::one() - T::from_count(6) * epsilon <= T::zero();
    let rows: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0usize; n], Vec::new()),
            |(count, touched), u| {
                let mut row = Vec::new();
                if h.degree(u) == 0 {
                    return row;
                }
                if needs_all_pairs {
                    for v in u + 1..n {
                        if is_candidate_edge(h, u, v, epsilon) {
                            row.push(v);
                        }
                    }
                    return row;
                }
                for &x in h.neighbors(u) {
                    for &w in h.neighbors(x) {
                        if w > u {
                            if count[w] == 0 {
                                touched.push(w);
                            }
                            count[w] += 1;
                        }
                    }
                }
                touched.sort_unstable();
                let du = h.degree(u);
                for &w in touched.iter() {
                    let dw = h.degree(w);
                    let (dmax, dmin) = (du.max(dw), du.min(dw));
                    if similar_degrees(dmax, dmin, epsilon)
                        && intersection_in_window(dmax, count[w], epsilon)
                    {
                        row.push(w);
                    }
                    count[w] = 0;
                }
                touched.clear();
                row
            },
        )
        .collect();
    let edges = rows
        .into_iter()
        .enumerate()
        .flat_map(|(u, row)| row.into_iter().map(move |v| (u, v)));
    let edges = Graph::from_edges(n, edges).expect("candidate pairs are valid");
    let (component, component_count) = edges.connected_components();
    CandidateGraph {
        epsilon,
        edges,
        component,
        component_count,
    }
}

impl<T: Scalar> CandidateGraph<T> {
    /// Re-checks both conditions on every edge.
    pub fn verify(&self, h: &Graph) -> bool {
        self.edges
            .edges()
            .all(|(u, v)| is_candidate_edge(h, u, v, self.epsilon))
    }
}

/// Three distinct vertices, sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triangle(pub [usize; 3]);

impl Triangle {
    pub fn new(mut v: [usize; 3]) -> Self {
        v.sort_unstable();
        debug_assert!(v[0] < v[1] && v[1] < v[2]);
        Triangle(v)
    }

    pub fn vertices(&self) -> [usize; 3] {
        self.0
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn is_disjoint(&self, other: &Triangle) -> bool {
        self.0.iter().all(|v| !other.contains(*v))
    }
}

/// All triangles of `c`, lexicographically sorted.
pub fn enumerate_triangles(c: &Graph, cap: usize) -> Result<Vec<Triangle>, CandidateError> {
    let mut out = Vec::new();
    for u in 0..c.n() {
        let nu = c.neighbors(u);
        for &v in nu.iter().filter(|&&v| v > u) {
            let nv = c.neighbors(v);
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                if nu[i] < nv[j] {
                    i += 1;
                } else if nu[i] > nv[j] {
                    j += 1;
                } else {
                    let w = nu[i];
                    if w > v {
                        if out.len() == cap {
                            return Err(CandidateError::TriangleCap { cap });
                        }
                        out.push(Triangle([u, v, w]));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    Ok(out)
}

/// Finds an indexing of `t2` against `t1`'s sorted order such that
/// `(t1[i], t2[p[i]])` are the only non-edges between them. Returns the
/// lexicographically first such `p`.
pub fn compatible(h: &Graph, t1: &Triangle, t2: &Triangle) -> Option<[usize; 3]> {
    if !t1.is_disjoint(t2) {
        return None;
    }
    let a = t1.0;
    let b = t2.0;
    let mut adj = [[false; 3]; 3];
    let mut count = 0;
    for i in 0..3 {
        for j in 0..3 {
            adj[i][j] = h.has_edge(a[i], b[j]);
            count += adj[i][j] as usize;
        }
    }
    if count != 6 {
        return None;
    }
    PERMUTATIONS_3.iter().find_map(|perm| {
        let p = [perm[0] as usize, perm[1] as usize, perm[2] as usize];
        let ok = (0..3).all(|i| (0..3).all(|j| adj[i][p[j]] == (i != j)));
        ok.then_some(p)
    })
}

/// The triangles of `C` with compatibility computed on demand.
///
/// A triangle compatible with `T = {a₀, a₁, a₂}` has exactly one vertex in
/// each class `Mᵢ = Γ(aⱼ) ∩ Γ(aₖ) \ Γ(aᵢ)` (with `{i, j, k} = {0, 1, 2}`),
/// so neighbors are found by combining one vertex of each class along
/// `C`-edges instead of testing all pairs of triangles.
pub struct TriangleGraph<'a> {
    pub h: &'a Graph,
    pub c: &'a Graph,
    pub triangles: Vec<Triangle>,
}

#[derive(Default)]
pub struct Scratch {
    class: Vec<u8>,
    touched: Vec<usize>,
}

const NO_CLASS: u8 = u8::MAX;

impl<'a> TriangleGraph<'a> {
    pub fn new(h: &'a Graph, c: &'a Graph, triangles: Vec<Triangle>) -> Self {
        TriangleGraph { h, c, triangles }
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn index_of(&self, t: &Triangle) -> Option<usize> {
        self.triangles.binary_search(t).ok()
    }

    /// Indices of triangles compatible with triangle `i`, ascending.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut scratch = Scratch::default();
        let mut out = Vec::new();
        self.neighbors_into(i, &mut scratch, &mut out);
        out
    }

    pub fn neighbors_into(&self, i: usize, scratch: &mut Scratch, out: &mut Vec<usize>) {
        out.clear();
        self.for_each_neighbor(i, scratch, |j| {
            out.push(j);
            ControlFlow::Continue(())
        });
        out.sort_unstable();
        out.dedup();
    }

    /// Calls `f` on each triangle compatible with triangle `i`, in no
    /// particular order, until `f` breaks. Returns whether it broke.
    pub fn for_each_neighbor(
        &self,
        i: usize,
        scratch: &mut Scratch,
        mut f: impl FnMut(usize) -> ControlFlow<()>,
    ) -> bool {
        let n = self.h.n();
        if scratch.class.len() != n {
            scratch.class = vec![NO_CLASS; n];
        }
        let t = self.triangles[i].0;
        let h = self.h;
        for k in 0..3 {
            let (x, y, z) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let (ny, nz) = (h.neighbors(y), h.neighbors(z));
            let (mut p, mut q) = (0, 0);
            while p < ny.len() && q < nz.len() {
                if ny[p] < nz[q] {
                    p += 1;
                } else if ny[p] > nz[q] {
                    q += 1;
                } else {
                    let w = ny[p];
                    if !t.contains(&w) && !h.has_edge(x, w) {
                        scratch.class[w] = k as u8;
                        scratch.touched.push(w);
                    }
                    p += 1;
                    q += 1;
                }
            }
        }
        let c = self.c;
        let mut broke = false;
        'outer: for &x0 in scratch.touched.iter().filter(|&&w| scratch.class[w] == 0) {
            for &x1 in c.neighbors(x0).iter().filter(|&&w| scratch.class[w] == 1) {
                for &x2 in c.neighbors(x0).iter().filter(|&&w| scratch.class[w] == 2) {
                    if c.has_edge(x1, x2) {
                        if let Some(j) = self.index_of(&Triangle::new([x0, x1, x2])) {
                            if f(j).is_break() {
                                broke = true;
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        for &w in &scratch.touched {
            scratch.class[w] = NO_CLASS;
        }
        scratch.touched.clear();
        broke
    }
}

/// Connected components of `T(C)`.
///
/// When built by [`triangle_components_pruned`], components whose
/// triangles overlap may be split into several groups, each flagged as
/// overlapping; components without overlaps are exact either way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleComponents {
    pub triangles: Vec<Triangle>,
    /// Component id per triangle, numbered by smallest triangle.
    pub component: Vec<usize>,
    /// Triangle indices per component, ascending.
    pub members: Vec<Vec<usize>>,
    /// `U_j`: vertices covered by component `j`.
    pub covered: Vec<VertexSet>,
    /// Component `j` has two triangles sharing a vertex.
    pub overlap: Vec<bool>,
    /// Number of compatible pairs (within non-overlapping components only
    /// when pruned).
    pub compatibility_edges: usize,
    pub pruned: bool,
}

impl TriangleComponents {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    /// Two triangles of the component share a vertex.
    pub fn has_overlap(&self, j: usize) -> bool {
        self.overlap[j]
    }

    /// Smallest triangle of component `j`.
    pub fn first_triangle(&self, j: usize) -> Triangle {
        self.triangles[self.members[j][0]]
    }
}

const CHUNK: usize = 2048;

pub fn triangle_components(tg: &TriangleGraph<'_>) -> TriangleComponents {
    let count = tg.len();
    let mut uf = UnionFind::<usize>::new(count);
    let mut compatibility_edges = 0;
    for start in (0..count).step_by(CHUNK) {
        let end = (start + CHUNK).min(count);
        let lists: Vec<Vec<usize>> = (start..end)
            .into_par_iter()
            .map_init(
                || (Scratch::default(), Vec::new()),
                |(scratch, buf), i| {
                    tg.neighbors_into(i, scratch, buf);
                    buf.iter().copied().filter(|&j| j > i).collect()
                },
            )
            .collect();
        for (offset, list) in lists.into_iter().enumerate() {
            compatibility_edges += list.len();
            for j in list {
                uf.union(start + offset, j);
            }
        }
    }
    let mut id_of_root = vec![usize::MAX; count];
    let mut component = vec![0; count];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..count {
        let root = uf.find(i);
        if id_of_root[root] == usize::MAX {
            id_of_root[root] = members.len();
            members.push(Vec::new());
        }
        component[i] = id_of_root[root];
        members[component[i]].push(i);
    }
    let covered: Vec<VertexSet> = members
        .iter()
        .map(|m| m.iter().flat_map(|&i| tg.triangles[i].0).collect())
        .collect();
    let overlap = covered
        .iter()
        .zip(&members)
        .map(|(c, m)| c.len() < 3 * m.len())
        .collect();
    TriangleComponents {
        triangles: tg.triangles.clone(),
        component,
        members,
        covered,
        overlap,
        compatibility_edges,
        pruned: false,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Visit {
    New,
    Open,
    Dead,
    Live,
}

/// Components of `T(C)` by breadth-first search, abandoning a search as
/// soon as it meets a vertex twice or reaches a triangle already known to
/// lie in an overlapping component. Such a search can visit at most
/// `|V(H)|/3 + 1` triangles, so dense overlapping components are never
/// fully enumerated.
pub fn triangle_components_pruned(tg: &TriangleGraph<'_>) -> TriangleComponents {
    let count = tg.len();
    let n = tg.h.n();
    let mut state = vec![Visit::New; count];
    let mut stamp = vec![usize::MAX; n];
    let mut component = vec![0; count];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut overlap = Vec::new();
    let mut compatibility_edges = 0;
    let mut scratch = Scratch::default();
    let mut queue = VecDeque::new();
    for start in 0..count {
        if state[start] != Visit::New {
            continue;
        }
        let id = members.len();
        let mut visited = vec![start];
        let mut dead = false;
        let mut edges = 0;
        state[start] = Visit::Open;
        for v in tg.triangles[start].0 {
            stamp[v] = id;
        }
        queue.clear();
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            dead = tg.for_each_neighbor(i, &mut scratch, |j| {
                edges += 1;
                match state[j] {
                    Visit::Open => ControlFlow::Continue(()),
                    Visit::Dead => ControlFlow::Break(()),
                    Visit::Live => unreachable!("live components are closed"),
                    Visit::New => {
                        state[j] = Visit::Open;
                        visited.push(j);
                        let t = tg.triangles[j].0;
                        if t.iter().any(|&v| stamp[v] == id) {
                            return ControlFlow::Break(());
                        }
                        for v in t {
                            stamp[v] = id;
                        }
                        queue.push_back(j);
                        ControlFlow::Continue(())
                    }
                }
            });
            if dead {
                break;
            }
        }
        let mark = if dead { Visit::Dead } else { Visit::Live };
        for &i in &visited {
            state[i] = mark;
            component[i] = id;
        }
        if !dead {
            compatibility_edges += edges / 2;
        }
        visited.sort_unstable();
        members.push(visited);
        overlap.push(dead);
    }
    let covered = members
        .iter()
        .map(|m| m.iter().flat_map(|&i| tg.triangles[i].0).collect())
        .collect();
    TriangleComponents {
        triangles: tg.triangles.clone(),
        component,
        members,
        covered,
        overlap,
        compatibility_edges,
        pruned: true,
    }
}

/// `C`, its triangles and the components of `T(C)`, built once per run.
#[derive(Debug, Clone)]
pub struct TriangleAnalysis<T> {
    pub candidate: CandidateGraph<T>,
    pub components: TriangleComponents,
}

pub fn analyze<T: Scalar>(
    h: &Graph,
    epsilon: T,
    max_triangles: usize,
) -> Result<TriangleAnalysis<T>, CandidateError> {
    analyze_with(h, epsilon, max_triangles, true)
}

/// As [`analyze`]; with `exact` false, overlapping components are only
/// explored until an overlap is found (see [`triangle_components_pruned`]).
pub fn analyze_with<T: Scalar>(
    h: &Graph,
    epsilon: T,
    max_triangles: usize,
    exact: bool,
) -> Result<TriangleAnalysis<T>, CandidateError> {
    if epsilon < T::zero() || epsilon >= T::one() {
        return Err(CandidateError::InvalidEpsilon);
    }
    let candidate = build_candidate_graph(h, epsilon);
    let triangles = enumerate_triangles(&candidate.edges, max_triangles)?;
    let tg = TriangleGraph::new(h, &candidate.edges, triangles);
    let components = if exact {
        triangle_components(&tg)
    } else {
        triangle_components_pruned(&tg)
    };
    Ok(TriangleAnalysis {
        candidate,
        components,
    })
}

/// `S` is a union of components of `C`.
pub fn is_atomic<T>(c: &CandidateGraph<T>, s: &VertexSet) -> bool {
    let mut inside = vec![0usize; c.component_count];
    let mut size = vec![0usize; c.component_count];
    for &comp in &c.component {
        size[comp] += 1;
    }
    for v in s.iter() {
        inside[c.component[v]] += 1;
    }
    inside.iter().zip(&size).all(|(&i, &s)| i == 0 || i == s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleKind {
    Core,
    QuasiCore,
    Monochrome,
    Other,
}

impl TriangleKind {
    pub fn is_quasi_core(self) -> bool {
        matches!(self, TriangleKind::Core | TriangleKind::QuasiCore)
    }
}

/// Classifies a triple by its hidden labels. Equal `G`-classes count as
/// confusable, so every core triple is also quasi-core; `Core` is reported
/// for those.
pub fn classify_triangle_ground_truth<T: Scalar>(
    inst: &LabeledInstance,
    t: &Triangle,
    epsilon: T,
) -> TriangleKind {
    let labels = t.0.map(|v| inst.labels[v]);
    let colors = labels.map(|l| l.0);
    let gs = labels.map(|l| l.1);
    let g = &inst.g;
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let distinct_colors =
        colors[0] != colors[1] && colors[0] != colors[2] && colors[1] != colors[2];
    if distinct_colors {
        if gs[0] == gs[1] && gs[1] == gs[2] {
            return TriangleKind::Core;
        }
        let all_confusable = pairs
            .iter()
            .all(|&(i, j)| gs[i] == gs[j] || confusable(g, gs[i], gs[j], epsilon));
        return if all_confusable {
            TriangleKind::QuasiCore
        } else {
            TriangleKind::Other
        };
    }
    if colors[0] == colors[1] && colors[1] == colors[2] {
        let d1 = t.0.iter().map(|&v| inst.h.degree(v)).max().unwrap_or(0);
        let d1 = T::from_count(d1);
        let four = T::from_count(4);
        let lo = (T::one() - T::from_count(8) * epsilon) * d1;
        let hi = (T::one() + T::from_count(9) * epsilon) * d1;
        let monochrome = pairs.iter().all(|&(i, j)| {
            let x = four * T::from_count(g.intersection_size(gs[i], gs[j]));
            lo <= x && x <= hi
        });
        if monochrome {
            return TriangleKind::Monochrome;
        }
    }
    TriangleKind::Other
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangleRecord {
    pub vertices: [usize; 3],
    pub component: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<TriangleKind>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticDump {
    pub candidate_edges: usize,
    pub candidate_components: usize,
    pub triangle_components: usize,
    pub compatibility_edges: usize,
    pub triangles: Vec<TriangleRecord>,
}

/// Triangles with component ids, classified when ground truth is given.
pub fn diagnostic_dump<T: Scalar>(
    analysis: &TriangleAnalysis<T>,
    truth: Option<&LabeledInstance>,
) -> DiagnosticDump {
    let tc = &analysis.components;
    let eps = analysis.candidate.epsilon;
    DiagnosticDump {
        candidate_edges: analysis.candidate.edges.m(),
        candidate_components: analysis.candidate.component_count,
        triangle_components: tc.count(),
        compatibility_edges: tc.compatibility_edges,
        triangles: tc
            .triangles
            .iter()
            .zip(&tc.component)
            .map(|(t, &component)| TriangleRecord {
                vertices: t.0,
                component,
                kind: truth.map(|inst| classify_triangle_ground_truth(inst, t, eps)),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tensor_product;
    use crate::scalar::Rational;
    use num_rational::Ratio;
    use num_traits::Zero;

    fn k3xg(g: &Graph) -> Graph {
        tensor_product(&Graph::complete(3), g)
    }

    #[test]
    fn similar_degree_boundaries() {
        let eps: Rational = Ratio::new(1, 100);
        assert!(similar_degrees(100, 100, eps));
        assert!(!similar_degrees(100, 97, eps));
        assert!(similar_degrees(100, 98, eps));
        assert!(similar_degrees(7, 7, Rational::zero()));
    }

    #[test]
    fn core_pairs_are_candidates_at_zero() {
        let g = Graph::cycle(5);
        let h = k3xg(&g);
        let zero = Rational::zero();
        for x in 0..5 {
            assert!(is_candidate_edge(&h, x, 5 + x, zero));
            assert!(is_candidate_edge(&h, x, 10 + x, zero));
        }
        // K₃ × K₄, same color: I_H = 2·2 = 4 > 6/2
        let h4 = k3xg(&Graph::complete(4));
        assert_eq!(h4.intersection_size(0, 1), 4);
        assert!(!is_candidate_edge(&h4, 0, 1, zero));
    }

    #[test]
    fn dissimilar_degrees_are_never_candidates() {
        // star center vs leaf share nothing anyway; use a graph where they do
        let g =
            Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        let eps: Rational = Ratio::new(1, 50);
        assert!(!epsilon_similar_degree(&g, 3, 4, eps));
        assert!(!is_candidate_edge(&g, 3, 4, eps));
    }

    #[test]
    fn edgeless_h_gives_edgeless_c() {
        let c = build_candidate_graph(&Graph::empty(9), Rational::zero());
        assert_eq!(c.edges.m(), 0);
        let c = build_candidate_graph(&Graph::empty(9), Rational::new(1, 5));
        assert_eq!(c.edges.m(), 0);
    }

    #[test]
    fn six_cycle_contains_every_core_pair() {
        let h = k3xg(&Graph::complete(2));
        let c = build_candidate_graph(&h, Rational::zero());
        for x in 0..2 {
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                assert!(c.edges.has_edge(a * 2 + x, b * 2 + x));
            }
        }
        assert!(c.verify(&h));
    }

    #[test]
    fn counting_and_direct_construction_agree() {
        let g = crate::instance::random_regular(16, 6, 5).unwrap();
        let h = k3xg(&g);
        for eps in [
            Rational::zero(),
            Ratio::new(1, 41),
            Ratio::new(1, 10),
            Ratio::new(1, 5),
        ] {
            let c = build_candidate_graph(&h, eps);
            for u in 0..h.n() {
                for v in u + 1..h.n() {
                    assert_eq!(c.edges.has_edge(u, v), is_candidate_edge(&h, u, v, eps));
                }
            }
        }
    }

    #[test]
    fn triangle_enumeration() {
        assert!(enumerate_triangles(&Graph::cycle(6), 10)
            .unwrap()
            .is_empty());
        assert_eq!(
            enumerate_triangles(&Graph::complete(3), 10).unwrap(),
            vec![Triangle([0, 1, 2])]
        );
        let k5 = enumerate_triangles(&Graph::complete(5), 100).unwrap();
        assert_eq!(k5.len(), 10);
        assert!(k5.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(
            enumerate_triangles(&Graph::complete(5), 3),
            Err(CandidateError::TriangleCap { cap: 3 })
        );
    }

    #[test]
    fn compatibility_of_core_triples() {
        let g = Graph::complete(2);
        let h = k3xg(&g);
        let t0 = Triangle::new([0, 2, 4]);
        let t1 = Triangle::new([1, 3, 5]);
        assert_eq!(compatible(&h, &t0, &t1), Some([0, 1, 2]));
        assert!(compatible(&h, &t1, &t0).is_some());
        let h2 = Graph::from_edges(6, h.edges().filter(|&e| e != (0, 3))).unwrap();
        assert_eq!(compatible(&h2, &t0, &t1), None);
        assert_eq!(compatible(&h, &t0, &Triangle::new([0, 3, 5])), None);
    }

    #[test]
    fn class_enumeration_matches_pairwise_test() {
        let g = crate::instance::random_regular(10, 4, 9).unwrap();
        let h = k3xg(&g);
        let eps: Rational = Ratio::new(1, 5);
        let c = build_candidate_graph(&h, eps);
        let tri = enumerate_triangles(&c.edges, 1_000_000).unwrap();
        assert!(!tri.is_empty());
        let tg = TriangleGraph::new(&h, &c.edges, tri.clone());
        for i in (0..tri.len()).step_by(5) {
            let brute: Vec<usize> = (0..tri.len())
                .filter(|&j| compatible(&h, &tri[i], &tri[j]).is_some())
                .collect();
            assert_eq!(tg.neighbors(i), brute, "triangle {i}");
        }
    }

    #[test]
    fn exact_tensor_has_one_core_component() {
        let g = crate::instance::random_regular(20, 6, 1).unwrap();
        let h = k3xg(&g);
        let a = analyze(&h, Rational::zero(), DEFAULT_MAX_TRIANGLES).unwrap();
        for x in 0..20 {
            assert!(a
                .components
                .triangles
                .contains(&Triangle::new([x, 20 + x, 40 + x])));
        }
        let j = a.components.component[a
            .components
            .triangles
            .binary_search(&Triangle([0, 20, 40]))
            .unwrap()];
        assert_eq!(a.components.covered[j].len(), 60);
    }

    #[test]
    fn severed_pair_of_core_triples_splits() {
        // G = K2 with its edge removed from all six tensor edges: H edgeless
        let h = Graph::empty(6);
        let a = analyze(&h, Rational::zero(), 10).unwrap();
        assert_eq!(a.components.count(), 0);
        // single triangle: K3 as C directly
        let tri = vec![Triangle([0, 1, 2])];
        let k3 = Graph::complete(3);
        let tg = TriangleGraph::new(&k3, &k3, tri);
        let tc = triangle_components(&tg);
        assert_eq!(tc.count(), 1);
    }

    #[test]
    fn atomicity() {
        let h = k3xg(&Graph::complete(2));
        let c = build_candidate_graph(&h, Rational::zero());
        assert!(is_atomic(&c, &VertexSet::new()));
        assert!(is_atomic(&c, &VertexSet::all(6)));
        let comp0: VertexSet = (0..6)
            .filter(|&v| c.component[v] == c.component[0])
            .collect();
        assert!(is_atomic(&c, &comp0));
        assert!(!is_atomic(&c, &[0].into_iter().collect()));
    }

    #[test]
    fn twin_vertices_give_quasi_core() {
        // vertices 0 and 1 of G share the neighborhood {2, 3, 4}
        let g = Graph::from_edges(
            5,
            [
                (0, 2),
                (0, 3),
                (0, 4),
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (3, 4),
            ],
        )
        .unwrap();
        let inst = LabeledInstance::from_parts(g, Default::default(), Rational::zero(), 0).unwrap();
        let eps: Rational = Ratio::new(1, 100);
        let mixed = Triangle::new([0, 5 + 1, 10]);
        assert_eq!(
            classify_triangle_ground_truth(&inst, &mixed, eps),
            TriangleKind::QuasiCore
        );
        assert_eq!(
            classify_triangle_ground_truth(&inst, &Triangle::new([2, 7, 12]), eps),
            TriangleKind::Core
        );
        assert_eq!(
            classify_triangle_ground_truth(&inst, &Triangle::new([0, 2, 7]), eps),
            TriangleKind::Other
        );
    }
}
