//! Simple undirected graphs, vertex/edge sets, the tensor product, and
//! the expansion checks used as hypotheses by the coloring results.

use std::cmp::Ordering;
use std::collections::VecDeque;

use thiserror::Error;

use crate::scalar::Scalar;

/// Default vertex cap for the exhaustive expansion checks.
pub const EXPANSION_BRUTE_FORCE_CAP: usize = 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("exhaustive check limited to {cap} vertices, graph has {n}")]
    SizeCap { n: usize, cap: usize },
}

/// Undirected, simple, loopless graph on vertices `0..n` with sorted
/// adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list. Duplicate pairs (in either
    /// orientation) collapse to one edge; self-loops are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Ok(Graph {
            adj,
            edge_count: edge_count / 2,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("complete graph edges are valid")
    }

    /// Cycle on `n ≥ 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn edge_set(&self) -> EdgeSet {
        EdgeSet {
            pairs: self.edges().collect(),
        }
    }

    /// `|Γ(u) ∩ Γ(v)|` by a linear merge of the sorted lists.
    pub fn intersection_size(&self, u: usize, v: usize) -> usize {
        sorted_intersection_count(&self.adj[u], &self.adj[v])
    }

    /// `|Γ(u) ∩ Γ(v) ∩ Γ(w)|`.
    pub fn triple_intersection_size(&self, u: usize, v: usize, w: usize) -> usize {
        let (a, b, c) = (&self.adj[u], &self.adj[v], &self.adj[w]);
        let (mut i, mut j, mut k, mut count) = (0, 0, 0, 0);
        while i < a.len() && j < b.len() && k < c.len() {
            let x = a[i].max(b[j]).max(c[k]);
            if a[i] == x && b[j] == x && c[k] == x {
                count += 1;
                i += 1;
                j += 1;
                k += 1;
                continue;
            }
            if a[i] < x {
                i += 1;
            }
            if b[j] < x {
                j += 1;
            }
            if c[k] < x {
                k += 1;
            }
        }
        count
    }

    /// Sum of degrees over `s`.
    pub fn volume(&self, s: &VertexSet) -> usize {
        s.iter().map(|v| self.degree(v)).sum()
    }

    /// Number of edges with exactly one endpoint in `s`.
    pub fn cut_size(&self, s: &VertexSet) -> usize {
        let mask = s.mask(self.n());
        s.iter()
            .map(|v| self.adj[v].iter().filter(|&&w| !mask[w]).count())
            .sum()
    }

    /// Number of edges with both endpoints in `s`.
    pub fn induced_edge_count(&self, s: &VertexSet) -> usize {
        let mask = s.mask(self.n());
        s.iter()
            .map(|v| self.adj[v].iter().filter(|&&w| w > v && mask[w]).count())
            .sum()
    }

    /// Edges with both endpoints in `s`, as an [`EdgeSet`].
    pub fn induced_edges(&self, s: &VertexSet) -> EdgeSet {
        let mask = s.mask(self.n());
        let pairs = s
            .iter()
            .flat_map(|v| {
                self.adj[v]
                    .iter()
                    .filter(move |&&w| w > v)
                    .filter(|&&w| mask[w])
                    .map(move |&w| (v, w))
            })
            .collect();
        EdgeSet { pairs }
    }

    /// Component id per vertex, numbered by smallest member.
    pub fn connected_components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.connected_components().1 == 1
    }

    /// Renames vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n());
        Graph::from_edges(self.n(), self.edges().map(|(u, v)| (perm[u], perm[v])))
            .expect("a permutation preserves validity")
    }
}

pub(crate) fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Sorted, duplicate-free set of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct VertexSet {
    ids: Vec<usize>,
}

impl VertexSet {
    pub fn new() -> Self {
        VertexSet::default()
    }

    pub fn all(n: usize) -> Self {
        VertexSet {
            ids: (0..n).collect(),
        }
    }

    /// Takes ownership of ids already sorted and duplicate-free.
    pub fn from_sorted(ids: Vec<usize>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        VertexSet { ids }
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        VertexSet {
            ids: mask
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.ids.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.ids.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.ids
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.ids {
            mask[v] = true;
        }
        mask
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            ids: self
                .ids
                .iter()
                .copied()
                .filter(|&v| other.contains(v))
                .collect(),
        }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            ids: self
                .ids
                .iter()
                .copied()
                .filter(|&v| !other.contains(v))
                .collect(),
        }
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        sorted_intersection_count(&self.ids, &other.ids) == 0
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut ids: Vec<usize> = iter.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        VertexSet { ids }
    }
}

/// Set of unordered vertex pairs, stored normalized as `(min, max)` and
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct EdgeSet {
    pairs: Vec<(usize, usize)>,
}

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet::default()
    }

    /// Normalizes and deduplicates; rejects self-pairs.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out = Vec::new();
        for (u, v) in pairs {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            out.push((u.min(v), u.max(v)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(EdgeSet { pairs: out })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.pairs.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn as_slice(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// `|self Δ other|`.
    pub fn symmetric_difference_count(&self, other: &EdgeSet) -> usize {
        let common = {
            let (a, b) = (&self.pairs, &other.pairs);
            let (mut i, mut j, mut c) = (0, 0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    Ordering::Less => i += 1,
                    Ordering::Greater => j += 1,
                    Ordering::Equal => {
                        c += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
            c
        };
        self.len() + other.len() - 2 * common
    }

    /// Pairs in `self` but not in `other`.
    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet {
            pairs: self
                .pairs
                .iter()
                .copied()
                .filter(|&(u, v)| !other.contains(u, v))
                .collect(),
        }
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(&other.pairs);
        pairs.sort_unstable();
        pairs.dedup();
        EdgeSet { pairs }
    }

    /// Number of pairs incident to each vertex.
    pub fn degrees(&self, n: usize) -> Vec<usize> {
        let mut deg = vec![0; n];
        for &(u, v) in &self.pairs {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn to_graph(&self, n: usize) -> Result<Graph, GraphError> {
        Graph::from_edges(n, self.iter())
    }
}

impl FromIterator<(usize, usize)> for EdgeSet {
    /// Panics on a self-pair; use [`EdgeSet::from_pairs`] for untrusted input.
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        EdgeSet::from_pairs(iter).expect("self-pair in EdgeSet")
    }
}

/// `|E1 Δ E2|`.
pub fn symmetric_difference(e1: &EdgeSet, e2: &EdgeSet) -> usize {
    e1.symmetric_difference_count(e2)
}

/// Tensor (categorical) product. Vertex `(f, g)` is encoded as
/// `f * |V(G)| + g`.
pub fn tensor_product(f: &Graph, g: &Graph) -> Graph {
    let ng = g.n();
    let mut adj = vec![Vec::new(); f.n() * ng];
    for a in 0..f.n() {
        for &b in f.neighbors(a) {
            for x in 0..ng {
                let row = &mut adj[a * ng + x];
                row.extend(g.neighbors(x).iter().map(|&y| b * ng + y));
            }
        }
    }
    let mut edge_count = 0;
    for row in &mut adj {
        row.sort_unstable();
        edge_count += row.len();
    }
    Graph {
        adj,
        edge_count: edge_count / 2,
    }
}

/// Exhaustive α-edge-expansion test: every nonempty proper `S` must have
/// `cut(S) ≥ α · min(vol S, vol S̄)`.
pub fn is_alpha_edge_expander<T: Scalar>(g: &Graph, alpha: T) -> Result<bool, GraphError> {
    is_alpha_edge_expander_capped(g, alpha, EXPANSION_BRUTE_FORCE_CAP)
}

pub fn is_alpha_edge_expander_capped<T: Scalar>(
    g: &Graph,
    alpha: T,
    cap: usize,
) -> Result<bool, GraphError> {
    let total = 2 * g.m();
    let ok = enumerate_cuts(g, cap, g.n(), |_, cut, vol| {
        let smaller = vol.min(total - vol);
        T::from_count(cut) >= alpha * T::from_count(smaller)
    })?;
    Ok(ok)
}

/// Exhaustive (δ, α)-small-set-expansion test: every nonempty `S` with
/// `|S| ≤ δn` must have `cut(S) ≥ α · vol(S)`.
pub fn is_small_set_expander<T: Scalar>(g: &Graph, delta: T, alpha: T) -> Result<bool, GraphError> {
    is_small_set_expander_capped(g, delta, alpha, EXPANSION_BRUTE_FORCE_CAP)
}

pub fn is_small_set_expander_capped<T: Scalar>(
    g: &Graph,
    delta: T,
    alpha: T,
    cap: usize,
) -> Result<bool, GraphError> {
    let max_size = (delta * T::from_count(g.n())).floor_count().min(g.n());
    if max_size == 0 {
        if g.n() > cap {
            return Err(GraphError::SizeCap { n: g.n(), cap });
        }
        return Ok(true);
    }
    enumerate_cuts(g, cap, max_size, |_, cut, vol| {
        T::from_count(cut) >= alpha * T::from_count(vol)
    })
}

/// Walks every nonempty proper subset in Gray-code order (and the full
/// set when `max_size == n`, where the cut is zero) calling
/// `accept(size, cut, vol)` for those of size at most `max_size`.
fn enumerate_cuts<F>(
    g: &Graph,
    cap: usize,
    max_size: usize,
    mut accept: F,
) -> Result<bool, GraphError>
where
    F: FnMut(usize, usize, usize) -> bool,
{
    let n = g.n();
    if n > cap || n > 30 {
        return Err(GraphError::SizeCap {
            n,
            cap: cap.min(30),
        });
    }
    if n == 0 {
        return Ok(true);
    }
    let nbr_mask: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let (mut set, mut cut, mut vol, mut size) = (0u32, 0usize, 0usize, 0usize);
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        let inside = (nbr_mask[bit] & set).count_ones() as usize;
        let deg = g.degree(bit);
        if set & (1 << bit) == 0 {
            set |= 1 << bit;
            cut = cut + deg - 2 * inside;
            vol += deg;
            size += 1;
        } else {
            set &= !(1 << bit);
            cut = cut + 2 * inside - deg;
            vol -= deg;
            size -= 1;
        }
        if set == full || size > max_size {
            continue;
        }
        if !accept(size, cut, vol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Advisory spectral estimate for large graphs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    /// Second-largest eigenvalue of `D^{-1/2} A D^{-1/2}`.
    pub lambda2: f64,
    /// Cheeger lower bound `(1 − λ₂) / 2` on edge expansion.
    pub expansion_lower_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Power iteration on the lazy normalized walk with the top eigenvector
/// deflated. Never used to make correctness decisions.
pub fn spectral_estimate(g: &Graph) -> SpectralEstimate {
    spectral_estimate_with(g, 1e-9, 100_000)
}

pub fn spectral_estimate_with(g: &Graph, tol: f64, max_iter: usize) -> SpectralEstimate {
    let n = g.n();
    let sqrt_deg: Vec<f64> = (0..n).map(|v| (g.degree(v) as f64).sqrt()).collect();
    let norm = sqrt_deg.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n < 2 || norm == 0.0 {
        return SpectralEstimate {
            lambda2: 1.0,
            expansion_lower_bound: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let top: Vec<f64> = sqrt_deg.iter().map(|x| x / norm).collect();
    let deflate = |x: &mut [f64]| {
        let dot: f64 = x.iter().zip(&top).map(|(a, b)| a * b).sum();
        for (xi, ti) in x.iter_mut().zip(&top) {
            *xi -= dot * ti;
        }
    };
    let normalize = |x: &mut [f64]| {
        let len = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        if len > 0.0 {
            x.iter_mut().for_each(|a| *a /= len);
        }
    };
    // Deterministic, non-symmetric start vector.
    let mut x: Vec<f64> = (0..n)
        .map(|i| ((i * 7919 + 13) % 101) as f64 - 50.0)
        .collect();
    deflate(&mut x);
    normalize(&mut x);
    let mut mu = 0.0;
    let mut next = vec![0.0; n];
    for it in 1..=max_iter {
        for v in 0..n {
            let s: f64 = if sqrt_deg[v] == 0.0 {
                0.0
            } else {
                g.neighbors(v)
                    .iter()
                    .map(|&w| x[w] / sqrt_deg[w])
                    .sum::<f64>()
                    / sqrt_deg[v]
            };
            next[v] = 0.5 * (x[v] + s);
        }
        deflate(&mut next);
        let new_mu: f64 = next.iter().zip(&x).map(|(a, b)| a * b).sum();
        normalize(&mut next);
        std::mem::swap(&mut x, &mut next);
        if (new_mu - mu).abs() < tol {
            let lambda2 = 2.0 * new_mu - 1.0;
            return SpectralEstimate {
                lambda2,
                expansion_lower_bound: ((1.0 - lambda2) / 2.0).max(0.0),
                iterations: it,
                converged: true,
            };
        }
        mu = new_mu;
    }
    let lambda2 = 2.0 * mu - 1.0;
    SpectralEstimate {
        lambda2,
        expansion_lower_bound: ((1.0 - lambda2) / 2.0).max(0.0),
        iterations: max_iter,
        converged: false,
    }
}

/// Two copies of `K_n` joined by the single edge `(n − 1, n)`.
pub fn two_cliques_bridged(n: usize) -> Graph {
    let clique =
        |offset: usize| (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u + offset, v + offset)));
    let edges = clique(0)
        .chain(clique(n))
        .chain(std::iter::once((n - 1, n)));
    Graph::from_edges(2 * n, edges).expect("valid bridged cliques")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn naive_intersection(g: &Graph, u: usize, v: usize) -> usize {
        let mut c = 0;
        for &a in g.neighbors(u) {
            for &b in g.neighbors(v) {
                if a == b {
                    c += 1;
                }
            }
        }
        c
    }

    fn product_edges_by_definition(f: &Graph, g: &Graph) -> usize {
        let ng = g.n();
        let mut count = 0;
        for x in 0..f.n() * ng {
            for y in x + 1..f.n() * ng {
                if f.has_edge(x / ng, y / ng) && g.has_edge(x % ng, y % ng) {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn k3_times_k2_is_a_six_cycle() {
        let p = tensor_product(&Graph::complete(3), &Graph::complete(2));
        assert_eq!(p.n(), 6);
        assert_eq!(
            p.m(),
            product_edges_by_definition(&Graph::complete(3), &Graph::complete(2))
        );
        assert_eq!(p.m(), 6);
        assert!((0..6).all(|v| p.degree(v) == 2));
        assert!(p.is_connected());
        // bipartite: colour by the K2 coordinate
        assert!(p.edges().all(|(u, v)| u % 2 != v % 2));
    }

    #[test]
    fn k3_times_k3_is_four_regular_with_18_edges() {
        let k3 = Graph::complete(3);
        let p = tensor_product(&k3, &k3);
        assert_eq!((p.n(), p.m()), (9, 18));
        assert_eq!(product_edges_by_definition(&k3, &k3), 18);
        assert!((0..9).all(|v| p.degree(v) == 4));
    }

    #[test]
    fn product_with_edgeless_factor_is_edgeless() {
        let p = tensor_product(&Graph::complete(3), &Graph::empty(5));
        assert_eq!((p.n(), p.m()), (15, 0));
    }

    #[test]
    fn intersections_in_small_graphs() {
        let k3 = Graph::complete(3);
        let p = tensor_product(&k3, &k3);
        // (a, g) and (b, g) share exactly (c, g') for the two g' ≠ g.
        let (a0, b0) = (0, 3);
        assert_eq!(p.intersection_size(a0, b0), 2);
        assert_eq!(p.intersection_size(a0, a0), p.degree(a0));
        // core triple of g = 0 has no common neighbor
        assert_eq!(p.triple_intersection_size(0, 3, 6), 0);
        assert_eq!(p.triple_intersection_size(4, 4, 4), 4);
        let k4 = Graph::complete(4);
        assert_eq!(k4.intersection_size(0, 3), 2);
        assert_eq!(k4.triple_intersection_size(0, 1, 2), 1);
    }

    #[test]
    fn volumes_and_cuts() {
        let k4 = Graph::complete(4);
        assert_eq!(k4.volume(&VertexSet::new()), 0);
        assert_eq!(k4.volume(&VertexSet::all(4)), 12);
        assert_eq!(k4.cut_size(&VertexSet::new()), 0);
        assert_eq!(k4.cut_size(&VertexSet::all(4)), 0);
        assert_eq!(k4.cut_size(&[2].into_iter().collect()), 3);
        let c6 = Graph::cycle(6);
        assert_eq!(c6.cut_size(&[0, 2, 4].into_iter().collect()), 6);
        // a core triple of K3 × G has volume 2·3·deg_G(g)
        let g = Graph::cycle(5);
        let p = tensor_product(&Graph::complete(3), &g);
        let core: VertexSet = [1, 5 + 1, 10 + 1].into_iter().collect();
        assert_eq!(p.volume(&core), 2 * 3 * g.degree(1));
    }

    #[test]
    fn expander_examples() {
        let third: Rational = Ratio::new(1, 3);
        assert!(is_alpha_edge_expander(&Graph::complete(4), third).unwrap());
        let bridged = two_cliques_bridged(4);
        assert!(!is_alpha_edge_expander(&bridged, third).unwrap());
        assert!(is_alpha_edge_expander(&bridged, Rational::from_count(0)).unwrap());
        assert!(is_alpha_edge_expander(&Graph::cycle(7), 0.0f64).unwrap());
        let half: Rational = Ratio::new(1, 2);
        assert!(is_small_set_expander(&Graph::complete(4), half, third).unwrap());
        assert!(!is_small_set_expander(&bridged, half, third).unwrap());
        let tiny: Rational = Ratio::new(1, 100);
        assert!(is_small_set_expander(&bridged, tiny, Rational::from_count(1)).unwrap());
    }

    #[test]
    fn expansion_check_refuses_large_graphs() {
        let err = is_alpha_edge_expander(&Graph::cycle(23), 0.1f64).unwrap_err();
        assert!(matches!(err, GraphError::SizeCap { n: 23, .. }));
    }

    #[test]
    fn spectral_estimate_separates_expander_from_bridge() {
        let k8 = spectral_estimate(&Graph::complete(8));
        assert!(k8.converged);
        // K_n has λ₂ = −1/(n−1)
        assert!((k8.lambda2 + 1.0 / 7.0).abs() < 1e-6, "{k8:?}");
        let bridged = spectral_estimate(&two_cliques_bridged(6));
        assert!(bridged.lambda2 > 0.8);
        assert!(bridged.expansion_lower_bound < k8.expansion_lower_bound);
    }

    #[test]
    fn edge_set_difference_counts() {
        let a: EdgeSet = [(0, 1), (1, 2), (3, 2)].into_iter().collect();
        assert_eq!(symmetric_difference(&a, &a), 0);
        let b: EdgeSet = [(4, 5), (5, 6), (6, 7), (7, 8)].into_iter().collect();
        assert_eq!(symmetric_difference(&a, &b), 7);
        let c = a.union(&[(9, 10), (10, 11)].into_iter().collect());
        assert_eq!(symmetric_difference(&a, &c), 2);
        assert!(EdgeSet::from_pairs([(3, 3)]).is_err());
        assert!(a.contains(2, 3));
    }

    #[test]
    fn rejects_invalid_edges() {
        assert_eq!(Graph::from_edges(3, [(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })
        ));
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(g.m(), 1);
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..(n * n)).prop_map(move |pairs| {
                Graph::from_edges(n, pairs.into_iter().filter(|(u, v)| u != v)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn tensor_degree_is_product_of_degrees(f in arb_graph(5), g in arb_graph(6)) {
            let p = tensor_product(&f, &g);
            for a in 0..f.n() {
                for x in 0..g.n() {
                    prop_assert_eq!(p.degree(a * g.n() + x), f.degree(a) * g.degree(x));
                }
            }
        }

        #[test]
        fn tensor_product_commutes_under_index_swap(f in arb_graph(5), g in arb_graph(5)) {
            let fg = tensor_product(&f, &g);
            let gf = tensor_product(&g, &f);
            let swap: Vec<usize> = (0..fg.n()).map(|v| (v % g.n()) * f.n() + v / g.n()).collect();
            prop_assert_eq!(fg.relabel(&swap).edge_set(), gf.edge_set());
        }

        #[test]
        fn merge_intersection_matches_naive(g in arb_graph(12)) {
            for u in 0..g.n() {
                for v in 0..g.n() {
                    prop_assert_eq!(g.intersection_size(u, v), naive_intersection(&g, u, v));
                    prop_assert_eq!(g.intersection_size(u, v), g.intersection_size(v, u));
                }
            }
        }

        #[test]
        fn expansion_is_monotone_in_alpha(g in arb_graph(9), a in 0i64..20, b in 0i64..20) {
            let (lo, hi) = (a.min(b), a.max(b));
            let lo: Rational = Ratio::new(lo, 10);
            let hi: Rational = Ratio::new(hi, 10);
            if is_alpha_edge_expander(&g, hi).unwrap() {
                prop_assert!(is_alpha_edge_expander(&g, lo).unwrap());
            }
        }
    }
}
