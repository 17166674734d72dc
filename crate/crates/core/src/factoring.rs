//! Coloring a triangle component by propagation and factoring it into a
//! tensor `K₃ × G̃` through two bottleneck matchings.

use std::collections::VecDeque;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::candidate::{Scratch, TriangleComponents, TriangleGraph};
use crate::color::ColorClass;
use crate::graph::{EdgeSet, Graph, VertexSet};
use crate::matching::{bottleneck_matching, tripartite_weights, MatchingError};
use crate::scalar::{Approx, Scalar};

/// Class per vertex of `H`, `None` outside the colored domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition3 {
    pub class: Vec<Option<ColorClass>>,
}

impl Partition3 {
    pub fn unassigned(n: usize) -> Self {
        Partition3 {
            class: vec![None; n],
        }
    }

    pub fn members(&self, c: ColorClass) -> Vec<usize> {
        (0..self.class.len())
            .filter(|&v| self.class[v] == Some(c))
            .collect()
    }

    pub fn domain(&self) -> VertexSet {
        (0..self.class.len())
            .filter(|&v| self.class[v].is_some())
            .collect()
    }

    /// No edge of `h` joins two vertices of one class inside `within`.
    pub fn is_coloring_of(&self, h: &Graph, within: &VertexSet) -> bool {
        let mask = within.mask(h.n());
        within.iter().all(|u| {
            h.neighbors(u)
                .iter()
                .all(|&v| !mask[v] || self.class[u].is_none() || self.class[u] != self.class[v])
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColorFailure {
    #[error("component has no triangles")]
    Empty,
    /// Only from a pruned analysis, where overlapping components are
    /// not enumerated in full.
    #[error("component was only partially enumerated")]
    Incomplete,
    #[error("vertex {vertex} has no unique non-neighbor in triangle {triangle:?}")]
    AmbiguousNonNeighbor { vertex: usize, triangle: [usize; 3] },
    #[error("vertex {vertex} would receive two classes")]
    ConflictingClass { vertex: usize },
}

/// Colors component `j` by breadth-first propagation from its smallest
/// triangle: each vertex of a newly reached triangle takes the class of
/// its unique non-neighbor in the triangle it was reached from.
pub fn color_component(
    tg: &TriangleGraph<'_>,
    tc: &TriangleComponents,
    j: usize,
) -> Result<Partition3, ColorFailure> {
    let members = &tc.members[j];
    if members.is_empty() {
        return Err(ColorFailure::Empty);
    }
    if tc.pruned && tc.has_overlap(j) {
        return Err(ColorFailure::Incomplete);
    }
    let h = tg.h;
    let mut part = Partition3::unassigned(h.n());
    let seed = members[0];
    for (v, c) in tg.triangles[seed].0.iter().zip(ColorClass::ALL) {
        part.class[*v] = Some(c);
    }
    let mut visited = std::collections::HashSet::new();
    visited.insert(seed);
    let mut queue = VecDeque::from([seed]);
    while let Some(i) = queue.pop_front() {
        let t = tg.triangles[i].0;
        for next in tg.neighbors(i) {
            if !visited.insert(next) {
                continue;
            }
            let t2 = tg.triangles[next].0;
            for &x in &t {
                let non_adjacent: Vec<usize> =
                    t2.iter().copied().filter(|&y| !h.has_edge(x, y)).collect();
                if non_adjacent.len() != 1 {
                    return Err(ColorFailure::AmbiguousNonNeighbor {
                        vertex: x,
                        triangle: t2,
                    });
                }
                let y = non_adjacent[0];
                let c = part.class[x].expect("reached from a colored triangle");
                match part.class[y] {
                    Some(existing) if existing != c => {
                        return Err(ColorFailure::ConflictingClass { vertex: y })
                    }
                    _ => part.class[y] = Some(c),
                }
            }
            queue.push_back(next);
        }
    }
    Ok(part)
}

/// Every component of `T(C)` whose propagated coloring succeeds and is
/// proper on the vertices it covers, as `(covered, coloring)`, ordered by
/// smallest triangle.
///
/// Same traversal as [`color_component`], but a search stops at the
/// first conflict or monochromatic edge, or on reaching a triangle of a
/// component already known to fail, so failing components are rarely
/// enumerated in full.
pub fn proper_component_colorings(tg: &TriangleGraph<'_>) -> Vec<(VertexSet, Partition3)> {
    #[derive(Clone, Copy, PartialEq, Eq)]
    enum Seen {
        New,
        Open,
        Dead,
        Done,
    }
    let h = tg.h;
    let mut state = vec![Seen::New; tg.len()];
    let mut scratch = Scratch::default();
    let mut next = Vec::new();
    let mut found = Vec::new();
    for seed in 0..tg.len() {
        if state[seed] != Seen::New {
            continue;
        }
        let mut part = Partition3::unassigned(h.n());
        let mut visited = vec![seed];
        state[seed] = Seen::Open;
        // Assigns `c` to `y`; false on a conflict or a monochromatic edge.
        let assign = |part: &mut Partition3, y: usize, c: ColorClass| match part.class[y] {
            Some(existing) => existing == c,
            None => {
                part.class[y] = Some(c);
                h.neighbors(y).iter().all(|&w| part.class[w] != Some(c))
            }
        };
        let mut ok = tg.triangles[seed]
            .0
            .iter()
            .zip(ColorClass::ALL)
            .all(|(&v, c)| assign(&mut part, v, c));
        let mut queue = VecDeque::from([seed]);
        'search: while ok {
            let Some(i) = queue.pop_front() else {
                break;
            };
            let t = tg.triangles[i].0;
            // A dead neighbor settles the whole component, whatever the
            // traversal order, so look for one before sorting.
            next.clear();
            let dead = tg.for_each_neighbor(i, &mut scratch, |j| {
                if state[j] == Seen::Dead {
                    return ControlFlow::Break(());
                }
                next.push(j);
                ControlFlow::Continue(())
            });
            if dead {
                ok = false;
                break;
            }
            next.sort_unstable();
            next.dedup();
            for &j in &next {
                match state[j] {
                    Seen::Open => continue,
                    Seen::Dead => unreachable!("checked above"),
                    Seen::Done => unreachable!("finished components are closed"),
                    Seen::New => {}
                }
                state[j] = Seen::Open;
                visited.push(j);
                let t2 = tg.triangles[j].0;
                for &x in &t {
                    let mut non_adjacent = t2.iter().copied().filter(|&y| !h.has_edge(x, y));
                    let (Some(y), None) = (non_adjacent.next(), non_adjacent.next()) else {
                        ok = false;
                        break 'search;
                    };
                    let c = part.class[x].expect("reached from a colored triangle");
                    if !assign(&mut part, y, c) {
                        ok = false;
                        break 'search;
                    }
                }
                queue.push_back(j);
            }
        }
        let mark = if ok { Seen::Done } else { Seen::Dead };
        for &i in &visited {
            state[i] = mark;
        }
        if ok {
            found.push((part.domain(), part));
        }
    }
    found
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorFailure {
    #[error("coloring failed: {0}")]
    Coloring(#[from] ColorFailure),
    #[error("the restricted set is empty")]
    EmptySet,
    #[error("class sizes differ: {a}, {b}, {c}")]
    UnequalClasses { a: usize, b: usize, c: usize },
    #[error("classes are not a proper coloring of H[U]")]
    NotProperColoring,
    #[error("matching quality {m1} / {m2} below 1 − 6ε = {threshold}")]
    MatchingQuality { m1: f64, m2: f64, threshold: f64 },
    #[error("reconstruction error {error} exceeds bound {bound}")]
    ErrorBound { error: usize, bound: f64 },
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

impl FactorFailure {
    /// Short stage name for traces.
    pub fn stage(&self) -> &'static str {
        match self {
            FactorFailure::Coloring(_) | FactorFailure::EmptySet => "coloring",
            FactorFailure::UnequalClasses { .. } | FactorFailure::NotProperColoring => {
                "coloring-check"
            }
            FactorFailure::MatchingQuality { .. } | FactorFailure::Matching(_) => "matching",
            FactorFailure::ErrorBound { .. } => "error-bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FactorOptions {
    /// Bound the final check by `260ε |E(H[U])| + |U|` instead of
    /// `260ε vol_H(U) + |U|`.
    pub strict_threshold: bool,
}

/// A tensor `K₃ × G̃` on a vertex set `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentFactorization<T> {
    /// `U`, sorted.
    pub vertices: VertexSet,
    /// Class of `vertices[i]`.
    pub color_map: Vec<ColorClass>,
    /// Local `G̃` vertex of `vertices[i]`.
    pub g_map: Vec<usize>,
    pub g_tilde: Graph,
    pub h_tilde: EdgeSet,
    /// `triples[g] = [a, b, c]`, the `H`-vertices mapped to `g`.
    pub triples: Vec<[usize; 3]>,
    pub matching_objectives: (T, T),
    /// `|E(H[U]) Δ H̃_U|`.
    pub error: usize,
    pub error_bound: T,
    /// Triple pairs joined by one to five of their six cross pairs.
    pub weakly_linked: usize,
}

impl<T: Scalar> ComponentFactorization<T> {
    /// Edges of `K₃ × G̃` under the two maps.
    pub fn rederive_h_tilde(&self) -> EdgeSet {
        derive_tensor_edges(&self.triples, &self.g_tilde)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// For every `G̃`-edge `(g, g')`, the six pairs joining differently
/// colored vertices of the two triples.
pub fn derive_tensor_edges(triples: &[[usize; 3]], g_tilde: &Graph) -> EdgeSet {
    let mut pairs = Vec::with_capacity(6 * g_tilde.m());
    for (g1, g2) in g_tilde.edges() {
        for i in 0..3 {
            for j in (0..3).filter(|&j| j != i) {
                pairs.push((triples[g1][i], triples[g2][j]));
            }
        }
    }
    EdgeSet::from_pairs(pairs).expect("triples are disjoint")
}

/// Core factoring of component `j` restricted to `u ⊆ U_j`.
pub fn core_factor<T: Scalar>(
    tg: &TriangleGraph<'_>,
    tc: &TriangleComponents,
    j: usize,
    u: &VertexSet,
    epsilon: T,
    options: FactorOptions,
) -> Result<ComponentFactorization<T>, FactorFailure> {
    let h = tg.h;
    if u.is_empty() {
        return Err(FactorFailure::EmptySet);
    }
    let part = color_component(tg, tc, j)?;
    let in_class =
        |c: ColorClass| -> Vec<usize> { u.iter().filter(|&v| part.class[v] == Some(c)).collect() };
    let (a, b, c) = (
        in_class(ColorClass::A),
        in_class(ColorClass::B),
        in_class(ColorClass::C),
    );
    if a.len() != b.len() || b.len() != c.len() || a.len() + b.len() + c.len() != u.len() {
        return Err(FactorFailure::UnequalClasses {
            a: a.len(),
            b: b.len(),
            c: c.len(),
        });
    }
    if !part.is_coloring_of(h, u) {
        return Err(FactorFailure::NotProperColoring);
    }

    let (w_ab, w_bc) = tripartite_weights::<T>(h, &a, &b, &c)?;
    let m1 = bottleneck_matching(&w_ab)?;
    let m2 = bottleneck_matching(&w_bc)?;
    let threshold = T::one() - T::from_count(6) * epsilon;
    if m1.objective < threshold || m2.objective < threshold {
        return Err(FactorFailure::MatchingQuality {
            m1: m1.objective.to_f64(),
            m2: m2.objective.to_f64(),
            threshold: threshold.to_f64(),
        });
    }

    let k = b.len();
    let mut a_of_b = vec![0; k];
    for (i, &jb) in m1.pairing.iter().enumerate() {
        a_of_b[jb] = i;
    }
    let triples: Vec<[usize; 3]> = (0..k)
        .map(|g| [a[a_of_b[g]], b[g], c[m2.pairing[g]]])
        .collect();
    let mut triple_of = vec![usize::MAX; h.n()];
    for (g, t) in triples.iter().enumerate() {
        for &x in t {
            triple_of[x] = g;
        }
    }
    // Count H-edges between each pair of triples.
    let h_u = h.induced_edges(u);
    let mut linked: Vec<(usize, usize)> = h_u
        .iter()
        .map(|(x, y)| (triple_of[x], triple_of[y]))
        .filter(|(gx, gy)| gx != gy)
        .map(|(gx, gy)| (gx.min(gy), gx.max(gy)))
        .collect();
    linked.sort_unstable();
    let mut weakly_linked = 0;
    let mut g_edges = Vec::new();
    for run in linked.chunk_by(|p, q| p == q) {
        if run.len() < 6 {
            weakly_linked += 1;
        }
        g_edges.push(run[0]);
    }
    let g_tilde = Graph::from_edges(k, g_edges).expect("triple ids are valid");
    let h_tilde = derive_tensor_edges(&triples, &g_tilde);

    let error = h_u.symmetric_difference_count(&h_tilde);
    let scale = if options.strict_threshold {
        T::from_count(h_u.len())
    } else {
        T::from_count(h.volume(u))
    };
    let error_bound = T::from_count(260) * epsilon * scale + T::from_count(u.len());
    if T::from_count(error) > error_bound {
        return Err(FactorFailure::ErrorBound {
            error,
            bound: error_bound.to_f64(),
        });
    }

    let mut color_map = Vec::with_capacity(u.len());
    let mut g_map = Vec::with_capacity(u.len());
    for v in u.iter() {
        color_map.push(part.class[v].expect("u is colored"));
        g_map.push(triple_of[v]);
    }
    Ok(ComponentFactorization {
        vertices: u.clone(),
        color_map,
        g_map,
        g_tilde,
        h_tilde,
        triples,
        matching_objectives: (m1.objective, m2.objective),
        error,
        error_bound,
        weakly_linked,
    })
}

impl<T: Scalar> std::fmt::Display for ComponentFactorization<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "|U| = {}, |G̃| = {}, error {} ≤ {}, quality {} / {}",
            self.vertices.len(),
            self.g_tilde.n(),
            self.error,
            Approx(self.error_bound),
            Approx(self.matching_objectives.0),
            Approx(self.matching_objectives.1)
        )
    }
}
