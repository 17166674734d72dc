//! Whole-graph reconstruction, 3-coloring, and the ε search.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate::{
    analyze_with, build_candidate_graph, enumerate_triangles, is_atomic, CandidateError, Triangle,
    TriangleAnalysis, TriangleGraph, DEFAULT_MAX_TRIANGLES,
};
use crate::color::{ColorClass, Coloring3, PERMUTATIONS_3};
use crate::factoring::{
    core_factor, derive_tensor_edges, proper_component_colorings, ComponentFactorization,
    FactorOptions, Partition3,
};
use crate::graph::{EdgeSet, Graph, VertexSet};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_COMPONENTS: usize = 1_000_000;
/// Largest `k` accepted by [`color_with_k_core_components`] by default.
pub const DEFAULT_MAX_K: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub max_triangles: usize,
    pub max_components: usize,
    /// See [`FactorOptions::strict_threshold`].
    pub strict_threshold: bool,
    /// Enumerate overlapping triangle components in full. Off by default;
    /// they are skipped either way, so results do not change.
    #[serde(default)]
    pub exact_components: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_triangles: DEFAULT_MAX_TRIANGLES,
            max_components: DEFAULT_MAX_COMPONENTS,
            strict_threshold: false,
            exact_components: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("{} vertices left uncovered after {accepted} accepted components", uncovered.len())]
    IncompleteCover {
        uncovered: VertexSet,
        accepted: usize,
    },
    #[error("no ε below 1/40 yields a reconstruction within the error bound")]
    NotNearTensor,
    #[error("candidate graph has more than {cap} triangles")]
    TriangleCap { cap: usize },
    #[error("{count} triangle components exceed the cap of {cap}")]
    ComponentCap { count: usize, cap: usize },
    #[error("ε must lie in [0, 1/40)")]
    InvalidEpsilon,
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("no proper 3-coloring found")]
    NoColoring,
}

impl PipelineError {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::IncompleteCover { .. } | PipelineError::NoColoring => 2,
            PipelineError::NotNearTensor => 3,
            PipelineError::TriangleCap { .. } | PipelineError::ComponentCap { .. } => 4,
            PipelineError::InvalidEpsilon | PipelineError::EmptyGraph => 1,
        }
    }
}

impl From<CandidateError> for PipelineError {
    fn from(e: CandidateError) -> Self {
        match e {
            CandidateError::TriangleCap { cap } => PipelineError::TriangleCap { cap },
            CandidateError::InvalidEpsilon => PipelineError::InvalidEpsilon,
        }
    }
}

fn check_epsilon<T: Scalar>(epsilon: T) -> Result<(), PipelineError> {
    if epsilon < T::zero() || T::from_count(40) * epsilon >= T::one() {
        return Err(PipelineError::InvalidEpsilon);
    }
    Ok(())
}

/// Candidate graph and its triangles; coloring needs no component list.
fn prepare_triangles<T: Scalar>(
    h: &Graph,
    epsilon: T,
    config: &PipelineConfig,
) -> Result<(Graph, Vec<Triangle>), PipelineError> {
    if h.n() == 0 {
        return Err(PipelineError::EmptyGraph);
    }
    check_epsilon(epsilon)?;
    let c = build_candidate_graph(h, epsilon).edges;
    let triangles = enumerate_triangles(&c, config.max_triangles)?;
    Ok((c, triangles))
}

/// Proper local colorings of the components of `T(C)`.
fn local_colorings<T: Scalar>(
    h: &Graph,
    epsilon: T,
    config: &PipelineConfig,
) -> Result<Vec<(VertexSet, Partition3)>, PipelineError> {
    let (c, triangles) = prepare_triangles(h, epsilon, config)?;
    Ok(proper_component_colorings(&TriangleGraph::new(
        h, &c, triangles,
    )))
}

fn prepare<T: Scalar>(
    h: &Graph,
    epsilon: T,
    config: &PipelineConfig,
) -> Result<TriangleAnalysis<T>, PipelineError> {
    if h.n() == 0 {
        return Err(PipelineError::EmptyGraph);
    }
    check_epsilon(epsilon)?;
    let analysis = analyze_with(h, epsilon, config.max_triangles, config.exact_components)?;
    // Only components without overlaps are factored.
    let tc = &analysis.components;
    let count = (0..tc.count()).filter(|&j| !tc.has_overlap(j)).count();
    if count > config.max_components {
        return Err(PipelineError::ComponentCap {
            count,
            cap: config.max_components,
        });
    }
    Ok(analysis)
}

/// What happened to one triangle component during reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum StepOutcome {
    Overlap,
    Empty,
    Failed {
        stage: String,
        reason: String,
    },
    DenseCut {
        cut: usize,
        bound: f64,
    },
    Accepted {
        atomic: bool,
        remainder_atomic: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub component: usize,
    pub covered: usize,
    /// `|U_j ∩ S|` at the time the component was visited.
    pub restricted: usize,
    pub outcome: StepOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction<T> {
    pub components: Vec<ComponentFactorization<T>>,
    /// Disjoint union of the component factors, numbered in acceptance
    /// order.
    pub g_tilde: Graph,
    pub h_tilde: EdgeSet,
    pub error_delta: usize,
    pub epsilon_used: T,
    /// `ε |E(H)| ≥ |V(H)|`, the regime where the `550ε|E(H)|` bound is
    /// promised.
    pub bound_applicable: bool,
    pub steps: Vec<Step>,
    pub candidate_edges: usize,
    pub triangles: usize,
    pub triangle_components: usize,
}

impl<T: Scalar> Reconstruction<T> {
    /// `550 ε |E(H)|`.
    pub fn error_bound(&self, h: &Graph) -> T {
        T::from_count(550) * self.epsilon_used * T::from_count(h.m())
    }

    pub fn within_bound(&self, h: &Graph) -> bool {
        T::from_count(self.error_delta) <= self.error_bound(h)
    }

    /// `errorDelta / |E(H)|`, or 0 for an edgeless graph.
    pub fn error_ratio(&self, h: &Graph) -> f64 {
        if h.m() == 0 {
            0.0
        } else {
            self.error_delta as f64 / h.m() as f64
        }
    }

    /// Class per `H`-vertex.
    pub fn color_map(&self, n: usize) -> Vec<Option<ColorClass>> {
        let mut out = vec![None; n];
        for f in &self.components {
            for (v, c) in f.vertices.iter().zip(&f.color_map) {
                out[v] = Some(*c);
            }
        }
        out
    }

    /// Global `G̃`-vertex per `H`-vertex.
    pub fn g_map(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        let mut offset = 0;
        for f in &self.components {
            for (v, g) in f.vertices.iter().zip(&f.g_map) {
                out[v] = Some(offset + g);
            }
            offset += f.g_tilde.n();
        }
        out
    }

    /// `K₃ × G̃` rebuilt from the maps and the global factor.
    pub fn rederive_h_tilde(&self) -> EdgeSet {
        let triples: Vec<[usize; 3]> = self
            .components
            .iter()
            .flat_map(|f| f.triples.iter().copied())
            .collect();
        derive_tensor_edges(&triples, &self.g_tilde)
    }

    pub fn to_file(&self) -> ReconstructionFile {
        ReconstructionFile {
            epsilon_used: self.epsilon_used.to_text(),
            error_delta: self.error_delta,
            components: self
                .components
                .iter()
                .map(|f| ComponentRecord {
                    vertices: f.vertices.as_slice().to_vec(),
                    color_map: f.color_map.iter().map(|c| c.index() as u8).collect(),
                    g_map: f.g_map.clone(),
                    g_tilde_edges: f.g_tilde.edges().map(|(a, b)| [a, b]).collect(),
                })
                .collect(),
            h_tilde_edges: self.h_tilde.iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

fn disjoint_union(parts: &[Graph]) -> Graph {
    let n = parts.iter().map(Graph::n).sum();
    let mut edges = Vec::new();
    let mut offset = 0;
    for g in parts {
        edges.extend(g.edges().map(|(a, b)| (a + offset, b + offset)));
        offset += g.n();
    }
    Graph::from_edges(n, edges).expect("offset edges are valid")
}

/// Component visiting order: most covered vertices first, ties by
/// component id (which follows the smallest triangle).
fn visiting_order(analysis: &TriangleAnalysis<impl Scalar>) -> Vec<usize> {
    let tc = &analysis.components;
    let mut order: Vec<usize> = (0..tc.count()).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(tc.covered[j].len()), j));
    order
}

/// Greedy claiming of core components: each component is factored on its
/// still-unclaimed vertices and accepted when the factorization succeeds
/// and its cut to the rest of the unclaimed vertices is sparse.
pub fn main_reconstruct<T: Scalar>(
    h: &Graph,
    epsilon: T,
    config: &PipelineConfig,
) -> Result<Reconstruction<T>, PipelineError> {
    let analysis = prepare(h, epsilon, config)?;
    let tc = &analysis.components;
    let tg = TriangleGraph::new(h, &analysis.candidate.edges, tc.triangles.clone());
    let options = FactorOptions {
        strict_threshold: config.strict_threshold,
    };
    let n = h.n();
    let mut in_s = vec![true; n];
    let mut s_len = n;
    let mut accepted = Vec::new();
    let mut steps = Vec::new();
    for j in visiting_order(&analysis) {
        let covered = tc.covered[j].len();
        let step = |restricted, outcome| Step {
            component: j,
            covered,
            restricted,
            outcome,
        };
        if tc.has_overlap(j) {
            steps.push(step(0, StepOutcome::Overlap));
            continue;
        }
        let u: VertexSet = tc.covered[j].iter().filter(|&v| in_s[v]).collect();
        if u.is_empty() {
            steps.push(step(0, StepOutcome::Empty));
            continue;
        }
        let f = match core_factor(&tg, tc, j, &u, epsilon, options) {
            Ok(f) => f,
            Err(e) => {
                steps.push(step(
                    u.len(),
                    StepOutcome::Failed {
                        stage: e.stage().to_string(),
                        reason: e.to_string(),
                    },
                ));
                continue;
            }
        };
        let u_mask = u.mask(n);
        let mut cut = 0;
        let mut vol_u = 0;
        let mut vol_rest = 0;
        for v in 0..n {
            if !in_s[v] {
                continue;
            }
            if u_mask[v] {
                vol_u += h.degree(v);
                cut += h
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| in_s[w] && !u_mask[w])
                    .count();
            } else {
                vol_rest += h.degree(v);
            }
        }
        let bound = T::from_count(5) * epsilon * T::from_count(vol_u.min(vol_rest));
        if (T::one() - epsilon) * T::from_count(cut) > bound {
            steps.push(step(
                u.len(),
                StepOutcome::DenseCut {
                    cut,
                    bound: (bound / (T::one() - epsilon)).to_f64(),
                },
            ));
            continue;
        }
        for v in u.iter() {
            in_s[v] = false;
        }
        s_len -= u.len();
        let remainder: VertexSet = (0..n).filter(|&v| in_s[v]).collect();
        steps.push(step(
            u.len(),
            StepOutcome::Accepted {
                atomic: is_atomic(&analysis.candidate, &u),
                remainder_atomic: is_atomic(&analysis.candidate, &remainder),
            },
        ));
        accepted.push(f);
    }
    if s_len > 0 {
        return Err(PipelineError::IncompleteCover {
            uncovered: (0..n).filter(|&v| in_s[v]).collect(),
            accepted: accepted.len(),
        });
    }

    let parts: Vec<Graph> = accepted.iter().map(|f| f.g_tilde.clone()).collect();
    let g_tilde = disjoint_union(&parts);
    let h_tilde: EdgeSet = accepted.iter().flat_map(|f| f.h_tilde.iter()).collect();
    let error_delta = h.edge_set().symmetric_difference_count(&h_tilde);
    let bound_applicable = epsilon * T::from_count(h.m()) >= T::from_count(n);
    Ok(Reconstruction {
        components: accepted,
        g_tilde,
        h_tilde,
        error_delta,
        epsilon_used: epsilon,
        bound_applicable,
        steps,
        candidate_edges: analysis.candidate.edges.m(),
        triangles: tc.triangles.len(),
        triangle_components: tc.count(),
    })
}

/// The first triangle component whose propagated coloring covers all of
/// `H` and is proper.
pub fn full_3_coloring<T: Scalar>(
    h: &Graph,
    epsilon: T,
    config: &PipelineConfig,
) -> Result<Coloring3, PipelineError> {
    let n = h.n();
    for (u, part) in local_colorings(h, epsilon, config)? {
        if u.len() != n {
            continue;
        }
        let coloring = Coloring3::new(part.class.into_iter().flatten().collect());
        if coloring.is_proper(h) {
            return Ok(coloring);
        }
    }
    Err(PipelineError::NoColoring)
}

/// Covers `H` with at most `k` vertex-disjoint triangle components whose
/// own colorings are proper, then searches color permutations of all but
/// the first for a proper coloring of the whole graph.
pub fn color_with_k_core_components<T: Scalar>(
    h: &Graph,
    epsilon: T,
    k: usize,
    config: &PipelineConfig,
) -> Result<Coloring3, PipelineError> {
    let n = h.n();
    if n == 0 {
        return Err(PipelineError::EmptyGraph);
    }
    if h.m() == 0 {
        return Ok(Coloring3::new(vec![ColorClass::A; n]));
    }
    if k == 0 {
        return Err(PipelineError::NoColoring);
    }
    // Locally valid components with their colorings, as (vertices, classes).
    let local: Vec<(VertexSet, Vec<ColorClass>)> = local_colorings(h, epsilon, config)?
        .into_iter()
        .map(|(u, part)| {
            let classes = u
                .iter()
                .map(|v| part.class[v].expect("in domain"))
                .collect();
            (u, classes)
        })
        .collect();
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, (u, _)) in local.iter().enumerate() {
        for v in u.iter() {
            containing[v].push(i);
        }
    }

    struct Search<'a> {
        h: &'a Graph,
        k: usize,
        local: &'a [(VertexSet, Vec<ColorClass>)],
        containing: &'a [Vec<usize>],
        owner: Vec<Option<usize>>,
        chosen: Vec<usize>,
        color: Vec<Option<ColorClass>>,
    }

    impl Search<'_> {
        fn cover(&mut self) -> bool {
            let Some(v) = self.owner.iter().position(Option::is_none) else {
                return self.permute(0);
            };
            if self.chosen.len() == self.k {
                return false;
            }
            for &i in &self.containing[v] {
                let u = &self.local[i].0;
                if u.iter().any(|x| self.owner[x].is_some()) {
                    continue;
                }
                for x in u.iter() {
                    self.owner[x] = Some(i);
                }
                self.chosen.push(i);
                if self.cover() {
                    return true;
                }
                self.chosen.pop();
                for x in u.iter() {
                    self.owner[x] = None;
                }
            }
            false
        }

        /// Assigns a permutation to `chosen[depth]` and checks every edge
        /// back into already colored components.
        fn permute(&mut self, depth: usize) -> bool {
            if depth == self.chosen.len() {
                return true;
            }
            let (u, classes) = &self.local[self.chosen[depth]];
            let perms: &[[u8; 3]] = if depth == 0 {
                &PERMUTATIONS_3[..1]
            } else {
                &PERMUTATIONS_3
            };
            for perm in perms {
                let consistent = u.iter().zip(classes).all(|(v, c)| {
                    let c = c.permute(perm);
                    self.h
                        .neighbors(v)
                        .iter()
                        .all(|&w| self.color[w] != Some(c))
                });
                if !consistent {
                    continue;
                }
                for (v, c) in u.iter().zip(classes) {
                    self.color[v] = Some(c.permute(perm));
                }
                if self.permute(depth + 1) {
                    return true;
                }
                for v in u.iter() {
                    self.color[v] = None;
                }
            }
            false
        }
    }

    let mut search = Search {
        h,
        k,
        local: &local,
        containing: &containing,
        owner: vec![None; n],
        chosen: Vec::new(),
        color: vec![None; n],
    };
    if search.cover() {
        let coloring = Coloring3::new(
            search
                .color
                .into_iter()
                .map(|c| c.expect("covered"))
                .collect(),
        );
        debug_assert!(coloring.is_proper(h));
        return Ok(coloring);
    }
    Err(PipelineError::NoColoring)
}

/// The ε grid `{2⁻ᵗ : 6 ≤ t ≤ 30} ∪ {1/41}`, ascending.
pub fn epsilon_grid<T: Scalar>() -> Vec<T> {
    let mut grid: Vec<T> = (6..=30)
        .rev()
        .map(|t| T::from_ratio(1, 1i64 << t))
        .collect();
    grid.push(T::from_ratio(1, 41));
    grid
}

fn search_accepts<T: Scalar>(
    h: &Graph,
    r: &Result<Reconstruction<T>, PipelineError>,
) -> Result<bool, PipelineError> {
    match r {
        Ok(rec) => Ok(rec.within_bound(h)),
        Err(PipelineError::IncompleteCover { .. }) => Ok(false),
        Err(e) => Err(e.clone()),
    }
}

/// Smallest grid ε whose reconstruction covers `H` within
/// `550 ε |E(H)|`, by binary search assuming success is monotone in ε.
pub fn epsilon_search<T: Scalar>(
    h: &Graph,
    config: &PipelineConfig,
) -> Result<Reconstruction<T>, PipelineError> {
    let grid = epsilon_grid::<T>();
    let top = main_reconstruct(h, *grid.last().expect("grid is nonempty"), config);
    if !search_accepts(h, &top)? {
        return Err(PipelineError::NotNearTensor);
    }
    let mut best = top?;
    let (mut lo, mut hi) = (0usize, grid.len() - 1);
    // Invariant: grid[hi] succeeds; grid[i] for i < lo fail.
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let r = main_reconstruct(h, grid[mid], config);
        if search_accepts(h, &r)? {
            best = r?;
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub vertices: Vec<usize>,
    /// Class index 0..3 per vertex.
    pub color_map: Vec<u8>,
    /// Local `G̃`-vertex per vertex.
    pub g_map: Vec<usize>,
    pub g_tilde_edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionFile {
    pub epsilon_used: String,
    pub error_delta: usize,
    pub components: Vec<ComponentRecord>,
    pub h_tilde_edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringFile {
    /// Class index 0..3 per vertex.
    pub colors: Vec<u8>,
}

impl ColoringFile {
    pub fn from_coloring(c: &Coloring3) -> Self {
        ColoringFile {
            colors: c.indices(),
        }
    }
}

/// Named pass/fail checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<(String, bool)>,
}

impl VerifyReport {
    fn push(&mut self, name: &str, ok: bool) {
        self.checks.push((name.to_string(), ok));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (name, ok) in &self.checks {
            writeln!(f, "{} {name}", if *ok { "PASS" } else { "FAIL" })?;
        }
        Ok(())
    }
}

/// Re-checks a reconstruction file against `H`.
pub fn verify_reconstruction(h: &Graph, file: &ReconstructionFile) -> VerifyReport {
    let n = h.n();
    let mut report = VerifyReport { checks: Vec::new() };
    let mut seen = vec![0usize; n];
    let mut shapes_ok = true;
    let mut in_range = true;
    for c in &file.components {
        shapes_ok &= c.vertices.len() == c.color_map.len() && c.vertices.len() == c.g_map.len();
        for &v in &c.vertices {
            if v < n {
                seen[v] += 1;
            } else {
                in_range = false;
            }
        }
    }
    report.push("component vertex lists are in range", in_range);
    report.push("per-vertex maps have matching lengths", shapes_ok);
    report.push(
        "components partition V(H)",
        in_range && seen.iter().all(|&c| c == 1),
    );
    if !(in_range && shapes_ok) {
        return report;
    }

    let mut derived = Vec::new();
    let mut maps_ok = true;
    for c in &file.components {
        let k = c.g_map.iter().max().map_or(0, |m| m + 1);
        let mut slot = vec![[usize::MAX; 3]; k];
        for ((&v, &col), &g) in c.vertices.iter().zip(&c.color_map).zip(&c.g_map) {
            if col > 2 || slot[g][col as usize] != usize::MAX {
                maps_ok = false;
            } else {
                slot[g][col as usize] = v;
            }
        }
        maps_ok &= slot.iter().all(|s| s.iter().all(|&v| v != usize::MAX));
        maps_ok &= c
            .g_tilde_edges
            .iter()
            .all(|&[a, b]| a < k && b < k && a != b);
        if !maps_ok {
            break;
        }
        for &[a, b] in &c.g_tilde_edges {
            for i in 0..3 {
                for j in (0..3).filter(|&j| j != i) {
                    derived.push((slot[a][i], slot[b][j]));
                }
            }
        }
    }
    report.push("color and G̃ maps form a bijection onto K₃ × G̃", maps_ok);
    let stored = EdgeSet::from_pairs(file.h_tilde_edges.iter().map(|&[a, b]| (a, b)));
    let stored_ok = stored.is_ok();
    report.push("stored H̃ edges are valid pairs", stored_ok);
    if !(maps_ok && stored_ok) {
        return report;
    }
    let stored = stored.expect("checked");
    let derived = EdgeSet::from_pairs(derived).expect("distinct slots");
    report.push("H̃ equals K₃ × G̃ rebuilt from the maps", derived == stored);
    report.push(
        "error_delta matches |E(H) Δ H̃|",
        h.edge_set().symmetric_difference_count(&stored) == file.error_delta,
    );
    match crate::scalar::parse_rational(&file.epsilon_used) {
        Ok(eps) => {
            let applicable = eps * crate::scalar::Rational::from_count(h.m())
                >= crate::scalar::Rational::from_count(n);
            let within = crate::scalar::Rational::from_count(file.error_delta)
                <= crate::scalar::Rational::from_count(550)
                    * eps
                    * crate::scalar::Rational::from_count(h.m());
            report.push(
                "error_delta ≤ 550 ε |E(H)| (when ε|E(H)| ≥ |V(H)|)",
                !applicable || within,
            );
        }
        Err(_) => report.push("epsilon_used parses", false),
    }
    report
}

pub fn verify_coloring(h: &Graph, file: &ColoringFile) -> VerifyReport {
    let mut report = VerifyReport { checks: Vec::new() };
    report.push("one color per vertex", file.colors.len() == h.n());
    report.push("colors are 0, 1 or 2", file.colors.iter().all(|&c| c < 3));
    if report.passed() {
        let c = Coloring3::from_indices(&file.colors).expect("checked");
        report.push("no monochromatic edge", c.is_proper(h));
    }
    report
}

pub const METRICS_HEADER: &str = "# tensorcolor-metrics v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub label: String,
    pub n: usize,
    pub m: usize,
    pub epsilon: String,
    pub error_delta: Option<usize>,
    pub error_ratio: Option<f64>,
    pub bound_applicable: bool,
    pub within_bound: Option<bool>,
    pub triangles: usize,
    pub triangle_components: usize,
    pub accepted_components: usize,
    pub status: String,
    pub wall_ms: u128,
}

impl MetricsRow {
    /// Row for a finished run; `started` is when the run began.
    pub fn from_result<T: Scalar>(
        label: &str,
        h: &Graph,
        epsilon: T,
        result: &Result<Reconstruction<T>, PipelineError>,
        started: Instant,
    ) -> Self {
        let wall_ms = started.elapsed().as_millis();
        match result {
            Ok(r) => MetricsRow {
                label: label.to_string(),
                n: h.n(),
                m: h.m(),
                epsilon: r.epsilon_used.to_text(),
                error_delta: Some(r.error_delta),
                error_ratio: Some(r.error_ratio(h)),
                bound_applicable: r.bound_applicable,
                within_bound: Some(r.within_bound(h)),
                triangles: r.triangles,
                triangle_components: r.triangle_components,
                accepted_components: r.components.len(),
                status: "ok".to_string(),
                wall_ms,
            },
            Err(e) => MetricsRow {
                label: label.to_string(),
                n: h.n(),
                m: h.m(),
                epsilon: epsilon.to_text(),
                error_delta: None,
                error_ratio: None,
                bound_applicable: epsilon * T::from_count(h.m()) >= T::from_count(h.n()),
                within_bound: None,
                triangles: 0,
                triangle_components: 0,
                accepted_components: match e {
                    PipelineError::IncompleteCover { accepted, .. } => *accepted,
                    _ => 0,
                },
                status: status_name(e).to_string(),
                wall_ms,
            },
        }
    }
}

pub fn status_name(e: &PipelineError) -> &'static str {
    match e {
        PipelineError::IncompleteCover { .. } => "incomplete_cover",
        PipelineError::NotNearTensor => "not_near_tensor",
        PipelineError::TriangleCap { .. } => "triangle_cap",
        PipelineError::ComponentCap { .. } => "component_cap",
        PipelineError::InvalidEpsilon => "invalid_epsilon",
        PipelineError::EmptyGraph => "empty_graph",
        PipelineError::NoColoring => "no_coloring",
    }
}

/// Writes the versioned header comment, the column header and the rows.
pub fn write_metrics<W: Write>(out: W, rows: &[MetricsRow]) -> Result<(), csv::Error> {
    let mut out = out;
    writeln!(out, "{METRICS_HEADER}")?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record([
            "label",
            "n",
            "m",
            "epsilon",
            "error_delta",
            "error_ratio",
            "bound_applicable",
            "within_bound",
            "triangles",
            "triangle_components",
            "accepted_components",
            "status",
            "wall_ms",
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tensor_product;
    use crate::instance::random_regular;
    use crate::scalar::Rational;
    use num_traits::Zero;

    fn cfg() -> PipelineConfig {
        PipelineConfig::default()
    }

    #[test]
    fn exact_tensor_is_recovered() {
        let g = random_regular(20, 6, 11).unwrap();
        let h = tensor_product(&Graph::complete(3), &g);
        let r = main_reconstruct(&h, Rational::zero(), &cfg()).unwrap();
        assert_eq!(r.error_delta, 0);
        assert_eq!(r.h_tilde, h.edge_set());
        assert_eq!(r.rederive_h_tilde(), r.h_tilde);
        assert_eq!(r.g_tilde.m(), g.m());
        let report = verify_reconstruction(&h, &r.to_file());
        assert!(report.passed(), "{report}");
        let c = full_3_coloring(&h, Rational::zero(), &cfg()).unwrap();
        assert!(c.is_proper(&h));
    }

    #[test]
    fn pruned_components_give_the_same_results() {
        use crate::instance::{make_instance, DeletionStrategy};
        let g = random_regular(40, 20, 8).unwrap();
        let exact = PipelineConfig {
            exact_components: true,
            ..cfg()
        };
        for (eps, strategy) in [
            (Rational::new(1, 50), DeletionStrategy::Random),
            (Rational::new(1, 45), DeletionStrategy::ConfusablePush),
        ] {
            let h = make_instance(&g, eps, strategy, 3).unwrap().h;
            let a = main_reconstruct(&h, eps, &exact).unwrap();
            let b = main_reconstruct(&h, eps, &cfg()).unwrap();
            assert!(a.steps.iter().any(|s| s.outcome == StepOutcome::Overlap));
            assert_eq!(a.components, b.components);
            assert_eq!(a.h_tilde, b.h_tilde);
            assert_eq!(a.error_delta, b.error_delta);
            assert_eq!(
                full_3_coloring(&h, eps, &exact).ok(),
                full_3_coloring(&h, eps, &cfg()).ok()
            );
        }
    }

    #[test]
    fn edgeless_graph_is_not_covered() {
        let h = Graph::empty(6);
        assert!(matches!(
            main_reconstruct(&h, Rational::zero(), &cfg()),
            Err(PipelineError::IncompleteCover { .. })
        ));
        assert_eq!(
            color_with_k_core_components(&h, Rational::zero(), 0, &cfg())
                .unwrap()
                .len(),
            6
        );
        assert_eq!(
            main_reconstruct(&Graph::empty(0), Rational::zero(), &cfg()),
            Err(PipelineError::EmptyGraph)
        );
    }

    #[test]
    fn epsilon_range_is_enforced() {
        let h = tensor_product(&Graph::complete(3), &Graph::cycle(5));
        assert_eq!(
            main_reconstruct(&h, Rational::new(1, 40), &cfg()).unwrap_err(),
            PipelineError::InvalidEpsilon
        );
        assert!(main_reconstruct(&h, Rational::new(1, 41), &cfg()).is_ok());
    }

    #[test]
    fn k_zero_fails_on_nonempty_graph() {
        let h = tensor_product(&Graph::complete(3), &Graph::cycle(5));
        assert_eq!(
            color_with_k_core_components(&h, Rational::zero(), 0, &cfg()),
            Err(PipelineError::NoColoring)
        );
        assert!(
            color_with_k_core_components(&h, Rational::zero(), 1, &cfg())
                .unwrap()
                .is_proper(&h)
        );
    }

    #[test]
    fn exact_input_search_stops_at_smallest_grid_value() {
        let h = tensor_product(&Graph::complete(3), &random_regular(12, 4, 2).unwrap());
        let r = epsilon_search::<Rational>(&h, &cfg()).unwrap();
        assert_eq!(r.epsilon_used, Rational::new(1, 1 << 30));
        assert_eq!(r.error_delta, 0);
    }

    #[test]
    fn tampering_is_detected() {
        let h = tensor_product(&Graph::complete(3), &Graph::cycle(7));
        let mut file = main_reconstruct(&h, Rational::zero(), &cfg())
            .unwrap()
            .to_file();
        file.h_tilde_edges.pop();
        assert!(!verify_reconstruction(&h, &file).passed());
        let bad = ColoringFile {
            colors: vec![0; h.n()],
        };
        assert!(!verify_coloring(&h, &bad).passed());
    }

    #[test]
    fn metrics_start_with_version_line() {
        let h = tensor_product(&Graph::complete(3), &Graph::cycle(5));
        let started = Instant::now();
        let r = main_reconstruct(&h, Rational::zero(), &cfg());
        let row = MetricsRow::from_result("c5", &h, Rational::zero(), &r, started);
        let mut buf = Vec::new();
        write_metrics(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(METRICS_HEADER));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("label,n,m,epsilon,error_delta"));
        assert!(lines.next().unwrap().starts_with("c5,15,30,0,0,0"));
    }
}
