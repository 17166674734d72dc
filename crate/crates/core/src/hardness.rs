//! Reductions from 3-coloring to tensor reconstruction, used as instance
//! generators and checked in both directions.
//!
//! Vertices of the reduced graph are `(v, x)` with `x ∈ [3]³`, encoded as
//! `27·v + 9·x₁ + 3·x₂ + x₃` (coordinates 0-based, `x₁` most
//! significant). Coordinates and colors are 0-based throughout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::Coloring3;
use crate::graph::{tensor_product, EdgeSet, Graph};
use crate::instance::{InstanceError, LabeledInstance};
use crate::scalar::{format_rational, Rational, Scalar};

/// Looseness factor used when chaining the two reductions.
pub const C_LOOSE: (i64, i64) = (1, 4);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardnessError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("assignment violates the constraint on ({0}, {1})")]
    UnsatisfiedAssignment(usize, usize),
    #[error("input is not a proper 3-coloring")]
    NotAProperColoring,
    #[error("decoded assignment is inconsistent at vertex {0}")]
    Inconsistent(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// 3-coloring with equality: disequality constraints `neq` and equality
/// constraints `eq` on `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityInstance {
    pub n: usize,
    pub neq: EdgeSet,
    pub eq: EdgeSet,
    /// For cloud vertices, the original vertex they copy.
    pub cloud_owner: Vec<Option<usize>>,
}

impl EqualityInstance {
    /// `E≠ = E(g)`, no equality constraints and no clouds.
    pub fn plain(g: &Graph) -> Self {
        EqualityInstance {
            n: g.n(),
            neq: g.edge_set(),
            eq: EdgeSet::new(),
            cloud_owner: vec![None; g.n()],
        }
    }

    /// `(equality count, disequality count)` per vertex.
    pub fn constraint_counts(&self) -> Vec<(usize, usize)> {
        let a = self.eq.degrees(self.n);
        let b = self.neq.degrees(self.n);
        a.into_iter().zip(b).collect()
    }

    /// Every vertex has at most an `ε` fraction of disequality constraints.
    pub fn is_loose(&self, epsilon: Rational) -> bool {
        self.constraint_counts()
            .into_iter()
            .all(|(a, b)| Rational::from_count(b) <= epsilon * Rational::from_count(a + b))
    }

    pub fn is_satisfied_by(&self, assignment: &[u8]) -> Result<(), HardnessError> {
        if assignment.len() != self.n || assignment.iter().any(|&c| c > 2) {
            return Err(HardnessError::InvalidParams(
                "assignment needs one value in 0..3 per vertex".into(),
            ));
        }
        if let Some((u, v)) = self
            .neq
            .iter()
            .find(|&(u, v)| assignment[u] == assignment[v])
        {
            return Err(HardnessError::UnsatisfiedAssignment(u, v));
        }
        if let Some((u, v)) = self
            .eq
            .iter()
            .find(|&(u, v)| assignment[u] != assignment[v])
        {
            return Err(HardnessError::UnsatisfiedAssignment(u, v));
        }
        Ok(())
    }
}

/// Gives each vertex `v` of `g3` a cloud of `⌈d_v / ε⌉` new vertices tied
/// to it by equality constraints. Original vertices keep their ids; clouds
/// follow in order of their owner.
pub fn make_equality_instance(
    g3: &Graph,
    epsilon: Rational,
) -> Result<EqualityInstance, HardnessError> {
    if epsilon <= Rational::from_count(0) || epsilon >= Rational::from_count(1) {
        return Err(HardnessError::InvalidParams(format!(
            "ε must lie in (0, 1), got {}",
            format_rational(&epsilon)
        )));
    }
    let mut cloud_owner = vec![None; g3.n()];
    let mut eq = Vec::new();
    for v in 0..g3.n() {
        let size = (Rational::from_count(g3.degree(v)) / epsilon).ceil_count();
        for _ in 0..size {
            eq.push((v, cloud_owner.len()));
            cloud_owner.push(Some(v));
        }
    }
    let inst = EqualityInstance {
        n: cloud_owner.len(),
        neq: g3.edge_set(),
        eq: EdgeSet::from_pairs(eq).expect("cloud edges are distinct pairs"),
        cloud_owner,
    };
    debug_assert!(inst.is_loose(epsilon));
    Ok(inst)
}

pub fn encode(v: usize, x: [u8; 3]) -> usize {
    27 * v + 9 * x[0] as usize + 3 * x[1] as usize + x[2] as usize
}

pub fn decode(id: usize) -> (usize, [u8; 3]) {
    let r = id % 27;
    (id / 27, [(r / 9) as u8, (r / 3 % 3) as u8, (r % 3) as u8])
}

fn all_points() -> impl Iterator<Item = [u8; 3]> {
    (0..27u8).map(|r| [r / 9, r / 3 % 3, r % 3])
}

/// `x_i ≠ y_i` for every coordinate.
fn differ_everywhere(x: [u8; 3], y: [u8; 3]) -> bool {
    (0..3).all(|i| x[i] != y[i])
}

/// `x_i ≠ y_j` for every pair of distinct coordinates.
fn differ_across(x: [u8; 3], y: [u8; 3]) -> bool {
    (0..3).all(|i| (0..3).all(|j| i == j || x[i] != y[j]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGraph {
    pub base: EqualityInstance,
    pub graph: Graph,
}

/// 27 copies of each vertex; each cloud of copies is `K₃ × K₃ × K₃`,
/// equality constraints join copies that differ in every coordinate and
/// disequality constraints join copies that differ across coordinates.
pub fn tensor_reduction(inst: &EqualityInstance) -> ReducedGraph {
    let mut edges = Vec::new();
    for v in 0..inst.n {
        for x in all_points() {
            for y in all_points().filter(|&y| differ_everywhere(x, y)) {
                if encode(v, x) < encode(v, y) {
                    edges.push((encode(v, x), encode(v, y)));
                }
            }
        }
    }
    for (u, v) in inst.eq.iter() {
        for x in all_points() {
            for y in all_points().filter(|&y| differ_everywhere(x, y)) {
                edges.push((encode(u, x), encode(v, y)));
            }
        }
    }
    for (u, v) in inst.neq.iter() {
        for x in all_points() {
            for y in all_points().filter(|&y| differ_across(x, y)) {
                edges.push((encode(u, x), encode(v, y)));
            }
        }
    }
    ReducedGraph {
        base: inst.clone(),
        graph: Graph::from_edges(27 * inst.n, edges).expect("reduction edges are valid"),
    }
}

/// `G′` on `V × [3]²` (vertex `9·v + 3·x₁ + x₂`) with the map `π` from
/// `K₃ × G′` to the reduced graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessFactor {
    pub g_prime: Graph,
    /// `pi[y · |V(G′)| + g]` is the reduced-graph vertex of `(y, g)`.
    pub pi: Vec<usize>,
}

impl CompletenessFactor {
    /// `π(K₃ × G′)` in reduced-graph ids.
    pub fn product_image(&self) -> Graph {
        tensor_product(&Graph::complete(3), &self.g_prime).relabel(&self.pi)
    }

    /// Product edges at each reduced vertex that are absent from `h`,
    /// with the product degree.
    pub fn missing_edges(&self, h: &Graph) -> Vec<(usize, usize)> {
        let p = self.product_image();
        (0..p.n())
            .map(|v| {
                let missing = p
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| !h.has_edge(v, w))
                    .count();
                (missing, p.degree(v))
            })
            .collect()
    }

    /// The reduced graph as a labeled instance of `K₃ × G′` with deletions,
    /// at budget `epsilon`.
    pub fn to_labeled_instance(
        &self,
        h: &Graph,
        epsilon: Rational,
    ) -> Result<LabeledInstance, HardnessError> {
        let p = self.product_image();
        let mut inverse = vec![0; self.pi.len()];
        for (t, &v) in self.pi.iter().enumerate() {
            inverse[v] = t;
        }
        let deleted: EdgeSet = p
            .edges()
            .filter(|&(u, v)| !h.has_edge(u, v))
            .map(|(u, v)| (inverse[u], inverse[v]))
            .collect();
        let inst = LabeledInstance::from_parts(self.g_prime.clone(), deleted, epsilon, 0)?;
        Ok(inst.relabel(&self.pi)?)
    }
}

/// Builds `G′` and `π` from a satisfying assignment: the `K₃` coordinate of
/// `(y, (v, x))` is inserted at position `assignment[v]` of `x`.
pub fn completeness_factor(
    inst: &EqualityInstance,
    assignment: &[u8],
) -> Result<CompletenessFactor, HardnessError> {
    inst.is_satisfied_by(assignment)?;
    let n = inst.n;
    let pairs = || (0..9u8).map(|r| [r / 3, r % 3]);
    let gid = |v: usize, x: [u8; 2]| 9 * v + 3 * x[0] as usize + x[1] as usize;
    let mut edges = Vec::new();
    for v in 0..n {
        for x in pairs() {
            for y in pairs().filter(|y| x[0] != y[0] && x[1] != y[1]) {
                if gid(v, x) < gid(v, y) {
                    edges.push((gid(v, x), gid(v, y)));
                }
            }
        }
    }
    for (u, v) in inst.eq.iter() {
        for x in pairs() {
            for y in pairs().filter(|y| x[0] != y[0] && x[1] != y[1]) {
                edges.push((gid(u, x), gid(v, y)));
            }
        }
    }
    for (u, v) in inst.neq.iter() {
        for x in pairs() {
            for y in pairs() {
                edges.push((gid(u, x), gid(v, y)));
            }
        }
    }
    let g_prime = Graph::from_edges(9 * n, edges).expect("factor edges are valid");
    let ng = g_prime.n();
    let mut pi = vec![0; 3 * ng];
    for y in 0..3u8 {
        for v in 0..n {
            for x in pairs() {
                let point = match assignment[v] {
                    0 => [y, x[0], x[1]],
                    1 => [x[0], y, x[1]],
                    _ => [x[0], x[1], y],
                };
                pi[y as usize * ng + gid(v, x)] = encode(v, point);
            }
        }
    }
    Ok(CompletenessFactor { g_prime, pi })
}

/// `c(x) = η(x_i)` on `[3]^L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dictator {
    /// 0-based coordinate.
    pub coordinate: usize,
    pub perm: [u8; 3],
}

/// Points of `[3]^L` in base-3 order, first coordinate most significant.
fn point_digits(l: usize, code: usize) -> Vec<u8> {
    let mut digits = vec![0u8; l];
    let mut rest = code;
    for d in digits.iter_mut().rev() {
        *d = (rest % 3) as u8;
        rest /= 3;
    }
    digits
}

/// Checks that `coloring` properly colors the `L`-fold tensor power of
/// `K₃` and finds a coordinate it depends on alone.
pub fn decode_dictator(l: usize, coloring: &[u8]) -> Result<Option<Dictator>, HardnessError> {
    let size = 3usize.pow(l as u32);
    if coloring.len() != size || coloring.iter().any(|&c| c > 2) {
        return Err(HardnessError::NotAProperColoring);
    }
    let points: Vec<Vec<u8>> = (0..size).map(|c| point_digits(l, c)).collect();
    for a in 0..size {
        for b in a + 1..size {
            let adjacent = (0..l).all(|i| points[a][i] != points[b][i]);
            if adjacent && coloring[a] == coloring[b] {
                return Err(HardnessError::NotAProperColoring);
            }
        }
    }
    'coordinate: for i in 0..l {
        let mut perm = [u8::MAX; 3];
        for (p, &c) in points.iter().zip(coloring) {
            let slot = &mut perm[p[i] as usize];
            if *slot == u8::MAX {
                *slot = c;
            } else if *slot != c {
                continue 'coordinate;
            }
        }
        let mut sorted = perm;
        sorted.sort_unstable();
        if sorted == [0, 1, 2] {
            return Ok(Some(Dictator {
                coordinate: i,
                perm,
            }));
        }
    }
    Ok(None)
}

/// Decodes each cloud of a proper coloring of the reduced graph to the
/// coordinate its coloring follows, and checks the result satisfies the
/// instance.
pub fn soundness_extract(
    reduced: &ReducedGraph,
    coloring: &Coloring3,
) -> Result<Vec<u8>, HardnessError> {
    if coloring.len() != reduced.graph.n() || !coloring.is_proper(&reduced.graph) {
        return Err(HardnessError::NotAProperColoring);
    }
    let colors = coloring.indices();
    let mut phi = Vec::with_capacity(reduced.base.n);
    for v in 0..reduced.base.n {
        match decode_dictator(3, &colors[27 * v..27 * v + 27])? {
            Some(d) => phi.push(d.coordinate as u8),
            None => return Err(HardnessError::Inconsistent(v)),
        }
    }
    match reduced.base.is_satisfied_by(&phi) {
        Ok(()) => Ok(phi),
        Err(HardnessError::UnsatisfiedAssignment(u, _)) => Err(HardnessError::Inconsistent(u)),
        Err(e) => Err(e),
    }
}

/// The reduced coloring `(v, x) ↦ x_{assignment[v]}`.
pub fn coloring_from_assignment(n: usize, assignment: &[u8]) -> Coloring3 {
    let colors: Vec<u8> = (0..27 * n)
        .map(|id| {
            let (v, x) = decode(id);
            x[assignment[v] as usize]
        })
        .collect();
    Coloring3::from_indices(&colors).expect("coordinates are 0..3")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionMode {
    WithClouds,
    Plain,
}

impl std::str::FromStr for ReductionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "with-clouds" => Ok(ReductionMode::WithClouds),
            "plain" => Ok(ReductionMode::Plain),
            other => Err(format!("unknown reduction mode `{other}`")),
        }
    }
}

/// Bookkeeping written next to a reduced graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionSidecar {
    pub mode: ReductionMode,
    /// Target nearness; clouds are built at `ε / 4`.
    pub epsilon: Option<String>,
    pub base_vertices: usize,
    pub constraint_vertices: usize,
    pub cloud_owner: Vec<Option<usize>>,
    pub neq_edges: Vec<[usize; 2]>,
    pub eq_edges: Vec<[usize; 2]>,
    pub encoding: String,
}

/// Runs both reductions on `g3`. With clouds, the equality instance is
/// `ε/4`-loose so a satisfying assignment makes the output `ε`-near a
/// tensor.
pub fn reduce_graph(
    g3: &Graph,
    mode: ReductionMode,
    epsilon: Option<Rational>,
) -> Result<(ReducedGraph, ReductionSidecar), HardnessError> {
    let inst = match mode {
        ReductionMode::Plain => EqualityInstance::plain(g3),
        ReductionMode::WithClouds => {
            let eps = epsilon
                .ok_or_else(|| HardnessError::InvalidParams("with-clouds needs ε".into()))?;
            make_equality_instance(g3, eps * Rational::new(C_LOOSE.0, C_LOOSE.1))?
        }
    };
    let reduced = tensor_reduction(&inst);
    let sidecar = ReductionSidecar {
        mode,
        epsilon: epsilon.map(|e| format_rational(&e)),
        base_vertices: g3.n(),
        constraint_vertices: inst.n,
        cloud_owner: inst.cloud_owner.clone(),
        neq_edges: inst.neq.iter().map(|(a, b)| [a, b]).collect(),
        eq_edges: inst.eq.iter().map(|(a, b)| [a, b]).collect(),
        encoding: "27*v + 9*x1 + 3*x2 + x3".to_string(),
    };
    Ok((reduced, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{all_proper_3colorings, brute_force_3coloring};

    #[test]
    fn equality_instance_counts() {
        let k2 = Graph::complete(2);
        let inst = make_equality_instance(&k2, Rational::new(1, 2)).unwrap();
        assert_eq!(inst.n, 6);
        assert_eq!(inst.neq.len(), 1);
        assert_eq!(inst.eq.len(), 4);
        assert!(inst.is_loose(Rational::new(1, 2)));
        let none = make_equality_instance(&Graph::empty(3), Rational::new(1, 10)).unwrap();
        assert_eq!((none.n, none.neq.len(), none.eq.len()), (3, 0, 0));
        assert!(make_equality_instance(&k2, Rational::from_count(0)).is_err());
    }

    #[test]
    fn encoding_round_trips() {
        for id in 0..54 {
            let (v, x) = decode(id);
            assert_eq!(encode(v, x), id);
        }
        assert_eq!(encode(1, [2, 0, 1]), 27 + 18 + 1);
    }

    #[test]
    fn single_vertex_is_cube_of_k3() {
        let r = tensor_reduction(&EqualityInstance::plain(&Graph::empty(1)));
        let k3 = Graph::complete(3);
        let cube = tensor_product(&tensor_product(&k3, &k3), &k3);
        assert_eq!(r.graph, cube);
        assert!((0..27).all(|v| r.graph.degree(v) == 8));
    }

    #[test]
    fn constraint_edge_counts() {
        let eq = EqualityInstance {
            n: 2,
            neq: EdgeSet::new(),
            eq: EdgeSet::from_pairs([(0, 1)]).unwrap(),
            cloud_owner: vec![None, None],
        };
        let r = tensor_reduction(&eq);
        assert_eq!(r.graph.m(), 2 * 108 + 27 * 8);
        // Disequality: count pairs directly from the rule.
        let neq = EqualityInstance::plain(&Graph::complete(2));
        let r = tensor_reduction(&neq);
        let mut cross = 0;
        for a in 0..27usize {
            for b in 0..27usize {
                let (x, y) = (decode(a).1, decode(b).1);
                if (0..3).all(|i| (0..3).all(|j| i == j || x[i] != y[j])) {
                    cross += 1;
                }
            }
        }
        assert_eq!(r.graph.m(), 2 * 108 + cross);
        // In the constructed product each vertex sees 18 across the pair.
        let f = completeness_factor(&neq, &[0, 1]).unwrap();
        let p = f.product_image();
        assert!((0..27).all(|v| p.neighbors(v).iter().filter(|&&w| w >= 27).count() == 18));
    }

    #[test]
    fn completeness_on_k2() {
        let inst = EqualityInstance::plain(&Graph::complete(2));
        let f = completeness_factor(&inst, &[0, 2]).unwrap();
        let h = tensor_reduction(&inst).graph;
        let p = f.product_image();
        assert!(h.edges().all(|(u, v)| p.has_edge(u, v)));
        assert!(completeness_factor(&inst, &[1, 1]).is_err());
    }

    #[test]
    fn single_vertex_map_inserts_first_coordinate() {
        let inst = EqualityInstance::plain(&Graph::empty(1));
        let f = completeness_factor(&inst, &[0]).unwrap();
        // (y, (v, x)) ↦ (v, (y, x₁, x₂))
        assert_eq!(f.pi[2 * 9 + 3], encode(0, [2, 1, 0]));
        assert_eq!(f.product_image(), tensor_reduction(&inst).graph);
    }

    #[test]
    fn dictators_decode() {
        let l = 3;
        let c: Vec<u8> = (0..27).map(|code| point_digits(l, code)[1]).collect();
        assert_eq!(
            decode_dictator(l, &c).unwrap(),
            Some(Dictator {
                coordinate: 1,
                perm: [0, 1, 2]
            })
        );
        let eta = [1u8, 2, 0];
        let c: Vec<u8> = (0..27)
            .map(|code| eta[point_digits(l, code)[0] as usize])
            .collect();
        assert_eq!(
            decode_dictator(l, &c).unwrap(),
            Some(Dictator {
                coordinate: 0,
                perm: eta
            })
        );
        assert_eq!(
            decode_dictator(l, &[0; 27]),
            Err(HardnessError::NotAProperColoring)
        );
    }

    #[test]
    fn every_coloring_at_one_and_two_coordinates_is_a_dictator() {
        let k3 = Graph::complete(3);
        for (l, g) in [(1, k3.clone()), (2, tensor_product(&k3, &k3))] {
            let all = all_proper_3colorings(&g).unwrap();
            assert!(!all.is_empty());
            for c in all {
                assert!(decode_dictator(l, &c).unwrap().is_some());
            }
        }
    }

    #[test]
    fn c5_round_trip() {
        let c5 = Graph::cycle(5);
        let inst = EqualityInstance::plain(&c5);
        let r = tensor_reduction(&inst);
        let coloring = brute_force_3coloring(&r.graph).unwrap().unwrap();
        let phi = soundness_extract(&r, &coloring).unwrap();
        inst.is_satisfied_by(&phi).unwrap();
        let back = coloring_from_assignment(inst.n, &phi);
        assert_eq!(soundness_extract(&r, &back).unwrap(), phi);
    }

    #[test]
    fn cloud_instance_is_near_tensor() {
        let eps = Rational::new(1, 5);
        let (r, side) =
            reduce_graph(&Graph::cycle(5), ReductionMode::WithClouds, Some(eps)).unwrap();
        assert_eq!(side.constraint_vertices, 5 + 5 * 40);
        let assignment: Vec<u8> = (0..r.base.n)
            .map(|v| {
                let owner = r.base.cloud_owner[v].unwrap_or(v);
                [0u8, 1, 0, 1, 2][owner]
            })
            .collect();
        let f = completeness_factor(&r.base, &assignment).unwrap();
        for (missing, deg) in f.missing_edges(&r.graph) {
            assert!(Rational::from_count(missing) < eps * Rational::from_count(deg));
        }
        let labeled = f.to_labeled_instance(&r.graph, eps).unwrap();
        assert_eq!(labeled.h, r.graph);
    }
}
