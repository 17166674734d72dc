//! Base graphs, `P = K₃ × G`, bounded deletion adversaries, and labeled
//! instances carrying the hidden ground truth.

use std::collections::HashSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::ColorClass;
use crate::graph::{self, tensor_product, EdgeSet, Graph, GraphError};
use crate::rng::Rng;
use crate::scalar::{format_rational, serde_rational, Rational, Scalar};

/// Attempts allowed before generation gives up.
pub const GENERATION_RETRY_CAP: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("vertex {vertex} lost {deleted} edges, budget is {budget}")]
    BudgetViolated {
        vertex: usize,
        deleted: usize,
        budget: usize,
    },
    #[error("inconsistent instance: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BaseGraphKind {
    RandomRegular {
        n: usize,
        d: usize,
    },
    /// Vertices `{0,1}^ℓ`, adjacent at Hamming distance exactly `βℓ`.
    NoisyHypercube {
        ell: usize,
        #[serde(with = "serde_rational")]
        beta: Rational,
    },
    Complete {
        n: usize,
    },
    OddCycle {
        n: usize,
    },
    TwoCliquesBridged {
        n: usize,
    },
}

fn invalid(msg: impl Into<String>) -> InstanceError {
    InstanceError::InvalidParams(msg.into())
}

pub fn gen_base_graph(kind: &BaseGraphKind, seed: u64) -> Result<Graph, InstanceError> {
    match *kind {
        BaseGraphKind::RandomRegular { n, d } => random_regular(n, d, seed),
        BaseGraphKind::NoisyHypercube { ell, beta } => {
            let g = noisy_hypercube(ell, beta)?;
            if !g.is_connected() {
                return Err(invalid(format!(
                    "hypercube at distance βℓ = {} is disconnected for ℓ = {ell}",
                    format_rational(&(beta * Rational::from_count(ell)))
                )));
            }
            Ok(g)
        }
        BaseGraphKind::Complete { n } => {
            if n == 0 {
                return Err(invalid("complete graph needs n ≥ 1"));
            }
            Ok(Graph::complete(n))
        }
        BaseGraphKind::OddCycle { n } => {
            if n < 3 || n % 2 == 0 {
                return Err(invalid(format!("odd cycle needs odd n ≥ 3, got {n}")));
            }
            Ok(Graph::cycle(n))
        }
        BaseGraphKind::TwoCliquesBridged { n } => {
            if n < 2 {
                return Err(invalid("bridged cliques need n ≥ 2"));
            }
            Ok(graph::two_cliques_bridged(n))
        }
    }
}

/// Random `d`-regular connected graph from the pairing model.
///
/// Stubs are paired one random pair at a time; a pair that would create a
/// loop or a repeated edge is redrawn. When random draws keep failing the
/// remaining valid pairs are listed and one is drawn uniformly; if none
/// remains the attempt restarts. Disconnected results are rejected.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, InstanceError> {
    if n == 0 || d >= n || (n * d) % 2 == 1 {
        return Err(invalid(format!("no {d}-regular graph on {n} vertices")));
    }
    if (d == 0 && n > 1) || (d == 1 && n > 2) {
        return Err(invalid(format!(
            "{d}-regular graphs on {n} vertices are disconnected"
        )));
    }
    let mut rng = Rng::new(seed);
    for _ in 0..GENERATION_RETRY_CAP {
        if let Some(g) = try_pairing(n, d, &mut rng) {
            if g.is_connected() {
                return Ok(g);
            }
        }
    }
    Err(InstanceError::GenerationFailed {
        attempts: GENERATION_RETRY_CAP,
    })
}

fn try_pairing(n: usize, d: usize, rng: &mut Rng) -> Option<Graph> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut adj = vec![vec![false; n]; n];
    let mut edges = Vec::with_capacity(n * d / 2);
    while !stubs.is_empty() {
        let mut chosen = None;
        for _ in 0..50 {
            let i = rng.index(stubs.len());
            let j = rng.index(stubs.len());
            let (u, v) = (stubs[i], stubs[j]);
            if i != j && u != v && !adj[u][v] {
                chosen = Some((i, j));
                break;
            }
        }
        let (i, j) = match chosen {
            Some(p) => p,
            None => {
                let mut valid = Vec::new();
                for i in 0..stubs.len() {
                    for j in i + 1..stubs.len() {
                        let (u, v) = (stubs[i], stubs[j]);
                        if u != v && !adj[u][v] {
                            valid.push((i, j));
                        }
                    }
                }
                if valid.is_empty() {
                    return None;
                }
                valid[rng.index(valid.len())]
            }
        };
        let (u, v) = (stubs[i], stubs[j]);
        adj[u][v] = true;
        adj[v][u] = true;
        edges.push((u, v));
        let (hi, lo) = (i.max(j), i.min(j));
        stubs.swap_remove(hi);
        stubs.swap_remove(lo);
    }
    Some(Graph::from_edges(n, edges).expect("pairing produces valid edges"))
}

/// Hamming-distance-`βℓ` graph on `{0,1}^ℓ`. Not necessarily connected:
/// for even `βℓ` the two parity classes are separate components.
pub fn noisy_hypercube(ell: usize, beta: Rational) -> Result<Graph, InstanceError> {
    if ell == 0 || ell > 20 {
        return Err(invalid(format!(
            "hypercube dimension must be in 1..=20, got {ell}"
        )));
    }
    let dist = beta * Rational::from_count(ell);
    if !dist.is_integer() || *dist.numer() < 1 || *dist.numer() as usize > ell {
        return Err(invalid(format!(
            "βℓ = {} must be an integer in 1..=ℓ",
            format_rational(&dist)
        )));
    }
    let k = *dist.numer() as u32;
    let n = 1usize << ell;
    let edges = (0..n).flat_map(|x| {
        (x + 1..n)
            .filter(move |&y| (x ^ y).count_ones() == k)
            .map(move |y| (x, y))
    });
    Ok(Graph::from_edges(n, edges)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeletionStrategy {
    Random,
    RoundRobin,
    ConfusablePush,
}

impl std::str::FromStr for DeletionStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(DeletionStrategy::Random),
            "round-robin" | "round_robin" => Ok(DeletionStrategy::RoundRobin),
            "confusable-push" | "confusable_push" => Ok(DeletionStrategy::ConfusablePush),
            other => Err(format!("unknown deletion strategy `{other}`")),
        }
    }
}

/// `H` together with how it was made.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInstance {
    pub h: Graph,
    pub g: Graph,
    pub deleted: EdgeSet,
    /// `labels[v] = (color, g)`: the position of `v` in `K₃ × G`.
    pub labels: Vec<(ColorClass, usize)>,
    pub epsilon_budget: Rational,
    pub seed: u64,
}

/// `⌊ε · deg⌋`.
pub fn deletion_budget(epsilon: Rational, degree: usize) -> usize {
    (epsilon * Rational::from_count(degree)).floor_count()
}

fn check_epsilon(epsilon: Rational) -> Result<(), InstanceError> {
    if epsilon < Rational::zero() || epsilon >= Rational::one() {
        return Err(invalid(format!(
            "ε must lie in [0, 1), got {}",
            format_rational(&epsilon)
        )));
    }
    Ok(())
}

/// Builds `K₃ × G` minus deletions chosen by `strategy`.
pub fn make_instance(
    g: &Graph,
    epsilon: Rational,
    strategy: DeletionStrategy,
    seed: u64,
) -> Result<LabeledInstance, InstanceError> {
    check_epsilon(epsilon)?;
    let p = tensor_product(&Graph::complete(3), g);
    let budgets: Vec<usize> = (0..p.n())
        .map(|v| deletion_budget(epsilon, p.degree(v)))
        .collect();
    let mut rng = Rng::new(seed);
    let deleted = if budgets.iter().all(|&b| b == 0) {
        EdgeSet::new()
    } else {
        match strategy {
            DeletionStrategy::Random => random_deletions(&p, epsilon, &budgets, &mut rng),
            DeletionStrategy::RoundRobin => round_robin_deletions(&p, &budgets, &mut rng),
            DeletionStrategy::ConfusablePush => confusable_push_deletions(&p, g, &budgets),
        }
    };
    let inst = LabeledInstance::from_parts(g.clone(), deleted, epsilon, seed)?;
    Ok(inst)
}

fn random_deletions(p: &Graph, epsilon: Rational, budgets: &[usize], rng: &mut Rng) -> EdgeSet {
    let (num, den) = (*epsilon.numer() as u64, *epsilon.denom() as u64);
    let edges: Vec<(usize, usize)> = p.edges().collect();
    let mut is_deleted = vec![false; edges.len()];
    let mut history: Vec<Vec<usize>> = vec![Vec::new(); p.n()];
    let mut count = vec![0usize; p.n()];
    for (i, &(u, v)) in edges.iter().enumerate() {
        if rng.bernoulli(num, den) {
            is_deleted[i] = true;
            history[u].push(i);
            history[v].push(i);
            count[u] += 1;
            count[v] += 1;
        }
    }
    // Restoring edges only lowers counts, so one ascending pass reaches
    // the fixed point.
    for v in 0..p.n() {
        while count[v] > budgets[v] {
            let i = history[v].pop().expect("count exceeds history");
            if !is_deleted[i] {
                continue;
            }
            is_deleted[i] = false;
            let (a, b) = edges[i];
            count[a] -= 1;
            count[b] -= 1;
        }
    }
    edges
        .iter()
        .zip(&is_deleted)
        .filter(|(_, &d)| d)
        .map(|(&e, _)| e)
        .collect()
}

fn round_robin_deletions(p: &Graph, budgets: &[usize], rng: &mut Rng) -> EdgeSet {
    let mut remaining: Vec<usize> = budgets.to_vec();
    let mut removed: Vec<Vec<usize>> = vec![Vec::new(); p.n()];
    let mut out = Vec::new();
    loop {
        let mut progress = false;
        for v in 0..p.n() {
            if remaining[v] == 0 {
                continue;
            }
            let eligible: Vec<usize> = p
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&w| remaining[w] > 0 && !removed[v].contains(&w))
                .collect();
            if eligible.is_empty() {
                continue;
            }
            let w = eligible[rng.index(eligible.len())];
            removed[v].push(w);
            removed[w].push(v);
            remaining[v] -= 1;
            remaining[w] -= 1;
            out.push((v, w));
            progress = true;
        }
        if !progress {
            break;
        }
    }
    out.into_iter().collect()
}

/// Greedy adversary: for `G`-pairs with the largest common neighborhoods,
/// removes edges that make same-color copies look alike.
fn confusable_push_deletions(p: &Graph, g: &Graph, budgets: &[usize]) -> EdgeSet {
    let ng = g.n();
    let mut pairs: Vec<(usize, usize, usize)> = (0..ng)
        .flat_map(|a| (a + 1..ng).map(move |b| (a, b)))
        .map(|(a, b)| (g.intersection_size(a, b), a, b))
        .filter(|&(i, _, _)| i > 0)
        .collect();
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut remaining = budgets.to_vec();
    let mut taken: HashSet<(usize, usize)> = HashSet::new();
    for &(_, g1, g2) in &pairs {
        for color in 0..3 {
            for (from, other) in [(g1, g2), (g2, g1)] {
                let x = color * ng + from;
                for &h in g.neighbors(from) {
                    if g.has_edge(other, h) {
                        continue;
                    }
                    for c2 in (0..3).filter(|&c| c != color) {
                        let y = c2 * ng + h;
                        if remaining[x] == 0 {
                            break;
                        }
                        let key = (x.min(y), x.max(y));
                        if remaining[y] == 0 || taken.contains(&key) {
                            continue;
                        }
                        debug_assert!(p.has_edge(x, y));
                        remaining[x] -= 1;
                        remaining[y] -= 1;
                        taken.insert(key);
                    }
                }
            }
        }
    }
    taken.into_iter().collect()
}

impl LabeledInstance {
    /// Assembles an instance from `G` and a deletion set, checking budgets.
    pub fn from_parts(
        g: Graph,
        deleted: EdgeSet,
        epsilon: Rational,
        seed: u64,
    ) -> Result<Self, InstanceError> {
        check_epsilon(epsilon)?;
        let p = tensor_product(&Graph::complete(3), &g);
        let h = p.edge_set().difference(&deleted).to_graph(p.n())?;
        let ng = g.n();
        let labels = (0..p.n())
            .map(|v| (ColorClass::ALL[v / ng], v % ng))
            .collect();
        let inst = LabeledInstance {
            h,
            g,
            deleted,
            labels,
            epsilon_budget: epsilon,
            seed,
        };
        inst.verify()?;
        Ok(inst)
    }

    /// The undamaged product, in `H`'s vertex ids.
    pub fn product_graph(&self) -> Graph {
        let slot = self.slots();
        let mut edges = Vec::with_capacity(6 * self.g.m());
        for (g1, g2) in self.g.edges() {
            for c1 in 0..3 {
                for c2 in (0..3).filter(|&c| c != c1) {
                    edges.push((slot[g1][c1], slot[g2][c2]));
                }
            }
        }
        Graph::from_edges(self.h.n(), edges).expect("labels index valid vertices")
    }

    pub fn color_of(&self, v: usize) -> ColorClass {
        self.labels[v].0
    }

    pub fn g_of(&self, v: usize) -> usize {
        self.labels[v].1
    }

    /// `slots()[g][color]` is the `H`-vertex labeled `(color, g)`.
    pub fn slots(&self) -> Vec<[usize; 3]> {
        let mut out = vec![[usize::MAX; 3]; self.g.n()];
        for (v, &(c, g)) in self.labels.iter().enumerate() {
            out[g][c.index()] = v;
        }
        out
    }

    /// Number of deleted edges at each vertex.
    pub fn deleted_degrees(&self) -> Vec<usize> {
        self.deleted.degrees(self.h.n())
    }

    /// Checks the label bijection, `E(H) = E(P) \ deleted`, and the
    /// per-vertex budget.
    pub fn verify(&self) -> Result<(), InstanceError> {
        let n = self.h.n();
        let ng = self.g.n();
        if n != 3 * ng || self.labels.len() != n {
            return Err(InstanceError::Inconsistent(format!(
                "H has {n} vertices, G has {ng}, {} labels",
                self.labels.len()
            )));
        }
        let mut seen = vec![false; n];
        for &(c, g) in &self.labels {
            if g >= ng {
                return Err(InstanceError::Inconsistent(format!(
                    "label g = {g} out of range"
                )));
            }
            let slot = c.index() * ng + g;
            if seen[slot] {
                return Err(InstanceError::Inconsistent(
                    "labels are not a bijection".into(),
                ));
            }
            seen[slot] = true;
        }
        let p = self.product_graph();
        let p_edges = p.edge_set();
        if !self.deleted.difference(&p_edges).is_empty() {
            return Err(InstanceError::Inconsistent(
                "deleted edge not in K₃ × G".into(),
            ));
        }
        if p_edges.difference(&self.deleted) != self.h.edge_set() {
            return Err(InstanceError::Inconsistent("E(H) ≠ E(P) \\ deleted".into()));
        }
        for (v, &d) in self.deleted_degrees().iter().enumerate() {
            let budget = deletion_budget(self.epsilon_budget, p.degree(v));
            if d > budget {
                return Err(InstanceError::BudgetViolated {
                    vertex: v,
                    deleted: d,
                    budget,
                });
            }
        }
        Ok(())
    }

    /// Removes further edges of `H`, keeping the instance's budget.
    pub fn delete_edges(&self, extra: &EdgeSet) -> Result<Self, InstanceError> {
        for (u, v) in extra.iter() {
            if !self.h.has_edge(u, v) {
                return Err(invalid(format!("({u}, {v}) is not an edge of H")));
            }
        }
        let mut out = self.clone();
        out.deleted = self.deleted.union(extra);
        out.h = self.h.edge_set().difference(extra).to_graph(self.h.n())?;
        out.verify()?;
        Ok(out)
    }

    /// Renames vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, InstanceError> {
        let n = self.h.n();
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(invalid("relabeling is not a permutation"));
        }
        let mut labels = self.labels.clone();
        for (v, &l) in self.labels.iter().enumerate() {
            labels[perm[v]] = l;
        }
        Ok(LabeledInstance {
            h: self.h.relabel(perm),
            g: self.g.clone(),
            deleted: self
                .deleted
                .iter()
                .map(|(u, v)| (perm[u], perm[v]))
                .collect(),
            labels,
            epsilon_budget: self.epsilon_budget,
            seed: self.seed,
        })
    }

    /// Uniformly random relabeling of `H`'s vertex ids.
    pub fn relabel_shuffle(&self, seed: u64) -> Self {
        let perm = Rng::new(seed).permutation(self.h.n());
        self.relabel(&perm).expect("a shuffle is a permutation")
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n_g: self.g.n(),
            epsilon: self.epsilon_budget,
            seed: self.seed,
            h_edges: self.h.edges().map(|(u, v)| [u, v]).collect(),
            ground_truth: Some(GroundTruth {
                g_edges: self.g.edges().map(|(u, v)| [u, v]).collect(),
                labels: self.labels.iter().map(|&(c, g)| [c.index(), g]).collect(),
                deleted_edges: self.deleted.iter().map(|(u, v)| [u, v]).collect(),
            }),
        }
    }
}

/// On-disk instance. `ground_truth` is dropped for blind runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n_g: usize,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    pub seed: u64,
    pub h_edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub g_edges: Vec<[usize; 2]>,
    pub labels: Vec<[usize; 2]>,
    pub deleted_edges: Vec<[usize; 2]>,
}

impl InstanceFile {
    pub fn h_graph(&self) -> Result<Graph, InstanceError> {
        Ok(Graph::from_edges(
            3 * self.n_g,
            self.h_edges.iter().map(|e| (e[0], e[1])),
        )?)
    }

    pub fn blind(&self) -> InstanceFile {
        InstanceFile {
            ground_truth: None,
            ..self.clone()
        }
    }

    /// Rebuilds the labeled instance; needs the ground truth.
    pub fn to_instance(&self) -> Result<LabeledInstance, InstanceError> {
        let gt = self
            .ground_truth
            .as_ref()
            .ok_or_else(|| invalid("instance file has no ground truth"))?;
        let g = Graph::from_edges(self.n_g, gt.g_edges.iter().map(|e| (e[0], e[1])))?;
        let labels = gt
            .labels
            .iter()
            .map(|l| {
                ColorClass::from_index(l[0])
                    .map(|c| (c, l[1]))
                    .ok_or_else(|| invalid(format!("bad color index {}", l[0])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let deleted = EdgeSet::from_pairs(gt.deleted_edges.iter().map(|e| (e[0], e[1])))?;
        let inst = LabeledInstance {
            h: self.h_graph()?,
            g,
            deleted,
            labels,
            epsilon_budget: self.epsilon,
            seed: self.seed,
        };
        inst.verify()?;
        Ok(inst)
    }
}
