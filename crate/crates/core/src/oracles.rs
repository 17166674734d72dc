//! Brute-force references used to cross-check the fast paths.

use thiserror::Error;

use crate::color::Coloring3;
use crate::graph::Graph;
use crate::matching::WeightedBipartite;
use crate::scalar::Scalar;

/// Default vertex cap for the backtracking 3-coloring solver.
pub const DEFAULT_COLORING_CAP: usize = 150;
/// Vertex cap for plain `3ⁿ` enumeration.
pub const EXHAUSTIVE_COLORING_CAP: usize = 14;
/// Side cap for enumerating all matchings.
pub const BOTTLENECK_ORACLE_CAP: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle limited to {cap}, input has size {size}")]
    SizeCap { size: usize, cap: usize },
    #[error("weight table is not square ({left} × {right})")]
    NotSquare { left: usize, right: usize },
}

const ALL: u8 = 0b111;

struct Solver<'a> {
    g: &'a Graph,
    domain: Vec<u8>,
    color: Vec<Option<u8>>,
    /// `(vertex, previous domain, entry made the assignment)`.
    trail: Vec<(usize, u8, bool)>,
}

impl Solver<'_> {
    /// Assigns `v := c` and propagates singleton domains. Returns false on
    /// a wipe-out; changes are recorded on the trail either way.
    fn assign(&mut self, v: usize, c: u8) -> bool {
        let mut queue = vec![(v, c)];
        while let Some((v, c)) = queue.pop() {
            match self.color[v] {
                Some(existing) if existing == c => continue,
                Some(_) => return false,
                None => {}
            }
            if self.domain[v] & (1 << c) == 0 {
                return false;
            }
            self.trail.push((v, self.domain[v], true));
            self.domain[v] = 1 << c;
            self.color[v] = Some(c);
            for &w in self.g.neighbors(v) {
                if self.domain[w] & (1 << c) == 0 {
                    continue;
                }
                if self.color[w].is_some() {
                    return false;
                }
                self.trail.push((w, self.domain[w], false));
                self.domain[w] &= !(1 << c);
                match self.domain[w].count_ones() {
                    0 => return false,
                    1 => queue.push((w, self.domain[w].trailing_zeros() as u8)),
                    _ => {}
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, d, assigned) = self.trail.pop().expect("trail above mark");
            self.domain[v] = d;
            if assigned {
                self.color[v] = None;
            }
        }
    }

    /// Unassigned vertex with fewest remaining colors, then highest
    /// degree, then lowest id.
    fn pick(&self) -> Option<usize> {
        (0..self.g.n())
            .filter(|&v| self.color[v].is_none())
            .min_by_key(|&v| {
                (
                    self.domain[v].count_ones(),
                    std::cmp::Reverse(self.g.degree(v)),
                    v,
                )
            })
    }

    fn search(&mut self, first: bool) -> bool {
        let v = match self.pick() {
            Some(v) => v,
            None => return true,
        };
        let choices: Vec<u8> = if first {
            vec![0]
        } else {
            (0..3).filter(|&c| self.domain[v] & (1 << c) != 0).collect()
        };
        for c in choices {
            let mark = self.trail.len();
            if self.assign(v, c) && self.search(false) {
                return true;
            }
            self.undo(mark);
        }
        false
    }
}

/// Proper 3-coloring by backtracking with propagation, or `None` if there
/// is none. The first branching vertex is fixed to color 0.
pub fn brute_force_3coloring(g: &Graph) -> Result<Option<Coloring3>, OracleError> {
    brute_force_3coloring_capped(g, DEFAULT_COLORING_CAP)
}

pub fn brute_force_3coloring_capped(
    g: &Graph,
    cap: usize,
) -> Result<Option<Coloring3>, OracleError> {
    if g.n() > cap {
        return Err(OracleError::SizeCap { size: g.n(), cap });
    }
    let mut solver = Solver {
        g,
        domain: vec![ALL; g.n()],
        color: vec![None; g.n()],
        trail: Vec::new(),
    };
    if !solver.search(true) {
        return Ok(None);
    }
    let colors: Vec<u8> = solver
        .color
        .iter()
        .map(|c| c.expect("all assigned"))
        .collect();
    let coloring = Coloring3::from_indices(&colors).expect("colors are 0..3");
    debug_assert!(coloring.is_proper(g));
    Ok(Some(coloring))
}

/// Every proper 3-coloring, found by enumerating all `3ⁿ` assignments in
/// base-3 order with vertex 0 most significant.
pub fn all_proper_3colorings(g: &Graph) -> Result<Vec<Vec<u8>>, OracleError> {
    let n = g.n();
    if n > EXHAUSTIVE_COLORING_CAP {
        return Err(OracleError::SizeCap {
            size: n,
            cap: EXHAUSTIVE_COLORING_CAP,
        });
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut out = Vec::new();
    let mut assignment = vec![0u8; n];
    for code in 0..3usize.pow(n as u32) {
        let mut rest = code;
        for v in (0..n).rev() {
            assignment[v] = (rest % 3) as u8;
            rest /= 3;
        }
        if edges.iter().all(|&(u, v)| assignment[u] != assignment[v]) {
            out.push(assignment.clone());
        }
    }
    Ok(out)
}

/// First proper coloring in [`all_proper_3colorings`] order.
pub fn exhaustive_3coloring(g: &Graph) -> Result<Option<Coloring3>, OracleError> {
    Ok(all_proper_3colorings(g)?
        .into_iter()
        .next()
        .map(|c| Coloring3::from_indices(&c).expect("colors are 0..3")))
}

/// Maximum over all perfect matchings of the minimum matched weight.
pub fn brute_force_bottleneck<T: Scalar>(w: &WeightedBipartite<T>) -> Result<T, OracleError> {
    let (k, r) = (w.left(), w.right());
    if k != r {
        return Err(OracleError::NotSquare { left: k, right: r });
    }
    if k > BOTTLENECK_ORACLE_CAP {
        return Err(OracleError::SizeCap {
            size: k,
            cap: BOTTLENECK_ORACLE_CAP,
        });
    }
    fn go<T: Scalar>(
        w: &WeightedBipartite<T>,
        row: usize,
        used: &mut [bool],
        floor: Option<T>,
        best: &mut Option<T>,
    ) {
        if row == used.len() {
            if let Some(f) = floor {
                if best.is_none_or(|b| f > b) {
                    *best = Some(f);
                }
            }
            return;
        }
        for col in 0..used.len() {
            if used[col] {
                continue;
            }
            let x = w.weight(row, col);
            let f = match floor {
                Some(f) if f <= x => f,
                _ => x,
            };
            used[col] = true;
            go(w, row + 1, used, Some(f), best);
            used[col] = false;
        }
    }
    let mut best = None;
    go(w, 0, &mut vec![false; k], None, &mut best);
    Ok(best.unwrap_or_else(T::zero))
}

/// `|(Γ(g₁) ∪ Γ(g₂) ∪ Γ(g₃)) \ (Γ(g₁) ∩ Γ(g₂) ∩ Γ(g₃))|`.
pub fn disjunction(g: &Graph, g1: usize, g2: usize, g3: usize) -> usize {
    let mut union: Vec<usize> = [g1, g2, g3]
        .iter()
        .flat_map(|&x| g.neighbors(x).iter().copied())
        .collect();
    union.sort_unstable();
    union.dedup();
    union.len() - g.triple_intersection_size(g1, g2, g3)
}

/// `|I_G(g₁, g₂)| > (1 − 9ε) · max(deg g₁, deg g₂)`, strictly.
pub fn confusable<T: Scalar>(g: &Graph, g1: usize, g2: usize, epsilon: T) -> bool {
    let dmax = g.degree(g1).max(g.degree(g2));
    T::from_count(g.intersection_size(g1, g2))
        > (T::one() - T::from_count(9) * epsilon) * T::from_count(dmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tensor_product;
    use crate::scalar::Rational;
    use num_traits::Zero;
    use proptest::prelude::*;

    #[test]
    fn small_coloring_cases() {
        assert_eq!(brute_force_3coloring(&Graph::complete(4)).unwrap(), None);
        let c5 = brute_force_3coloring(&Graph::cycle(5)).unwrap().unwrap();
        assert!(c5.is_proper(&Graph::cycle(5)));
        let h = tensor_product(&Graph::complete(3), &Graph::cycle(7));
        assert!(brute_force_3coloring(&h).unwrap().unwrap().is_proper(&h));
        assert!(brute_force_3coloring(&Graph::empty(0)).unwrap().is_some());
        assert!(matches!(
            brute_force_3coloring(&Graph::empty(151)),
            Err(OracleError::SizeCap {
                size: 151,
                cap: 150
            })
        ));
    }

    #[test]
    fn k3_squared_has_twelve_colorings() {
        let k3 = Graph::complete(3);
        assert_eq!(
            all_proper_3colorings(&tensor_product(&k3, &k3))
                .unwrap()
                .len(),
            12
        );
        assert_eq!(all_proper_3colorings(&k3).unwrap().len(), 6);
    }

    #[test]
    fn bottleneck_examples() {
        let w = WeightedBipartite::new(1, 1, vec![Rational::new(3, 7)]).unwrap();
        assert_eq!(brute_force_bottleneck(&w).unwrap(), Rational::new(3, 7));
        let w = WeightedBipartite::new(
            2,
            2,
            vec![
                Rational::new(9, 10),
                Rational::new(2, 10),
                Rational::new(3, 10),
                Rational::new(8, 10),
            ],
        )
        .unwrap();
        assert_eq!(brute_force_bottleneck(&w).unwrap(), Rational::new(4, 5));
    }

    #[test]
    fn disjunction_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(disjunction(&k4, 0, 1, 2), 3);
        assert_eq!(disjunction(&k4, 2, 2, 2), 0);
        let twins = Graph::from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(disjunction(&twins, 0, 1, 1), 0);
    }

    #[test]
    fn confusable_examples() {
        let twins = Graph::from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert!(confusable(&twins, 0, 1, Rational::new(1, 100)));
        assert!(!confusable(&twins, 0, 2, Rational::new(1, 10)));
        assert!(!confusable(&Graph::complete(4), 0, 1, Rational::zero()));
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..(2 * n + 1)).prop_map(move |pairs| {
                Graph::from_edges(n, pairs.into_iter().filter(|(u, v)| u != v)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn backtracking_agrees_with_enumeration(g in arb_graph(10)) {
            let fast = brute_force_3coloring(&g).unwrap();
            let slow = exhaustive_3coloring(&g).unwrap();
            prop_assert_eq!(fast.is_some(), slow.is_some());
            if let Some(c) = fast {
                prop_assert!(c.is_proper(&g));
            }
        }
    }
}
