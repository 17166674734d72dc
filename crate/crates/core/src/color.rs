//! The three color classes of `K₃` and proper 3-colorings.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ColorClass {
    A,
    B,
    C,
}

impl ColorClass {
    pub const ALL: [ColorClass; 3] = [ColorClass::A, ColorClass::B, ColorClass::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<ColorClass> {
        ColorClass::ALL.get(i).copied()
    }

    pub fn letter(self) -> char {
        ['a', 'b', 'c'][self.index()]
    }

    /// Applies a permutation of `{0, 1, 2}` to the class index.
    pub fn permute(self, perm: &[u8; 3]) -> ColorClass {
        ColorClass::ALL[perm[self.index()] as usize]
    }
}

/// The six permutations of `{0, 1, 2}` in lexicographic order.
pub const PERMUTATIONS_3: [[u8; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// One color per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring3 {
    pub colors: Vec<ColorClass>,
}

impl Coloring3 {
    pub fn new(colors: Vec<ColorClass>) -> Self {
        Coloring3 { colors }
    }

    pub fn from_indices(indices: &[u8]) -> Option<Self> {
        indices
            .iter()
            .map(|&i| ColorClass::from_index(i as usize))
            .collect::<Option<Vec<_>>>()
            .map(Coloring3::new)
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn get(&self, v: usize) -> ColorClass {
        self.colors[v]
    }

    pub fn indices(&self) -> Vec<u8> {
        self.colors.iter().map(|c| c.index() as u8).collect()
    }

    /// Edges of `h` whose endpoints share a color.
    pub fn monochromatic_edges(&self, h: &Graph) -> Vec<(usize, usize)> {
        h.edges()
            .filter(|&(u, v)| self.colors[u] == self.colors[v])
            .collect()
    }

    /// Covers every vertex of `h` and leaves no monochromatic edge.
    pub fn is_proper(&self, h: &Graph) -> bool {
        self.colors.len() == h.n() && h.edges().all(|(u, v)| self.colors[u] != self.colors[v])
    }
}
