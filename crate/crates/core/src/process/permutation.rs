use serde::{Deserialize, Serialize};

/// Vertices of the unit square, `u¹ = (1,1)`, `u² = (1,−1)`, `u³ = (−1,−1)`,
/// `u⁴ = (−1,1)`. Index `j` below is zero-based.
pub const UNIT_SQUARE: [[i32; 2]; 4] = [[1, 1], [1, -1], [-1, -1], [-1, 1]];

/// One of the two circular permutations of the square's vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Permutation {
    /// `u¹ → u² → u³ → u⁴ → u¹`.
    SPlus,
    /// The inverse cycle.
    SMinus,
}

impl Permutation {
    pub const ALL: [Permutation; 2] = [Permutation::SPlus, Permutation::SMinus];

    pub fn inverse(self) -> Self {
        match self {
            Permutation::SPlus => Permutation::SMinus,
            Permutation::SMinus => Permutation::SPlus,
        }
    }

    /// Index of `sⁿ u^j`.
    pub fn image_index(self, n: u64, j: usize) -> usize {
        let r = (n % 4) as usize;
        match self {
            Permutation::SPlus => (j + r) % 4,
            Permutation::SMinus => (j + 4 - r) % 4,
        }
    }

    /// `sⁿ u^j`.
    pub fn image(self, n: u64, j: usize) -> [i32; 2] {
        UNIT_SQUARE[self.image_index(n, j)]
    }

    pub fn label(self) -> &'static str {
        match self {
            Permutation::SPlus => "s_plus",
            Permutation::SMinus => "s_minus",
        }
    }
}

/// `sⁿ u^j − u^j`; components are in `{−2, 0, 2}`.
pub fn vertex_offset(n: u64, j: usize, perm: Permutation) -> [i32; 2] {
    let a = perm.image(n, j);
    let u = UNIT_SQUARE[j];
    [a[0] - u[0], a[1] - u[1]]
}
