//! Exact kernel for twisted derivations, twisted Hochschild cohomology and
//! connections on Σ-modules over `K[x]` and `M_N(K)`, with `K = Q` or `Q(q)`.

pub mod acceptance;
pub mod algebra;
pub mod arith;
pub mod deriv;
pub mod geometry;
pub mod hochschild;
pub mod linalg;
pub mod sweep;

/// Verification and search limits shared by the checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Highest monomial degree in polynomial verification sets.
    pub degree_bound: usize,
    /// Number of random candidates tried by searches.
    pub search_bound: usize,
    pub seed: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            degree_bound: 8,
            search_bound: 32,
            seed: 0,
        }
    }
}

/// Dimension over the ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Finite(usize),
    Infinite,
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dimension::Finite(d) => write!(f, "{d}"),
            Dimension::Infinite => f.write_str("infinite"),
        }
    }
}
