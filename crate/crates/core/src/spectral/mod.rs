//! Fourier coefficients of torus grids, truncation sets, partial sums on
//! the torus and the folded DFS expansion on the sphere.

mod basis;
mod fold;
mod set;
mod sums;
mod table;

pub use basis::{basis_b, basis_e, gram_matrix, weighted_inner_product, BasisFunction};
pub use fold::{fold_coefficients, FoldedTable, FOLD_TOLERANCE};
pub use set::{Domain, Norm, Shape, SpectralSet};
pub use sums::{dfs_fourier_sum, dfs_fourier_sum_latlon, partial_sum_torus, partial_sum_torus_grid};
pub use table::{
    compute_coefficients, read_table, table_io_read, table_io_write, write_table,
    CoefficientTable, Normalization, TABLE_MAGIC, TABLE_VERSION,
};

/// A spectral index `n = (n1, n2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectralIndex {
    pub n1: i64,
    pub n2: i64,
}

impl SpectralIndex {
    pub const fn new(n1: i64, n2: i64) -> Self {
        Self { n1, n2 }
    }

    /// `M(n1, n2) = (n1, -n2)`
    pub const fn reflect(self) -> Self {
        Self::new(self.n1, -self.n2)
    }

    /// `(-1)^{n1}`
    pub const fn glide_sign(self) -> f64 {
        if self.n1 % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn l1(self) -> i64 {
        self.n1.abs() + self.n2.abs()
    }
}

impl From<(i64, i64)> for SpectralIndex {
    fn from((n1, n2): (i64, i64)) -> Self {
        Self::new(n1, n2)
    }
}
