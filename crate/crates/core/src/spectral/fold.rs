//! Folding a BMC coefficient table onto the half plane `n2 >= 0`.

use ndarray::Array2;
use num_complex::Complex64;

use super::{CoefficientTable, SpectralIndex};
use crate::error::{DfsError, Result};

/// Relative BMC asymmetry accepted by [`fold_coefficients`].
pub const FOLD_TOLERANCE: f64 = 1e-8;

/// Coefficients for `n1 in [-N1/2, N1/2)`, `n2 in [0, N2/2]`.
///
/// The row `n2 = N2/2` holds the Nyquist coefficient, which the full
/// table stores at `n2 = -N2/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedTable {
    values: Array2<Complex64>,
}

impl FoldedTable {
    pub fn n1_len(&self) -> usize {
        self.values.ncols()
    }

    pub fn n2_max(&self) -> i64 {
        self.values.nrows() as i64 - 1
    }

    pub fn get(&self, n1: i64, n2: i64) -> Option<Complex64> {
        let h1 = self.n1_len() as i64 / 2;
        ((-h1..h1).contains(&n1) && (0..=self.n2_max()).contains(&n2))
            .then(|| self.values[[n2 as usize, (n1 + h1) as usize]])
    }

    /// Nonzero entries with `n2 > 0`.
    pub fn nonzero_upper(&self) -> Vec<(SpectralIndex, Complex64)> {
        let h1 = self.n1_len() as i64 / 2;
        self.values
            .indexed_iter()
            .filter(|((r, _), v)| *r > 0 && v.norm() != 0.0)
            .map(|((r, c), v)| (SpectralIndex::new(c as i64 - h1, r as i64), *v))
            .collect()
    }

    /// The full table with `c_{M(n)} = (-1)^{n1} c_n`.
    pub fn unfold(&self) -> CoefficientTable {
        let n1_len = self.n1_len();
        let h2 = self.n2_max();
        let n2_len = 2 * h2 as usize;
        let h1 = n1_len as i64 / 2;
        let values = Array2::from_shape_fn((n2_len, n1_len), |(r, c)| {
            let n1 = c as i64 - h1;
            let n2 = r as i64 - h2;
            let folded = self.values[[n2.unsigned_abs() as usize, c]];
            if n2 < 0 && n2 != -h2 {
                folded * SpectralIndex::new(n1, n2).glide_sign()
            } else {
                folded
            }
        });
        CoefficientTable::from_values(values, crate::spectral::Normalization::TorusMean)
            .expect("even extents")
    }
}

/// Average `c_n` and `(-1)^{n1} c_{M(n)}` and keep the `n2 >= 0` half.
///
/// Fails if the table is further than [`FOLD_TOLERANCE`] (relative) from
/// BMC symmetry, which signals a source grid without glide symmetry.
pub fn fold_coefficients(c: &CoefficientTable) -> Result<FoldedTable> {
    let asym = c.bmc_asymmetry();
    if asym > FOLD_TOLERANCE {
        return Err(DfsError::SymmetryViolation { max_rel: asym });
    }
    let n1_len = c.n1_len();
    let h2 = c.n2_len() as i64 / 2;
    let h1 = n1_len as i64 / 2;
    let values = Array2::from_shape_fn((h2 as usize + 1, n1_len), |(r, col)| {
        let n1 = col as i64 - h1;
        let n2 = r as i64;
        let sign = SpectralIndex::new(n1, n2).glide_sign();
        let a = c.get_wrapped(n1, n2);
        let b = c.get_wrapped(n1, -n2);
        (a + b * sign) * 0.5
    });
    Ok(FoldedTable { values })
}
