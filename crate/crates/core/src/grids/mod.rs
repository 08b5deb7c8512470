//! Equispaced torus grids, latitude-longitude sampling and the four-block
//! doubling that turns a latitude-longitude grid into a BMC-1 torus grid.
//!
//! Conventions: grid points sit at cell corners. A torus grid of size
//! `n_theta x n_lambda` stores the sample at
//! `(lambda_k, theta_j) = (-pi + 2 pi k / n_lambda, -pi + 2 pi j / n_theta)`
//! at row `j`, column `k`. With both counts even, the glide reflection
//! maps `(j, k)` to `((n_theta - j) mod n_theta, (k + n_lambda / 2) mod n_lambda)`.

mod io;

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DfsError, Result};
use crate::function::SphericalFunction;
use crate::geometry::{dfs_coord, SpherePoint, TorusPoint};

pub use io::{grid_io_read, grid_io_write, read_grid, write_grid, GRID_MAGIC, GRID_VERSION};

pub(crate) fn require_even(what: &'static str, value: usize) -> Result<()> {
    if value == 0 || value % 2 != 0 {
        return Err(DfsError::OddDimension { what, value });
    }
    Ok(())
}

pub fn torus_lambda(k: usize, n_lambda: usize) -> f64 {
    -PI + 2.0 * PI * k as f64 / n_lambda as f64
}

pub fn torus_theta(j: usize, n_theta: usize) -> f64 {
    -PI + 2.0 * PI * j as f64 / n_theta as f64
}

/// Largest deviations from the two BMC-1 properties of a torus sample matrix.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BmcDeviation {
    /// `max |g(j, k) - g(glide(j, k))|`
    pub glide: f64,
    /// `max |g(j, k) - g(j, 0)|` over the rows `theta = 0` and `theta = -pi`.
    pub pole_rows: f64,
}

impl BmcDeviation {
    pub fn is_exact(&self) -> bool {
        self.glide == 0.0 && self.pole_rows == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    values: Array2<Complex64>,
    bmc: bool,
}

impl TorusGrid {
    /// Wrap a sample matrix (`n_theta` rows, `n_lambda` columns).
    ///
    /// With `bmc = true` the BMC-1 invariants are verified exactly.
    pub fn new(values: Array2<Complex64>, bmc: bool) -> Result<Self> {
        let (n_theta, n_lambda) = values.dim();
        require_even("n_lambda", n_lambda)?;
        require_even("n_theta", n_theta)?;
        let grid = Self { values, bmc: false };
        if bmc {
            let dev = grid.bmc_deviation();
            if !dev.is_exact() {
                return Err(DfsError::InvalidArgument(format!(
                    "grid flagged BMC but glide deviation is {:e} and pole-row deviation {:e}",
                    dev.glide, dev.pole_rows
                )));
            }
        }
        Ok(Self { bmc, ..grid })
    }

    pub fn n_lambda(&self) -> usize {
        self.values.ncols()
    }

    pub fn n_theta(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_bmc(&self) -> bool {
        self.bmc
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.values[[j, k]]
    }

    pub fn point(&self, j: usize, k: usize) -> TorusPoint {
        TorusPoint::raw(torus_lambda(k, self.n_lambda()), torus_theta(j, self.n_theta()))
    }

    /// Grid index of the glide reflection of `(j, k)`.
    pub fn glide_index(&self, j: usize, k: usize) -> (usize, usize) {
        let (nt, nl) = self.values.dim();
        ((nt - j) % nt, (k + nl / 2) % nl)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn bmc_deviation(&self) -> BmcDeviation {
        let (nt, nl) = self.values.dim();
        let mut glide = 0.0f64;
        for j in 0..nt {
            for k in 0..nl {
                let (gj, gk) = self.glide_index(j, k);
                glide = glide.max((self.values[[j, k]] - self.values[[gj, gk]]).norm());
            }
        }
        let mut pole_rows = 0.0f64;
        for j in [0, nt / 2] {
            let first = self.values[[j, 0]];
            for k in 0..nl {
                pole_rows = pole_rows.max((self.values[[j, k]] - first).norm());
            }
        }
        BmcDeviation { glide, pole_rows }
    }
}

/// Samples of `f o phi` on `[-pi, pi) x [0, pi]`: `n_theta_half + 1` rows
/// at `theta_j = pi j / n_theta_half`, `n_lambda` columns at
/// `lambda_k = -pi + 2 pi k / n_lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatLonGrid {
    values: Array2<Complex64>,
}

impl LatLonGrid {
    pub fn new(values: Array2<Complex64>) -> Result<Self> {
        let (rows, n_lambda) = values.dim();
        if rows < 2 || n_lambda == 0 {
            return Err(DfsError::Dimension(format!(
                "lat-lon grid needs at least 2 rows and 1 column, got {rows}x{n_lambda}"
            )));
        }
        Ok(Self { values })
    }

    pub fn n_lambda(&self) -> usize {
        self.values.ncols()
    }

    pub fn n_theta_half(&self) -> usize {
        self.values.nrows() - 1
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn lambda(&self, k: usize) -> f64 {
        torus_lambda(k, self.n_lambda())
    }

    pub fn theta(&self, j: usize) -> f64 {
        PI * j as f64 / self.n_theta_half() as f64
    }

    /// The sphere point represented by grid index `(j, k)`; pole rows map to the exact poles.
    pub fn sphere_point(&self, j: usize, k: usize) -> SpherePoint {
        latlon_point(j, k, self.n_lambda(), self.n_theta_half())
    }

    /// Largest spread within the two pole rows.
    pub fn pole_row_spread(&self) -> f64 {
        let last = self.n_theta_half();
        [0, last]
            .iter()
            .map(|&j| {
                let first = self.values[[j, 0]];
                self.values
                    .row(j)
                    .iter()
                    .map(|v| (v - first).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &LatLonGrid) -> Result<f64> {
        if self.values.dim() != other.values.dim() {
            return Err(DfsError::Dimension(format!(
                "{:?} vs {:?}",
                self.values.dim(),
                other.values.dim()
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

pub(crate) fn latlon_point(j: usize, k: usize, n_lambda: usize, n_theta_half: usize) -> SpherePoint {
    if j == 0 {
        SpherePoint::NORTH_POLE
    } else if j == n_theta_half {
        SpherePoint::SOUTH_POLE
    } else {
        dfs_coord(TorusPoint::raw(
            torus_lambda(k, n_lambda),
            PI * j as f64 / n_theta_half as f64,
        ))
    }
}

fn checked(xi: SpherePoint, v: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(DfsError::NonFinite { x: xi.x, y: xi.y, z: xi.z })
    }
}

/// Evaluate `f` on the latitude-longitude grid. Each pole is evaluated
/// once and broadcast along its row.
pub fn sample_sphere<F>(f: &F, n_lambda: usize, n_theta_half: usize) -> Result<LatLonGrid>
where
    F: SphericalFunction + ?Sized,
{
    require_even("n_lambda", n_lambda)?;
    if n_theta_half == 0 {
        return Err(DfsError::InvalidArgument("n_theta_half must be at least 1".into()));
    }
    let north = checked(SpherePoint::NORTH_POLE, f.eval(SpherePoint::NORTH_POLE))?;
    let south = checked(SpherePoint::SOUTH_POLE, f.eval(SpherePoint::SOUTH_POLE))?;
    let rows: Vec<Vec<Complex64>> = (0..=n_theta_half)
        .into_par_iter()
        .map(|j| {
            if j == 0 {
                Ok(vec![north; n_lambda])
            } else if j == n_theta_half {
                Ok(vec![south; n_lambda])
            } else {
                (0..n_lambda)
                    .map(|k| {
                        let xi = latlon_point(j, k, n_lambda, n_theta_half);
                        checked(xi, f.eval(xi))
                    })
                    .collect()
            }
        })
        .collect::<Result<_>>()?;
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    LatLonGrid::new(Array2::from_shape_vec((n_theta_half + 1, n_lambda), flat).expect("shape"))
}

/// Evaluate `f o phi` directly at every point of an `n_theta x n_lambda` torus grid.
///
/// The result is not flagged BMC: direct evaluation is only BMC up to rounding.
pub fn sample_torus<F>(f: &F, n_lambda: usize, n_theta: usize) -> Result<TorusGrid>
where
    F: SphericalFunction + ?Sized,
{
    require_even("n_lambda", n_lambda)?;
    require_even("n_theta", n_theta)?;
    let rows: Vec<Vec<Complex64>> = (0..n_theta)
        .into_par_iter()
        .map(|j| {
            (0..n_lambda)
                .map(|k| {
                    let xi = dfs_coord(TorusPoint::raw(
                        torus_lambda(k, n_lambda),
                        torus_theta(j, n_theta),
                    ));
                    checked(xi, f.eval(xi))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    TorusGrid::new(Array2::from_shape_vec((n_theta, n_lambda), flat).expect("shape"), false)
}

/// Four-block doubling: the `theta in [0, pi]` half is copied from `g`,
/// the `theta in (-pi, 0)` half is filled by the glide reflection.
pub fn dfs_double(g: &LatLonGrid) -> Result<TorusGrid> {
    let n_lambda = g.n_lambda();
    require_even("n_lambda", n_lambda)?;
    let half = g.n_theta_half();
    let n_theta = 2 * half;
    let src = g.values();
    let values = Array2::from_shape_fn((n_theta, n_lambda), |(j, k)| {
        if j == 0 {
            // theta = -pi is the south pole row
            src[[half, k]]
        } else if j >= half {
            src[[j - half, k]]
        } else {
            src[[half - j, (k + n_lambda / 2) % n_lambda]]
        }
    });
    TorusGrid::new(values, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfns::presets;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z(xi: SpherePoint) -> Complex64 {
        Complex64::new(xi.z, 0.0)
    }

    #[test]
    fn constant_sampling() {
        let g = sample_sphere(&|_: SpherePoint| Complex64::new(1.0, 0.0), 8, 4).unwrap();
        assert!(g.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        let t = dfs_double(&g).unwrap();
        assert!(t.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        assert_eq!((t.n_theta(), t.n_lambda()), (8, 8));
    }

    #[test]
    fn coordinate_z_columns() {
        let g = sample_sphere(&z, 8, 4).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [1.0, s, 0.0, -s, -1.0];
        for k in 0..8 {
            for (j, e) in expect.iter().enumerate() {
                assert!((g.values()[[j, k]].re - e).abs() < 1e-15);
            }
        }
        let t = dfs_double(&g).unwrap();
        for j in 0..t.n_theta() {
            let th = torus_theta(j, t.n_theta());
            for k in 0..t.n_lambda() {
                assert!((t.get(j, k).re - th.cos()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn odd_sizes_rejected() {
        assert!(matches!(
            sample_sphere(&z, 7, 4),
            Err(DfsError::OddDimension { what: "n_lambda", value: 7 })
        ));
        let odd = LatLonGrid::new(Array2::zeros((5, 7))).unwrap();
        assert!(dfs_double(&odd).is_err());
        assert!(TorusGrid::new(Array2::zeros((5, 8)), false).is_err());
    }

    #[test]
    fn nonfinite_values_propagate() {
        let bad = |xi: SpherePoint| Complex64::new(if xi.z > 0.5 { f64::NAN } else { 0.0 }, 0.0);
        assert!(matches!(sample_sphere(&bad, 4, 2), Err(DfsError::NonFinite { .. })));
    }

    #[test]
    fn doubling_is_exactly_bmc_and_agrees_with_direct_sampling() {
        let f = presets::f3_combo();
        let g = sample_sphere(&f, 64, 32).unwrap();
        let t = dfs_double(&g).unwrap();
        assert!(t.is_bmc());
        assert!(t.bmc_deviation().is_exact());
        assert_eq!(g.pole_row_spread(), 0.0);
        let direct = sample_torus(&f, 64, 64).unwrap();
        let diff = t
            .values()
            .iter()
            .zip(direct.values().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-12, "{diff}");
    }

    #[test]
    fn f3_samples_match_direct_formula() {
        let f = presets::f3_combo();
        let g = sample_sphere(&f, 128, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let j = rng.gen_range(0..=64);
            let k = rng.gen_range(0..128);
            let xi = g.sphere_point(j, k);
            assert_eq!(g.values()[[j, k]], f.eval(xi));
        }
    }

    #[test]
    fn flagged_grid_must_be_bmc() {
        let mut v = Array2::zeros((4, 4));
        v[[1, 1]] = Complex64::new(1.0, 0.0);
        assert!(TorusGrid::new(v.clone(), true).is_err());
        assert!(TorusGrid::new(v, false).is_ok());
    }
}
