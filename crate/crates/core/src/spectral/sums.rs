//! Partial Fourier sums on the torus and partial DFS sums on the sphere.
//!
//! Two evaluation paths exist for each: direct summation at arbitrary
//! points, and an inverse FFT onto an equispaced grid.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{CoefficientTable, Domain, SpectralIndex, SpectralSet};
use crate::error::{DfsError, Result};
use crate::fft::{inverse_2d, storage_index};
use crate::geometry::{dfs_coord_inverse, SpherePoint, TorusPoint};
use crate::grids::{require_even, LatLonGrid, TorusGrid};

fn checked_indices(c: &CoefficientTable, omega: &SpectralSet) -> Result<Vec<SpectralIndex>> {
    let idx = omega.indices();
    if let Some(bad) = idx.iter().find(|n| !c.contains(n.n1, n.n2)) {
        return Err(DfsError::OutOfRange(format!(
            "index ({}, {}) outside table range n1 in [{}, {}], n2 in [{}, {}]",
            bad.n1,
            bad.n2,
            c.n1_min(),
            c.n1_max(),
            c.n2_min(),
            c.n2_max()
        )));
    }
    Ok(idx)
}

/// `cis(n * angle)` for `n` in `[-extent, extent]`, stored at `n + extent`.
fn cis_table(angle: f64, extent: i64) -> Vec<Complex64> {
    (-extent..=extent).map(|n| Complex64::cis(n as f64 * angle)).collect()
}

/// Sum of `coeff * exp(i<n, x>)` at each point, by direct summation.
fn direct_sum(terms: &[(SpectralIndex, Complex64)], extent: i64, points: &[TorusPoint]) -> Vec<Complex64> {
    points
        .par_iter()
        .map(|p| {
            let e1 = cis_table(p.lambda, extent);
            let e2 = cis_table(p.theta, extent);
            terms
                .iter()
                .map(|(n, c)| c * e1[(n.n1 + extent) as usize] * e2[(n.n2 + extent) as usize])
                .sum()
        })
        .collect()
}

/// `F_Omega g(x) = sum_{n in Omega} c_n exp(i<n, x>)` at each point.
pub fn partial_sum_torus(
    c: &CoefficientTable,
    omega: &SpectralSet,
    points: &[TorusPoint],
) -> Result<Vec<Complex64>> {
    let terms: Vec<_> = checked_indices(c, omega)?
        .into_iter()
        .map(|n| (n, c.get(n.n1, n.n2).expect("checked")))
        .collect();
    Ok(direct_sum(&terms, omega.extent(), points))
}

/// Inverse FFT of a sparse coefficient list onto an `n_theta x n_lambda` torus grid.
///
/// Frequencies beyond the grid's Nyquist limit are folded into their alias
/// bin, which is exact at the grid points.
fn synthesize(
    terms: impl IntoIterator<Item = (SpectralIndex, Complex64)>,
    n_lambda: usize,
    n_theta: usize,
) -> Array2<Complex64> {
    let mut buf = Array2::<Complex64>::zeros((n_theta, n_lambda));
    for (n, c) in terms {
        // grid starts at -pi
        let sign = if (n.n1 + n.n2) % 2 == 0 { 1.0 } else { -1.0 };
        buf[[storage_index(n.n2, n_theta), storage_index(n.n1, n_lambda)]] += c * sign;
    }
    inverse_2d(&mut buf);
    buf
}

/// [`partial_sum_torus`] at every point of an equispaced torus grid, via inverse FFT.
pub fn partial_sum_torus_grid(
    c: &CoefficientTable,
    omega: &SpectralSet,
    n_lambda: usize,
    n_theta: usize,
) -> Result<TorusGrid> {
    require_even("n_lambda", n_lambda)?;
    require_even("n_theta", n_theta)?;
    let terms = checked_indices(c, omega)?
        .into_iter()
        .map(|n| (n, c.get(n.n1, n.n2).expect("checked")));
    TorusGrid::new(synthesize(terms, n_lambda, n_theta), false)
}

fn half_domain_terms(c: &CoefficientTable, omega: &SpectralSet) -> Result<Vec<(SpectralIndex, Complex64)>> {
    if omega.domain() != Domain::Half {
        return Err(DfsError::InvalidArgument(
            "partial DFS sums need a half-domain set (n2 >= 0)".into(),
        ));
    }
    Ok(checked_indices(c, omega)?
        .into_iter()
        .map(|n| (n, c.get(n.n1, n.n2).expect("checked")))
        .collect())
}

/// Expand `sum_{n in Omega} c_n e_n` into plain exponentials:
/// `c_n exp(i<n,x>) + (-1)^{n1} c_n exp(i<M(n),x>)` for `n2 > 0`.
fn unfold_terms(terms: &[(SpectralIndex, Complex64)]) -> Vec<(SpectralIndex, Complex64)> {
    let mut out = Vec::with_capacity(2 * terms.len());
    for &(n, c) in terms {
        out.push((n, c));
        if n.n2 != 0 {
            out.push((n.reflect(), c * n.glide_sign()));
        }
    }
    out
}

/// `S_Omega f(xi) = sum_{n in Omega} c_n b_n(xi)` for a half-domain `Omega`.
pub fn dfs_fourier_sum(
    c: &CoefficientTable,
    omega: &SpectralSet,
    points: &[SpherePoint],
) -> Result<Vec<Complex64>> {
    let terms = unfold_terms(&half_domain_terms(c, omega)?);
    let torus: Vec<TorusPoint> = points
        .iter()
        .map(|xi| dfs_coord_inverse(*xi))
        .collect::<Result<_>>()?;
    Ok(direct_sum(&terms, omega.extent(), &torus))
}

/// [`dfs_fourier_sum`] on a latitude-longitude grid via one inverse FFT of
/// size `2 n_theta_half x n_lambda`. Pole rows take the value at
/// `phi^-1(pole) = (0, 0)` and `(0, pi)`.
pub fn dfs_fourier_sum_latlon(
    c: &CoefficientTable,
    omega: &SpectralSet,
    n_lambda: usize,
    n_theta_half: usize,
) -> Result<LatLonGrid> {
    require_even("n_lambda", n_lambda)?;
    if n_theta_half == 0 {
        return Err(DfsError::InvalidArgument("n_theta_half must be at least 1".into()));
    }
    let n_theta = 2 * n_theta_half;
    let terms = unfold_terms(&half_domain_terms(c, omega)?);
    let torus = synthesize(terms, n_lambda, n_theta);
    let zero_col = n_lambda / 2; // lambda = 0
    let values = Array2::from_shape_fn((n_theta_half + 1, n_lambda), |(j, k)| {
        // theta_j = pi j / n_theta_half sits at torus row n_theta_half + j (row 0 for theta = pi)
        let row = (n_theta_half + j) % n_theta;
        if j == 0 || j == n_theta_half {
            torus[[row, zero_col]]
        } else {
            torus[[row, k]]
        }
    });
    debug_assert!((crate::grids::torus_lambda(zero_col, n_lambda)).abs() < PI * f64::EPSILON);
    LatLonGrid::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dfs_coord;
    use crate::grids::{dfs_double, sample_sphere, torus_lambda, torus_theta};
    use crate::spectral::{compute_coefficients, Norm};
    use crate::testfns::presets;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z(xi: SpherePoint) -> Complex64 {
        Complex64::new(xi.z, 0.0)
    }

    fn table_of<F: crate::SphericalFunction>(f: &F, n: usize) -> CoefficientTable {
        compute_coefficients(&dfs_double(&sample_sphere(f, n, n / 2).unwrap()).unwrap()).unwrap()
    }

    fn random_torus(rng: &mut ChaCha8Rng, n: usize) -> Vec<TorusPoint> {
        (0..n)
            .map(|_| TorusPoint::new(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)))
            .collect()
    }

    #[test]
    fn single_constant_term() {
        let mut c = CoefficientTable::zeros(4, 4).unwrap();
        c.set(0, 0, Complex64::new(1.0, 0.0)).unwrap();
        let omega = SpectralSet::explicit([SpectralIndex::new(0, 0)], Domain::Full).unwrap();
        let pts = [TorusPoint::new(0.1, 2.0), TorusPoint::new(-3.0, 1.0)];
        for v in partial_sum_torus(&c, &omega, &pts).unwrap() {
            assert_eq!(v, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn rectangle_one_reproduces_cos_theta() {
        let c = table_of(&z, 16);
        let omega = SpectralSet::rectangle(1, Domain::Full);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let pts = random_torus(&mut rng, 100);
        let vals = partial_sum_torus(&c, &omega, &pts).unwrap();
        for (p, v) in pts.iter().zip(vals) {
            // oracle: the two-term sum 1/2 e^{i theta} + 1/2 e^{-i theta}
            let oracle = 0.5 * Complex64::cis(p.theta) + 0.5 * Complex64::cis(-p.theta);
            assert!((v - oracle).norm() < 1e-12);
            assert!((v.re - p.theta.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn full_range_round_trip_on_grid() {
        let f = presets::harmonic_probe();
        let grid = dfs_double(&sample_sphere(&f, 32, 16).unwrap()).unwrap();
        let c = compute_coefficients(&grid).unwrap();
        let all: Vec<_> = c.iter().map(|(n, _)| n).collect();
        let omega = SpectralSet::explicit(all, Domain::Full).unwrap();
        let back = partial_sum_torus_grid(&c, &omega, 32, 32).unwrap();
        let scale = grid.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in back.values().iter().zip(grid.values().iter()) {
            assert!((a - b).norm() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn grid_path_matches_direct_summation() {
        let c = table_of(&presets::f3_combo(), 64);
        let omega = SpectralSet::ball(12, Norm::L2, Domain::Full);
        let grid = partial_sum_torus_grid(&c, &omega, 32, 48).unwrap();
        let pts: Vec<TorusPoint> = (0..48)
            .flat_map(|j| (0..32).map(move |k| TorusPoint::raw(torus_lambda(k, 32), torus_theta(j, 48))))
            .collect();
        let direct = partial_sum_torus(&c, &omega, &pts).unwrap();
        for (a, b) in grid.values().iter().zip(&direct) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn out_of_range_sets_are_rejected() {
        let c = table_of(&z, 8);
        let pts = [TorusPoint::new(0.0, 0.0)];
        assert!(matches!(
            partial_sum_torus(&c, &SpectralSet::rectangle(4, Domain::Full), &pts),
            Err(DfsError::OutOfRange(_))
        ));
        assert!(partial_sum_torus(&c, &SpectralSet::rectangle(3, Domain::Full), &pts).is_ok());
    }

    #[test]
    fn coarse_synthesis_aliases_exactly_at_grid_points() {
        let c = table_of(&presets::f3_combo(), 16);
        let omega = SpectralSet::rectangle(6, Domain::Full);
        let grid = partial_sum_torus_grid(&c, &omega, 8, 6).unwrap();
        let pts: Vec<TorusPoint> = (0..6)
            .flat_map(|j| (0..8).map(move |k| TorusPoint::raw(torus_lambda(k, 8), torus_theta(j, 6))))
            .collect();
        let direct = partial_sum_torus(&c, &omega, &pts).unwrap();
        for (a, b) in grid.values().iter().zip(&direct) {
            assert!((a - b).norm() <= 1e-13);
        }
    }

    #[test]
    fn dfs_sum_requires_half_domain() {
        let c = table_of(&z, 8);
        let full = SpectralSet::rectangle(1, Domain::Full);
        assert!(dfs_fourier_sum(&c, &full, &[SpherePoint::NORTH_POLE]).is_err());
    }

    #[test]
    fn dfs_sum_of_coordinate_z() {
        let c = table_of(&z, 16);
        let omega = SpectralSet::rectangle(1, Domain::Half);
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let mut pts: Vec<SpherePoint> = random_torus(&mut rng, 200).into_iter().map(dfs_coord).collect();
        pts.push(SpherePoint::NORTH_POLE);
        pts.push(SpherePoint::SOUTH_POLE);
        for (xi, v) in pts.iter().zip(dfs_fourier_sum(&c, &omega, &pts).unwrap()) {
            assert!((v - xi.z).norm() <= 1e-12);
        }
        let constant = |_: SpherePoint| Complex64::new(2.5, 0.0);
        let cc = table_of(&constant, 8);
        let origin = SpectralSet::explicit([SpectralIndex::new(0, 0)], Domain::Half).unwrap();
        for v in dfs_fourier_sum(&cc, &origin, &pts).unwrap() {
            assert!((v - 2.5).norm() < 1e-14);
        }
    }

    #[test]
    fn dfs_sum_equals_symmetrized_torus_sum() {
        let c = table_of(&presets::f3_combo(), 64);
        let omega = SpectralSet::ball(20, Norm::L1, Domain::Half);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let pts: Vec<SpherePoint> = random_torus(&mut rng, 1000).into_iter().map(dfs_coord).collect();
        let s = dfs_fourier_sum(&c, &omega, &pts).unwrap();
        let tp: Vec<TorusPoint> = pts.iter().map(|x| dfs_coord_inverse(*x).unwrap()).collect();
        let f = partial_sum_torus(&c, &omega.symmetrized(), &tp).unwrap();
        for (a, b) in s.iter().zip(&f) {
            assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn latlon_path_matches_direct_path() {
        let c = table_of(&presets::f3_combo(), 64);
        let omega = SpectralSet::rectangle(10, Domain::Half);
        let grid = dfs_fourier_sum_latlon(&c, &omega, 24, 12).unwrap();
        let pts: Vec<SpherePoint> = (0..=12)
            .flat_map(|j| (0..24).map(move |k| crate::grids::latlon_point(j, k, 24, 12)))
            .collect();
        let direct = dfs_fourier_sum(&c, &omega, &pts).unwrap();
        for (a, b) in grid.values().iter().zip(&direct) {
            assert!((a - b).norm() <= 1e-12);
        }
        assert_eq!(grid.pole_row_spread(), 0.0);
    }
}
