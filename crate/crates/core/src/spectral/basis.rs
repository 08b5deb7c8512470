//! The folded exponentials `e_n` and their push-down `b_n = e_n o phi^-1`.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::SpectralIndex;
use crate::error::{DfsError, Result};
use crate::function::SphericalFunction;
use crate::geometry::{dfs_coord, dfs_coord_inverse, SpherePoint, TorusPoint};

fn require_half(n: SpectralIndex) -> Result<()> {
    if n.n2 < 0 {
        return Err(DfsError::InvalidArgument(format!(
            "basis index ({}, {}) must have n2 >= 0",
            n.n1, n.n2
        )));
    }
    Ok(())
}

/// `e_n(x) = exp(i<n,x>) + (-1)^{n1} exp(i<M(n),x>)` for `n2 != 0`, `exp(i<n,x>)` otherwise.
pub fn basis_e(n: SpectralIndex, p: TorusPoint) -> Result<Complex64> {
    require_half(n)?;
    Ok(basis_e_unchecked(n, p))
}

pub(crate) fn basis_e_unchecked(n: SpectralIndex, p: TorusPoint) -> Complex64 {
    let a = Complex64::cis(n.n1 as f64 * p.lambda);
    if n.n2 == 0 {
        return a;
    }
    let t = n.n2 as f64 * p.theta;
    a * (Complex64::cis(t) + n.glide_sign() * Complex64::cis(-t))
}

pub fn basis_b(n: SpectralIndex, xi: SpherePoint) -> Result<Complex64> {
    require_half(n)?;
    Ok(basis_e_unchecked(n, dfs_coord_inverse(xi)?))
}

/// `b_n` as a [`SphericalFunction`]. Off-sphere inputs evaluate to NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisFunction {
    index: SpectralIndex,
}

impl BasisFunction {
    pub fn new(index: SpectralIndex) -> Result<Self> {
        require_half(index)?;
        Ok(Self { index })
    }

    pub fn index(&self) -> SpectralIndex {
        self.index
    }
}

impl SphericalFunction for BasisFunction {
    fn eval(&self, xi: SpherePoint) -> Complex64 {
        match dfs_coord_inverse(xi) {
            Ok(p) => basis_e_unchecked(self.index, p),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    }
}

/// Gram matrix `G[a][b] = integral over S^2 of f_a conj(f_b) (1 - xi_3^2)^{-1/2} d xi`.
///
/// In `(lambda, theta)` coordinates the weight cancels the `sin theta` of
/// the surface measure, leaving the plain integral over `[-pi, pi) x [0, pi]`.
/// The rule is the periodic trapezoid in `lambda` and the midpoint rule in
/// `theta` (`n_quad` nodes each); both are exact for the trigonometric
/// integrands of the `b_n` up to degree `n_quad - 1`.
pub fn gram_matrix(funcs: &[&dyn SphericalFunction], n_quad: usize) -> Result<Array2<Complex64>> {
    if n_quad < 4 {
        return Err(DfsError::InvalidArgument(format!("n_quad must be at least 4, got {n_quad}")));
    }
    let m = funcs.len();
    let h_lambda = 2.0 * PI / n_quad as f64;
    let h_theta = PI / n_quad as f64;
    let row_sums: Vec<Array2<Complex64>> = (0..n_quad)
        .into_par_iter()
        .map(|j| {
            let theta = (j as f64 + 0.5) * h_theta;
            let samples: Vec<Vec<Complex64>> = funcs
                .iter()
                .map(|f| {
                    (0..n_quad)
                        .map(|k| {
                            let lambda = -PI + k as f64 * h_lambda;
                            f.eval(dfs_coord(TorusPoint::raw(lambda, theta)))
                        })
                        .collect()
                })
                .collect();
            let mut acc = Array2::<Complex64>::zeros((m, m));
            for a in 0..m {
                for b in a..m {
                    let s: Complex64 = samples[a]
                        .iter()
                        .zip(&samples[b])
                        .map(|(x, y)| x * y.conj())
                        .sum();
                    acc[[a, b]] = s;
                }
            }
            acc
        })
        .collect();
    // fixed summation order keeps the result independent of the thread count
    let mut gram = Array2::<Complex64>::zeros((m, m));
    for part in &row_sums {
        gram += part;
    }
    gram *= Complex64::new(h_lambda * h_theta, 0.0);
    for a in 0..m {
        for b in 0..a {
            gram[[a, b]] = gram[[b, a]].conj();
        }
    }
    Ok(gram)
}

pub fn weighted_inner_product<F, G>(f: &F, g: &G, n_quad: usize) -> Result<Complex64>
where
    F: SphericalFunction,
    G: SphericalFunction,
{
    let gram = gram_matrix(&[f as &dyn SphericalFunction, g as &dyn SphericalFunction], n_quad)?;
    Ok(gram[[0, 1]])
}
