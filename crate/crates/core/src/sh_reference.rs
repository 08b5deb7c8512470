//! Slow spherical harmonics expansion used as a comparison baseline.
//!
//! Harmonics are orthonormal on the unit sphere and carry the
//! Condon-Shortley phase:
//! `Y_n^k(theta, lambda) = Pbar_n^k(cos theta) exp(i k lambda)` for `k >= 0`,
//! `Y_n^{-k} = (-1)^k conj(Y_n^k)`, where `Pbar_n^k` includes `(-1)^k`
//! and is normalized so that `integral_{-1}^{1} Pbar_n^k Pbar_m^k = delta_nm / (2 pi)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{DfsError, Result};
use crate::function::SphericalFunction;
use crate::geometry::{dfs_coord, dfs_coord_inverse, SpherePoint, TorusPoint};
use crate::grids::LatLonGrid;

#[inline]
fn tri(n: usize, k: usize) -> usize {
    n * (n + 1) / 2 + k
}

/// All `Pbar_n^k(t)` for `0 <= k <= n <= degree`, indexed by `n (n + 1) / 2 + k`.
///
/// Seeds `Pbar_k^k` by the sectoral recurrence and steps up in `n` with the
/// standard normalized three-term recurrence.
pub fn legendre_table(degree: usize, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; tri(degree, degree) + 1];
    let s = (1.0 - t * t).max(0.0).sqrt();
    let mut pkk = (1.0 / (4.0 * PI)).sqrt();
    for k in 0..=degree {
        if k > 0 {
            let kf = k as f64;
            pkk *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
        }
        out[tri(k, k)] = pkk;
        if k == degree {
            break;
        }
        let mut prev = pkk;
        let mut cur = (2.0 * k as f64 + 3.0).sqrt() * t * pkk;
        out[tri(k + 1, k)] = cur;
        let kf = k as f64;
        for n in (k + 2)..=degree {
            let nf = n as f64;
            let a = ((4.0 * nf * nf - 1.0) / (nf * nf - kf * kf)).sqrt();
            let b = (((nf - 1.0) * (nf - 1.0) - kf * kf) / (4.0 * (nf - 1.0) * (nf - 1.0) - 1.0)).sqrt();
            let next = a * (t * cur - b * prev);
            out[tri(n, k)] = next;
            prev = cur;
            cur = next;
        }
    }
    out
}

/// Fully normalized associated Legendre function `Pbar_n^k(t)`.
pub fn assoc_legendre(n: usize, k: usize, t: f64) -> Result<f64> {
    if k > n {
        return Err(DfsError::InvalidArgument(format!("order {k} exceeds degree {n}")));
    }
    if !(-1.0..=1.0).contains(&t) {
        return Err(DfsError::InvalidArgument(format!("argument {t} outside [-1, 1]")));
    }
    Ok(legendre_table(n, t)[tri(n, k)])
}

/// `Y_n^k` at a sphere point.
pub fn spherical_harmonic(n: usize, k: i64, xi: SpherePoint) -> Result<Complex64> {
    let ka = k.unsigned_abs() as usize;
    if ka > n {
        return Err(DfsError::InvalidArgument(format!("order {k} exceeds degree {n}")));
    }
    let p = dfs_coord_inverse(xi)?;
    let y = Complex64::from_polar(assoc_legendre(n, ka, p.theta.cos())?, ka as f64 * p.lambda);
    Ok(if k >= 0 {
        y
    } else if ka % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let mf = m as f64;
                let p2 = ((2.0 * mf - 1.0) * x * p1 - (mf - 1.0) * p0) / mf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 0 { 0.0 } else { p0 };
            dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Weights `w_j` such that `sum_j w_j g(theta_j) ~ integral_0^pi g(theta) sin(theta) d theta`
/// on `theta_j = pi j / n`, `j = 0..=n` (Clenshaw-Curtis in `t = cos theta`).
/// Exact for polynomials in `cos theta` of degree `<= n`.
pub fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..=n)
        .map(|j| {
            let c = if j == 0 || j == n { 1.0 } else { 2.0 };
            let theta = PI * j as f64 / nf;
            let mut s = 0.0;
            for k in 1..=n / 2 {
                let b = if 2 * k == n { 1.0 } else { 2.0 };
                s += b / (4.0 * (k * k) as f64 - 1.0) * (2.0 * k as f64 * theta).cos();
            }
            c / nf * (1.0 - s)
        })
        .collect()
}

/// Coefficients `fhat_{n,k}`, `0 <= n <= degree`, `-n <= k <= n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShCoefficients {
    degree: usize,
    values: Vec<Complex64>,
}

impl ShCoefficients {
    pub fn zeros(degree: usize) -> Self {
        Self {
            degree,
            values: vec![Complex64::new(0.0, 0.0); (degree + 1) * (degree + 1)],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn slot(n: usize, k: i64) -> usize {
        (n * n) as usize + (k + n as i64) as usize
    }

    pub fn get(&self, n: usize, k: i64) -> Option<Complex64> {
        (n <= self.degree && k.unsigned_abs() as usize <= n).then(|| self.values[Self::slot(n, k)])
    }

    pub fn set(&mut self, n: usize, k: i64, v: Complex64) -> Result<()> {
        if n > self.degree || k.unsigned_abs() as usize > n {
            return Err(DfsError::OutOfRange(format!("(n, k) = ({n}, {k})")));
        }
        self.values[Self::slot(n, k)] = v;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, Complex64)> + '_ {
        (0..=self.degree).flat_map(move |n| {
            (-(n as i64)..=n as i64).map(move |k| (n, k, self.values[Self::slot(n, k)]))
        })
    }

    /// Copy of the coefficients of degree `<= degree`.
    pub fn truncated(&self, degree: usize) -> Result<ShCoefficients> {
        if degree > self.degree {
            return Err(DfsError::OutOfRange(format!(
                "cannot truncate degree {} expansion to degree {degree}",
                self.degree
            )));
        }
        Ok(Self {
            degree,
            values: self.values[..(degree + 1) * (degree + 1)].to_vec(),
        })
    }

    /// Number of stored coefficients, `(degree + 1)^2`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Combine per-row Fourier modes `modes[j][k]` (for `k = -degree..=degree`,
/// already integrated in `lambda`) with latitude weights.
fn project(degree: usize, thetas: &[f64], weights: &[f64], modes: &[Vec<Complex64>]) -> ShCoefficients {
    let tables: Vec<Vec<f64>> = thetas.par_iter().map(|t| legendre_table(degree, t.cos())).collect();
    let mut out = ShCoefficients::zeros(degree);
    let d = degree as i64;
    for n in 0..=degree {
        for k in -(n as i64)..=n as i64 {
            let ka = k.unsigned_abs() as usize;
            let sign = if k < 0 && ka % 2 == 1 { -1.0 } else { 1.0 };
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, w) in weights.iter().enumerate() {
                acc += modes[j][(k + d) as usize] * (w * tables[j][tri(n, ka)]);
            }
            out.values[ShCoefficients::slot(n, k)] = acc * sign;
        }
    }
    out
}

/// `g_j(k) = integral_{-pi}^{pi} g(lambda, theta_j) exp(-i k lambda) d lambda`
/// by the periodic trapezoid rule, for `k = -degree..=degree`.
fn longitude_modes(row: &[Complex64], degree: usize, planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
    let n = row.len();
    let fft = planner.plan_fft_forward(n);
    let mut buf = row.to_vec();
    fft.process(&mut buf);
    let scale = 2.0 * PI / n as f64;
    let d = degree as i64;
    (-d..=d)
        .map(|k| {
            // samples start at lambda = -pi
            let sign = if k % 2 == 0 { scale } else { -scale };
            buf[k.rem_euclid(n as i64) as usize] * sign
        })
        .collect()
}

/// Project a latitude-longitude grid onto harmonics of degree `<= degree`.
///
/// FFT in longitude, Clenshaw-Curtis quadrature in latitude on the
/// equispaced rows. Exact for spherical polynomials of degree `<= degree`
/// when the grid has at least `2 degree + 2` points in both directions.
pub fn sh_analyze(g: &LatLonGrid, degree: usize) -> Result<ShCoefficients> {
    let need = 2 * degree + 2;
    if g.n_lambda() < need || g.n_theta_half() < need {
        return Err(DfsError::InvalidArgument(format!(
            "grid {}x{} too coarse for degree {degree}: need at least {need} in both directions",
            g.n_lambda(),
            g.n_theta_half()
        )));
    }
    let nth = g.n_theta_half();
    let weights = clenshaw_curtis_weights(nth);
    let thetas: Vec<f64> = (0..=nth).map(|j| g.theta(j)).collect();
    let mut planner = FftPlanner::new();
    let modes: Vec<Vec<Complex64>> = g
        .values()
        .rows()
        .into_iter()
        .map(|row| longitude_modes(&row.to_vec(), degree, &mut planner))
        .collect();
    Ok(project(degree, &thetas, &weights, &modes))
}

/// Project a function onto harmonics of degree `<= degree` using
/// `degree + 1` Gauss-Legendre latitudes and `2 degree + 2` longitudes,
/// the smallest rule that is exact for spherical polynomials of that degree.
pub fn sh_analyze_gauss<F>(f: &F, degree: usize) -> Result<ShCoefficients>
where
    F: SphericalFunction + ?Sized,
{
    let (nodes, weights) = gauss_legendre(degree + 1);
    let n_lambda = 2 * degree + 2;
    let thetas: Vec<f64> = nodes.iter().map(|t| t.acos()).collect();
    let mut planner = FftPlanner::new();
    let mut modes = Vec::with_capacity(thetas.len());
    for &theta in &thetas {
        let row: Vec<Complex64> = (0..n_lambda)
            .map(|k| {
                let lambda = -PI + 2.0 * PI * k as f64 / n_lambda as f64;
                f.eval(dfs_coord(TorusPoint::raw(lambda, theta)))
            })
            .collect();
        modes.push(longitude_modes(&row, degree, &mut planner));
    }
    // Gauss weights already integrate d t = sin(theta) d theta
    Ok(project(degree, &thetas, &weights, &modes))
}

/// `sum_n sum_k fhat_{n,k} Y_n^k(xi)` by direct summation at every point.
pub fn sh_evaluate(c: &ShCoefficients, points: &[SpherePoint]) -> Result<Vec<Complex64>> {
    let degree = c.degree();
    points
        .par_iter()
        .map(|xi| {
            let p = dfs_coord_inverse(*xi)?;
            let table = legendre_table(degree, p.theta.cos());
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..=degree {
                for k in -(n as i64)..=n as i64 {
                    let ka = k.unsigned_abs() as usize;
                    let mut pl = table[tri(n, ka)];
                    if k < 0 && ka % 2 == 1 {
                        pl = -pl;
                    }
                    acc += c.values[ShCoefficients::slot(n, k)]
                        * Complex64::from_polar(pl, k as f64 * p.lambda);
                }
            }
            Ok(acc)
        })
        .collect()
}

/// [`sh_evaluate`] on every point of a latitude-longitude grid.
///
/// Sums over degree once per row and order, then over order per point,
/// so the cost is `O(rows * degree^2 + points * degree)`.
pub fn sh_evaluate_latlon(c: &ShCoefficients, n_lambda: usize, n_theta_half: usize) -> Result<LatLonGrid> {
    if n_lambda == 0 || n_theta_half == 0 {
        return Err(DfsError::InvalidArgument("empty evaluation grid".into()));
    }
    let degree = c.degree();
    let d = degree as i64;
    let rows: Vec<Vec<Complex64>> = (0..=n_theta_half)
        .into_par_iter()
        .map(|j| {
            let theta = PI * j as f64 / n_theta_half as f64;
            let table = legendre_table(degree, theta.cos());
            let orders: Vec<Complex64> = (-d..=d)
                .map(|k| {
                    let ka = k.unsigned_abs() as usize;
                    let sign = if k < 0 && ka % 2 == 1 { -1.0 } else { 1.0 };
                    (ka..=degree)
                        .map(|n| c.values[ShCoefficients::slot(n, k)] * (sign * table[tri(n, ka)]))
                        .sum()
                })
                .collect();
            (0..n_lambda)
                .map(|l| {
                    let lambda = -PI + 2.0 * PI * l as f64 / n_lambda as f64;
                    let step = Complex64::cis(lambda);
                    let mut e = Complex64::cis(-(d as f64) * lambda);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for m in &orders {
                        acc += m * e;
                        e *= step;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let values = ndarray::Array2::from_shape_fn((n_theta_half + 1, n_lambda), |(j, k)| rows[j][k]);
    LatLonGrid::new(values)
}

/// A single real harmonic `Re Y_n^k` as a [`SphericalFunction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealHarmonic {
    pub degree: usize,
    pub order: i64,
}

impl SphericalFunction for RealHarmonic {
    fn eval(&self, xi: SpherePoint) -> Complex64 {
        match spherical_harmonic(self.degree, self.order, xi) {
            Ok(v) => Complex64::new(v.re, 0.0),
            Err(_) => Complex64::new(f64::NAN, 0.0),
        }
    }
}
