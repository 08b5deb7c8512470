use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{DfsError, Result};
use crate::function::SphericalFunction;
use crate::grids::{dfs_double, sample_sphere};
use crate::sh_reference::{sh_analyze, sh_evaluate_latlon};
use crate::spectral::{compute_coefficients, dfs_fourier_sum_latlon, CoefficientTable, Domain, Norm, SpectralSet};

/// Degrees below this are treated as pre-asymptotic by [`fit_rate`].
pub const FIT_MIN_DEGREE: i64 = 16;

/// Shape of the truncation `Omega` for a given degree `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "shape")]
pub enum Truncation {
    Rect,
    Ball { norm: Norm },
}

impl Truncation {
    /// Half-domain set of degree `h`.
    pub fn set(&self, h: i64) -> SpectralSet {
        match *self {
            Truncation::Rect => SpectralSet::rectangle(h, Domain::Half),
            Truncation::Ball { norm } => SpectralSet::ball(h, norm, Domain::Half),
        }
    }
}

/// Latitude-longitude evaluation grid with `n_theta_half + 1` rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalGrid {
    pub n_lambda: usize,
    pub n_theta_half: usize,
}

impl Default for EvalGrid {
    fn default() -> Self {
        Self {
            n_lambda: 256,
            n_theta_half: 128,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTableOptions {
    pub truncation: Truncation,
    pub eval: EvalGrid,
    /// Coefficient grid size as a multiple of the largest degree.
    pub oversampling: usize,
    /// Also truncate a spherical harmonics expansion at each degree.
    pub compare_sh: bool,
}

impl Default for ErrorTableOptions {
    fn default() -> Self {
        Self {
            truncation: Truncation::Rect,
            eval: EvalGrid::default(),
            oversampling: 4,
            compare_sh: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTableRow {
    pub h: i64,
    pub shape: String,
    pub n_terms: usize,
    /// `max |f - S_Omega f|` over the evaluation grid
    pub max_error: f64,
    /// Wall-clock seconds for the partial sum and its error, informational only.
    pub elapsed: f64,
    pub sh_max_error: Option<f64>,
}

pub(crate) fn validate_degrees(degrees: &[i64]) -> Result<i64> {
    let Some(&last) = degrees.last() else {
        return Err(DfsError::InvalidArgument("degree list is empty".into()));
    };
    if degrees[0] < 0 {
        return Err(DfsError::InvalidArgument("degrees must be non-negative".into()));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DfsError::InvalidArgument("degrees must be strictly ascending".into()));
    }
    Ok(last)
}

fn even_at_least(n: usize) -> usize {
    n + n % 2
}

/// DFS coefficients of `f` from an `n x n` torus grid doubled from a
/// `n x n/2` latitude-longitude sample.
pub(crate) fn coefficients_of<F>(f: &F, n: usize) -> Result<CoefficientTable>
where
    F: SphericalFunction + ?Sized,
{
    compute_coefficients(&dfs_double(&sample_sphere(f, n, n / 2)?)?)
}

/// Sup-norm truncation errors of the DFS expansion of `f` at each degree.
pub fn error_table<F>(f: &F, degrees: &[i64], opts: &ErrorTableOptions) -> Result<Vec<ErrorTableRow>>
where
    F: SphericalFunction + ?Sized,
{
    let h_max = validate_degrees(degrees)? as usize;
    if opts.oversampling < 2 {
        return Err(DfsError::InvalidArgument(format!(
            "oversampling factor {} must be at least 2",
            opts.oversampling
        )));
    }
    let EvalGrid { n_lambda, n_theta_half } = opts.eval;
    if n_lambda == 0 || n_lambda % 2 == 1 || n_theta_half == 0 {
        return Err(DfsError::InvalidArgument(format!(
            "evaluation grid {n_lambda}x{n_theta_half} must be nonempty with even longitude count"
        )));
    }
    let n = even_at_least((opts.oversampling * h_max).max(8));
    let c = coefficients_of(f, n)?;
    let exact = sample_sphere(f, n_lambda, n_theta_half)?;

    let sh = if opts.compare_sh {
        // Clenshaw-Curtis needs at least 2h + 2 rows and columns
        let n_sh = even_at_least(n.max(4 * h_max + 4));
        let grid = if n_sh == n { sample_sphere(f, n, n / 2)? } else { sample_sphere(f, n_sh, n_sh / 2)? };
        Some(sh_analyze(&grid, h_max)?)
    } else {
        None
    };

    let tag = opts.truncation.set(0).shape_tag();
    degrees
        .iter()
        .map(|&h| {
            let start = Instant::now();
            let omega = opts.truncation.set(h);
            let approx = dfs_fourier_sum_latlon(&c, &omega, n_lambda, n_theta_half)?;
            let max_error = exact.max_abs_diff(&approx)?;
            let elapsed = start.elapsed().as_secs_f64();
            let sh_max_error = match &sh {
                Some(coeffs) => {
                    let approx = sh_evaluate_latlon(&coeffs.truncated(h as usize)?, n_lambda, n_theta_half)?;
                    Some(exact.max_abs_diff(&approx)?)
                }
                None => None,
            };
            Ok(ErrorTableRow {
                h,
                shape: tag.clone(),
                n_terms: omega.len(),
                max_error,
                elapsed,
                sh_max_error,
            })
        })
        .collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(DfsError::InvalidArgument("slope fit needs at least two paired values".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(DfsError::InvalidArgument("slope fit needs distinct abscissae".into()));
    }
    Ok(sxy / sxx)
}

/// Log-log slope of `max_error` against `h`, over rows with
/// `h >= FIT_MIN_DEGREE` and a positive finite error.
pub fn fit_rate(rows: &[ErrorTableRow]) -> Result<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.h >= FIT_MIN_DEGREE && r.max_error > 0.0 && r.max_error.is_finite())
        .map(|r| ((r.h as f64).ln(), r.max_error.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(DfsError::InvalidArgument(format!(
            "rate fit needs at least 3 rows with h >= {FIT_MIN_DEGREE} and positive error, got {}",
            xs.len()
        )));
    }
    fit_slope(&xs, &ys)
}
