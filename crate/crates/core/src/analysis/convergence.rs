use serde::Serialize;

use super::error_table::{coefficients_of, EvalGrid};
use crate::error::{DfsError, Result};
use crate::function::SphericalFunction;
use crate::grids::sample_sphere;
use crate::spectral::{dfs_fourier_sum_latlon, Domain, SpectralSet};

/// Slack added to the coefficient tail sum for aliasing and rounding.
pub const ALIASING_ALLOWANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStage {
    pub shape: String,
    pub extent: i64,
    pub n_terms: usize,
    pub max_error: f64,
    /// `sum |c_n|` over table indices outside `Omega u M(Omega)`
    pub tail_sum: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub coefficient_grid: usize,
    pub eval: EvalGrid,
    pub stages: Vec<ConvergenceStage>,
    pub all_hold: bool,
    /// The tail sums never increase along the sequence.
    pub tail_non_increasing: bool,
}

fn is_subset(a: &SpectralSet, b: &SpectralSet) -> bool {
    a.indices().iter().all(|n| b.contains(n.n1, n.n2))
}

/// Checks `max |f - S_Omega f| <= sum_{n not in Omega~} |c_n| + ALIASING_ALLOWANCE`
/// for each set of an expanding sequence.
///
/// Coefficients come from a `coefficient_grid` square torus grid. When the
/// evaluation grid is a subgrid of it the bound is exact up to rounding.
pub fn uniform_convergence_check<F>(
    f: &F,
    omegas: &[SpectralSet],
    coefficient_grid: usize,
    eval: EvalGrid,
) -> Result<ConvergenceReport>
where
    F: SphericalFunction + ?Sized,
{
    if omegas.is_empty() {
        return Err(DfsError::InvalidArgument("no truncation sets given".into()));
    }
    if omegas.iter().any(|o| o.domain() != Domain::Half) {
        return Err(DfsError::InvalidArgument("truncation sets must be half-domain".into()));
    }
    if omegas.windows(2).any(|w| !is_subset(&w[0], &w[1])) {
        return Err(DfsError::InvalidArgument("truncation sets must be nested".into()));
    }
    let c = coefficients_of(f, coefficient_grid)?;
    let exact = sample_sphere(f, eval.n_lambda, eval.n_theta_half)?;
    let mut stages = Vec::with_capacity(omegas.len());
    for omega in omegas {
        let approx = dfs_fourier_sum_latlon(&c, omega, eval.n_lambda, eval.n_theta_half)?;
        let max_error = exact.max_abs_diff(&approx)?;
        let tail_sum = c.tail_sum(|n1, n2| omega.contains(n1, n2.abs()));
        stages.push(ConvergenceStage {
            shape: omega.shape_tag(),
            extent: omega.extent(),
            n_terms: omega.len(),
            max_error,
            tail_sum,
            holds: max_error <= tail_sum + ALIASING_ALLOWANCE,
        });
    }
    Ok(ConvergenceReport {
        coefficient_grid,
        eval,
        all_hold: stages.iter().all(|s| s.holds),
        tail_non_increasing: stages.windows(2).all(|w| w[1].tail_sum <= w[0].tail_sum),
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfns::presets;

    fn rects(hs: &[i64]) -> Vec<SpectralSet> {
        hs.iter().map(|&h| SpectralSet::rectangle(h, Domain::Half)).collect()
    }

    #[test]
    fn bandlimited_has_zero_tail() {
        let f = presets::harmonic_probe();
        let r = uniform_convergence_check(&f, &rects(&[4, 7, 10]), 64, EvalGrid { n_lambda: 32, n_theta_half: 16 })
            .unwrap();
        assert!(r.all_hold);
        assert!(r.stages[0].max_error > 1e-3);
        for s in &r.stages[1..] {
            assert!(s.tail_sum < 1e-12 && s.max_error <= 1e-10, "{s:?}");
        }
    }

    #[test]
    fn f3_bound_holds_on_a_subgrid() {
        let f = presets::f3_combo();
        let r = uniform_convergence_check(&f, &rects(&[4, 8, 16]), 128, EvalGrid { n_lambda: 64, n_theta_half: 32 })
            .unwrap();
        assert!(r.all_hold && r.tail_non_increasing);
        for w in r.stages.windows(2) {
            assert!(w[1].max_error < w[0].max_error);
        }
    }

    #[test]
    fn rejects_bad_sequences() {
        let f = presets::constant();
        let e = EvalGrid { n_lambda: 16, n_theta_half: 8 };
        assert!(uniform_convergence_check(&f, &[], 16, e).is_err());
        assert!(uniform_convergence_check(&f, &rects(&[4, 2]), 16, e).is_err());
        let full = vec![SpectralSet::rectangle(2, Domain::Full)];
        assert!(uniform_convergence_check(&f, &full, 16, e).is_err());
    }
}
