use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{DfsError, Result};
use crate::function::SphericalFunction;
use crate::geometry::{dfs_coord, TorusPoint};

/// Slack on each pairwise comparison.
pub const QUOTIENT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoelderReport {
    pub alpha: f64,
    pub n_pairs: usize,
    pub seed: u64,
    pub violations: usize,
    /// Largest `|g(x) - g(y)| / |x - y|^alpha` over torus pairs, `g = f o phi`.
    pub max_torus_quotient: f64,
    /// Largest `|f(phi x) - f(phi y)| / |phi x - phi y|^alpha`.
    pub max_sphere_quotient: f64,
}

impl HoelderReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Compares the alpha-Hoelder difference quotients of `f o phi` on the
/// torus with those of `f` on the sphere for seeded random pairs.
///
/// Since `phi` is a contraction the torus quotient can never exceed the
/// sphere quotient. Half of the pairs are uniform on the torus; the other
/// half are close pairs with separations down to `1e-6`.
pub fn hoelder_quotient_check<F>(f: &F, alpha: f64, n_pairs: usize, seed: u64) -> Result<HoelderReport>
where
    F: SphericalFunction + ?Sized,
{
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DfsError::InvalidArgument(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = HoelderReport {
        alpha,
        n_pairs,
        seed,
        violations: 0,
        max_torus_quotient: 0.0,
        max_sphere_quotient: 0.0,
    };
    let mut done = 0;
    while done < n_pairs {
        let x = TorusPoint::raw(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
        let y = if done % 2 == 0 {
            TorusPoint::raw(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI))
        } else {
            let r = 10f64.powf(rng.gen_range(-6.0..0.0));
            let a: f64 = rng.gen_range(-PI..PI);
            TorusPoint::raw(x.lambda + r * a.cos(), x.theta + r * a.sin())
        };
        let (px, py) = (dfs_coord(x), dfs_coord(y));
        let sphere_dist = px.distance(&py);
        if sphere_dist == 0.0 {
            continue;
        }
        done += 1;
        let diff = (f.eval(px) - f.eval(py)).norm();
        let torus_q = diff / x.flat_distance(&y).powf(alpha);
        let sphere_q = diff / sphere_dist.powf(alpha);
        if !(torus_q <= sphere_q + QUOTIENT_SLACK) {
            report.violations += 1;
        }
        report.max_torus_quotient = report.max_torus_quotient.max(torus_q);
        report.max_sphere_quotient = report.max_sphere_quotient.max(sphere_q);
    }
    Ok(report)
}
