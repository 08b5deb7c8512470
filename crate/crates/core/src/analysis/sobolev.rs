use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use super::Check;
use crate::error::{DfsError, Result};

/// Relative Richardson acceptance per panel.
const PANEL_TOLERANCE: f64 = 1e-10;
const MAX_DEPTH: u32 = 50;

/// `cos^2 t / (sin^2 t ln^2(8 / sin t))`, the squared gradient of the
/// `ln ln` counterexample in latitude.
fn gradient_density(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let l = (8.0 / s).ln();
    c * c / (s * s * l * l)
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    depth: u32,
) -> Result<f64> {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let both = left + right;
    let delta = both - whole;
    if delta.abs() <= 15.0 * PANEL_TOLERANCE * both.abs() {
        return Ok(both + delta / 15.0);
    }
    if depth == 0 {
        return Err(DfsError::Quadrature(format!(
            "adaptive Simpson did not converge on [{a:e}, {b:e}]"
        )));
    }
    Ok(adapt(f, a, fa, m, fm, lm, flm, left, depth - 1)? + adapt(f, m, fm, b, fb, rm, frm, right, depth - 1)?)
}

/// Adaptive Simpson quadrature with Richardson extrapolation.
pub(crate) fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    adapt(&f, a, fa, b, fb, m, fm, whole, MAX_DEPTH)
}

/// Gradient energies of the counterexample over `[eps, pi - eps]`:
/// `(2 pi int g sin, 2 pi int g)` for the sphere and torus measures.
///
/// Integrates in `u = ln theta` over `[eps, pi/2]` and doubles by symmetry.
fn energies_between(lo: f64, hi: f64) -> Result<(f64, f64)> {
    let (a, b) = (lo.ln(), hi.ln());
    let sphere = integrate(|u| {
        let t = u.exp();
        gradient_density(t) * t.sin() * t
    }, a, b)?;
    let torus = integrate(|u| {
        let t = u.exp();
        gradient_density(t) * t
    }, a, b)?;
    Ok((4.0 * PI * sphere, 4.0 * PI * torus))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevRow {
    pub epsilon: f64,
    pub sphere_energy: f64,
    pub torus_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SobolevReport {
    pub rows: Vec<SobolevRow>,
    /// `E_S(eps_i) - E_S(eps_{i-1})`
    pub sphere_increments: Vec<f64>,
    /// `E_T(eps) / E_T(10 eps)` for each listed `eps` whose tenfold is also listed.
    pub torus_decade_ratios: Vec<(f64, f64)>,
    /// `8 pi / ln 8`, the bound on the full sphere energy.
    pub sphere_cap: f64,
    pub checks: Vec<Check>,
}

/// `E_S(eps)` and `E_T(eps)` for each `eps`, accumulated panel by panel.
pub fn sobolev_energies(epsilons: &[f64]) -> Result<Vec<SobolevRow>> {
    if epsilons.is_empty() {
        return Err(DfsError::InvalidArgument("no cutoffs given".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(DfsError::InvalidArgument("cutoffs must be strictly descending".into()));
    }
    if !(epsilons[0] < FRAC_PI_2) || !(epsilons[epsilons.len() - 1] >= 1e-8) {
        return Err(DfsError::InvalidArgument("cutoffs must lie in [1e-8, pi/2)".into()));
    }
    let mut rows = Vec::with_capacity(epsilons.len());
    let (mut es, mut et) = (0.0, 0.0);
    let mut hi = FRAC_PI_2;
    for &eps in epsilons {
        let (ds, dt) = energies_between(eps, hi)?;
        es += ds;
        et += dt;
        hi = eps;
        rows.push(SobolevRow {
            epsilon: eps,
            sphere_energy: es,
            torus_energy: et,
        });
    }
    Ok(rows)
}

/// Energy growth of the `ln ln` counterexample under shrinking polar cutoffs.
///
/// The sphere energy converges as the cutoff vanishes while the torus
/// energy, which lacks the `sin theta` area factor, grows without bound.
pub fn sobolev_probe(epsilons: &[f64]) -> Result<SobolevReport> {
    let rows = sobolev_energies(epsilons)?;
    let sphere_increments: Vec<f64> = rows.windows(2).map(|w| w[1].sphere_energy - w[0].sphere_energy).collect();
    let mut torus_decade_ratios = Vec::new();
    for r in &rows {
        if let Some(coarse) = rows.iter().find(|q| ((q.epsilon / r.epsilon) / 10.0 - 1.0).abs() < 1e-9) {
            torus_decade_ratios.push((r.epsilon, r.torus_energy / coarse.torus_energy));
        }
    }
    let last = rows[rows.len() - 1];
    let sphere_cap = 8.0 * PI / 8f64.ln();

    let mut checks = vec![Check::at_most("sphere_energy_below_cap", last.sphere_energy, sphere_cap)];
    let shrinking = sphere_increments.windows(2).filter(|w| w[1] >= w[0]).count();
    checks.push(Check::at_most("sphere_increments_growing_steps", shrinking as f64, 0.0));
    for &(eps, ratio) in torus_decade_ratios.iter().filter(|(eps, _)| *eps <= 1e-4 * (1.0 + 1e-12)) {
        checks.push(Check::at_least(format!("torus_decade_ratio@{eps:e}"), ratio, 5.0));
    }
    checks.push(Check::at_least(
        "torus_to_sphere_ratio",
        last.torus_energy / last.sphere_energy,
        100.0,
    ));
    Ok(SobolevReport {
        rows,
        sphere_increments,
        torus_decade_ratios,
        sphere_cap,
        checks,
    })
}
