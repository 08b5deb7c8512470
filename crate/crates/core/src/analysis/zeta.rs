use serde::Serialize;

use crate::error::{DfsError, Result};

/// Bernoulli numbers `B_2, B_4, ..., B_14`.
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Riemann zeta function for real `s > 1`, by Euler-Maclaurin summation
/// with cutoff 16 and seven correction terms.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(DfsError::InvalidArgument(format!("zeta({s}) diverges")));
    }
    const N: f64 = 16.0;
    let head: f64 = (1..16).rev().map(|n| (n as f64).powf(-s)).sum();
    let mut tail = N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) / (2j)!
    let mut factor = s / 2.0;
    let mut power = N.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        tail += b * factor * power;
        let m = 2.0 * (j + 1) as f64;
        factor *= (s + m - 1.0) * (s + m) / ((m + 1.0) * (m + 2.0));
        power /= N * N;
    }
    Ok(head + tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaTail {
    pub exponent: f64,
    pub radius: u64,
    /// `sum_{0 < |n|_1 <= radius} |n|_1^{-exponent}`
    pub partial_sum: f64,
    /// `4 zeta(exponent - 1)`
    pub limit: f64,
    pub gap: f64,
    /// `4 radius^{2 - exponent} / (exponent - 2)`, an upper bound for `gap`
    pub tail_bound: f64,
}

/// Lattice sum of `|n|_1^{-(k + alpha)}` over the punctured l1 ball.
///
/// The shell `|n|_1 = r` has `4 r` points, so the sum is
/// `4 sum_{r <= h} r^{1 - k - alpha}` and tends to `4 zeta(k + alpha - 1)`.
pub fn zeta_tail_sum(k: u32, alpha: f64, radius: u64) -> Result<ZetaTail> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(DfsError::InvalidArgument(format!("alpha = {alpha} must lie in (0, 1]")));
    }
    let s = k as f64 + alpha;
    if s <= 2.0 {
        return Err(DfsError::InvalidArgument(format!(
            "k + alpha = {s} must exceed 2 for the lattice sum to converge"
        )));
    }
    // smallest terms first
    let partial_sum: f64 = (1..=radius).rev().map(|r| 4.0 * (r as f64).powf(1.0 - s)).sum();
    let limit = 4.0 * riemann_zeta(s - 1.0)?;
    let tail_bound = if radius == 0 {
        f64::INFINITY
    } else {
        4.0 * (radius as f64).powf(2.0 - s) / (s - 2.0)
    };
    Ok(ZetaTail {
        exponent: s,
        radius,
        partial_sum,
        limit,
        gap: limit - partial_sum,
        tail_bound,
    })
}
