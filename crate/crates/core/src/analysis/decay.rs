use serde::Serialize;

use super::error_table::fit_slope;
use crate::spectral::CoefficientTable;

/// Shell selection and flagging for [`decay_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayOptions {
    pub min_radius: i64,
    /// Defaults to the largest radius whose shell fits in the table.
    pub max_radius: Option<i64>,
    /// Flag shells whose rescaled maximum exceeds this.
    pub cap: Option<f64>,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            min_radius: 1,
            max_radius: None,
            cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellRecord {
    pub radius: i64,
    /// `max_{|n|_1 = r} |c_n|`
    pub max_abs: f64,
    /// `max_abs * r^{k + alpha}`
    pub rescaled: f64,
    pub exceeds_cap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub exponent: f64,
    pub shells: Vec<ShellRecord>,
    /// Log-log slope of `max_abs` against `r`; `-inf` when every shell
    /// past the first is numerically zero.
    pub slope: f64,
    /// Fraction of successive rescaled maxima that do not increase.
    pub non_increasing_fraction: f64,
    /// Fraction of all shell pairs `r < s` with `rescaled(s) <= rescaled(r)`
    /// (Mann-Kendall style).
    pub pairwise_non_increasing_fraction: f64,
    pub flagged: Vec<i64>,
}

/// Largest absolute coefficient on each l1 shell `|n1| + |n2| = r`.
pub fn decay_report(c: &CoefficientTable, k: u32, alpha: f64, opts: &DecayOptions) -> DecayReport {
    let exponent = k as f64 + alpha;
    let fits = c.n1_max().min(-c.n1_min()).min(c.n2_max()).min(-c.n2_min());
    let r_max = opts.max_radius.map_or(fits, |r| r.min(fits));
    let r_min = opts.min_radius.max(1);
    // values this far below the largest coefficient are rounding noise
    let floor = 64.0 * f64::EPSILON * c.max_abs();

    let shells: Vec<ShellRecord> = (r_min..=r_max)
        .map(|r| {
            let max_abs = (-r..=r)
                .flat_map(|n1| {
                    let m = r - n1.abs();
                    [(n1, m), (n1, -m)]
                })
                .filter_map(|(n1, n2)| c.get(n1, n2))
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            let max_abs = if max_abs <= floor { 0.0 } else { max_abs };
            let rescaled = max_abs * (r as f64).powf(exponent);
            ShellRecord {
                radius: r,
                max_abs,
                rescaled,
                exceeds_cap: opts.cap.is_some_and(|cap| rescaled > cap),
            }
        })
        .collect();

    let (xs, ys): (Vec<f64>, Vec<f64>) = shells
        .iter()
        .filter(|s| s.max_abs > 0.0)
        .map(|s| ((s.radius as f64).ln(), s.max_abs.ln()))
        .unzip();
    let slope = if xs.len() >= 2 {
        fit_slope(&xs, &ys).unwrap_or(f64::NAN)
    } else if shells.len() >= 2 && shells.iter().skip(1).all(|s| s.max_abs == 0.0) {
        f64::NEG_INFINITY
    } else {
        f64::NAN
    };

    let steps = shells.len().saturating_sub(1);
    let non_increasing = shells.windows(2).filter(|w| w[1].rescaled <= w[0].rescaled).count();
    let mut pairs = 0usize;
    let mut pairs_down = 0usize;
    for (i, a) in shells.iter().enumerate() {
        for b in &shells[i + 1..] {
            pairs += 1;
            pairs_down += usize::from(b.rescaled <= a.rescaled);
        }
    }
    DecayReport {
        exponent,
        pairwise_non_increasing_fraction: if pairs == 0 { 1.0 } else { pairs_down as f64 / pairs as f64 },
        flagged: shells.iter().filter(|s| s.exceeds_cap).map(|s| s.radius).collect(),
        non_increasing_fraction: if steps == 0 { 1.0 } else { non_increasing as f64 / steps as f64 },
        slope,
        shells,
    }
}
