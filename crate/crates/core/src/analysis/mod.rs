//! Numerical checks of the convergence and regularity statements that
//! the DFS expansion satisfies.

mod convergence;
mod decay;
mod error_table;
mod hoelder;
mod sobolev;
mod zeta;

use serde::Serialize;

pub use convergence::{uniform_convergence_check, ConvergenceReport, ConvergenceStage};
pub use decay::{decay_report, DecayOptions, DecayReport, ShellRecord};
pub use error_table::{
    error_table, fit_rate, fit_slope, ErrorTableOptions, ErrorTableRow, EvalGrid, Truncation, FIT_MIN_DEGREE,
};
pub use hoelder::{hoelder_quotient_check, HoelderReport};
pub use sobolev::{sobolev_energies, sobolev_probe, SobolevReport, SobolevRow};
pub use zeta::{riemann_zeta, zeta_tail_sum, ZetaTail};

/// One named numeric assertion `value <op> limit`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value >= limit,
        }
    }
}
