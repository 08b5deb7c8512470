use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use dfs_core::analysis::{EvalGrid, Truncation};
use dfs_core::spectral::Norm;
use dfs_core::testfns::{presets, Combination, FunctionConfig};

use crate::error::{CliError, CliResult};

/// Where the spherical function comes from.
#[derive(Debug, Args)]
pub struct FunctionArgs {
    /// Named preset (constant, coordinate-z, f1, f3, f3-combo, counterexample, harmonic-probe)
    #[arg(long, conflicts_with = "spec")]
    pub preset: Option<String>,
    /// JSON function description: one term or {"terms": [...]}
    #[arg(long, value_name = "FILE.json")]
    pub spec: Option<PathBuf>,
}

impl FunctionArgs {
    pub fn load(&self) -> CliResult<Combination> {
        if let Some(path) = &self.spec {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let cfg: FunctionConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("bad function spec {}: {e}", path.display())))?;
            return cfg.into_combination().map_err(|e| CliError::Usage(e.to_string()));
        }
        let name = self.preset.as_deref().unwrap_or("f3-combo");
        presets::preset(name).map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// `N` (meaning `N x N/2`) or `NxM`: `N` longitudes, `M + 1` latitude rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSize {
    pub n_lambda: usize,
    pub n_theta_half: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("'{t}' is not a grid size"));
        let (n_lambda, n_theta_half) = match s.split_once(['x', 'X']) {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let n = parse(s)?;
                (n, n / 2)
            }
        };
        if n_lambda == 0 || n_lambda % 2 == 1 {
            return Err(format!("n_lambda must be a positive even integer, got {n_lambda}"));
        }
        if n_theta_half == 0 {
            return Err("latitude count must be at least 1".into());
        }
        Ok(GridSize { n_lambda, n_theta_half })
    }
}

impl From<GridSize> for EvalGrid {
    fn from(g: GridSize) -> Self {
        EvalGrid {
            n_lambda: g.n_lambda,
            n_theta_half: g.n_theta_half,
        }
    }
}

/// Comma separated, strictly ascending degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degrees(pub Vec<i64>);

impl FromStr for Degrees {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| format!("'{t}' is not a degree")))
            .collect::<Result<_, _>>()?;
        if v.is_empty() {
            return Err("degree list is empty".into());
        }
        if v.iter().any(|&h| h < 0) {
            return Err("degrees must be non-negative".into());
        }
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err("degrees must be strictly ascending".into());
        }
        Ok(Degrees(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Rect,
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct TruncationArgs {
    #[arg(long, value_enum, default_value_t = ShapeArg::Rect)]
    pub shape: ShapeArg,
    /// Norm of the ball truncation
    #[arg(long, value_enum, default_value_t = NormArg::L2)]
    pub norm: NormArg,
}

impl TruncationArgs {
    pub fn truncation(&self) -> Truncation {
        match self.shape {
            ShapeArg::Rect => Truncation::Rect,
            ShapeArg::Ball => Truncation::Ball {
                norm: match self.norm {
                    NormArg::L1 => Norm::L1,
                    NormArg::L2 => Norm::L2,
                },
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(
            "64".parse::<GridSize>().unwrap(),
            GridSize { n_lambda: 64, n_theta_half: 32 }
        );
        assert_eq!(
            "64x20".parse::<GridSize>().unwrap(),
            GridSize { n_lambda: 64, n_theta_half: 20 }
        );
        assert!("63".parse::<GridSize>().unwrap_err().contains("even"));
        assert!("0".parse::<GridSize>().is_err());
        assert!("64x0".parse::<GridSize>().is_err());
        assert!("big".parse::<GridSize>().is_err());
    }

    #[test]
    fn degree_lists() {
        assert_eq!("8, 16,32".parse::<Degrees>().unwrap(), Degrees(vec![8, 16, 32]));
        assert!("16,8".parse::<Degrees>().is_err());
        assert!("8,8".parse::<Degrees>().is_err());
        assert!("-1".parse::<Degrees>().is_err());
        assert!("".parse::<Degrees>().is_err());
    }
}
