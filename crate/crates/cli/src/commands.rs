use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use dfs_core::analysis::{
    decay_report, error_table, fit_rate, hoelder_quotient_check, sobolev_probe, zeta_tail_sum, Check,
    DecayOptions, ErrorTableOptions, ErrorTableRow,
};
use dfs_core::grids::{dfs_double, grid_io_read, grid_io_write, sample_sphere};
use dfs_core::spectral::{
    compute_coefficients, dfs_fourier_sum_latlon, gram_matrix, table_io_read, table_io_write, BasisFunction,
    CoefficientTable, SpectralIndex,
};
use dfs_core::SphericalFunction;
use serde::Serialize;

use crate::args::{Degrees, Format, FunctionArgs, GridSize, TruncationArgs};
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(bytes)?;
            w.flush()?;
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Sample grid: N (N x N/2) or NxM
    #[arg(long, default_value = "256")]
    pub grid: GridSize,
    /// Output DFSG grid file
    #[arg(long)]
    pub out: PathBuf,
}

pub fn transform(a: &TransformArgs) -> CliResult<()> {
    let f = a.function.load()?;
    let grid = dfs_double(&sample_sphere(&f, a.grid.n_lambda, a.grid.n_theta_half)?)?;
    let dev = grid.bmc_deviation();
    grid_io_write(&grid, &a.out)?;
    println!(
        "wrote {}x{} torus grid to {}",
        grid.n_theta(),
        grid.n_lambda(),
        a.out.display()
    );
    if dev.is_exact() {
        println!("bmc: exact");
    } else {
        println!("bmc: glide deviation {:.3e}, pole row spread {:.3e}", dev.glide, dev.pole_rows);
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Read a DFSG grid instead of sampling a function
    #[arg(long, conflicts_with_all = ["preset", "spec"])]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "256")]
    pub grid: GridSize,
    /// Output DFSC coefficient file
    #[arg(long)]
    pub out: PathBuf,
}

pub fn coeffs(a: &CoeffsArgs) -> CliResult<()> {
    let grid = match &a.input {
        Some(path) => grid_io_read(path)?,
        None => {
            let f = a.function.load()?;
            dfs_double(&sample_sphere(&f, a.grid.n_lambda, a.grid.n_theta_half)?)?
        }
    };
    let table = compute_coefficients(&grid)?;
    table_io_write(&table, &a.out)?;
    println!(
        "wrote coefficients n1 in [{}, {}], n2 in [{}, {}] to {}",
        table.n1_min(),
        table.n1_max(),
        table.n2_min(),
        table.n2_max(),
        a.out.display()
    );
    println!("bmc asymmetry: {:.3e}", table.bmc_asymmetry());
    Ok(())
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Use a DFSC coefficient file instead of sampling the function
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Truncation degree h
    #[arg(long)]
    pub degree: i64,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    /// Coefficient grid (default: 4h, at least 8)
    #[arg(long)]
    pub grid: Option<GridSize>,
    /// Evaluation grid
    #[arg(long, default_value = "256")]
    pub eval_grid: GridSize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Serialize)]
struct ApproxSummary {
    schema_version: u32,
    h: i64,
    shape: String,
    n_terms: usize,
    eval_grid: [usize; 2],
    max_error: Option<f64>,
}

pub fn approx(a: &ApproxArgs) -> CliResult<()> {
    if a.degree < 0 {
        return Err(CliError::Usage("degree must be non-negative".into()));
    }
    let omega = a.truncation.truncation().set(a.degree);
    let (table, f): (CoefficientTable, Option<_>) = match &a.coeffs {
        Some(path) => (table_io_read(path)?, None),
        None => {
            let f = a.function.load()?;
            let g = a.grid.unwrap_or_else(|| {
                let n = (4 * a.degree as usize).max(8);
                GridSize {
                    n_lambda: n + n % 2,
                    n_theta_half: (n + n % 2) / 2,
                }
            });
            let t = compute_coefficients(&dfs_double(&sample_sphere(&f, g.n_lambda, g.n_theta_half)?)?)?;
            (t, Some(f))
        }
    };
    let e = a.eval_grid;
    let approx = dfs_fourier_sum_latlon(&table, &omega, e.n_lambda, e.n_theta_half)?;
    let exact = match &f {
        Some(f) => Some(sample_sphere(f, e.n_lambda, e.n_theta_half)?),
        None => None,
    };
    let bytes = match a.format {
        Format::Json => to_json(&ApproxSummary {
            schema_version: SCHEMA_VERSION,
            h: a.degree,
            shape: omega.shape_tag(),
            n_terms: omega.len(),
            eval_grid: [e.n_lambda, e.n_theta_half],
            max_error: exact.as_ref().map(|x| x.max_abs_diff(&approx)).transpose()?,
        })?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["theta", "lambda", "re", "im", "abs_error"])?;
            for j in 0..=e.n_theta_half {
                for k in 0..e.n_lambda {
                    let v = approx.values()[[j, k]];
                    let err = exact.as_ref().map(|x| (x.values()[[j, k]] - v).norm());
                    w.write_record([
                        format!("{:e}", approx.theta(j)),
                        format!("{:e}", approx.lambda(k)),
                        format!("{:e}", v.re),
                        format!("{:e}", v.im),
                        err.map(|x| format!("{x:e}")).unwrap_or_default(),
                    ])?;
                }
            }
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))?
        }
    };
    emit(a.out.as_deref(), &bytes)
}

#[derive(Debug, Args)]
pub struct ErrorTableArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Comma separated ascending degrees
    #[arg(long)]
    pub degrees: Degrees,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    /// Add a spherical harmonics column
    #[arg(long)]
    pub sh: bool,
    #[arg(long, default_value = "256")]
    pub eval_grid: GridSize,
    /// Coefficient grid size as a multiple of the largest degree
    #[arg(long, default_value_t = 4)]
    pub oversampling: usize,
    /// Fill the elapsed_s column (makes output run-dependent)
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Serialize)]
struct ErrorTableReport<'a> {
    schema_version: u32,
    rows: Vec<JsonRow<'a>>,
    slope: Option<f64>,
    sh_slope: Option<f64>,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    h: i64,
    shape: &'a str,
    n_terms: usize,
    max_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sh_max_error: Option<f64>,
}

fn sh_rows(rows: &[ErrorTableRow]) -> Vec<ErrorTableRow> {
    rows.iter()
        .map(|r| ErrorTableRow {
            max_error: r.sh_max_error.unwrap_or(f64::NAN),
            ..r.clone()
        })
        .collect()
}

pub fn error_table_cmd(a: &ErrorTableArgs) -> CliResult<()> {
    if a.oversampling < 2 {
        return Err(CliError::Usage(format!(
            "oversampling factor must be at least 2, got {}",
            a.oversampling
        )));
    }
    let f = a.function.load()?;
    let opts = ErrorTableOptions {
        truncation: a.truncation.truncation(),
        eval: a.eval_grid.into(),
        oversampling: a.oversampling,
        compare_sh: a.sh,
    };
    let rows = error_table(&f, &a.degrees.0, &opts)?;
    let footer = rows.len() >= 3;
    let slope = footer.then(|| fit_rate(&rows).ok()).flatten();
    let sh_slope = (footer && a.sh).then(|| fit_rate(&sh_rows(&rows)).ok()).flatten();

    let bytes = match a.format {
        Format::Json => to_json(&ErrorTableReport {
            schema_version: SCHEMA_VERSION,
            rows: rows
                .iter()
                .map(|r| JsonRow {
                    h: r.h,
                    shape: &r.shape,
                    n_terms: r.n_terms,
                    max_error: r.max_error,
                    elapsed_s: a.timing.then_some(r.elapsed),
                    sh_max_error: r.sh_max_error,
                })
                .collect(),
            slope,
            sh_slope,
        })?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["h", "shape", "n_terms", "max_error", "elapsed_s"];
            if a.sh {
                header.push("sh_max_error");
            }
            w.write_record(&header)?;
            for r in &rows {
                let mut rec = vec![
                    r.h.to_string(),
                    r.shape.clone(),
                    r.n_terms.to_string(),
                    format!("{:e}", r.max_error),
                    if a.timing { format!("{:.6}", r.elapsed) } else { String::new() },
                ];
                if a.sh {
                    rec.push(r.sh_max_error.map(|e| format!("{e:e}")).unwrap_or_default());
                }
                w.write_record(&rec)?;
            }
            if footer {
                let fmt = |s: Option<f64>| s.map(|x| format!("{x:.6}")).unwrap_or_default();
                let mut rec = vec![
                    "slope".to_string(),
                    rows[0].shape.clone(),
                    String::new(),
                    fmt(slope),
                    String::new(),
                ];
                if a.sh {
                    rec.push(fmt(sh_slope));
                }
                w.write_record(&rec)?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))?
        }
    };
    emit(a.out.as_deref(), &bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    BmcSymmetry,
    Orthogonality,
    Decay,
    Zeta,
    Sobolev,
    Hoelder,
}

impl CheckKind {
    fn name(self) -> &'static str {
        match self {
            CheckKind::BmcSymmetry => "bmc-symmetry",
            CheckKind::Orthogonality => "orthogonality",
            CheckKind::Decay => "decay",
            CheckKind::Zeta => "zeta",
            CheckKind::Sobolev => "sobolev",
            CheckKind::Hoelder => "hoelder",
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: CheckKind,
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Sample grid for bmc-symmetry and decay (default 1024)
    #[arg(long)]
    pub grid: Option<GridSize>,
    /// Smoothness order (zeta default 2, decay default 3)
    #[arg(long)]
    pub k: Option<u32>,
    /// Hoelder exponent (zeta default 1, decay default 0.9, hoelder default 0.5)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Seed for random pair sampling
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random pairs for hoelder
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    /// Quadrature nodes per direction for orthogonality
    #[arg(long, default_value_t = 512)]
    pub n_quad: usize,
    /// Index box |n1|, n2 <= B for orthogonality
    #[arg(long = "box", default_value_t = 4)]
    pub index_box: i64,
    /// Include b_(n1,0) with odd n1, which are not BMC
    #[arg(long)]
    pub include_axis_modes: bool,
    /// l1 radius for zeta
    #[arg(long, default_value_t = 10_000)]
    pub radius: u64,
    /// Shell range for decay
    #[arg(long, default_value_t = 8)]
    pub r_min: i64,
    #[arg(long, default_value_t = 128)]
    pub r_max: i64,
    /// Flag decay shells whose rescaled maximum exceeds this
    #[arg(long)]
    pub cap: Option<f64>,
    /// Descending cutoffs for sobolev, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])]
    pub epsilons: Vec<f64>,
    /// JSON report path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifyReport {
    schema_version: u32,
    check: &'static str,
    passed: bool,
    assertions: Vec<Check>,
    details: serde_json::Value,
}

pub fn verify(a: &VerifyArgs) -> CliResult<()> {
    let (assertions, details) = match a.check {
        CheckKind::BmcSymmetry => verify_bmc(a)?,
        CheckKind::Orthogonality => verify_orthogonality(a)?,
        CheckKind::Decay => verify_decay(a)?,
        CheckKind::Zeta => verify_zeta(a)?,
        CheckKind::Sobolev => verify_sobolev(a)?,
        CheckKind::Hoelder => verify_hoelder(a)?,
    };
    let passed = assertions.iter().all(|c| c.passed);
    for c in &assertions {
        eprintln!(
            "{} {}: {:e} (limit {:e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.limit
        );
    }
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        check: a.check.name(),
        passed,
        assertions,
        details,
    };
    emit(a.out.as_deref(), &to_json(&report)?)?;
    if passed {
        Ok(())
    } else {
        let failing: Vec<&str> = report.assertions.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(CliError::Assertion(format!("{}: {}", a.check.name(), failing.join(", "))))
    }
}

type Verified = (Vec<Check>, serde_json::Value);

fn sample_grid(a: &VerifyArgs) -> GridSize {
    a.grid.unwrap_or(GridSize {
        n_lambda: 1024,
        n_theta_half: 512,
    })
}

fn verify_bmc(a: &VerifyArgs) -> CliResult<Verified> {
    let f = a.function.load()?;
    let g = sample_grid(a);
    let grid = dfs_double(&sample_sphere(&f, g.n_lambda, g.n_theta_half)?)?;
    let dev = grid.bmc_deviation();
    let asym = compute_coefficients(&grid)?.bmc_asymmetry();
    Ok((
        vec![
            Check::at_most("max_relative_asymmetry", asym, 1e-10),
            Check::at_most("grid_glide_deviation", dev.glide, 0.0),
        ],
        serde_json::json!({
            "grid": [g.n_lambda, g.n_theta_half],
            "max_relative_asymmetry": asym,
            "grid_deviation": dev,
        }),
    ))
}

fn verify_orthogonality(a: &VerifyArgs) -> CliResult<Verified> {
    if a.index_box < 0 {
        return Err(CliError::Usage("index box must be non-negative".into()));
    }
    let b = a.index_box;
    let basis: Vec<BasisFunction> = (-b..=b)
        .flat_map(|n1| (0..=b).map(move |n2| SpectralIndex::new(n1, n2)))
        .filter(|n| a.include_axis_modes || !(n.n2 == 0 && n.n1 % 2 != 0))
        .map(BasisFunction::new)
        .collect::<Result<_, _>>()?;
    let refs: Vec<&dyn SphericalFunction> = basis.iter().map(|f| f as &dyn SphericalFunction).collect();
    let g = gram_matrix(&refs, a.n_quad)?;
    let (mut off, mut diag) = (0.0f64, 0.0f64);
    for (i, bi) in basis.iter().enumerate() {
        for j in 0..basis.len() {
            if i == j {
                let expect = if bi.index().n2 == 0 { 2.0 * PI * PI } else { 4.0 * PI * PI };
                diag = diag.max((g[[i, j]] - expect).norm());
            } else {
                off = off.max(g[[i, j]].norm());
            }
        }
    }
    Ok((
        vec![
            Check::at_most("max_off_diagonal", off, 1e-10),
            Check::at_most("max_diagonal_error", diag, 1e-8),
        ],
        serde_json::json!({
            "n_functions": basis.len(),
            "n_quad": a.n_quad,
            "index_box": b,
            "include_axis_modes": a.include_axis_modes,
        }),
    ))
}

fn verify_decay(a: &VerifyArgs) -> CliResult<Verified> {
    let f = a.function.load()?;
    let g = sample_grid(a);
    let k = a.k.unwrap_or(3);
    let alpha = a.alpha.unwrap_or(0.9);
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(CliError::Usage(format!("alpha = {alpha} must lie in (0, 1]")));
    }
    if a.r_min < 1 || a.r_max < a.r_min {
        return Err(CliError::Usage("shell range must satisfy 1 <= r-min <= r-max".into()));
    }
    let table = compute_coefficients(&dfs_double(&sample_sphere(&f, g.n_lambda, g.n_theta_half)?)?)?;
    let r = decay_report(
        &table,
        k,
        alpha,
        &DecayOptions {
            min_radius: a.r_min,
            max_radius: Some(a.r_max),
            cap: a.cap,
        },
    );
    let exponent = k as f64 + alpha;
    let assertions = vec![
        Check::at_most("slope", r.slope, -exponent),
        Check::at_least("pairwise_non_increasing_fraction", r.pairwise_non_increasing_fraction, 0.6),
        Check::at_most("flagged_shells", r.flagged.len() as f64, 0.0),
    ];
    let mut details = serde_json::to_value(&r)?;
    details["slope"] = serde_json::json!(finite_or_none(r.slope));
    Ok((assertions, details))
}

fn verify_zeta(a: &VerifyArgs) -> CliResult<Verified> {
    let k = a.k.unwrap_or(2);
    let alpha = a.alpha.unwrap_or(1.0);
    let z = zeta_tail_sum(k, alpha, a.radius)?;
    let mut radii: Vec<u64> = std::iter::successors(Some(1u64), |r| r.checked_mul(10))
        .take_while(|&r| r < a.radius)
        .collect();
    radii.push(a.radius);
    let sums: Vec<f64> = radii
        .iter()
        .map(|&r| zeta_tail_sum(k, alpha, r).map(|t| t.partial_sum))
        .collect::<Result<_, _>>()?;
    let drops = sums.windows(2).filter(|w| w[1] < w[0]).count();
    Ok((
        vec![
            Check::at_least("gap_non_negative", z.gap, 0.0),
            Check::at_most("gap_within_tail_bound", z.gap, z.tail_bound),
            Check::at_most("partial_sum_decreases", drops as f64, 0.0),
        ],
        serde_json::json!({ "tail": z, "radii": radii, "partial_sums": sums }),
    ))
}

fn verify_sobolev(a: &VerifyArgs) -> CliResult<Verified> {
    let r = sobolev_probe(&a.epsilons)?;
    Ok((r.checks.clone(), serde_json::to_value(&r)?))
}

fn verify_hoelder(a: &VerifyArgs) -> CliResult<Verified> {
    let f = a.function.load()?;
    let alpha = a.alpha.unwrap_or(0.5);
    let r = hoelder_quotient_check(&f, alpha, a.pairs, a.seed)?;
    Ok((
        vec![Check::at_most("violations", r.violations as f64, 0.0)],
        serde_json::to_value(&r)?,
    ))
}
