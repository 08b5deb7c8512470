use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use super::SpectralIndex;
use crate::error::{DfsError, Result};
use crate::fft::{forward_2d, storage_index};
use crate::grids::{require_even, TorusGrid};

pub const TABLE_MAGIC: &[u8; 4] = b"DFSC";
pub const TABLE_VERSION: u32 = 1;

/// Which quantity the stored values approximate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Normalization {
    /// `c_n = (2 pi)^-2 * integral over T^2 of g(x) exp(-i <n, x>) dx`
    TorusMean = 1,
}

impl Normalization {
    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            1 => Ok(Self::TorusMean),
            t => Err(DfsError::Format(format!("unknown normalization tag {t}"))),
        }
    }
}

/// Fourier coefficients for `n1 in [-N1/2, N1/2)`, `n2 in [-N2/2, N2/2)`.
///
/// Stored with rows indexed by `n2` and columns by `n1`, both ascending
/// from the most negative frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    values: Array2<Complex64>,
    normalization: Normalization,
}

impl CoefficientTable {
    pub fn from_values(values: Array2<Complex64>, normalization: Normalization) -> Result<Self> {
        let (n2, n1) = values.dim();
        require_even("n1 extent", n1)?;
        require_even("n2 extent", n2)?;
        Ok(Self { values, normalization })
    }

    pub fn zeros(n1_len: usize, n2_len: usize) -> Result<Self> {
        Self::from_values(Array2::zeros((n2_len, n1_len)), Normalization::TorusMean)
    }

    pub fn n1_len(&self) -> usize {
        self.values.ncols()
    }

    pub fn n2_len(&self) -> usize {
        self.values.nrows()
    }

    pub fn n1_min(&self) -> i64 {
        -(self.n1_len() as i64) / 2
    }

    pub fn n1_max(&self) -> i64 {
        self.n1_len() as i64 / 2 - 1
    }

    pub fn n2_min(&self) -> i64 {
        -(self.n2_len() as i64) / 2
    }

    pub fn n2_max(&self) -> i64 {
        self.n2_len() as i64 / 2 - 1
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn contains(&self, n1: i64, n2: i64) -> bool {
        (self.n1_min()..=self.n1_max()).contains(&n1) && (self.n2_min()..=self.n2_max()).contains(&n2)
    }

    fn slot(&self, n1: i64, n2: i64) -> (usize, usize) {
        ((n2 - self.n2_min()) as usize, (n1 - self.n1_min()) as usize)
    }

    pub fn get(&self, n1: i64, n2: i64) -> Option<Complex64> {
        self.contains(n1, n2).then(|| self.values[self.slot(n1, n2)])
    }

    /// Value at `n` with both indices wrapped into the stored range,
    /// i.e. the aliased DFT coefficient.
    pub fn get_wrapped(&self, n1: i64, n2: i64) -> Complex64 {
        let wrap = |n: i64, len: usize, min: i64| (n - min).rem_euclid(len as i64) + min;
        let a = wrap(n1, self.n1_len(), self.n1_min());
        let b = wrap(n2, self.n2_len(), self.n2_min());
        self.values[self.slot(a, b)]
    }

    pub fn set(&mut self, n1: i64, n2: i64, value: Complex64) -> Result<()> {
        if !self.contains(n1, n2) {
            return Err(DfsError::OutOfRange(format!("({n1}, {n2})")));
        }
        let s = self.slot(n1, n2);
        self.values[s] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (SpectralIndex, Complex64)> + '_ {
        let (n1_min, n2_min) = (self.n1_min(), self.n2_min());
        self.values.indexed_iter().map(move |((r, c), v)| {
            (SpectralIndex::new(c as i64 + n1_min, r as i64 + n2_min), *v)
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |c_n - (-1)^{n1} c_{M(n)}| / max |c_n|` with `M(n)` wrapped into
    /// the table (the Nyquist row maps to itself).
    pub fn bmc_asymmetry(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        self.iter()
            .map(|(n, c)| (c - n.glide_sign() * self.get_wrapped(n.n1, -n.n2)).norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// `max |c_{-n} - conj(c_n)| / max |c_n|`, zero for tables of real grids.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        self.iter()
            .map(|(n, c)| (self.get_wrapped(-n.n1, -n.n2) - c.conj()).norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Sum of `|c_n|` over all stored indices outside `keep`.
    pub fn tail_sum(&self, keep: impl Fn(i64, i64) -> bool) -> f64 {
        self.iter()
            .filter(|(n, _)| !keep(n.n1, n.n2))
            .map(|(_, c)| c.norm())
            .sum()
    }
}

/// Trapezoidal (equivalently DFT) approximation of the Fourier coefficients
/// `c_n = (N1 N2)^-1 sum_{j,k} g(x_jk) exp(-i <n, x_jk>)`.
///
/// Exact up to rounding for trigonometric polynomials whose frequencies lie
/// strictly inside the Nyquist range; higher frequencies alias.
pub fn compute_coefficients(g: &TorusGrid) -> Result<CoefficientTable> {
    let (n_theta, n_lambda) = (g.n_theta(), g.n_lambda());
    require_even("n_lambda", n_lambda)?;
    require_even("n_theta", n_theta)?;
    let mut buf = g.values().to_owned();
    forward_2d(&mut buf);
    let scale = 1.0 / (n_theta * n_lambda) as f64;
    let (h1, h2) = (n_lambda as i64 / 2, n_theta as i64 / 2);
    // grid starts at -pi, so exp(-i n (-pi)) = (-1)^n
    let values = Array2::from_shape_fn((n_theta, n_lambda), |(r, c)| {
        let n1 = c as i64 - h1;
        let n2 = r as i64 - h2;
        let sign = if (n1 + n2) % 2 == 0 { scale } else { -scale };
        buf[[storage_index(n2, n_theta), storage_index(n1, n_lambda)]] * sign
    });
    CoefficientTable::from_values(values, Normalization::TorusMean)
}

pub fn write_table<W: Write>(table: &CoefficientTable, mut w: W) -> Result<()> {
    let mut buf = Vec::with_capacity(4 + 4 + 32 + 1 + 16 * table.values.len());
    buf.extend_from_slice(TABLE_MAGIC);
    buf.extend_from_slice(&TABLE_VERSION.to_le_bytes());
    for v in [table.n1_min(), table.n1_max(), table.n2_min(), table.n2_max()] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.push(table.normalization as u8);
    for v in table.values.iter() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

/// Reads the `DFSC` layout: magic, `u32` version, inclusive index ranges
/// `n1_min n1_max n2_min n2_max` as `i64`, normalization tag `u8`, then
/// row-major (`n2` outer) complex values as little-endian `f64` pairs.
pub fn read_table<R: Read>(mut r: R) -> Result<CoefficientTable> {
    let mut header = [0u8; 41];
    r.read_exact(&mut header)
        .map_err(|e| DfsError::Format(format!("truncated header: {e}")))?;
    if &header[0..4] != TABLE_MAGIC {
        return Err(DfsError::Format("bad magic, expected DFSC".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != TABLE_VERSION {
        return Err(DfsError::Format(format!("unsupported table version {version}")));
    }
    let field = |i: usize| i64::from_le_bytes(header[8 + 8 * i..16 + 8 * i].try_into().unwrap());
    let (n1_min, n1_max, n2_min, n2_max) = (field(0), field(1), field(2), field(3));
    let extent = |min: i64, max: i64| -> Result<usize> {
        let len = max
            .checked_sub(min)
            .and_then(|d| d.checked_add(1))
            .filter(|&l| l > 0 && min == -l / 2)
            .ok_or_else(|| {
                DfsError::Dimension(format!("index range [{min}, {max}] is not of the form [-N/2, N/2)"))
            })?;
        usize::try_from(len).map_err(|_| DfsError::Dimension("range too large".into()))
    };
    let n1_len = extent(n1_min, n1_max)?;
    let n2_len = extent(n2_min, n2_max)?;
    require_even("n1 extent", n1_len)?;
    require_even("n2 extent", n2_len)?;
    let normalization = Normalization::from_tag(header[40])?;
    let count = n1_len
        .checked_mul(n2_len)
        .and_then(|c| c.checked_mul(16))
        .ok_or_else(|| DfsError::Dimension("table size overflows".into()))?;
    let mut payload = Vec::new();
    r.take(count as u64 + 1).read_to_end(&mut payload)?;
    if payload.len() != count {
        return Err(DfsError::Format(format!(
            "payload has {} bytes, expected {count}",
            payload.len()
        )));
    }
    let values: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    CoefficientTable::from_values(
        Array2::from_shape_vec((n2_len, n1_len), values).expect("shape"),
        normalization,
    )
}

pub fn table_io_write(table: &CoefficientTable, path: impl AsRef<Path>) -> Result<()> {
    write_table(table, BufWriter::new(File::create(path)?))
}

pub fn table_io_read(path: impl AsRef<Path>) -> Result<CoefficientTable> {
    read_table(BufReader::new(File::open(path)?))
}
