//! Binary grid files.
//!
//! Layout (all little-endian): magic `DFSG`, version `u32`, `n_lambda u64`,
//! `n_theta u64`, `bmc_flag u8`, then `n_theta * n_lambda` row-major
//! complex samples as `(re f64, im f64)` pairs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use super::{require_even, TorusGrid};
use crate::error::{DfsError, Result};

pub const GRID_MAGIC: &[u8; 4] = b"DFSG";
pub const GRID_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 8 + 1;

pub fn write_grid<W: Write>(grid: &TorusGrid, mut w: W) -> Result<()> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * grid.values().len());
    buf.extend_from_slice(GRID_MAGIC);
    buf.extend_from_slice(&GRID_VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.n_lambda() as u64).to_le_bytes());
    buf.extend_from_slice(&(grid.n_theta() as u64).to_le_bytes());
    buf.push(u8::from(grid.is_bmc()));
    for v in grid.values().iter() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_grid<R: Read>(mut r: R) -> Result<TorusGrid> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|e| DfsError::Format(format!("truncated header: {e}")))?;
    if &header[0..4] != GRID_MAGIC {
        return Err(DfsError::Format("bad magic, expected DFSG".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != GRID_VERSION {
        return Err(DfsError::Format(format!("unsupported grid version {version}")));
    }
    let n_lambda = u64::from_le_bytes(header[8..16].try_into().unwrap());
    let n_theta = u64::from_le_bytes(header[16..24].try_into().unwrap());
    let bmc = match header[24] {
        0 => false,
        1 => true,
        b => return Err(DfsError::Format(format!("bmc flag must be 0 or 1, got {b}"))),
    };
    let n_lambda = usize::try_from(n_lambda)
        .map_err(|_| DfsError::Dimension(format!("n_lambda {n_lambda} too large")))?;
    let n_theta = usize::try_from(n_theta)
        .map_err(|_| DfsError::Dimension(format!("n_theta {n_theta} too large")))?;
    require_even("n_lambda", n_lambda)?;
    require_even("n_theta", n_theta)?;
    let count = n_lambda
        .checked_mul(n_theta)
        .and_then(|c| c.checked_mul(16))
        .ok_or_else(|| DfsError::Dimension("grid size overflows".into()))?;

    let mut payload = Vec::new();
    r.take(count as u64 + 1).read_to_end(&mut payload)?;
    if payload.len() < count {
        return Err(DfsError::Format(format!(
            "truncated payload: expected {count} bytes, found {}",
            payload.len()
        )));
    }
    if payload.len() > count {
        return Err(DfsError::Format("trailing bytes after payload".into()));
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
    let values = Array2::from_shape_vec((n_theta, n_lambda), values).expect("shape");
    TorusGrid::new(values, bmc)
}

pub fn grid_io_write(grid: &TorusGrid, path: impl AsRef<Path>) -> Result<()> {
    write_grid(grid, BufWriter::new(File::create(path)?))
}

pub fn grid_io_read(path: impl AsRef<Path>) -> Result<TorusGrid> {
    read_grid(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::{dfs_double, sample_sphere};
    use crate::testfns::presets;
    use std::time::Instant;

    fn sample() -> TorusGrid {
        dfs_double(&sample_sphere(&presets::f3_combo(), 16, 8).unwrap()).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let g = sample();
        let mut buf = Vec::new();
        write_grid(&g, &mut buf).unwrap();
        assert_eq!(buf.len(), HEADER_LEN + 16 * 16 * 16);
        let back = read_grid(buf.as_slice()).unwrap();
        assert!(back.is_bmc());
        for (a, b) in g.values().iter().zip(back.values().iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn odd_theta_is_a_dimension_error() {
        let mut buf = Vec::new();
        write_grid(&sample(), &mut buf).unwrap();
        buf[16..24].copy_from_slice(&15u64.to_le_bytes());
        assert!(matches!(
            read_grid(buf.as_slice()),
            Err(DfsError::OddDimension { what: "n_theta", value: 15 })
        ));
    }

    #[test]
    fn malformed_inputs() {
        let mut buf = Vec::new();
        write_grid(&sample(), &mut buf).unwrap();
        assert!(matches!(read_grid(&buf[..10]), Err(DfsError::Format(_))));
        assert!(matches!(read_grid(&buf[..buf.len() - 3]), Err(DfsError::Format(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_grid(bad.as_slice()), Err(DfsError::Format(_))));
        let mut longer = buf.clone();
        longer.push(0);
        assert!(read_grid(longer.as_slice()).is_err());
        // flipping one sample breaks the BMC flag
        let mut broken = buf;
        broken[HEADER_LEN + 16 * 5] ^= 0x01;
        assert!(read_grid(broken.as_slice()).is_err());
    }

    #[test]
    fn large_grid_round_trip_on_disk() {
        let values = Array2::from_shape_fn((2400, 2400), |(j, k)| {
            Complex64::new(j as f64 * 1e-3, k as f64)
        });
        let g = TorusGrid::new(values, false).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("big.dfsg");
        let start = Instant::now();
        grid_io_write(&g, &path).unwrap();
        let back = grid_io_read(&path).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        assert_eq!(back, g);
        assert!(elapsed < 1.0, "round trip took {elapsed} s");
    }
}
