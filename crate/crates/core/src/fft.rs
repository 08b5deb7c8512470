//! Unnormalized 2D FFTs over row-major `Array2` buffers.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

fn transform_rows(data: &mut Array2<Complex64>, fft: &dyn Fft<f64>) {
    let len = data.ncols();
    let slice = data
        .as_slice_mut()
        .expect("fft buffers are always in standard layout");
    slice.par_chunks_mut(len).for_each(|row| fft.process(row));
}

fn transform_2d(data: &mut Array2<Complex64>, direction: FftDirection) {
    let (rows, cols) = data.dim();
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft(cols, direction);
    let col_fft = planner.plan_fft(rows, direction);

    if !data.is_standard_layout() {
        *data = data.as_standard_layout().into_owned();
    }
    transform_rows(data, row_fft.as_ref());
    let mut t = data.t().as_standard_layout().into_owned();
    transform_rows(&mut t, col_fft.as_ref());
    data.assign(&t.t());
}

/// `X[k2, k1] = sum x[j2, j1] exp(-2 pi i (k1 j1 / cols + k2 j2 / rows))`.
pub(crate) fn forward_2d(data: &mut Array2<Complex64>) {
    transform_2d(data, FftDirection::Forward);
}

/// Same as [`forward_2d`] with `+i` in the exponent, no `1/N` scaling.
pub(crate) fn inverse_2d(data: &mut Array2<Complex64>) {
    transform_2d(data, FftDirection::Inverse);
}

/// Signed frequency for storage index `i` of an `n`-point transform, in `[-n/2, n/2)`.
#[cfg(test)]
fn signed_frequency(i: usize, n: usize) -> i64 {
    let (i, n) = (i as i64, n as i64);
    if i < n / 2 {
        i
    } else {
        i - n
    }
}

/// Storage index of signed frequency `k` in an `n`-point transform.
pub(crate) fn storage_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}


#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn matches_naive_dft() {
        let (rows, cols) = (6, 4);
        let x = Array2::from_shape_fn((rows, cols), |(j, k)| {
            Complex64::new((j * 3 + k) as f64 * 0.1, (j as f64 - k as f64).sin())
        });
        let mut fast = x.clone();
        forward_2d(&mut fast);
        for k2 in 0..rows {
            for k1 in 0..cols {
                let mut acc = Complex64::new(0.0, 0.0);
                for j2 in 0..rows {
                    for j1 in 0..cols {
                        let ph = -TAU
                            * ((k1 * j1) as f64 / cols as f64 + (k2 * j2) as f64 / rows as f64);
                        acc += x[[j2, j1]] * Complex64::from_polar(1.0, ph);
                    }
                }
                assert!((acc - fast[[k2, k1]]).norm() < 1e-12);
            }
        }
        inverse_2d(&mut fast);
        let n = (rows * cols) as f64;
        for (a, b) in fast.iter().zip(x.iter()) {
            assert!((a / n - b).norm() < 1e-14);
        }
    }

    #[test]
    fn frequency_indexing() {
        assert_eq!(signed_frequency(0, 8), 0);
        assert_eq!(signed_frequency(3, 8), 3);
        assert_eq!(signed_frequency(4, 8), -4);
        assert_eq!(signed_frequency(7, 8), -1);
        for k in -4..4 {
            assert_eq!(signed_frequency(storage_index(k, 8), 8), k);
        }
    }
}
