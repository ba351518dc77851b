//! Row/column FFT passes over row-major `n1 × n2` complex arrays.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

/// Unnormalized DFT along `axis` (0 = x₁ rows index, 1 = x₂ columns index).
/// `Forward` uses `e^{-2πi km/n}`, `Inverse` uses `e^{+2πi km/n}`.
pub(crate) fn dft_axis(data: &mut [Complex64], n1: usize, n2: usize, axis: usize, dir: FftDirection) {
    debug_assert_eq!(data.len(), n1 * n2);
    let mut planner = FftPlanner::<f64>::new();
    if axis == 1 {
        let fft = planner.plan_fft(n2, dir);
        let scratch_len = fft.get_inplace_scratch_len();
        data.par_chunks_mut(n2).for_each_init(
            || vec![Complex64::new(0.0, 0.0); scratch_len],
            |scratch, row| fft.process_with_scratch(row, scratch),
        );
    } else {
        let fft = planner.plan_fft(n1, dir);
        let scratch_len = fft.get_inplace_scratch_len();
        let columns: Vec<Vec<Complex64>> = (0..n2)
            .into_par_iter()
            .map_init(
                || vec![Complex64::new(0.0, 0.0); scratch_len],
                |scratch, c| {
                    let mut col: Vec<Complex64> = (0..n1).map(|r| data[r * n2 + c]).collect();
                    fft.process_with_scratch(&mut col, scratch);
                    col
                },
            )
            .collect();
        for (c, col) in columns.into_iter().enumerate() {
            for (r, v) in col.into_iter().enumerate() {
                data[r * n2 + c] = v;
            }
        }
    }
}

/// Slot of frequency `xi` on an `n`-point periodic grid.
#[inline]
pub(crate) fn slot(xi: i64, n: usize) -> usize {
    xi.rem_euclid(n as i64) as usize
}
