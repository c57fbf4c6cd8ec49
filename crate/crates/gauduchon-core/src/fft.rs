//! FFT backend: multi-axis transforms over the periodic grid and the
//! wavenumber bookkeeping shared by every spectral operator.
//!
//! Determinism contract: all reductions are sequential and parallel loops
//! write disjoint output rows, so results are bit-identical for any thread
//! count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::TorusGrid;

/// Below this point count the rayon dispatch costs more than it saves.
const PAR_THRESHOLD: usize = 1 << 14;

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (len, direction == FftDirection::Forward);
    let mut guard = cache.lock().unwrap();
    guard
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(len, direction))
        .clone()
}

/// Transform every pencil along `axis`, in place.
///
/// The array is viewed as `[outer, res, inner]` with the requested axis in
/// the middle; pencils are made contiguous with a blocked transpose, batch
/// transformed, and written back.
fn axis_pass(values: &mut [Complex64], grid: &TorusGrid, axis: usize, direction: FftDirection) {
    let res = grid.res();
    let fft = plan(res, direction);
    let inner: usize = res.pow((grid.axes() - 1 - axis) as u32);
    let outer = values.len() / (res * inner);

    if inner == 1 {
        // Last axis: pencils already contiguous.
        run_rows(values, res, &fft);
        return;
    }

    let slab_len = res * inner;
    let work = |slab: &mut [Complex64], buf: &mut Vec<Complex64>| {
        // [res, inner] -> [inner, res], batch transform, and back
        transpose::transpose(slab, buf, inner, res);
        run_rows_serial(buf, res, &fft);
        transpose::transpose(buf, slab, res, inner);
    };
    if outer > 1 && values.len() >= PAR_THRESHOLD {
        values.par_chunks_mut(slab_len).for_each_init(
            || vec![Complex64::default(); slab_len],
            |buf, slab| work(slab, buf),
        );
    } else {
        let mut buf = vec![Complex64::default(); slab_len];
        for slab in values.chunks_mut(slab_len) {
            if slab.len() == slab_len && outer == 1 && slab_len >= PAR_THRESHOLD {
                // one big slab: parallelise the row batch instead
                transpose::transpose(slab, &mut buf, inner, res);
                run_rows(&mut buf, res, &fft);
                transpose::transpose(&buf, slab, res, inner);
            } else {
                work(slab, &mut buf);
            }
        }
    }
}

fn run_rows(buf: &mut [Complex64], res: usize, fft: &Arc<dyn Fft<f64>>) {
    if buf.len() >= PAR_THRESHOLD {
        // batch many short rows per task to amortise dispatch
        let rows_per_task = (8192 / res).max(1);
        let scratch_len = fft.get_inplace_scratch_len();
        buf.par_chunks_mut(res * rows_per_task).for_each_init(
            || vec![Complex64::default(); scratch_len],
            |scratch, chunk| {
                for row in chunk.chunks_mut(res) {
                    fft.process_with_scratch(row, scratch);
                }
            },
        );
    } else {
        run_rows_serial(buf, res, fft);
    }
}

fn run_rows_serial(buf: &mut [Complex64], res: usize, fft: &Arc<dyn Fft<f64>>) {
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for row in buf.chunks_mut(res) {
        fft.process_with_scratch(row, &mut scratch);
    }
}

/// Forward transform over all 2n axes (unnormalised).
pub(crate) fn forward(grid: &TorusGrid, values: &[Complex64]) -> Vec<Complex64> {
    let mut out = values.to_vec();
    for axis in 0..grid.axes() {
        axis_pass(&mut out, grid, axis, FftDirection::Forward);
    }
    out
}

/// Inverse transform over all 2n axes, normalised by 1/N.
#[cfg(test)]
pub(crate) fn inverse(grid: &TorusGrid, spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut out = spectrum.to_vec();
    inverse_in_place(grid, &mut out);
    out
}

pub(crate) fn inverse_in_place(grid: &TorusGrid, spectrum: &mut [Complex64]) {
    for axis in 0..grid.axes() {
        axis_pass(spectrum, grid, axis, FftDirection::Inverse);
    }
    let scale = 1.0 / spectrum.len() as f64;
    if spectrum.len() >= PAR_THRESHOLD {
        spectrum.par_iter_mut().for_each(|v| *v *= scale);
    } else {
        spectrum.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Signed integer wavenumber of FFT bin `m`, with the Nyquist bin mapped
/// to zero so that first-derivative symbols stay odd and real fields stay
/// real under differentiation.
pub(crate) fn signed_freq(m: usize, res: usize) -> f64 {
    if m < res / 2 {
        m as f64
    } else if m == res / 2 {
        0.0
    } else {
        m as f64 - res as f64
    }
}

/// Per-axis table of κᵢ(m) = kᵢ − √−1·k_{n+i} needs both real axes; this
/// returns the plain per-axis signed frequencies 2π·k/L used to build
/// derivative symbols.
pub(crate) fn freq_table(grid: &TorusGrid) -> Vec<f64> {
    let res = grid.res();
    (0..res)
        .map(|m| signed_freq(m, res) / grid.period())
        .collect()
}

/// Multiply a spectrum by a per-mode symbol and inverse-transform.
///
/// `symbol` receives the signed frequencies (already divided by the period)
/// of all 2n axes for the mode.
pub(crate) fn apply_symbol<F>(grid: &TorusGrid, spectrum: &[Complex64], symbol: F) -> Vec<Complex64>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let mut out = vec![Complex64::default(); spectrum.len()];
    let table = freq_table(grid);
    let axes = grid.axes();
    let res = grid.res();

    let kernel = |chunk_start: usize, chunk: &mut [Complex64]| {
        // row-major digit odometer (x¹ slowest), far cheaper than per-point
        // divisions
        let mut digits = [0usize; 6];
        let mut idx = chunk_start;
        for a in (0..axes).rev() {
            digits[a] = idx % res;
            idx /= res;
        }
        let mut k = [0.0f64; 6];
        for a in 0..axes {
            k[a] = table[digits[a]];
        }
        for (off, slot) in chunk.iter_mut().enumerate() {
            *slot = spectrum[chunk_start + off] * symbol(&k[..axes]);
            let mut a = axes;
            loop {
                if a == 0 {
                    break;
                }
                a -= 1;
                digits[a] += 1;
                if digits[a] < res {
                    k[a] = table[digits[a]];
                    break;
                }
                digits[a] = 0;
                k[a] = table[0];
            }
        }
    };

    if spectrum.len() >= PAR_THRESHOLD {
        let chunk = spectrum.len() / (rayon::current_num_threads() * 4).max(1) + 1;
        out.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(ci, c)| kernel(ci * chunk, c));
    } else {
        kernel(0, &mut out);
    }
    inverse_in_place(grid, &mut out);
    out
}
