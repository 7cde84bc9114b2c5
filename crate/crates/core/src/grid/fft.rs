use std::cell::RefCell;

use rustfft::FftPlanner;

use super::C64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized FFT along every axis of a row-major `n^dim` array.
fn fft_all_axes(data: &mut [C64], n: usize, dim: usize, inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    });
    // Rows are contiguous: the last axis transforms in place.
    plan.process(data);
    if dim == 2 {
        let mut column = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                column[r] = data[r * n + c];
            }
            plan.process(&mut column);
            for r in 0..n {
                data[r * n + c] = column[r];
            }
        }
    }
}

/// Index map between centered order (`k = m - n/2`) and FFT order (`k mod n`).
/// Because `n/2` is even, `(-1)^k = (-1)^m`.
fn fft_slot(m: usize, n: usize) -> usize {
    (m + n / 2) % n
}

fn flat_len(n: usize, dim: usize) -> usize {
    n.pow(dim as u32)
}

fn parity(i: usize, n: usize, dim: usize) -> f64 {
    let s = if dim == 1 { i } else { i / n + i % n };
    if s % 2 == 0 { 1.0 } else { -1.0 }
}

fn slot(i: usize, n: usize, dim: usize) -> usize {
    if dim == 1 {
        fft_slot(i, n)
    } else {
        fft_slot(i / n, n) * n + fft_slot(i % n, n)
    }
}

pub(super) fn forward_centered(values: &[C64], n: usize, dim: usize, weight: f64) -> Vec<C64> {
    let mut work = values.to_vec();
    fft_all_axes(&mut work, n, dim, false);
    (0..flat_len(n, dim))
        .map(|i| work[slot(i, n, dim)] * (weight * parity(i, n, dim)))
        .collect()
}

pub(super) fn inverse_centered(values: &[C64], n: usize, dim: usize, weight: f64) -> Vec<C64> {
    let mut work = vec![C64::new(0.0, 0.0); values.len()];
    for (i, &v) in values.iter().enumerate() {
        work[slot(i, n, dim)] = v * (weight * parity(i, n, dim));
    }
    fft_all_axes(&mut work, n, dim, true);
    work
}

/// Forward transform of an array on a lattice that may be coarser than any
/// [`super::Grid`] allows; used by symbol reduction on the strided y-lattice.
pub(crate) fn forward_raw(values: &[C64], n: usize, dim: usize, weight: f64) -> Vec<C64> {
    forward_centered(values, n, dim, weight)
}
