//! FFT-backed power-series kernels and grid evaluation, built on rustfft.
//!
//! The exponential kernel solves the first-derivative recursion
//! m c_m = sum_k kernel_k c_{m-k} (kernel_k = k g_k) by divide and conquer,
//! grouping the cross-block contributions into FFT convolutions. This
//! computes the same sums as the quadratic recursion, so it inherits its
//! numerical behaviour; Newton iteration on exp/log was rejected because the
//! truncated exponential of a random series routinely has roots inside the
//! unit disk, which makes its formal inverse blow up and destroys the
//! cancellation budget.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| match dir {
        FftDirection::Forward => p.borrow_mut().plan_fft_forward(len),
        FftDirection::Inverse => p.borrow_mut().plan_fft_inverse(len),
    })
}

fn fft_forward(buf: &mut [Complex64]) {
    plan(buf.len(), FftDirection::Forward).process(buf);
}

fn fft_inverse_normalized(buf: &mut [Complex64]) {
    plan(buf.len(), FftDirection::Inverse).process(buf);
    let scale = 1.0 / buf.len() as f64;
    for x in buf.iter_mut() {
        *x *= scale;
    }
}

/// Product of two series, truncated to `out_len` coefficients.
pub fn mul_truncated(a: &[Complex64], b: &[Complex64], out_len: usize) -> Vec<Complex64> {
    let an = a.len().min(out_len);
    let bn = b.len().min(out_len);
    if an == 0 || bn == 0 || out_len == 0 {
        return vec![Complex64::default(); out_len];
    }
    if an.min(bn) <= 32 || an + bn <= 128 {
        let mut out = vec![Complex64::default(); out_len];
        for (i, &ai) in a.iter().enumerate().take(an) {
            let jmax = (out_len - i).min(bn);
            for j in 0..jmax {
                out[i + j] += ai * b[j];
            }
        }
        return out;
    }
    let full = an + bn - 1;
    let size = full.next_power_of_two();
    let mut fa = vec![Complex64::default(); size];
    fa[..an].copy_from_slice(&a[..an]);
    let mut fb = vec![Complex64::default(); size];
    fb[..bn].copy_from_slice(&b[..bn]);
    fft_forward(&mut fa);
    fft_forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft_inverse_normalized(&mut fa);
    fa.truncate(out_len);
    fa.resize(out_len, Complex64::default());
    fa
}

/// Block size below which the divide-and-conquer solver finishes with the
/// plain schoolbook recursion.
const EXP_BASE_BLOCK: usize = 128;

struct ExpSolver<'a> {
    /// kernel[k] = k * sqrt(theta) * g_k; kernel[0] = 0.
    kernel: &'a [Complex64],
    /// Highest index with a nonzero kernel entry (restricted generators
    /// keep convolutions short).
    kernel_top: usize,
    coeffs: Vec<Complex64>,
    /// acc[m] accumulates sum_k kernel_k c_{m-k} over finalized c's.
    acc: Vec<Complex64>,
    /// Forward FFTs of kernel[1..=b] keyed by (b, fft size).
    kernel_fft: HashMap<(usize, usize), Arc<Vec<Complex64>>>,
}

impl<'a> ExpSolver<'a> {
    fn solve(&mut self, lo: usize, hi: usize) {
        if hi - lo <= EXP_BASE_BLOCK {
            for m in lo..hi {
                let v = self.acc[m] / m as f64;
                self.coeffs[m] = v;
                let reach = (hi - m - 1).min(self.kernel_top);
                for k in 1..=reach {
                    self.acc[m + k] += self.kernel[k] * v;
                }
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        self.solve(lo, mid);
        self.push_block(lo, mid, hi);
        self.solve(mid, hi);
    }

    /// Add the contribution of c[lo..mid) to acc[mid..hi) by one convolution
    /// with the kernel slice kernel[1..hi-lo).
    fn push_block(&mut self, lo: usize, mid: usize, hi: usize) {
        let a_len = mid - lo;
        let b_len = (hi - lo - 1).min(self.kernel_top);
        if b_len == 0 {
            return;
        }
        let full = a_len + b_len - 1;
        if full < mid - lo {
            return;
        }
        if a_len.min(b_len) <= 32 {
            for m in mid..hi {
                let mut s = Complex64::default();
                for j in lo..mid {
                    let k = m - j;
                    if k <= b_len {
                        s += self.coeffs[j] * self.kernel[k];
                    }
                }
                self.acc[m] += s;
            }
            return;
        }
        let size = full.next_power_of_two();
        let kernel_fft = self.kernel_fft_for(b_len, size);
        let mut fa = vec![Complex64::default(); size];
        fa[..a_len].copy_from_slice(&self.coeffs[lo..mid]);
        fft_forward(&mut fa);
        for (x, y) in fa.iter_mut().zip(kernel_fft.iter()) {
            *x *= y;
        }
        fft_inverse_normalized(&mut fa);
        // conv index u corresponds to target m = lo + 1 + u.
        for m in mid..hi {
            let u = m - lo - 1;
            if u < full {
                self.acc[m] += fa[u];
            }
        }
    }

    fn kernel_fft_for(&mut self, b_len: usize, size: usize) -> Arc<Vec<Complex64>> {
        if let Some(hit) = self.kernel_fft.get(&(b_len, size)) {
            return Arc::clone(hit);
        }
        let mut fb = vec![Complex64::default(); size];
        fb[..b_len].copy_from_slice(&self.kernel[1..=b_len]);
        fft_forward(&mut fb);
        let arc = Arc::new(fb);
        self.kernel_fft.insert((b_len, size), Arc::clone(&arc));
        arc
    }
}

/// exp of g (g[0] == 0) to `len` coefficients via the divide-and-conquer
/// recursion solver; O(len log^2 len). The constant term is exactly 1.
pub fn exp_series_fft(g: &[Complex64], len: usize) -> Vec<Complex64> {
    if len == 0 {
        return Vec::new();
    }
    debug_assert!(g.is_empty() || g[0].norm() == 0.0);
    let kernel: Vec<Complex64> = (0..len)
        .map(|k| {
            if k < g.len() {
                g[k] * k as f64
            } else {
                Complex64::default()
            }
        })
        .collect();
    let kernel_top = kernel
        .iter()
        .rposition(|x| x.norm_sqr() > 0.0)
        .unwrap_or(0);
    let mut solver = ExpSolver {
        kernel: &kernel,
        kernel_top,
        // acc starts at kernel * c_0 with c_0 = 1.
        acc: kernel.clone(),
        coeffs: vec![Complex64::default(); len],
        kernel_fft: HashMap::new(),
    };
    solver.coeffs[0] = Complex64::new(1.0, 0.0);
    if len > 1 {
        solver.solve(1, len);
    }
    solver.coeffs
}

/// Evaluate the trigonometric polynomial sum_l coeffs[l] e^{i l theta} on the
/// uniform grid theta_j = 2 pi j / m, j = 0..m. Requires coeffs.len() <= m.
pub fn eval_on_grid(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    assert!(coeffs.len() <= m, "grid shorter than coefficient vector");
    let mut buf = vec![Complex64::default(); m];
    buf[..coeffs.len()].copy_from_slice(coeffs);
    // Unnormalized inverse DFT: X_j = sum_l x_l e^{+2 pi i j l / m}.
    plan(m, FftDirection::Inverse).process(&mut buf);
    buf
}
