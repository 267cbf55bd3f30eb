//! Type-I discrete sine transform through a complex FFT of twice the length.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub(crate) struct Dst1 {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Dst1 {
    /// Transform over the `n − 1` interior points of `n` intervals.
    pub(crate) fn new(n: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * n);
        let scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        Self {
            n,
            fft,
            buf: vec![Complex64::default(); 2 * n],
            scratch,
        }
    }

    /// In place `x_k ← Σ_j x_j sin(π j k / n)`, `j, k = 1..n−1`.
    /// Applying it twice multiplies by `n / 2`.
    pub(crate) fn apply(&mut self, x: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(x.len(), n - 1);
        self.buf[0] = Complex64::default();
        self.buf[n] = Complex64::default();
        for j in 1..n {
            self.buf[j] = x[j - 1];
            self.buf[2 * n - j] = -x[j - 1];
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        // F_k = −2i S_k
        for k in 1..n {
            let f = self.buf[k];
            x[k - 1] = Complex64::new(-0.5 * f.im, 0.5 * f.re);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum_and_inverts() {
        let n = 12;
        let x: Vec<Complex64> = (1..n).map(|j| Complex64::new((j as f64).sin(), (j as f64 * 0.3).cos())).collect();
        let mut y = x.clone();
        let mut dst = Dst1::new(n);
        dst.apply(&mut y);
        for k in 1..n {
            let direct: Complex64 = (1..n)
                .map(|j| x[j - 1] * (std::f64::consts::PI * (j * k) as f64 / n as f64).sin())
                .sum();
            assert!((direct - y[k - 1]).norm() < 1e-12);
        }
        dst.apply(&mut y);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b * (2.0 / n as f64)).norm() < 1e-12);
        }
    }
}
