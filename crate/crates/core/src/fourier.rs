//! Discrete Fourier sums on shifted uniform grids.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// Evaluate `out[m] = Σ_j f[j] exp(i·sign·k_m·x_j)` for `x_j = x0 + j·dx` and
/// `k_m = k0 + m·dk` with `dk = 2π / (n·dx)`, using one FFT.
pub(crate) fn shifted_dft(f: &[Complex64], x0: f64, dx: f64, k0: f64, sign: f64) -> Vec<Complex64> {
    let n = f.len();
    let dk = 2.0 * std::f64::consts::PI / (n as f64 * dx);
    let mut buf: Vec<Complex64> = f
        .iter()
        .enumerate()
        .map(|(j, v)| v * Complex64::from_polar(1.0, sign * k0 * dx * j as f64))
        .collect();
    let direction = if sign > 0.0 {
        FftDirection::Inverse
    } else {
        FftDirection::Forward
    };
    let fft = FftPlanner::new().plan_fft(n, direction);
    fft.process(&mut buf);
    for (m, v) in buf.iter_mut().enumerate() {
        *v *= Complex64::from_polar(1.0, sign * (k0 + m as f64 * dk) * x0);
    }
    buf
}
