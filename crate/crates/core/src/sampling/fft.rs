//! Iterative radix-2 FFT on `Complex64` buffers.

use core::f64::consts::PI;
use num_complex::Complex64;

/// In-place transform `X_k = Σ x_j e^{sign·2πi jk/n}`. `n` must be a power of
/// two; `sign` is `+1.0` or `-1.0`.
pub fn fft_in_place(buf: &mut [Complex64], sign: f64) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "FFT length must be a power of two");
    if n < 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let half = len / 2;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                // Direct twiddles: recurrence drift is noticeable above 2^16.
                let w = Complex64::from_polar(1.0, ang * k as f64);
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}
