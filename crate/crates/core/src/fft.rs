//! Iterative radix-2 FFT, used to sample the free evolution on a uniform time
//! grid.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// In-place forward transform `X_k = Σ_n x_n e^{−2πi nk/M}`.
///
/// Panics unless the length is a power of two.
pub fn fft_in_place(data: &mut [Complex64]) {
    let n = data.len();
    assert!(
        n.is_power_of_two(),
        "FFT length must be a power of two, got {n}"
    );
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let angle = -2.0 * core::f64::consts::PI / len as f64;
        let (s, c) = angle.sin_cos();
        let w_len = Complex64::new(c, s);
        for chunk in data.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(len / 2);
            let mut w = Complex64::new(1.0, 0.0);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let t = *b * w;
                *b = *a - t;
                *a += t;
                w *= w_len;
            }
        }
        len <<= 1;
    }
}
