//! Iterative radix-2 FFT.
//!
//! Forward transform only, with the engineering sign convention
//! `X[l] = Σ_k a[k]·exp(−2πi·k·l/m)` (the same as NumPy's `fft`), which is
//! all the density synthesis needs: inverse transforms are expressed with
//! conjugation at the call sites.

#[allow(unused_imports)] // inherent f64 methods cover this under std
use crate::float::FloatExt;
use alloc::vec::Vec;
use num_complex::Complex64;

/// In-place forward DFT of a power-of-two-length buffer.
///
/// # Panics
/// Panics if the length is not a power of two (callers guarantee this via
/// grid construction).
pub fn fft_in_place(a: &mut [Complex64]) {
    let m = a.len();
    assert!(m.is_power_of_two(), "FFT length must be a power of two");
    if m < 2 {
        return;
    }

    // Bit-reversal permutation.
    let bits = m.trailing_zeros();
    for k in 0..m {
        let r = k.reverse_bits() >> (usize::BITS - bits);
        if r > k {
            a.swap(k, r);
        }
    }

    // Butterflies; twiddles are computed per stage from scratch to keep
    // rounding error at the few-ulp level demanded by the 1e-8 oracles.
    let mut len = 2usize;
    while len <= m {
        let half = len / 2;
        let step = -2.0 * core::f64::consts::PI / len as f64;
        let twiddles: Vec<Complex64> = (0..half)
            .map(|j| {
                let ang = step * j as f64;
                Complex64::new(ang.cos(), ang.sin())
            })
            .collect();
        let mut start = 0usize;
        while start < m {
            for j in 0..half {
                let u = a[start + j];
                let v = a[start + j + half] * twiddles[j];
                a[start + j] = u + v;
                a[start + j + half] = u - v;
            }
            start += len;
        }
        len <<= 1;
    }
}

/// Forward DFT into a fresh buffer.
pub fn fft(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    fft_in_place(&mut buf);
    buf
}
