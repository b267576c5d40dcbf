//! Iterative radix-2 Cooley-Tukey FFT.
//!
//! Spectral propagation in this crate always works on power-of-two grids, so
//! a self-contained radix-2 transform with a precomputed twiddle table covers
//! every use without pulling platform-specific FFT machinery into a `no_std`
//! crate. Forward transform computes `X_k = Σ_j x_j e^{-2πi jk/N}`; the
//! inverse applies the conjugate twiddles and the 1/N scale, so
//! `inverse(forward(x)) == x` to roundoff.

use alloc::vec::Vec;
use num_complex::Complex64;
// f64 math resolves through this trait in pure no_std builds; feature
// unification in test builds links std and shadows it with inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

/// Planned radix-2 FFT for a fixed power-of-two length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    // twiddles[s] holds e^{-2πi k/2^(s+1)} for the butterflies of stage s.
    twiddles: Vec<Vec<Complex64>>,
}

impl Fft {
    /// Plan a transform of length `n`. `n` must be a power of two.
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two() && n > 0, "FFT length must be a power of two, got {n}");
        let stages = n.trailing_zeros() as usize;
        let mut twiddles = Vec::with_capacity(stages);
        for s in 0..stages {
            let m = 1usize << (s + 1);
            let step = -2.0 * core::f64::consts::PI / m as f64;
            let half: Vec<Complex64> = (0..m / 2)
                .map(|k| {
                    let a = step * k as f64;
                    Complex64::new(a.cos(), a.sin())
                })
                .collect();
            twiddles.push(half);
        }
        Self { n, twiddles }
    }

    /// Transform length.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place forward transform.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, false);
    }

    /// In-place inverse transform, including the 1/N normalization.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, true);
        let scale = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        assert_eq!(buf.len(), self.n, "buffer length does not match FFT plan");
        bit_reverse_permute(buf);
        for (s, tw) in self.twiddles.iter().enumerate() {
            let m = 1usize << (s + 1);
            let half = m / 2;
            for start in (0..self.n).step_by(m) {
                for k in 0..half {
                    let w = if inverse { tw[k].conj() } else { tw[k] };
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
        }
    }
}

fn bit_reverse_permute(buf: &mut [Complex64]) {
    let n = buf.len();
    let shift = (usize::BITS - n.trailing_zeros()) % usize::BITS;
    for i in 0..n {
        let j = i.reverse_bits() >> shift;
        if j > i {
            buf.swap(i, j);
        }
    }
}

/// Angular frequency associated with FFT bin `j` on a periodic domain of
/// length `l`: bins 0..n/2 map to k = 2πj/L, bins n/2..n to the negative
/// branch.
pub fn wavenumber(j: usize, n: usize, l: f64) -> f64 {
    let j = j as isize;
    let n = n as isize;
    let signed = if j < n / 2 { j } else { j - n };
    2.0 * core::f64::consts::PI * signed as f64 / l
}
