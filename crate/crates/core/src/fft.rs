//! Minimal FFT helpers on x-fastest row-major data, axis by axis.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Fft3 {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = std::array::from_fn(|c| planner.plan_fft_forward(dims[c]));
        let inverse = std::array::from_fn(|c| planner.plan_fft_inverse(dims[c]));
        Fft3 {
            dims,
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Unnormalized inverse; divide by `len()` for the true inverse.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [nx, ny, nz] = self.dims;
        assert_eq!(data.len(), self.len());

        // Axis 0 is contiguous.
        plans[0].process(data);

        // Axes 1 and 2 via gather/scatter lines.
        let mut line = vec![Complex64::new(0.0, 0.0); ny.max(nz)];
        for iz in 0..nz {
            for ix in 0..nx {
                let base = ix + nx * ny * iz;
                for iy in 0..ny {
                    line[iy] = data[base + nx * iy];
                }
                plans[1].process(&mut line[..ny]);
                for iy in 0..ny {
                    data[base + nx * iy] = line[iy];
                }
            }
        }
        for iy in 0..ny {
            for ix in 0..nx {
                let base = ix + nx * iy;
                for iz in 0..nz {
                    line[iz] = data[base + nx * ny * iz];
                }
                plans[2].process(&mut line[..nz]);
                for iz in 0..nz {
                    data[base + nx * ny * iz] = line[iz];
                }
            }
        }
    }
}

/// 2D transform pair on a zero-padded lattice.
pub(crate) struct Fft2 {
    inner: Fft3,
}

impl Fft2 {
    pub fn padded(nx: usize, ny: usize, factor: usize) -> Self {
        let px = next_fast_size(nx * factor.max(1));
        let py = next_fast_size(ny * factor.max(1));
        Fft2 {
            inner: Fft3::new([px, py, 1]),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.inner.dims[0], self.inner.dims[1])
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.inner.forward(data);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inner.inverse(data);
    }
}

/// Smallest n >= target whose prime factors are all in {2, 3, 5, 7}.
pub(crate) fn next_fast_size(target: usize) -> usize {
    let mut n = target.max(2);
    loop {
        let mut m = n;
        for p in [2usize, 3, 5, 7] {
            while m % p == 0 {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dims = [4usize, 6, 5];
        let fft = Fft3::new(dims);
        let n = fft.len();
        let original: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = original.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        let scale = 1.0 / n as f64;
        for (a, b) in data.iter().zip(&original) {
            assert!((a * scale - b).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_matches_direct_dft() {
        let dims = [3usize, 2, 2];
        let fft = Fft3::new(dims);
        let n = fft.len();
        let input: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(i as f64, -(i as f64) * 0.5))
            .collect();
        let mut data = input.clone();
        fft.forward(&mut data);

        let tau = -2.0 * std::f64::consts::PI; // rustfft forward sign
        for jz in 0..dims[2] {
            for jy in 0..dims[1] {
                for jx in 0..dims[0] {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for iz in 0..dims[2] {
                        for iy in 0..dims[1] {
                            for ix in 0..dims[0] {
                                let phase = tau
                                    * (jx as f64 * ix as f64 / dims[0] as f64
                                        + jy as f64 * iy as f64 / dims[1] as f64
                                        + jz as f64 * iz as f64 / dims[2] as f64);
                                acc += input[ix + dims[0] * (iy + dims[1] * iz)]
                                    * Complex64::new(0.0, phase).exp();
                            }
                        }
                    }
                    let got = data[jx + dims[0] * (jy + dims[1] * jz)];
                    assert!((acc - got).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn fast_sizes() {
        assert_eq!(next_fast_size(1), 2);
        assert_eq!(next_fast_size(7), 7);
        assert_eq!(next_fast_size(11), 12);
        assert_eq!(next_fast_size(13), 14);
        assert_eq!(next_fast_size(31), 32);
    }
}
