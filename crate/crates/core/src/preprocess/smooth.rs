//! Separable Gaussian smoothing with mirror padding.
//!
//! Defaults (3-wide kernel, sigma 0.65) match the stock 3D smoothing filter
//! used when preparing the truncated data and the recovered coefficient.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Normalized 1D Gaussian kernel weights.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Result<Vec<f64>> {
    if size % 2 == 0 || size == 0 {
        return Err(Error::invalid("kernel size must be odd"));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma must be positive"));
    }
    let r = (size / 2) as isize;
    let mut w: Vec<f64> = (-r..=r)
        .map(|j| (-(j * j) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = w.iter().sum();
    for v in &mut w {
        *v /= sum;
    }
    Ok(w)
}

trait Smoothable: Copy {
    fn zero() -> Self;
    fn mul_add_weight(self, acc: Self, w: f64) -> Self;
}

impl Smoothable for f64 {
    fn zero() -> Self {
        0.0
    }
    fn mul_add_weight(self, acc: Self, w: f64) -> Self {
        acc + self * w
    }
}

impl Smoothable for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn mul_add_weight(self, acc: Self, w: f64) -> Self {
        acc + self * w
    }
}

/// Mirror reflection about the edge nodes: f[-1] = f[1], f[n] = f[n-2].
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    if i < 0 {
        i = -i;
    }
    if i >= n {
        i = 2 * (n - 1) - i;
    }
    i as usize
}

fn smooth_axis<T: Smoothable>(data: &[T], dims: &[usize], axis: usize, kernel: &[f64]) -> Vec<T> {
    let r = (kernel.len() / 2) as isize;
    let n_axis = dims[axis];
    if n_axis == 1 {
        return data.to_vec();
    }
    let stride: usize = dims[..axis].iter().product();
    let total: usize = dims.iter().product();
    let mut out = vec![T::zero(); total];
    for (idx, o) in out.iter_mut().enumerate() {
        let i_axis = (idx / stride) % n_axis;
        let base = idx - i_axis * stride;
        let mut acc = T::zero();
        for (w_idx, &w) in kernel.iter().enumerate() {
            let j = reflect(i_axis as isize + w_idx as isize - r, n_axis);
            acc = data[base + j * stride].mul_add_weight(acc, w);
        }
        *o = acc;
    }
    out
}

fn smooth_nd<T: Smoothable>(data: &[T], dims: &[usize], size: usize, sigma: f64) -> Result<Vec<T>> {
    let kernel = gaussian_kernel(size, sigma)?;
    let expected: usize = dims.iter().product();
    if data.len() != expected {
        return Err(Error::invalid("field length does not match dimensions"));
    }
    let radius = size / 2;
    for &n in dims {
        if n > 1 && n <= radius {
            return Err(Error::invalid("axis too short for the kernel radius"));
        }
    }
    let mut cur = data.to_vec();
    for axis in 0..dims.len() {
        cur = smooth_axis(&cur, dims, axis, &kernel);
    }
    Ok(cur)
}

pub fn gaussian_smooth_plane(
    field: &[Complex64],
    nx: usize,
    ny: usize,
    size: usize,
    sigma: f64,
) -> Result<Vec<Complex64>> {
    smooth_nd(field, &[nx, ny], size, sigma)
}

pub fn gaussian_smooth_volume(
    field: &[f64],
    dims: [usize; 3],
    size: usize,
    sigma: f64,
) -> Result<Vec<f64>> {
    smooth_nd(field, &dims, size, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_is_normalized() {
        for (size, sigma) in [(3usize, 0.65), (5, 1.0), (7, 2.3)] {
            let w = gaussian_kernel(size, sigma).unwrap();
            assert_eq!(w.len(), size);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            // Symmetric and peaked at the centre.
            assert_eq!(w[0], w[size - 1]);
            assert!(w[size / 2] >= w[0]);
        }
    }

    #[test]
    fn even_kernel_rejected() {
        assert!(gaussian_kernel(4, 0.65).is_err());
        assert!(gaussian_kernel(3, 0.0).is_err());
    }

    #[test]
    fn constant_field_is_unchanged() {
        let f = vec![2.5f64; 5 * 4 * 3];
        let out = gaussian_smooth_volume(&f, [5, 4, 3], 3, 0.65).unwrap();
        for v in &out {
            assert!((v - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_impulse_reproduces_kernel_weights() {
        let n = 9;
        let mut f = vec![Complex64::new(0.0, 0.0); n];
        f[4] = Complex64::new(1.0, 0.0);
        let out = gaussian_smooth_plane(&f, n, 1, 3, 0.65).unwrap();
        let w = gaussian_kernel(3, 0.65).unwrap();
        assert!((out[3].re - w[0]).abs() < 1e-15);
        assert!((out[4].re - w[1]).abs() < 1e-15);
        assert!((out[5].re - w[2]).abs() < 1e-15);
        assert!(out[1].norm() < 1e-15);
    }

    #[test]
    fn mass_preserved_for_fields_flat_at_the_edges() {
        // A bump with negligible edge values loses no mass under mirror padding.
        let nx = 25;
        let ny = 25;
        let f: Vec<f64> = (0..nx * ny)
            .map(|i| {
                let x = (i % nx) as f64 - 12.0;
                let y = (i / nx) as f64 - 12.0;
                (-(x * x + y * y) / 4.0).exp()
            })
            .collect();
        let before: f64 = f.iter().sum();
        let cf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let out = gaussian_smooth_plane(&cf, nx, ny, 3, 0.65).unwrap();
        let after: f64 = out.iter().map(|v| v.re).sum();
        assert!((before - after).abs() < 1e-12, "mass drift {}", before - after);
    }

    #[test]
    fn smoothing_never_increases_the_max_norm() {
        let f: Vec<f64> = (0..7 * 7 * 7).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let max_before = f.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
        let out = gaussian_smooth_volume(&f, [7, 7, 7], 3, 0.65).unwrap();
        let max_after = out.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(max_after <= max_before + 1e-12);
    }
}
