//! Free-space Helmholtz kernel.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `Φ_k(x, y) = exp(ik|x - y|) / (4π|x - y|)` for `x != y`.
pub fn green_function(x: [f64; 3], y: [f64; 3], k: f64) -> Result<Complex64> {
    let r = dist(x, y);
    if r == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(green_at_distance(r, k))
}

#[inline]
pub(crate) fn green_at_distance(r: f64, k: f64) -> Complex64 {
    Complex64::new(0.0, k * r).exp() / (4.0 * PI * r)
}

#[inline]
pub(crate) fn dist(x: [f64; 3], y: [f64; 3]) -> f64 {
    let dx = x[0] - y[0];
    let dy = x[1] - y[1];
    let dz = x[2] - y[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Integral of the kernel over the ball of radius `a` centred at the
/// singularity: `∫_{|y| <= a} Φ_k(y) dy = (e^{ika}(1 - ika) - 1) / k^2`.
/// Used as the cell average for the singular quadrature cell, with `a` the
/// radius of the ball matching the cell volume. Small `ka` switches to the
/// series to avoid cancellation.
pub fn self_cell_integral(k: f64, cell_volume: f64) -> Complex64 {
    let a = (3.0 * cell_volume / (4.0 * PI)).powf(1.0 / 3.0);
    let ka = k * a;
    if ka.abs() < 1e-3 {
        return Complex64::new(
            a * a / 2.0 - k * k * a.powi(4) / 8.0,
            k * a.powi(3) / 3.0 - k.powi(3) * a.powi(5) / 30.0,
        );
    }
    let ika = Complex64::new(0.0, ka);
    (ika.exp() * (Complex64::new(1.0, 0.0) - ika) - 1.0) / (k * k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_kernel_at_unit_distance() {
        let g = green_function([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], 0.0).unwrap();
        assert!((g.re - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!(g.im.abs() < 1e-15);
    }

    #[test]
    fn closed_form_at_half_distance() {
        let k = 6.575;
        let g = green_function([0.0, 0.0, 0.25], [0.0, 0.0, -0.25], k).unwrap();
        let expected = Complex64::new(0.0, k * 0.5).exp() / (2.0 * PI);
        assert!((g - expected).norm() < 1e-15);
    }

    #[test]
    fn symmetric_in_its_arguments() {
        let pairs = [
            ([0.1, -0.4, 2.0], [1.3, 0.2, -0.7]),
            ([0.0, 0.0, 1.0], [0.5, 0.5, 0.5]),
            ([-2.0, 1.0, 0.3], [0.4, -1.2, 2.2]),
        ];
        for (x, y) in pairs {
            let a = green_function(x, y, 6.7).unwrap();
            let b = green_function(y, x, 6.7).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn coincident_points_error() {
        assert!(matches!(
            green_function([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 1.0),
            Err(Error::Singularity)
        ));
    }

    #[test]
    fn self_integral_static_limit() {
        // For k -> 0 the integral tends to a^2 / 2, and the closed form and
        // the small-ka series agree around the switch point.
        let vol = 0.001;
        let a = (3.0 * vol / (4.0 * PI)).powf(1.0 / 3.0);
        let g0 = self_cell_integral(0.0, vol);
        assert!((g0.re - a * a / 2.0).abs() < 1e-15);
        assert_eq!(g0.im, 0.0);

        let k_edge = 1.0001e-3 / a; // just above the series cutoff
        let exact = self_cell_integral(k_edge, vol);
        let series = Complex64::new(
            a * a / 2.0 - k_edge * k_edge * a.powi(4) / 8.0,
            k_edge * a.powi(3) / 3.0 - k_edge.powi(3) * a.powi(5) / 30.0,
        );
        // The closed form loses ~6 digits to cancellation at this ka; the
        // series is exact to machine precision there.
        assert!(
            (exact - series).norm() < 1e-8 * g0.norm(),
            "switch-point mismatch {:e}",
            (exact - series).norm()
        );
    }

    #[test]
    fn self_integral_matches_radial_quadrature() {
        // Independent check: 1D radial quadrature of 4π r^2 Φ_k(r).
        let k = 6.5;
        let vol = 0.2f64.powi(3);
        let a = (3.0 * vol / (4.0 * PI)).powf(1.0 / 3.0);
        let n = 40_000;
        let dr = a / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let r = (i as f64 + 0.5) * dr;
            acc += r * Complex64::new(0.0, k * r).exp() * dr;
        }
        let exact = self_cell_integral(k, vol);
        assert!((acc - exact).norm() < 1e-9, "diff {}", (acc - exact).norm());
    }
}
