//! Angular-spectrum propagation between parallel planes.
//!
//! The field on the source plane is decomposed into plane-wave modes with a
//! 2D transform using the `e^{+i(k_x x + k_y y)}` analysis convention; each
//! propagating mode (`k_x^2 + k_y^2 < k^2`) picks up the phase
//! `exp(i k_z (a - b))` with `k_z = sqrt(k^2 - k_x^2 - k_y^2)`, evanescent
//! modes are zeroed hard, and the field is resynthesized on the original
//! lattice. The data is zero outside its rectangle, so the lattice is
//! zero-padded (factor 4) before transforming; without the padding the
//! implicit periodization folds the images of slowly decaying fields back
//! into the window.
//!
//! A forward hop discards whatever spreads into the padding, so a naive
//! b→a→b chain is lossy; the dedicated round-trip entry point keeps the
//! intermediate field on the padded lattice, where the two phase factors
//! cancel exactly on the propagating disk.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::plane::{PlaneDataset, PlaneGeometry};

/// Zero-padding factor of the transform lattice.
const PAD: usize = 4;

/// Propagate the dataset row at wavenumber `k` from the dataset plane to
/// `target_z`. Moving away from the target (`target_z < z_level`) is
/// rejected; see [`propagate_round_trip`] for the verification path.
pub fn propagate_plane(g: &PlaneDataset, k: f64, target_z: f64) -> Result<Vec<Complex64>> {
    if target_z < g.geometry.z_level {
        return Err(Error::invalid(format!(
            "target plane z = {target_z} lies behind the data plane z = {}",
            g.geometry.z_level
        )));
    }
    propagate_plane_unchecked(g, k, target_z)
}

/// Same single-hop transform without the direction check.
pub fn propagate_plane_unchecked(
    g: &PlaneDataset,
    k: f64,
    target_z: f64,
) -> Result<Vec<Complex64>> {
    let row = find_row(g, k)?;
    Ok(angular_spectrum_apply(
        &g.rows[row],
        &g.geometry,
        k,
        &[target_z - g.geometry.z_level],
    ))
}

/// Propagate b→a→b without leaving the padded mode lattice, so the phase
/// factors cancel on the disk and the result is the band-limited projection
/// of the input.
pub fn propagate_round_trip(g: &PlaneDataset, k: f64, target_z: f64) -> Result<Vec<Complex64>> {
    let row = find_row(g, k)?;
    let dz = target_z - g.geometry.z_level;
    Ok(angular_spectrum_apply(
        &g.rows[row],
        &g.geometry,
        k,
        &[dz, -dz],
    ))
}

/// Band-limited projection: all evanescent content removed, no phase change.
pub fn band_limited_projection(
    field: &[Complex64],
    geom: &PlaneGeometry,
    k: f64,
) -> Vec<Complex64> {
    angular_spectrum_apply(field, geom, k, &[0.0])
}

/// Propagate every row of the dataset to `target_z`.
pub fn propagate_dataset(g: &PlaneDataset, target_z: f64) -> Result<PlaneDataset> {
    if target_z < g.geometry.z_level {
        return Err(Error::invalid(format!(
            "target plane z = {target_z} lies behind the data plane z = {}",
            g.geometry.z_level
        )));
    }
    let dz = target_z - g.geometry.z_level;
    let rows = g
        .rows
        .iter()
        .zip(&g.wavenumbers)
        .map(|(row, &k)| angular_spectrum_apply(row, &g.geometry, k, &[dz]))
        .collect();
    let mut geometry = g.geometry.clone();
    geometry.z_level = target_z;
    PlaneDataset::from_freqs(geometry, g.kind, g.freqs_ghz.clone(), rows)
}

fn find_row(g: &PlaneDataset, k: f64) -> Result<usize> {
    let row = g.nearest_row(k);
    if (g.wavenumbers[row] - k).abs() > 1e-9 * k.max(1.0) {
        return Err(Error::invalid(format!("dataset has no row at wavenumber {k}")));
    }
    Ok(row)
}

/// Apply the masked transfer function for a chain of z-offsets in one padded
/// transform pass.
fn angular_spectrum_apply(
    field: &[Complex64],
    geom: &PlaneGeometry,
    k: f64,
    hops: &[f64],
) -> Vec<Complex64> {
    let (nx, ny) = (geom.nx, geom.ny);
    assert_eq!(field.len(), nx * ny);
    let fft = Fft2::padded(nx, ny, PAD);
    let (px, py) = fft.dims();
    let (ox, oy) = ((px - nx) / 2, (py - ny) / 2);

    let mut buf = vec![Complex64::new(0.0, 0.0); px * py];
    for iy in 0..ny {
        for ix in 0..nx {
            buf[(ix + ox) + px * (iy + oy)] = field[ix + nx * iy];
        }
    }

    // Analysis with the e^{+i k x} convention is the inverse-direction DFT.
    fft.inverse(&mut buf);

    let two_pi = 2.0 * std::f64::consts::PI;
    let freq = |j: usize, n: usize, d: f64| -> f64 {
        let j = if j <= n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        };
        two_pi * j / (n as f64 * d)
    };
    let k2 = k * k;
    for jy in 0..py {
        let ky = freq(jy, py, geom.dy());
        for jx in 0..px {
            let kx = freq(jx, px, geom.dx());
            let s2 = kx * kx + ky * ky;
            let v = &mut buf[jx + px * jy];
            if s2 < k2 {
                let kz = (k2 - s2).sqrt();
                for &dz in hops {
                    *v *= Complex64::new(0.0, kz * dz).exp();
                }
            } else {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    }

    fft.forward(&mut buf);
    let scale = 1.0 / (px * py) as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            out[ix + nx * iy] = buf[(ix + ox) + px * (iy + oy)] * scale;
        }
    }
    out
}
