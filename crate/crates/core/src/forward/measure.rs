//! Field evaluation away from the contrast and synthetic measurement runs.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::KrylovConfig;
use crate::error::{Error, Result};
use crate::field::{ComplexVolumeField, PermittivityField};
use crate::forward::ls::{scattered_at_point, solve_box, LsOperatorContext, SupportBox};
use crate::plane::{FieldKind, PlaneDataset, PlaneGeometry};

/// Total field at points strictly outside the contrast support, by quadrature
/// of the integral under the converged interior solution.
pub fn evaluate_exterior(
    u_interior: &ComplexVolumeField,
    eps: &PermittivityField,
    k: f64,
    points: &[[f64; 3]],
) -> Result<Vec<Complex64>> {
    if u_interior.domain != eps.domain {
        return Err(Error::invalid("field and permittivity grids differ"));
    }
    let d = &eps.domain;
    let support = eps.contrast_support().map(|b| SupportBox {
        lo: [b[0].0, b[1].0, b[2].0],
        hi: [b[0].1, b[1].1, b[2].1],
    });

    let support = match support {
        None => {
            return Ok(points
                .iter()
                .map(|p| Complex64::new(0.0, k * p[2]).exp())
                .collect());
        }
        Some(s) => s,
    };

    // Half a cell of clearance keeps the midpoint rule away from the kernel
    // singularity.
    let [dx, dy, dz] = d.spacing();
    let lo = [
        d.x(support.lo[0]) - dx / 2.0,
        d.y(support.lo[1]) - dy / 2.0,
        d.z(support.lo[2]) - dz / 2.0,
    ];
    let hi = [
        d.x(support.hi[0]) + dx / 2.0,
        d.y(support.hi[1]) + dy / 2.0,
        d.z(support.hi[2]) + dz / 2.0,
    ];
    for p in points {
        let inside = (0..3).all(|c| p[c] > lo[c] && p[c] < hi[c]);
        if inside {
            return Err(Error::InsideSupport(p[0], p[1], p[2]));
        }
    }

    let mut m = Vec::with_capacity(support.len());
    let mut u_box = Vec::with_capacity(support.len());
    for iz in support.lo[2]..=support.hi[2] {
        for iy in support.lo[1]..=support.hi[1] {
            for ix in support.lo[0]..=support.hi[0] {
                m.push(eps.at(ix, iy, iz) - 1.0);
                u_box.push(u_interior.at(ix, iy, iz));
            }
        }
    }

    Ok(points
        .par_iter()
        .map(|&p| {
            Complex64::new(0.0, k * p[2]).exp()
                + scattered_at_point(p, k, d, &support, &m, &u_box)
        })
        .collect())
}

/// Simulate backscatter measurements of `eps` on a plane for a list of
/// wavenumbers (ascending). Each wavenumber is an independent solve.
pub fn simulate_measurements(
    eps: &PermittivityField,
    wavenumbers: &[f64],
    plane: &PlaneGeometry,
    kind: FieldKind,
    solver: &KrylovConfig,
) -> Result<PlaneDataset> {
    if wavenumbers.is_empty() {
        return Err(Error::invalid("need at least one wavenumber"));
    }
    if !wavenumbers.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("wavenumbers must be strictly increasing"));
    }
    if kind == FieldKind::Psi {
        return Err(Error::invalid("simulation produces total or scattered fields"));
    }
    let d = &eps.domain;
    if let Some(b) = eps.contrast_support() {
        let support_min_z = d.z(b[2].0);
        if plane.z_level >= support_min_z - d.dz() / 2.0 {
            return Err(Error::invalid(format!(
                "measurement plane z = {} must sit below the contrast support (min z = {})",
                plane.z_level, support_min_z
            )));
        }
    }

    let points: Vec<[f64; 3]> = (0..plane.len())
        .map(|i| {
            let (x, y) = plane.coords(i);
            [x, y, plane.z_level]
        })
        .collect();

    let rows: Result<Vec<Vec<Complex64>>> = wavenumbers
        .par_iter()
        .map(|&k| -> Result<Vec<Complex64>> {
            let ctx = LsOperatorContext::new(eps, k, solver)?;
            let box_solution = solve_box(&ctx)?;
            let row = points
                .iter()
                .map(|&p| {
                    let incident = Complex64::new(0.0, k * p[2]).exp();
                    let scattered = match &box_solution {
                        None => Complex64::new(0.0, 0.0),
                        Some((support, m, u_box)) => {
                            scattered_at_point(p, k, d, support, m, u_box)
                        }
                    };
                    match kind {
                        FieldKind::Total => incident + scattered,
                        FieldKind::Scattered => scattered,
                        FieldKind::Psi => unreachable!(),
                    }
                })
                .collect();
            Ok(row)
        })
        .collect();

    PlaneDataset::from_wavenumbers(plane.clone(), kind, wavenumbers.to_vec(), rows?)
}
