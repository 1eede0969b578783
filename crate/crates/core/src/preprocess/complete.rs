//! Boundary-data completion.
//!
//! Backscatter measurements only cover the face Γ (z = z_min). The missing
//! faces take the homogeneous-medium values: `e^{ikz}` for the total field
//! `g`, and the matching normalized derivative for the ψ data.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{BoundaryField, Face};
use crate::grid::Domain;
use crate::plane::PlaneGeometry;

fn check_gamma_plane(geom: &PlaneGeometry, domain: &Domain) -> Result<()> {
    if (geom.z_level - domain.z_gamma()).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "data plane z = {} is not the backscatter face z = {}",
            geom.z_level,
            domain.z_gamma()
        )));
    }
    Ok(())
}

/// True when the plane lattice coincides with the Γ-face node lattice.
fn lattice_matches(geom: &PlaneGeometry, domain: &Domain) -> bool {
    geom.nx == domain.nx
        && geom.ny == domain.ny
        && (geom.x_min - domain.x_min).abs() < 1e-12
        && (geom.x_max - domain.x_max).abs() < 1e-12
        && (geom.y_min - domain.y_min).abs() < 1e-12
        && (geom.y_max - domain.y_max).abs() < 1e-12
}

/// Extend total-field data from Γ to the whole boundary:
/// the measured values on Γ, `e^{ikz}` elsewhere.
pub fn complete_boundary_data(
    g_on_gamma: &[Complex64],
    geom: &PlaneGeometry,
    k: f64,
    domain: &Domain,
) -> Result<BoundaryField> {
    check_gamma_plane(geom, domain)?;
    if g_on_gamma.len() != geom.len() {
        return Err(Error::invalid("Γ data length does not match the plane lattice"));
    }
    let exact = lattice_matches(geom, domain);
    Ok(BoundaryField::from_fn(domain, |face, x, y, z| {
        if face == Face::ZMin {
            if exact {
                let ix = ((x - geom.x_min) / geom.dx()).round() as usize;
                let iy = ((y - geom.y_min) / geom.dy()).round() as usize;
                g_on_gamma[geom.index(ix, iy)]
            } else {
                geom.interpolate(g_on_gamma, x, y)
            }
        } else {
            Complex64::new(0.0, k * z).exp()
        }
    }))
}

/// Extend ψ data from Γ to the whole boundary. On the completed faces the
/// total field is `e^{ikz}`, so `ψ(x, k) = iz e^{ikz} / e^{i k* z}`.
pub fn complete_psi_boundary(
    psi_on_gamma: &[Complex64],
    geom: &PlaneGeometry,
    k: f64,
    k_star: f64,
    domain: &Domain,
) -> Result<BoundaryField> {
    check_gamma_plane(geom, domain)?;
    if psi_on_gamma.len() != geom.len() {
        return Err(Error::invalid("Γ data length does not match the plane lattice"));
    }
    let exact = lattice_matches(geom, domain);
    Ok(BoundaryField::from_fn(domain, |face, x, y, z| {
        if face == Face::ZMin {
            if exact {
                let ix = ((x - geom.x_min) / geom.dx()).round() as usize;
                let iy = ((y - geom.y_min) / geom.dy()).round() as usize;
                psi_on_gamma[geom.index(ix, iy)]
            } else {
                geom.interpolate(psi_on_gamma, x, y)
            }
        } else {
            Complex64::new(0.0, z) * Complex64::new(0.0, (k - k_star) * z).exp()
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn domain() -> Domain {
        Domain::new((-1.0, 1.0), (-1.0, 1.0), (-0.75, 1.25), (9, 9, 9)).unwrap()
    }

    fn gamma_geom(d: &Domain) -> PlaneGeometry {
        PlaneGeometry::new(
            (d.x_min, d.x_max),
            (d.y_min, d.y_max),
            d.nx,
            d.ny,
            d.z_gamma(),
        )
        .unwrap()
    }

    #[test]
    fn homogeneous_gamma_data_completes_to_plane_wave() {
        let d = domain();
        let geom = gamma_geom(&d);
        let k = 6.5;
        let g: Vec<Complex64> =
            vec![Complex64::new(0.0, k * d.z_gamma()).exp(); geom.len()];
        let b = complete_boundary_data(&g, &geom, k, &d).unwrap();
        for iz in 0..d.nz {
            for iy in 0..d.ny {
                for ix in 0..d.nx {
                    if d.is_boundary(ix, iy, iz) {
                        let expected = Complex64::new(0.0, k * d.z(iz)).exp();
                        assert!((b.at(ix, iy, iz) - expected).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn gamma_values_are_preserved_bit_exactly() {
        let d = domain();
        let geom = gamma_geom(&d);
        let g: Vec<Complex64> = (0..geom.len())
            .map(|i| Complex64::new(i as f64 * 0.123, -(i as f64) * 0.71))
            .collect();
        let b = complete_boundary_data(&g, &geom, 5.0, &d).unwrap();
        for iy in 0..d.ny {
            for ix in 0..d.nx {
                assert_eq!(b.at(ix, iy, 0), g[geom.index(ix, iy)]);
            }
        }
    }

    #[test]
    fn top_face_is_pure_phase() {
        let d = domain();
        let geom = gamma_geom(&d);
        let k = 4.25;
        let g = vec![Complex64::new(0.3, 0.4); geom.len()];
        let b = complete_boundary_data(&g, &geom, k, &d).unwrap();
        let expected = Complex64::new(0.0, k * d.z_max).exp();
        for iy in 0..d.ny {
            for ix in 0..d.nx {
                assert!((b.at(ix, iy, d.nz - 1) - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn psi_faces_carry_the_normalized_derivative() {
        let d = domain();
        let geom = gamma_geom(&d);
        let (k, k_star) = (6.5, 6.3);
        let psi = vec![Complex64::new(0.0, 0.0); geom.len()];
        let b = complete_psi_boundary(&psi, &geom, k, k_star, &d).unwrap();
        // A node on the x_min face, away from edges.
        let (ix, iy, iz) = (0, 4, 4);
        let z = d.z(iz);
        let expected = Complex64::new(0.0, z) * Complex64::new(0.0, (k - k_star) * z).exp();
        assert!((b.at(ix, iy, iz) - expected).norm() < 1e-14);
    }

    #[test]
    fn off_gamma_plane_rejected() {
        let d = domain();
        let mut geom = gamma_geom(&d);
        geom.z_level = 0.0;
        let g = vec![Complex64::new(1.0, 0.0); geom.len()];
        assert!(complete_boundary_data(&g, &geom, 5.0, &d).is_err());
    }
}
