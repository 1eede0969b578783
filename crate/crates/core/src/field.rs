//! Volume and boundary field containers on the domain grid.

use num_complex::Complex64;

use crate::grid::Domain;

/// Complex scalar field sampled at the grid nodes (x-fastest row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVolumeField {
    pub domain: Domain,
    pub data: Vec<Complex64>,
}

impl ComplexVolumeField {
    pub fn zeros(domain: &Domain) -> Self {
        ComplexVolumeField {
            domain: domain.clone(),
            data: vec![Complex64::new(0.0, 0.0); domain.len()],
        }
    }

    pub fn constant(domain: &Domain, value: Complex64) -> Self {
        ComplexVolumeField {
            domain: domain.clone(),
            data: vec![value; domain.len()],
        }
    }

    pub fn from_fn(domain: &Domain, mut f: impl FnMut(f64, f64, f64) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(domain.len());
        for iz in 0..domain.nz {
            let z = domain.z(iz);
            for iy in 0..domain.ny {
                let y = domain.y(iy);
                for ix in 0..domain.nx {
                    data.push(f(domain.x(ix), y, z));
                }
            }
        }
        ComplexVolumeField {
            domain: domain.clone(),
            data,
        }
    }

    /// The incident plane wave e^{ikz} on the grid.
    pub fn incident_wave(domain: &Domain, k: f64) -> Self {
        Self::from_fn(domain, |_, _, z| Complex64::new(0.0, k * z).exp())
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize, iz: usize) -> Complex64 {
        self.data[self.domain.index(ix, iy, iz)]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Real scalar field for the relative permittivity; 1 in air.
#[derive(Debug, Clone, PartialEq)]
pub struct PermittivityField {
    pub domain: Domain,
    pub data: Vec<f64>,
}

impl PermittivityField {
    pub fn homogeneous(domain: &Domain) -> Self {
        PermittivityField {
            domain: domain.clone(),
            data: vec![1.0; domain.len()],
        }
    }

    pub fn from_fn(domain: &Domain, mut f: impl FnMut(f64, f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(domain.len());
        for iz in 0..domain.nz {
            let z = domain.z(iz);
            for iy in 0..domain.ny {
                let y = domain.y(iy);
                for ix in 0..domain.nx {
                    data.push(f(domain.x(ix), y, z));
                }
            }
        }
        PermittivityField {
            domain: domain.clone(),
            data,
        }
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize, iz: usize) -> f64 {
        self.data[self.domain.index(ix, iy, iz)]
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Grid coordinates of the maximal value (first hit in storage order).
    pub fn argmax(&self) -> [f64; 3] {
        let mut best = 0;
        for (i, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = i;
            }
        }
        self.domain.coords(best)
    }

    /// Index bounds (inclusive) of the nodes where the contrast eps - 1 is
    /// nonzero, or None for a homogeneous field.
    pub fn contrast_support(&self) -> Option<[(usize, usize); 3]> {
        let d = &self.domain;
        let mut lo = [usize::MAX; 3];
        let mut hi = [0usize; 3];
        let mut any = false;
        for iz in 0..d.nz {
            for iy in 0..d.ny {
                for ix in 0..d.nx {
                    if (self.at(ix, iy, iz) - 1.0).abs() > 0.0 {
                        any = true;
                        let idx3 = [ix, iy, iz];
                        for c in 0..3 {
                            lo[c] = lo[c].min(idx3[c]);
                            hi[c] = hi[c].max(idx3[c]);
                        }
                    }
                }
            }
        }
        any.then(|| [(lo[0], hi[0]), (lo[1], hi[1]), (lo[2], hi[2])])
    }
}

/// Complex 3-vector field (one scalar field per component).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    pub domain: Domain,
    pub components: [Vec<Complex64>; 3],
}

impl VectorField3 {
    pub fn zeros(domain: &Domain) -> Self {
        let n = domain.len();
        VectorField3 {
            domain: domain.clone(),
            components: [
                vec![Complex64::new(0.0, 0.0); n],
                vec![Complex64::new(0.0, 0.0); n],
                vec![Complex64::new(0.0, 0.0); n],
            ],
        }
    }

    pub fn constant(domain: &Domain, v: [Complex64; 3]) -> Self {
        let n = domain.len();
        VectorField3 {
            domain: domain.clone(),
            components: [vec![v[0]; n], vec![v[1]; n], vec![v[2]; n]],
        }
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        [
            self.components[0][idx],
            self.components[1][idx],
            self.components[2][idx],
        ]
    }

    /// Complex dot product a . a (no conjugation), pointwise.
    pub fn dot_self(&self, idx: usize) -> Complex64 {
        let [x, y, z] = self.at(idx);
        x * x + y * y + z * z
    }

    /// Largest pointwise Euclidean magnitude over the grid.
    pub fn max_norm(&self) -> f64 {
        (0..self.domain.len())
            .map(|i| {
                let [x, y, z] = self.at(i);
                (x.norm_sqr() + y.norm_sqr() + z.norm_sqr()).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Complex values on the six faces of the domain box.
///
/// Values live in a full-size node array; interior entries stay zero and are
/// never read. Edge and corner nodes belong to exactly one face by the fixed
/// priority z-faces > y-faces > x-faces.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    pub domain: Domain,
    values: Vec<Complex64>,
}

/// Face labels in priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    ZMin,
    ZMax,
    YMin,
    YMax,
    XMin,
    XMax,
}

impl BoundaryField {
    /// Which face owns a boundary node under the fixed priority, or None for
    /// interior nodes.
    pub fn owning_face(domain: &Domain, ix: usize, iy: usize, iz: usize) -> Option<Face> {
        if iz == 0 {
            Some(Face::ZMin)
        } else if iz == domain.nz - 1 {
            Some(Face::ZMax)
        } else if iy == 0 {
            Some(Face::YMin)
        } else if iy == domain.ny - 1 {
            Some(Face::YMax)
        } else if ix == 0 {
            Some(Face::XMin)
        } else if ix == domain.nx - 1 {
            Some(Face::XMax)
        } else {
            None
        }
    }

    /// Build from a closure receiving the owning face and node coordinates.
    pub fn from_fn(
        domain: &Domain,
        mut f: impl FnMut(Face, f64, f64, f64) -> Complex64,
    ) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); domain.len()];
        for iz in 0..domain.nz {
            for iy in 0..domain.ny {
                for ix in 0..domain.nx {
                    if let Some(face) = Self::owning_face(domain, ix, iy, iz) {
                        values[domain.index(ix, iy, iz)] =
                            f(face, domain.x(ix), domain.y(iy), domain.z(iz));
                    }
                }
            }
        }
        BoundaryField {
            domain: domain.clone(),
            values,
        }
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize, iz: usize) -> Complex64 {
        debug_assert!(self.domain.is_boundary(ix, iy, iz));
        self.values[self.domain.index(ix, iy, iz)]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        BoundaryField {
            domain: self.domain.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Maximum |value| over all boundary nodes.
    pub fn max_abs(&self) -> f64 {
        let d = &self.domain;
        let mut m: f64 = 0.0;
        for iz in 0..d.nz {
            for iy in 0..d.ny {
                for ix in 0..d.nx {
                    if d.is_boundary(ix, iy, iz) {
                        m = m.max(self.at(ix, iy, iz).norm());
                    }
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incident_wave_phase() {
        let d = Domain::new((0.0, 1.0), (0.0, 1.0), (-0.5, 0.5), (3, 3, 3)).unwrap();
        let u = ComplexVolumeField::incident_wave(&d, 2.0);
        let v = u.at(1, 1, 0);
        assert!((v - Complex64::new(0.0, -1.0).exp()).norm() < 1e-15);
    }

    #[test]
    fn contrast_support_bounds() {
        let d = Domain::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (5, 5, 5)).unwrap();
        let mut eps = PermittivityField::homogeneous(&d);
        assert!(eps.contrast_support().is_none());
        let idx = d.index(2, 3, 1);
        eps.data[idx] = 1.5;
        assert_eq!(
            eps.contrast_support().unwrap(),
            [(2, 2), (3, 3), (1, 1)]
        );
    }

    #[test]
    fn face_priority_on_edges() {
        let d = Domain::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (4, 4, 4)).unwrap();
        // Corner: z wins.
        assert_eq!(BoundaryField::owning_face(&d, 0, 0, 0), Some(Face::ZMin));
        // Edge shared by y-min and x-min faces: y wins.
        assert_eq!(BoundaryField::owning_face(&d, 0, 0, 2), Some(Face::YMin));
        assert_eq!(BoundaryField::owning_face(&d, 1, 1, 1), None);
    }
}
