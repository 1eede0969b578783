//! Spatial domain and grid indexing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box with a regular node grid.
///
/// Lengths are dimensionless (1 unit = 10 cm). Node data throughout the crate
/// is stored x-fastest row-major: `index = ix + nx * (iy + ny * iz)`. The
/// backscatter face Γ is always the `z = z_min` face, closest to the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Domain {
    pub fn new(
        x: (f64, f64),
        y: (f64, f64),
        z: (f64, f64),
        n: (usize, usize, usize),
    ) -> Result<Self> {
        let d = Domain {
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
            z_min: z.0,
            z_max: z.1,
            nx: n.0,
            ny: n.1,
            nz: n.2,
        };
        d.validate()?;
        Ok(d)
    }

    /// The default search box: (-2.5, 2.5) x (-2.5, 2.5) x (-0.75, 4.25).
    pub fn default_box(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        Domain::new((-2.5, 2.5), (-2.5, 2.5), (-0.75, 4.25), (nx, ny, nz))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min < self.x_max && self.y_min < self.y_max && self.z_min < self.z_max) {
            return Err(Error::invalid("domain bounds must be strictly increasing"));
        }
        if self.nx < 2 || self.ny < 2 || self.nz < 2 {
            return Err(Error::invalid("domain needs at least 2 nodes per axis"));
        }
        Ok(())
    }

    /// z-level of the backscatter face Γ.
    pub fn z_gamma(&self) -> f64 {
        self.z_min
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / (self.nz - 1) as f64
    }

    pub fn spacing(&self) -> [f64; 3] {
        [self.dx(), self.dy(), self.dz()]
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx() * self.dy() * self.dz()
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny && iz < self.nz);
        ix + self.nx * (iy + self.ny * iz)
    }

    #[inline]
    pub fn unindex(&self, idx: usize) -> (usize, usize, usize) {
        let ix = idx % self.nx;
        let iy = (idx / self.nx) % self.ny;
        let iz = idx / (self.nx * self.ny);
        (ix, iy, iz)
    }

    #[inline]
    pub fn x(&self, ix: usize) -> f64 {
        if ix == self.nx - 1 {
            self.x_max
        } else {
            self.x_min + ix as f64 * self.dx()
        }
    }

    #[inline]
    pub fn y(&self, iy: usize) -> f64 {
        if iy == self.ny - 1 {
            self.y_max
        } else {
            self.y_min + iy as f64 * self.dy()
        }
    }

    #[inline]
    pub fn z(&self, iz: usize) -> f64 {
        if iz == self.nz - 1 {
            self.z_max
        } else {
            self.z_min + iz as f64 * self.dz()
        }
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let (ix, iy, iz) = self.unindex(idx);
        [self.x(ix), self.y(iy), self.z(iz)]
    }

    #[inline]
    pub fn is_boundary(&self, ix: usize, iy: usize, iz: usize) -> bool {
        ix == 0
            || iy == 0
            || iz == 0
            || ix == self.nx - 1
            || iy == self.ny - 1
            || iz == self.nz - 1
    }

    /// All node coordinates in storage order.
    pub fn grid_coordinates(&self) -> Vec<[f64; 3]> {
        let mut pts = Vec::with_capacity(self.len());
        for iz in 0..self.nz {
            for iy in 0..self.ny {
                for ix in 0..self.nx {
                    pts.push([self.x(ix), self.y(iy), self.z(iz)]);
                }
            }
        }
        pts
    }
}
