//! Plane datasets: complex fields on a constant-z rectangle, one row per
//! wavenumber. Raw measurements, propagated data and boundary functions all
//! use this container.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units;

/// Sample lattice of a constant-z rectangle, x-fastest row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneGeometry {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub z_level: f64,
}

impl PlaneGeometry {
    pub fn new(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize, z_level: f64) -> Result<Self> {
        if !(x.0 < x.1 && y.0 < y.1) || nx < 2 || ny < 2 {
            return Err(Error::invalid("plane rectangle must have positive extent"));
        }
        Ok(PlaneGeometry {
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
            nx,
            ny,
            z_level,
        })
    }

    /// Centered square plane with the given half-width and sample spacing.
    pub fn centered_square(half_width: f64, spacing: f64, z_level: f64) -> Result<Self> {
        let n = (2.0 * half_width / spacing).round() as usize + 1;
        PlaneGeometry::new((-half_width, half_width), (-half_width, half_width), n, n, z_level)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
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

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix + self.nx * iy
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

    pub fn coords(&self, idx: usize) -> (f64, f64) {
        (self.x(idx % self.nx), self.y(idx / self.nx))
    }

    /// Bilinear interpolation of a field on this lattice; clamps to the
    /// rectangle so queries on the boundary are exact lattice values.
    pub fn interpolate(&self, field: &[Complex64], x: f64, y: f64) -> Complex64 {
        let fx = ((x - self.x_min) / self.dx()).clamp(0.0, (self.nx - 1) as f64);
        let fy = ((y - self.y_min) / self.dy()).clamp(0.0, (self.ny - 1) as f64);
        let ix = (fx.floor() as usize).min(self.nx - 2);
        let iy = (fy.floor() as usize).min(self.ny - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let f00 = field[self.index(ix, iy)];
        let f10 = field[self.index(ix + 1, iy)];
        let f01 = field[self.index(ix, iy + 1)];
        let f11 = field[self.index(ix + 1, iy + 1)];
        f00 * ((1.0 - tx) * (1.0 - ty))
            + f10 * (tx * (1.0 - ty))
            + f01 * ((1.0 - tx) * ty)
            + f11 * (tx * ty)
    }
}

/// What a dataset's samples represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Total,
    Scattered,
    Psi,
}

impl FieldKind {
    pub fn tag(&self) -> &'static str {
        match self {
            FieldKind::Total => "total",
            FieldKind::Scattered => "scattered",
            FieldKind::Psi => "psi",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(FieldKind::Total),
            "scattered" => Ok(FieldKind::Scattered),
            "psi" => Ok(FieldKind::Psi),
            other => Err(Error::Schema(format!("unknown field kind \"{other}\""))),
        }
    }
}

/// Complex 2D fields on one plane for a strictly increasing wavenumber list.
///
/// Frequencies in GHz are kept as the authoritative sweep labels so a file
/// written and re-read reproduces its header exactly; wavenumbers are derived
/// once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneDataset {
    pub geometry: PlaneGeometry,
    pub kind: FieldKind,
    pub freqs_ghz: Vec<f64>,
    pub wavenumbers: Vec<f64>,
    pub rows: Vec<Vec<Complex64>>,
}

impl PlaneDataset {
    pub fn from_freqs(
        geometry: PlaneGeometry,
        kind: FieldKind,
        freqs_ghz: Vec<f64>,
        rows: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let wavenumbers = freqs_ghz.iter().map(|&f| units::wavenumber_from_ghz(f)).collect();
        let ds = PlaneDataset {
            geometry,
            kind,
            freqs_ghz,
            wavenumbers,
            rows,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn from_wavenumbers(
        geometry: PlaneGeometry,
        kind: FieldKind,
        wavenumbers: Vec<f64>,
        rows: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let freqs_ghz = wavenumbers.iter().map(|&k| units::ghz_from_wavenumber(k)).collect();
        let ds = PlaneDataset {
            geometry,
            kind,
            freqs_ghz,
            wavenumbers,
            rows,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.len() != self.wavenumbers.len() || self.freqs_ghz.len() != self.wavenumbers.len() {
            return Err(Error::invalid("one data row per wavenumber required"));
        }
        if !self.wavenumbers.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("wavenumbers must be strictly increasing"));
        }
        for row in &self.rows {
            if row.len() != self.geometry.len() {
                return Err(Error::invalid(format!(
                    "row length {} does not match plane lattice {}",
                    row.len(),
                    self.geometry.len()
                )));
            }
        }
        Ok(())
    }

    pub fn n_wavenumbers(&self) -> usize {
        self.wavenumbers.len()
    }

    /// Index of the sweep sample closest to wavenumber `k`.
    pub fn nearest_row(&self, k: f64) -> usize {
        let mut best = 0;
        for (i, &kv) in self.wavenumbers.iter().enumerate() {
            if (kv - k).abs() < (self.wavenumbers[best] - k).abs() {
                best = i;
            }
        }
        best
    }

    /// Restrict to sweep samples with wavenumber in `[k_lo, k_hi]` (inclusive,
    /// with a small tolerance at the endpoints).
    pub fn restrict_band(&self, k_lo: f64, k_hi: f64) -> Result<PlaneDataset> {
        let tol = 1e-9 * k_hi.max(1.0);
        let keep: Vec<usize> = (0..self.n_wavenumbers())
            .filter(|&i| self.wavenumbers[i] >= k_lo - tol && self.wavenumbers[i] <= k_hi + tol)
            .collect();
        if keep.is_empty() {
            return Err(Error::invalid(format!(
                "no sweep samples inside band [{k_lo}, {k_hi}]"
            )));
        }
        Ok(PlaneDataset {
            geometry: self.geometry.clone(),
            kind: self.kind,
            freqs_ghz: keep.iter().map(|&i| self.freqs_ghz[i]).collect(),
            wavenumbers: keep.iter().map(|&i| self.wavenumbers[i]).collect(),
            rows: keep.iter().map(|&i| self.rows[i].clone()).collect(),
        })
    }
}
