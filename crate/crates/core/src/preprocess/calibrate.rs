//! Amplitude calibration against a single known object.
//!
//! `A(k) = max|sim(., k)| / max|exp(., k)|` on the propagated plane; the same
//! factors rescale every other measured dataset.

use serde::{Deserialize, Serialize};

use crate::config::CalibrationMode;
use crate::error::{Error, Result};
use crate::plane::PlaneDataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub wavenumbers: Vec<f64>,
    pub factors: Vec<f64>,
    /// Identifier of the calibrating-object dataset pair.
    pub provenance: String,
}

impl CalibrationRecord {
    /// Unit calibration (synthetic data already on the simulation scale).
    pub fn identity(wavenumbers: Vec<f64>, provenance: impl Into<String>) -> Self {
        let factors = vec![1.0; wavenumbers.len()];
        CalibrationRecord {
            wavenumbers,
            factors,
            provenance: provenance.into(),
        }
    }

    pub fn factor_for(&self, k: f64) -> f64 {
        let mut best = 0;
        for (i, &kv) in self.wavenumbers.iter().enumerate() {
            if (kv - k).abs() < (self.wavenumbers[best] - k).abs() {
                best = i;
            }
        }
        self.factors[best]
    }

    /// Replace all factors by their band average.
    pub fn band_averaged(&self) -> Self {
        let mean = self.factors.iter().sum::<f64>() / self.factors.len() as f64;
        CalibrationRecord {
            wavenumbers: self.wavenumbers.clone(),
            factors: vec![mean; self.factors.len()],
            provenance: format!("{} (band-averaged)", self.provenance),
        }
    }
}

pub fn compute_calibration(
    sim: &PlaneDataset,
    exp: &PlaneDataset,
    provenance: impl Into<String>,
) -> Result<CalibrationRecord> {
    if sim.n_wavenumbers() != exp.n_wavenumbers() {
        return Err(Error::invalid("calibration pair has different sweep lengths"));
    }
    for (a, b) in sim.wavenumbers.iter().zip(&exp.wavenumbers) {
        if (a - b).abs() > 1e-9 * a.max(1.0) {
            return Err(Error::invalid("calibration pair has different wavenumber lists"));
        }
    }
    if (sim.geometry.z_level - exp.geometry.z_level).abs() > 1e-9 {
        return Err(Error::invalid("calibration pair must be propagated to the same plane"));
    }
    let mut factors = Vec::with_capacity(sim.n_wavenumbers());
    for (i, (s_row, e_row)) in sim.rows.iter().zip(&exp.rows).enumerate() {
        let s_max = s_row.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let e_max = e_row.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if e_max == 0.0 {
            return Err(Error::invalid(format!(
                "experimental calibration row at k = {} is identically zero",
                sim.wavenumbers[i]
            )));
        }
        factors.push(s_max / e_max);
    }
    Ok(CalibrationRecord {
        wavenumbers: sim.wavenumbers.clone(),
        factors,
        provenance: provenance.into(),
    })
}

/// Scale every dataset row by its calibration factor.
pub fn apply_calibration(
    ds: &PlaneDataset,
    record: &CalibrationRecord,
    mode: CalibrationMode,
) -> PlaneDataset {
    let record = match mode {
        CalibrationMode::PerWavenumber => record.clone(),
        CalibrationMode::BandAverage => record.band_averaged(),
    };
    let rows = ds
        .rows
        .iter()
        .zip(&ds.wavenumbers)
        .map(|(row, &k)| {
            let a = record.factor_for(k);
            row.iter().map(|&v| v * a).collect()
        })
        .collect();
    PlaneDataset {
        geometry: ds.geometry.clone(),
        kind: ds.kind,
        freqs_ghz: ds.freqs_ghz.clone(),
        wavenumbers: ds.wavenumbers.clone(),
        rows,
    }
}
