//! Dimensionless unit convention.
//!
//! One length unit is 10 cm. A signal at frequency `nu` (GHz) therefore has
//! the dimensionless wavenumber `k = 2 pi nu * 0.1 m / c`, so 3.1 GHz maps to
//! roughly `k = 6.50`.

use std::f64::consts::PI;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Length unit in metres (10 cm).
pub const LENGTH_UNIT_M: f64 = 0.1;

pub fn wavenumber_from_ghz(freq_ghz: f64) -> f64 {
    2.0 * PI * freq_ghz * 1e9 * LENGTH_UNIT_M / SPEED_OF_LIGHT
}

pub fn ghz_from_wavenumber(k: f64) -> f64 {
    k * SPEED_OF_LIGHT / (2.0 * PI * 1e9 * LENGTH_UNIT_M)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_frequency_maps_into_band() {
        let k = wavenumber_from_ghz(3.1);
        assert!((k - 6.49).abs() < 0.01, "k = {k}");
        // The stable band endpoints quoted in GHz land on [6.25, 6.70].
        assert!((wavenumber_from_ghz(2.98) - 6.25).abs() < 0.01);
        assert!((wavenumber_from_ghz(3.19) - 6.70).abs() < 0.02);
    }

    #[test]
    fn conversion_round_trip() {
        let k = 6.5;
        assert!((wavenumber_from_ghz(ghz_from_wavenumber(k)) - k).abs() < 1e-12);
    }
}
