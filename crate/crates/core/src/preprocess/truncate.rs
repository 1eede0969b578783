//! Magnitude truncation: keep samples at or above a fraction of the peak,
//! zero the rest.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::plane::PlaneDataset;

pub fn truncate_field(field: &[Complex64], threshold: f64) -> Result<Vec<Complex64>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid("truncation threshold must lie in (0, 1]"));
    }
    let max = field.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::invalid("cannot truncate an all-zero field"));
    }
    let cut = threshold * max;
    Ok(field
        .iter()
        .map(|&v| if v.norm() >= cut { v } else { Complex64::new(0.0, 0.0) })
        .collect())
}

/// Truncate every row of a dataset independently.
pub fn truncate_dataset(ds: &PlaneDataset, threshold: f64) -> Result<PlaneDataset> {
    let rows: Result<Vec<_>> = ds.rows.iter().map(|r| truncate_field(r, threshold)).collect();
    Ok(PlaneDataset {
        geometry: ds.geometry.clone(),
        kind: ds.kind,
        freqs_ghz: ds.freqs_ghz.clone(),
        wavenumbers: ds.wavenumbers.clone(),
        rows: rows?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_magnitude_field_unchanged() {
        let f: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new(0.0, i as f64).exp() * 0.7)
            .collect();
        let out = truncate_field(&f, 0.8).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn keeps_only_samples_above_the_cut() {
        let f = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.85),
            Complex64::new(0.5, 0.0),
        ];
        let out = truncate_field(&f, 0.8).unwrap();
        assert_eq!(out[0], f[0]);
        assert_eq!(out[1], f[1]);
        assert_eq!(out[2], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn gaussian_bump_keeps_the_analytic_level_set() {
        // exp(-r^2 / (2 sigma^2)) stays above 0.8 for r <= sigma sqrt(-2 ln 0.8).
        let sigma = 0.9;
        let n = 101;
        let xs: Vec<f64> = (0..n).map(|i| -3.0 + 6.0 * i as f64 / (n - 1) as f64).collect();
        let f: Vec<Complex64> = xs
            .iter()
            .map(|&x| Complex64::new((-x * x / (2.0 * sigma * sigma)).exp(), 0.0))
            .collect();
        let out = truncate_field(&f, 0.8).unwrap();
        let r_keep = sigma * (-2.0 * 0.8f64.ln()).sqrt();
        for (i, &x) in xs.iter().enumerate() {
            if x.abs() <= r_keep - 1e-9 {
                assert!(out[i].norm() > 0.0, "x = {x} should be kept");
            }
            if x.abs() >= r_keep + 1e-9 {
                assert_eq!(out[i], Complex64::new(0.0, 0.0), "x = {x} should be zeroed");
            }
        }
    }

    #[test]
    fn all_zero_field_is_an_error() {
        let f = vec![Complex64::new(0.0, 0.0); 5];
        assert!(truncate_field(&f, 0.8).is_err());
    }

    proptest! {
        #[test]
        fn truncation_is_idempotent(values in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..50)) {
            let f: Vec<Complex64> = values.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            prop_assume!(f.iter().any(|v| v.norm() > 0.0));
            let once = truncate_field(&f, 0.8).unwrap();
            let twice = truncate_field(&once, 0.8).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
