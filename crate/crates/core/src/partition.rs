//! Uniform wavenumber partition of the stable band.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The grid `k_hi = values[0] > values[1] > ... > values[N] = k_lo` with
/// uniform step `h`. Index 0 carries the highest wavenumber; the recovery
/// iteration walks the list downward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavenumberPartition {
    pub k_lo: f64,
    pub k_hi: f64,
    pub n_intervals: usize,
    pub h: f64,
    pub values: Vec<f64>,
}

/// Build the partition of `[k_lo, k_hi]` into `n` uniform subintervals.
pub fn build_partition(k_lo: f64, k_hi: f64, n: usize) -> Result<WavenumberPartition> {
    if !(k_lo.is_finite() && k_hi.is_finite()) || k_lo <= 0.0 {
        return Err(Error::invalid("wavenumber bounds must be positive finite"));
    }
    if k_lo >= k_hi {
        return Err(Error::invalid(format!(
            "inverted band: k_lo = {k_lo} must be below k_hi = {k_hi}"
        )));
    }
    if n < 1 {
        return Err(Error::invalid("need at least one subinterval"));
    }
    let h = (k_hi - k_lo) / n as f64;
    let mut values: Vec<f64> = (0..=n).map(|j| k_hi - j as f64 * h).collect();
    values[0] = k_hi;
    values[n] = k_lo;
    Ok(WavenumberPartition {
        k_lo,
        k_hi,
        n_intervals: n,
        h,
        values,
    })
}

impl WavenumberPartition {
    /// k_j for j = 0 (highest) .. N (lowest).
    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn band_partition_matches_published_step() {
        let p = build_partition(6.25, 6.70, 9).unwrap();
        assert!((p.h - 0.05).abs() < 1e-12);
        assert_eq!(p.values.len(), 10);
        assert_eq!(p.values[0], 6.70);
        assert_eq!(p.values[9], 6.25);
        assert!((p.values[1] - 6.65).abs() < 1e-12);
    }

    #[test]
    fn single_interval() {
        let p = build_partition(1.0, 2.0, 1).unwrap();
        assert_eq!(p.h, 1.0);
        assert_eq!(p.values, vec![2.0, 1.0]);
    }

    #[test]
    fn interior_value() {
        let p = build_partition(6.25, 6.70, 5).unwrap();
        assert!((p.h - 0.09).abs() < 1e-12);
        assert!((p.values[2] - 6.52).abs() < 1e-12);
    }

    #[test]
    fn invalid_bounds() {
        assert!(build_partition(-1.0, 2.0, 3).is_err());
        assert!(build_partition(0.0, 2.0, 3).is_err());
        assert!(build_partition(2.0, 1.0, 3).is_err());
        assert!(build_partition(1.0, 2.0, 0).is_err());
    }

    proptest! {
        #[test]
        fn steps_are_uniform(k_lo in 0.1f64..5.0, width in 0.1f64..3.0, n in 1usize..40) {
            let p = build_partition(k_lo, k_lo + width, n).unwrap();
            prop_assert_eq!(p.values.len(), n + 1);
            for j in 0..n {
                prop_assert!((p.values[j] - p.values[j + 1] - p.h).abs() < 1e-12);
            }
            prop_assert!(p.values.windows(2).all(|w| w[0] > w[1]));
        }
    }
}
