//! Automatic stable-band selection on propagated sweep data.
//!
//! A pair of consecutive sweep samples is "stable" when the location of the
//! field maximum barely moves and its magnitude barely changes; the band is
//! the longest contiguous stable run. Real sweeps are only stable on a
//! narrow interval around the focus frequency; simulated sweeps are stable
//! everywhere.

use crate::config::BandConfig;
use crate::error::{Error, Result};
use crate::plane::PlaneDataset;

/// Returns `(k_lo, k_hi)` of the longest stable run, preferring the
/// lowest-wavenumber run on ties. Expects propagated data.
pub fn select_stable_band(propagated: &PlaneDataset, cfg: &BandConfig) -> Result<(f64, f64)> {
    let n = propagated.n_wavenumbers();
    if n < 2 {
        return Err(Error::BandNotFound("sweep has fewer than two samples".into()));
    }

    let peaks: Vec<((usize, usize), f64)> = propagated
        .rows
        .iter()
        .map(|row| {
            let mut best = 0;
            for (i, v) in row.iter().enumerate() {
                if v.norm() > row[best].norm() {
                    best = i;
                }
            }
            (
                (best % propagated.geometry.nx, best / propagated.geometry.nx),
                row[best].norm(),
            )
        })
        .collect();

    let stable_pair = |i: usize| -> bool {
        let ((x0, y0), m0) = peaks[i];
        let ((x1, y1), m1) = peaks[i + 1];
        let dx = x0 as f64 - x1 as f64;
        let dy = y0 as f64 - y1 as f64;
        let jump = (dx * dx + dy * dy).sqrt();
        let change = (m1 - m0).abs() / m0.max(m1).max(f64::MIN_POSITIVE);
        jump <= cfg.max_argmax_jump as f64 && change <= cfg.max_magnitude_change
    };

    let mut best_run: Option<(usize, usize)> = None; // [start, end] sample indices
    let mut run_start = 0usize;
    for i in 0..n - 1 {
        if stable_pair(i) {
            let candidate = (run_start, i + 1);
            let better = match best_run {
                None => true,
                Some((s, e)) => candidate.1 - candidate.0 > e - s,
            };
            if better {
                best_run = Some(candidate);
            }
        } else {
            run_start = i + 1;
        }
    }

    match best_run {
        Some((s, e)) if e - s + 1 >= cfg.min_run => {
            Ok((propagated.wavenumbers[s], propagated.wavenumbers[e]))
        }
        Some((s, e)) => Err(Error::BandNotFound(format!(
            "longest stable run spans {} samples, need {}",
            e - s + 1,
            cfg.min_run
        ))),
        None => Err(Error::BandNotFound("no stable pair of sweep samples".into())),
    }
}
