//! The normalized wavenumber derivative ψ̃ of the boundary data.
//!
//! The Dirichlet data for the recovery problems is `ψ = ∂_k g / g`. Measured
//! data makes the plain quotient vary too strongly with `k`, so the divisor
//! is frozen at a single wavenumber: `ψ̃(x, k) = ∂_k g(x, k) / g(x, k*)`,
//! where `k*` minimizes the worst plane magnitude of the quotient across the
//! band. The minimizing `k*` is observed to be independent of `k`, so it is
//! computed once per dataset.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::partition::WavenumberPartition;
use crate::plane::{FieldKind, PlaneDataset};

const DIVISION_GUARD: f64 = 1e-12;

/// ψ̃ rows at the partition points (ascending), plus the selected k*.
#[derive(Debug, Clone)]
pub struct PsiData {
    pub dataset: PlaneDataset,
    pub k_star: f64,
}

impl PsiData {
    /// Row index of the partition point `k_n` (partition index n counts down
    /// from k_hi, dataset rows ascend).
    pub fn row_for_partition_index(&self, partition: &WavenumberPartition, n: usize) -> usize {
        self.dataset.nearest_row(partition.value(n))
    }
}

/// Central finite differences in k on the sweep lattice, one-sided at the
/// band ends.
fn d_dk(g: &PlaneDataset) -> Vec<Vec<Complex64>> {
    let n = g.n_wavenumbers();
    let len = g.geometry.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, hi) = if i == 0 {
            (0, 1)
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        let dk = g.wavenumbers[hi] - g.wavenumbers[lo];
        let mut row = Vec::with_capacity(len);
        for s in 0..len {
            row.push((g.rows[hi][s] - g.rows[lo][s]) / dk);
        }
        out.push(row);
    }
    out
}

/// Build ψ̃ at every partition point from total-field data `g` on Γ.
///
/// `g` must sample the band finely enough for differencing (at minimum the
/// partition points themselves).
pub fn compute_psi(g: &PlaneDataset, partition: &WavenumberPartition) -> Result<PsiData> {
    if g.kind != FieldKind::Total {
        return Err(Error::invalid("ψ̃ is computed from total-field data"));
    }
    if g.n_wavenumbers() < 2 {
        return Err(Error::invalid("need at least two sweep samples to difference in k"));
    }
    let span = (
        *g.wavenumbers.first().unwrap(),
        *g.wavenumbers.last().unwrap(),
    );
    let tol = 1e-6 * partition.k_hi;
    if partition.k_lo < span.0 - tol || partition.k_hi > span.1 + tol {
        return Err(Error::invalid(format!(
            "sweep [{}, {}] does not cover the partition band [{}, {}]",
            span.0, span.1, partition.k_lo, partition.k_hi
        )));
    }

    let dkg = d_dk(g);
    let len = g.geometry.len();

    // Sweep rows holding the partition points, ascending in k.
    let rows_ascending: Vec<usize> = partition
        .values
        .iter()
        .rev()
        .map(|&k| g.nearest_row(k))
        .collect();

    // k* picks the divisor row that minimizes the worst |ψ̃| over the band;
    // candidates are the partition points, ties resolved toward smaller k.
    let mut k_star_row = None;
    let mut best_score = f64::INFINITY;
    for &cand in &rows_ascending {
        let divisor = &g.rows[cand];
        if divisor.iter().any(|v| v.norm() < DIVISION_GUARD) {
            continue;
        }
        let mut score: f64 = 0.0;
        for &r in &rows_ascending {
            for s in 0..len {
                score = score.max((dkg[r][s] / divisor[s]).norm());
            }
        }
        if score < best_score {
            best_score = score;
            k_star_row = Some(cand);
        }
    }
    let k_star_row = match k_star_row {
        Some(r) => r,
        None => {
            // Every candidate divisor dips below the guard; report the first
            // offending sample of the lowest candidate.
            let cand = rows_ascending[0];
            let (idx, v) = g.rows[cand]
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap();
            let count = g.rows[cand].iter().filter(|v| v.norm() < DIVISION_GUARD).count();
            let (x, y) = g.geometry.coords(idx);
            let _ = v;
            return Err(Error::DivisionGuard {
                threshold: DIVISION_GUARD,
                count,
                x,
                y,
            });
        }
    };
    let k_star = g.wavenumbers[k_star_row];

    let divisor = &g.rows[k_star_row];
    let mut rows = Vec::with_capacity(rows_ascending.len());
    let mut ks = Vec::with_capacity(rows_ascending.len());
    for &r in &rows_ascending {
        let mut row = Vec::with_capacity(len);
        for s in 0..len {
            row.push(dkg[r][s] / divisor[s]);
        }
        rows.push(row);
        ks.push(g.wavenumbers[r]);
    }

    let dataset = PlaneDataset::from_wavenumbers(g.geometry.clone(), FieldKind::Psi, ks, rows)?;
    Ok(PsiData { dataset, k_star })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::build_partition;
    use crate::plane::PlaneGeometry;

    fn geom() -> PlaneGeometry {
        PlaneGeometry::new((-1.0, 1.0), (-1.0, 1.0), 5, 5, -0.75).unwrap()
    }

    /// Dense sweep of the pure incident wave on Γ.
    fn incident_sweep(geom: &PlaneGeometry, k_lo: f64, k_hi: f64, n: usize) -> PlaneDataset {
        let z0 = geom.z_level;
        let ks: Vec<f64> = (0..n)
            .map(|i| k_lo + (k_hi - k_lo) * i as f64 / (n - 1) as f64)
            .collect();
        let rows = ks
            .iter()
            .map(|&k| vec![Complex64::new(0.0, k * z0).exp(); geom.len()])
            .collect();
        PlaneDataset::from_wavenumbers(geom.clone(), FieldKind::Total, ks, rows).unwrap()
    }

    #[test]
    fn incident_only_data_gives_closed_form_psi() {
        let geom = geom();
        let z0 = geom.z_level;
        let partition = build_partition(6.25, 6.70, 9).unwrap();
        // Plenty of sweep samples so central differences are accurate.
        let g = incident_sweep(&geom, 6.2, 6.75, 111);
        let psi = compute_psi(&g, &partition).unwrap();
        // For g = e^{ikz0}: ψ̃ = i z0 e^{i(k - k*) z0}; |ψ̃| = |z0| for every
        // candidate, so the tie-break picks the smallest partition point.
        assert!((psi.k_star - 6.25).abs() < 0.01);
        for (row, &k) in psi.dataset.rows.iter().zip(&psi.dataset.wavenumbers) {
            let expected = Complex64::new(0.0, z0)
                * Complex64::new(0.0, (k - psi.k_star) * z0).exp();
            for v in row {
                // Finite differencing of e^{ikz0} attenuates by sinc(dk z0).
                assert!((v - expected).norm() < 2e-4, "got {v}, want {expected}");
            }
        }
    }

    #[test]
    fn k_independent_data_gives_zero_psi() {
        let geom = geom();
        let partition = build_partition(6.25, 6.70, 3).unwrap();
        let ks: Vec<f64> = (0..20).map(|i| 6.2 + 0.03 * i as f64).collect();
        let rows = ks
            .iter()
            .map(|_| vec![Complex64::new(0.8, -0.4); geom.len()])
            .collect();
        let g = PlaneDataset::from_wavenumbers(geom, FieldKind::Total, ks, rows).unwrap();
        let psi = compute_psi(&g, &partition).unwrap();
        for row in &psi.dataset.rows {
            for v in row {
                assert_eq!(*v, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn vanishing_divisor_trips_the_guard() {
        let geom = geom();
        let partition = build_partition(6.25, 6.70, 2).unwrap();
        let ks: Vec<f64> = (0..10).map(|i| 6.2 + 0.06 * i as f64).collect();
        let rows: Vec<Vec<Complex64>> = ks
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let mut row = vec![Complex64::new(1.0, 0.0); geom.len()];
                row[7] = Complex64::new(0.0, (i as f64 + 1.0) * 1e-15);
                row
            })
            .collect();
        let g = PlaneDataset::from_wavenumbers(geom, FieldKind::Total, ks, rows).unwrap();
        assert!(matches!(
            compute_psi(&g, &partition),
            Err(Error::DivisionGuard { .. })
        ));
    }

    #[test]
    fn sweep_must_cover_the_band() {
        let geom = geom();
        let partition = build_partition(6.25, 6.70, 3).unwrap();
        let g = incident_sweep(&geom, 6.4, 6.9, 30);
        assert!(compute_psi(&g, &partition).is_err());
    }
}
