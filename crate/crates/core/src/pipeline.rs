//! End-to-end drivers: simulate → preprocess → invert.
//!
//! The CLI subcommands are thin wrappers over these functions; tests call
//! them directly. Every step is deterministic for fixed inputs (noise is
//! injected only through the seeded generator here).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::field::BoundaryField;
use crate::inversion::{run_inversion, ReconstructionResult};
use crate::partition::{build_partition, WavenumberPartition};
use crate::plane::{FieldKind, PlaneDataset, PlaneGeometry};
use crate::preprocess::{
    apply_calibration, complete_psi_boundary, compute_psi, estimate_target_region,
    gaussian_smooth_plane, propagate_dataset, select_stable_band, truncate_dataset,
    CalibrationRecord, PsiData, TargetRegion,
};
use crate::scene::Scene;
use crate::units;

/// Scattered-field magnitudes below this bound (relative to the unit
/// incident wave) are treated as "no target present".
const ZERO_DATA_THRESHOLD: f64 = 1e-12;

/// Everything the preprocessing stage produces for inspection and inversion.
#[derive(Debug, Clone)]
pub struct PreprocessOutput {
    /// Selected (or overridden) stable band.
    pub band: (f64, f64),
    pub partition: WavenumberPartition,
    /// Scattered data propagated to the backscatter face, full sweep.
    pub propagated: PlaneDataset,
    /// Truncated, smoothed, calibrated scattered data, in-band sweep.
    pub processed: PlaneDataset,
    /// Calibrated total-field boundary data `A(k) f̃ + e^{ikz}`, in-band.
    pub total_on_gamma: PlaneDataset,
    pub region: TargetRegion,
    pub calibration: CalibrationRecord,
    pub psi: PsiData,
}

/// Simulate scattered-field measurements of a scene on the Γ-plane lattice
/// at the partition points of the configured band.
pub fn simulate_scene(
    scene: &Scene,
    config: &PipelineConfig,
    sweep_samples: Option<usize>,
) -> Result<PlaneDataset> {
    scene.validate(config.eps_upper_bound)?;
    let domain = config.domain.build()?;
    let eps = scene.rasterize(&domain);
    let partition = config.partition.build()?;
    let n = sweep_samples
        .unwrap_or(partition.n_intervals + 1)
        .max(partition.n_intervals + 1);
    let ks: Vec<f64> = (0..n)
        .map(|i| {
            partition.k_lo + (partition.k_hi - partition.k_lo) * i as f64 / (n - 1) as f64
        })
        .collect();
    let plane = gamma_plane(config)?;
    crate::forward::simulate_measurements(
        &eps,
        &ks,
        &plane,
        FieldKind::Scattered,
        &config.ls_solver,
    )
}

/// The measurement lattice on the backscatter face.
pub fn gamma_plane(config: &PipelineConfig) -> Result<PlaneGeometry> {
    let d = config.domain.build()?;
    let nx = ((d.x_max - d.x_min) / config.plane_spacing).round() as usize + 1;
    let ny = ((d.y_max - d.y_min) / config.plane_spacing).round() as usize + 1;
    PlaneGeometry::new(
        (d.x_min, d.x_max),
        (d.y_min, d.y_max),
        nx.max(2),
        ny.max(2),
        d.z_gamma(),
    )
}

/// Multiplicative per-sample noise `v -> v (1 + pct ξ)` with `|ξ| <= 1`,
/// reproducible from the seed.
pub fn add_noise(ds: &mut PlaneDataset, pct: f64, seed: u64) {
    if pct == 0.0 {
        return;
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let scale = pct / std::f64::consts::SQRT_2;
    for row in &mut ds.rows {
        for v in row.iter_mut() {
            let re: f64 = rng.gen_range(-1.0..=1.0);
            let im: f64 = rng.gen_range(-1.0..=1.0);
            *v *= Complex64::new(1.0 + scale * re, scale * im);
        }
    }
}

/// Run the full preprocessing chain on raw scattered data.
///
/// `band_override` skips the automatic stable-band search; `calibration`
/// rescales against a known object (identity otherwise).
pub fn preprocess(
    raw: &PlaneDataset,
    config: &PipelineConfig,
    band_override: Option<(f64, f64)>,
    calibration: Option<&CalibrationRecord>,
) -> Result<PreprocessOutput> {
    let domain = config.domain.build()?;
    let scattered = match raw.kind {
        FieldKind::Scattered => raw.clone(),
        FieldKind::Total => subtract_incident(raw),
        FieldKind::Psi => {
            return Err(Error::invalid("preprocessing expects field data, not ψ"))
        }
    };

    // Step 1: move the data onto the backscatter face.
    let propagated = propagate_dataset(&scattered, domain.z_gamma())?;

    // Step 2: stable band.
    let band = match band_override {
        Some(b) => b,
        None => select_stable_band(&propagated, &config.band)?,
    };
    let partition = build_partition(band.0, band.1, config.partition.n_intervals)?;
    let in_band = propagated.restrict_band(band.0, band.1)?;

    // Step 3: truncation, smoothing, calibration. All-zero data (no target)
    // short-circuits to an empty region and untouched (zero) fields.
    let peak = in_band
        .rows
        .iter()
        .flat_map(|r| r.iter())
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let geometry = in_band.geometry.clone();

    let (processed, region, calibration_record) = if peak < ZERO_DATA_THRESHOLD {
        (
            in_band.clone(),
            TargetRegion::empty(geometry.clone()),
            CalibrationRecord::identity(in_band.wavenumbers.clone(), "no-target"),
        )
    } else {
        let truncated = truncate_dataset(&in_band, config.data_truncation_threshold)?;
        let mut smoothed = truncated.clone();
        for row in &mut smoothed.rows {
            *row = gaussian_smooth_plane(
                row,
                geometry.nx,
                geometry.ny,
                config.smoothing.kernel_size,
                config.smoothing.sigma,
            )?;
        }
        let record = match calibration {
            Some(r) => r.clone(),
            None => CalibrationRecord::identity(smoothed.wavenumbers.clone(), "identity"),
        };
        let calibrated = apply_calibration(&smoothed, &record, config.calibration_mode);

        let k_ref = units::wavenumber_from_ghz(config.reference_freq_ghz);
        let ref_row = calibrated.nearest_row(k_ref);
        let region = estimate_target_region(
            &calibrated.rows[ref_row],
            &geometry,
            config.region_threshold,
        )?;
        (calibrated, region, record)
    };

    // Step 4: rebuild the total field on Γ and form ψ̃.
    let total_on_gamma = add_incident(&processed);
    let psi = compute_psi(&total_on_gamma, &partition)?;

    Ok(PreprocessOutput {
        band,
        partition,
        propagated,
        processed,
        total_on_gamma,
        region,
        calibration: calibration_record,
        psi,
    })
}

/// Assemble completed boundary data and run the recovery iteration.
pub fn invert(pre: &PreprocessOutput, config: &PipelineConfig) -> Result<ReconstructionResult> {
    let domain = config.domain.build()?;
    let mut run_config = config.clone();
    run_config.partition.k_lo = pre.partition.k_lo;
    run_config.partition.k_hi = pre.partition.k_hi;
    run_config.partition.n_intervals = pre.partition.n_intervals;

    let geometry = &pre.psi.dataset.geometry;
    let mut psi_boundaries: Vec<BoundaryField> = Vec::with_capacity(pre.partition.values.len());
    for &k_n in &pre.partition.values {
        let row = pre.psi.dataset.nearest_row(k_n);
        psi_boundaries.push(complete_psi_boundary(
            &pre.psi.dataset.rows[row],
            geometry,
            k_n,
            pre.psi.k_star,
            &domain,
        )?);
    }
    run_inversion(&psi_boundaries, &pre.region, &run_config)
}

/// Simulate, preprocess and invert a scene in one call.
pub fn full_run(
    scene: &Scene,
    config: &PipelineConfig,
    noise_pct: f64,
    seed: u64,
    sweep_samples: Option<usize>,
) -> Result<(PlaneDataset, PreprocessOutput, ReconstructionResult)> {
    let mut raw = simulate_scene(scene, config, sweep_samples)?;
    add_noise(&mut raw, noise_pct, seed);
    let pre = preprocess(&raw, config, Some((config.partition.k_lo, config.partition.k_hi)), None)?;
    let result = invert(&pre, config)?;
    Ok((raw, pre, result))
}

fn subtract_incident(ds: &PlaneDataset) -> PlaneDataset {
    let mut out = ds.clone();
    out.kind = FieldKind::Scattered;
    let z = ds.geometry.z_level;
    for (row, &k) in out.rows.iter_mut().zip(&ds.wavenumbers) {
        let inc = Complex64::new(0.0, k * z).exp();
        for v in row.iter_mut() {
            *v -= inc;
        }
    }
    out
}

fn add_incident(ds: &PlaneDataset) -> PlaneDataset {
    let mut out = ds.clone();
    out.kind = FieldKind::Total;
    let z = ds.geometry.z_level;
    for (row, &k) in out.rows.iter_mut().zip(&ds.wavenumbers) {
        let inc = Complex64::new(0.0, k * z).exp();
        for v in row.iter_mut() {
            *v += inc;
        }
    }
    out
}
