//! Pipeline configuration, loadable from JSON with every field defaulted.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Domain;
use crate::partition::{build_partition, WavenumberPartition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DomainConfig {
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

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            x_min: -2.5,
            x_max: 2.5,
            y_min: -2.5,
            y_max: 2.5,
            z_min: -0.75,
            z_max: 4.25,
            nx: 33,
            ny: 33,
            nz: 33,
        }
    }
}

impl DomainConfig {
    pub fn build(&self) -> Result<Domain> {
        Domain::new(
            (self.x_min, self.x_max),
            (self.y_min, self.y_max),
            (self.z_min, self.z_max),
            (self.nx, self.ny, self.nz),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PartitionConfig {
    pub k_lo: f64,
    pub k_hi: f64,
    pub n_intervals: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        // Stable band of the reference sweep; h = 0.05 keeps h * k_hi small.
        PartitionConfig {
            k_lo: 6.25,
            k_hi: 6.70,
            n_intervals: 9,
        }
    }
}

impl PartitionConfig {
    pub fn build(&self) -> Result<WavenumberPartition> {
        build_partition(self.k_lo, self.k_hi, self.n_intervals)
    }
}

/// Krylov solver knobs (restarted GMRES).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KrylovConfig {
    pub tolerance: f64,
    pub restart: usize,
    pub max_iterations: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        KrylovConfig {
            tolerance: 1e-8,
            restart: 30,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoothingConfig {
    pub kernel_size: usize,
    pub sigma: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig {
            kernel_size: 3,
            sigma: 0.65,
        }
    }
}

/// Stable-band auto-selection criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandConfig {
    /// Max argmax displacement (in plane samples) between consecutive sweeps.
    pub max_argmax_jump: usize,
    /// Max relative change of the plane maximum between consecutive sweeps.
    pub max_magnitude_change: f64,
    /// Minimum run length (in sweep samples) to accept a band.
    pub min_run: usize,
}

impl Default for BandConfig {
    fn default() -> Self {
        BandConfig {
            max_argmax_jump: 2,
            max_magnitude_change: 0.5,
            min_run: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMode {
    PerWavenumber,
    BandAverage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct PathsConfig {
    pub raw_data: Option<PathBuf>,
    pub calibration_sim: Option<PathBuf>,
    pub calibration_exp: Option<PathBuf>,
    pub scene: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub domain: DomainConfig,
    pub partition: PartitionConfig,
    /// Inner iteration cap I_N.
    pub inner_cap: usize,
    /// Inner stopping threshold on e_{n,2}.
    pub inner_tolerance: f64,
    /// Outer stopping threshold on the error-sequence window.
    pub outer_window_threshold: f64,
    /// Data truncation keeps samples at or above this fraction of the max.
    pub data_truncation_threshold: f64,
    /// Target-region mask keeps samples at or above this fraction of the max.
    pub region_threshold: f64,
    pub smoothing: SmoothingConfig,
    /// Depth range (z_a, z_b) searched for the target.
    pub search_z: (f64, f64),
    pub ls_solver: KrylovConfig,
    pub elliptic_solver: KrylovConfig,
    pub band: BandConfig,
    /// Plane sample spacing for synthetic measurement lattices (0.2 = 2 cm).
    pub plane_spacing: f64,
    pub calibration_mode: CalibrationMode,
    /// Average all iterates of the two qualifying outer iterations instead of
    /// only the iterates adjacent to the qualifying error window.
    pub average_both_outers: bool,
    /// Validation bound for synthetic permittivity inputs.
    pub eps_upper_bound: f64,
    /// Reference frequency (GHz) for the target-region estimate.
    pub reference_freq_ghz: f64,
    pub paths: PathsConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            domain: DomainConfig::default(),
            partition: PartitionConfig::default(),
            inner_cap: 3,
            inner_tolerance: 1e-6,
            outer_window_threshold: 5e-4,
            data_truncation_threshold: 0.8,
            region_threshold: 0.7,
            smoothing: SmoothingConfig::default(),
            search_z: (-0.75, 1.0),
            ls_solver: KrylovConfig::default(),
            elliptic_solver: KrylovConfig {
                tolerance: 1e-8,
                restart: 50,
                max_iterations: 2000,
            },
            band: BandConfig::default(),
            plane_spacing: 0.2,
            calibration_mode: CalibrationMode::PerWavenumber,
            average_both_outers: false,
            eps_upper_bound: 10.0,
            reference_freq_ghz: 3.1,
            paths: PathsConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Load from a JSON file. An empty file yields the defaults.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = if text.trim().is_empty() {
            PipelineConfig::default()
        } else {
            serde_json::from_str(text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.build()?;
        self.partition.build()?;
        for (name, t) in [
            ("data_truncation_threshold", self.data_truncation_threshold),
            ("region_threshold", self.region_threshold),
        ] {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::invalid(format!("{name} must lie in (0, 1]")));
            }
        }
        if self.inner_tolerance <= 0.0 || self.outer_window_threshold <= 0.0 {
            return Err(Error::invalid("stopping thresholds must be positive"));
        }
        if self.inner_cap < 2 {
            return Err(Error::invalid("inner_cap must be at least 2"));
        }
        if self.search_z.0 >= self.search_z.1 {
            return Err(Error::invalid("search_z must be an increasing range"));
        }
        if self.smoothing.kernel_size % 2 == 0 || self.smoothing.sigma <= 0.0 {
            return Err(Error::invalid("smoothing kernel must be odd with sigma > 0"));
        }
        Ok(())
    }
}
