//! Measurement preprocessing: plane-to-plane propagation, stable-band
//! selection, truncation, smoothing, calibration, target-region estimation
//! and assembly of the boundary data driving the inversion.

mod band;
mod calibrate;
mod complete;
mod propagate;
mod psi;
mod region;
mod smooth;
mod truncate;

pub use band::select_stable_band;
pub use calibrate::{apply_calibration, compute_calibration, CalibrationRecord};
pub use complete::{complete_boundary_data, complete_psi_boundary};
pub use propagate::{
    band_limited_projection, propagate_dataset, propagate_plane, propagate_plane_unchecked,
    propagate_round_trip,
};
pub use psi::{compute_psi, PsiData};
pub use region::{estimate_target_region, TargetRegion};
pub use smooth::{gaussian_kernel, gaussian_smooth_plane, gaussian_smooth_volume};
pub use truncate::{truncate_dataset, truncate_field};
