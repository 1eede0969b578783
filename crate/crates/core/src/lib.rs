//! Reconstruction of spatially distributed dielectric constants from
//! single-incident-wave, backscatter-only, multi-frequency measurements.
//!
//! The library covers the whole desk-scale pipeline:
//!
//! - [`forward`] — volume-integral scattering solver (total field for a given
//!   permittivity map and wavenumber) and synthetic measurement generation,
//! - [`preprocess`] — plane-to-plane propagation, stable-band selection,
//!   truncation, smoothing, calibration and boundary-data assembly,
//! - [`elliptic`] — complex Dirichlet boundary value problems on the volume
//!   grid (Laplace and convection-diffusion),
//! - [`inversion`] — the multi-frequency coefficient-recovery iteration,
//! - [`io`] — CSV measurement files, VTK volume export and result records.
//!
//! All lengths are dimensionless with 1 unit = 10 cm; wavenumbers relate to
//! frequency through [`units::wavenumber_from_ghz`].

pub mod config;
pub mod elliptic;
pub mod error;
mod fft;
pub mod field;
pub mod forward;
pub mod grid;
pub mod inversion;
pub mod io;
pub mod krylov;
pub mod partition;
pub mod pipeline;
pub mod plane;
pub mod preprocess;
pub mod scene;
pub mod stencil;
pub mod units;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use field::{BoundaryField, ComplexVolumeField, PermittivityField, VectorField3};
pub use grid::Domain;
pub use partition::WavenumberPartition;
pub use plane::{PlaneDataset, PlaneGeometry};
