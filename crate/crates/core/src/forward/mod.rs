//! Forward scattering: total-field solves for a given permittivity map and
//! synthetic measurement generation.
//!
//! The total field obeys the volume integral equation
//! `u(x) = e^{ikz} + k^2 ∫ Φ_k(x, y) (ε_r(y) - 1) u(y) dy` with the free-space
//! kernel `Φ_k(x, y) = exp(ik|x - y|) / (4π|x - y|)`. The solve runs on the
//! bounding box of the contrast with a periodized, radially truncated kernel
//! so the convolution turns into FFTs; everything outside that box is
//! evaluated by direct quadrature of the integral.

mod green;
mod ls;
mod measure;

pub use green::{green_function, self_cell_integral};
pub use ls::{solve_total_field, LsOperatorContext};
pub use measure::{evaluate_exterior, simulate_measurements};
