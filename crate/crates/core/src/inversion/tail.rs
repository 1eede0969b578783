//! Tail function state: `∇V` and `ΔV` at the highest wavenumber.
//!
//! `V` itself is never materialized; the iteration only consumes its
//! gradient, and `ΔV` is always computed as `div(∇V)`.

use num_complex::Complex64;

use crate::config::KrylovConfig;
use crate::elliptic::solve_laplace_p;
use crate::error::{Error, Result};
use crate::field::{BoundaryField, ComplexVolumeField, PermittivityField, VectorField3};
use crate::forward::{solve_total_field, LsOperatorContext};
use crate::stencil::{divergence, gradient, laplacian};

#[derive(Debug, Clone)]
pub struct TailState {
    pub grad: VectorField3,
    pub div_grad: ComplexVolumeField,
}

/// Initial tail from the high-wavenumber asymptotic: solve `Δp = 0` with
/// `p = i ψ(·, k_hi)` on ∂Ω, then `∇V_0 = i k_hi ∇p` and
/// `ΔV_0 = i k_hi Δp` (near zero by harmonicity, but computed).
pub fn init_tail(
    psi_bar: &BoundaryField,
    k_hi: f64,
    solver: &KrylovConfig,
) -> Result<TailState> {
    let p = solve_laplace_p(psi_bar, solver)?;
    let ik = Complex64::new(0.0, k_hi);
    let mut grad = gradient(&p.field);
    for c in 0..3 {
        for v in &mut grad.components[c] {
            *v *= ik;
        }
    }
    let mut div_grad = laplacian(&p.field);
    for v in &mut div_grad.data {
        *v *= ik;
    }
    Ok(TailState { grad, div_grad })
}

/// Refresh the tail from the forward problem at `k_hi` with the current
/// coefficient: `∇V = ∇u / u` pointwise, `ΔV = div(∇V)`.
pub fn update_tail(
    eps: &PermittivityField,
    k_hi: f64,
    solver: &KrylovConfig,
) -> Result<TailState> {
    update_tail_with_stats(eps, k_hi, solver).map(|(t, _)| t)
}

pub(crate) fn update_tail_with_stats(
    eps: &PermittivityField,
    k_hi: f64,
    solver: &KrylovConfig,
) -> Result<(TailState, f64)> {
    let ctx = LsOperatorContext::new(eps, k_hi, solver)?;
    let u = solve_total_field(eps, k_hi, &ctx)?;

    let vanishing = u.data.iter().filter(|v| v.norm() < 1e-12).count();
    if vanishing > 0 {
        return Err(Error::VanishingField { count: vanishing });
    }

    let mut grad = gradient(&u);
    for c in 0..3 {
        for (g, uv) in grad.components[c].iter_mut().zip(&u.data) {
            *g /= uv;
        }
    }
    let div_grad = divergence(&grad);
    // The solve itself enforces its tolerance; the residual reported here is
    // the configured bound (kept for the iteration log).
    Ok((TailState { grad, div_grad }, solver.tolerance))
}
