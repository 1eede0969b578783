//! Multi-frequency coefficient recovery.
//!
//! The unknown coefficient enters through `v = log u`: at the highest
//! wavenumber the "tail" `V(x) = v(x, k_hi)` is estimated, then for each
//! partition interval (walking k downward) a convection-diffusion problem is
//! solved for the piecewise-constant derivative `q_n ≈ ∂_k v`, the gradient
//! of `v` is rebuilt, and the coefficient follows from
//! `ε_r = -(Δv + ∇v·∇v) / k²`. Each inner pass re-solves the forward problem
//! at `k_hi` with the current coefficient to refresh the tail
//! (predictor-corrector).

mod stopping;
mod tail;

pub use stopping::{stopping_inner, stopping_outer};
pub use tail::{init_tail, update_tail, TailState};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{PipelineConfig, SmoothingConfig};
use crate::elliptic::{solve_dirichlet, DirichletProblem};
use crate::error::{Error, Result};
use crate::field::{BoundaryField, ComplexVolumeField, PermittivityField, VectorField3};
use crate::partition::WavenumberPartition;
use crate::preprocess::{gaussian_smooth_volume, TargetRegion};
use crate::stencil::{divergence, gradient, laplacian};

/// One inner iteration of the recovery loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub n: usize,
    pub i: usize,
    /// Relative change against the previous iterate (absent for the very
    /// first iterate).
    pub e_value: Option<f64>,
    pub max_eps: f64,
    pub bvp_residual: f64,
    pub bvp_iterations: usize,
    pub ls_residual: f64,
    pub peclet_warning: bool,
}

/// Final output of a recovery run.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub eps_final: PermittivityField,
    /// Maximum of the averaged coefficient over the grid.
    pub dielectric_constant: f64,
    pub argmax_location: [f64; 3],
    pub target_region: TargetRegion,
    pub iterations: Vec<IterationRecord>,
    pub outer_count: usize,
}

/// Rolling state of the outer/inner iteration; `run_inversion` drives it.
#[derive(Debug, Clone)]
pub struct InversionState {
    pub q_history: Vec<ComplexVolumeField>,
    pub tail: TailState,
    pub eps_current: Option<PermittivityField>,
    /// Pairwise relative errors between consecutive iterates, in order
    /// (`e_{n,i}` within an outer iteration, the bridge value at each outer
    /// boundary).
    pub error_sequence: Vec<f64>,
    pub n: usize,
    pub i: usize,
}

/// Convection field and source term of the n-th recovery problem:
/// `F̃_n = (k_n / k_{n-1} + 1)(h Σ ∇q_j + ∇V_{n-1})` and
/// `G̃_n = -2h Σ Δq_j - 4h ∇V_{n-1}·Σ ∇q_j + 2ΔV_{n-1} + 2(∇V_{n-1})²`
/// with complex (unconjugated) dot products; the sums run over
/// `q_0 = 0, q_1, …, q_{n-1}`.
pub fn assemble_coefficients(
    n: usize,
    partition: &WavenumberPartition,
    q_history: &[ComplexVolumeField],
    tail: &TailState,
) -> Result<(VectorField3, ComplexVolumeField)> {
    if n < 1 || n > partition.n_intervals {
        return Err(Error::invalid(format!(
            "interval index {n} outside 1..={}",
            partition.n_intervals
        )));
    }
    if q_history.len() < n - 1 {
        return Err(Error::invalid("q history is missing earlier intervals"));
    }
    let domain = &tail.grad.domain;
    let len = domain.len();
    let h = partition.h;
    let k_n = partition.value(n);
    let k_prev = partition.value(n - 1);

    let mut grad_sum = VectorField3::zeros(domain);
    let mut lap_sum = ComplexVolumeField::zeros(domain);
    for q in &q_history[..n - 1] {
        let g = gradient(q);
        let l = laplacian(q);
        for c in 0..3 {
            for i in 0..len {
                grad_sum.components[c][i] += g.components[c][i];
            }
        }
        for i in 0..len {
            lap_sum.data[i] += l.data[i];
        }
    }

    let factor = k_n / k_prev + 1.0;
    let mut conv = VectorField3::zeros(domain);
    for c in 0..3 {
        for i in 0..len {
            conv.components[c][i] =
                factor * (h * grad_sum.components[c][i] + tail.grad.components[c][i]);
        }
    }

    let mut source = ComplexVolumeField::zeros(domain);
    for i in 0..len {
        let tail_grad = tail.grad.at(i);
        let qg = [
            grad_sum.components[0][i],
            grad_sum.components[1][i],
            grad_sum.components[2][i],
        ];
        let cross = tail_grad[0] * qg[0] + tail_grad[1] * qg[1] + tail_grad[2] * qg[2];
        let tail_sq = tail.grad.dot_self(i);
        source.data[i] = -2.0 * h * lap_sum.data[i] - 4.0 * h * cross
            + 2.0 * tail.div_grad.data[i]
            + 2.0 * tail_sq;
    }

    Ok((conv, source))
}

/// `∇v_{n,i} = -(h ∇q_{n,i} + h Σ_{j<n} ∇q_j) + ∇V_{n,i-1}`.
pub fn update_v(
    q_ni: &ComplexVolumeField,
    q_history: &[ComplexVolumeField],
    tail_prev: &TailState,
    h: f64,
) -> VectorField3 {
    let domain = &q_ni.domain;
    let len = domain.len();
    let mut acc = gradient(q_ni);
    for q in q_history {
        let g = gradient(q);
        for c in 0..3 {
            for i in 0..len {
                acc.components[c][i] += g.components[c][i];
            }
        }
    }
    let mut out = VectorField3::zeros(domain);
    for c in 0..3 {
        for i in 0..len {
            out.components[c][i] = tail_prev.grad.components[c][i] - h * acc.components[c][i];
        }
    }
    out
}

/// Coefficient from `∇v` at the tail wavenumber, clamped to air outside the
/// target region and depth range: `ε = -(Δv + (∇v)²) / k_hi²`, then
/// `max(|ε|, 1)` inside `region × (z_a, z_b)` and 1 elsewhere.
pub fn compute_epsilon_unsmoothed(
    grad_v: &VectorField3,
    div_grad_v: &ComplexVolumeField,
    k_hi: f64,
    region: &TargetRegion,
    z_range: (f64, f64),
) -> PermittivityField {
    let domain = &grad_v.domain;
    let k2 = k_hi * k_hi;
    let mut eps = PermittivityField::homogeneous(domain);
    if region.is_empty() {
        return eps;
    }
    for iz in 0..domain.nz {
        let z = domain.z(iz);
        if z < z_range.0 || z > z_range.1 {
            continue;
        }
        for iy in 0..domain.ny {
            let y = domain.y(iy);
            for ix in 0..domain.nx {
                let x = domain.x(ix);
                if !region.contains_xy(x, y) {
                    continue;
                }
                let idx = domain.index(ix, iy, iz);
                let raw: Complex64 = -(div_grad_v.data[idx] + grad_v.dot_self(idx)) / k2;
                eps.data[idx] = raw.norm().max(1.0);
            }
        }
    }
    eps
}

/// Clamped coefficient followed by the 3D Gaussian smoothing pass.
pub fn compute_epsilon(
    grad_v: &VectorField3,
    div_grad_v: &ComplexVolumeField,
    k_hi: f64,
    region: &TargetRegion,
    z_range: (f64, f64),
    smoothing: &SmoothingConfig,
) -> Result<PermittivityField> {
    let mut eps = compute_epsilon_unsmoothed(grad_v, div_grad_v, k_hi, region, z_range);
    let d = eps.domain.clone();
    eps.data = gaussian_smooth_volume(
        &eps.data,
        [d.nx, d.ny, d.nz],
        smoothing.kernel_size,
        smoothing.sigma,
    )?;
    Ok(eps)
}

/// Relative L² distance with trapezoid weights: `||a - b|| / ||b||`.
pub fn relative_error(eps_a: &PermittivityField, eps_b: &PermittivityField) -> f64 {
    assert_eq!(eps_a.domain, eps_b.domain, "fields must share a grid");
    let d = &eps_a.domain;
    let w_axis = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let mut num = 0.0;
    let mut den = 0.0;
    for iz in 0..d.nz {
        let wz = w_axis(iz, d.nz);
        for iy in 0..d.ny {
            let wy = w_axis(iy, d.ny);
            for ix in 0..d.nx {
                let w = w_axis(ix, d.nx) * wy * wz;
                let idx = d.index(ix, iy, iz);
                let diff = eps_a.data[idx] - eps_b.data[idx];
                num += w * diff * diff;
                den += w * eps_b.data[idx] * eps_b.data[idx];
            }
        }
    }
    (num / den).sqrt()
}

/// Pointwise average of the iterates that met the stopping window.
pub fn finalize(
    candidates: &[PermittivityField],
    target_region: TargetRegion,
    iterations: Vec<IterationRecord>,
    outer_count: usize,
) -> Result<ReconstructionResult> {
    let first = candidates
        .first()
        .ok_or_else(|| Error::InvalidState("no candidate iterates to average".into()))?;
    let mut eps_final = PermittivityField {
        domain: first.domain.clone(),
        data: vec![0.0; first.domain.len()],
    };
    for c in candidates {
        for (acc, v) in eps_final.data.iter_mut().zip(&c.data) {
            *acc += v;
        }
    }
    let scale = 1.0 / candidates.len() as f64;
    for v in &mut eps_final.data {
        *v *= scale;
    }
    let dielectric_constant = eps_final.max_value();
    let argmax_location = eps_final.argmax();
    Ok(ReconstructionResult {
        eps_final,
        dielectric_constant,
        argmax_location,
        target_region,
        iterations,
        outer_count,
    })
}

/// First index of a run of three consecutive values at or below `threshold`.
fn first_window(seq: &[f64], threshold: f64) -> Option<usize> {
    seq.windows(3)
        .position(|w| w.iter().all(|&e| e <= threshold))
}

/// Run the full recovery iteration.
///
/// `psi_data[j]` must hold the completed boundary data ψ̃(·, k_j) for every
/// partition point, `j = 0` being the highest wavenumber.
pub fn run_inversion(
    psi_data: &[BoundaryField],
    region: &TargetRegion,
    config: &PipelineConfig,
) -> Result<ReconstructionResult> {
    let partition = config.partition.build()?;
    let n_intervals = partition.n_intervals;
    if psi_data.len() != n_intervals + 1 {
        return Err(Error::invalid(format!(
            "need boundary data at {} partition points, got {}",
            n_intervals + 1,
            psi_data.len()
        )));
    }
    let domain = psi_data[0].domain.clone();
    if psi_data.iter().any(|b| b.domain != domain) {
        return Err(Error::invalid("boundary fields live on different grids"));
    }
    let k_hi = partition.k_hi;

    let mut state = InversionState {
        q_history: Vec::new(),
        tail: init_tail(&psi_data[0], k_hi, &config.elliptic_solver)?,
        eps_current: None,
        error_sequence: Vec::new(),
        n: 0,
        i: 0,
    };
    let mut chain: Vec<PermittivityField> = Vec::new();
    let mut outer_starts: Vec<usize> = Vec::new();
    let mut log: Vec<IterationRecord> = Vec::new();
    let mut window: Option<usize> = None; // absolute error index of the window start

    'outer: for n in 1..=n_intervals {
        outer_starts.push(chain.len());
        state.n = n;
        let mut inner_errors: Vec<f64> = Vec::new();
        let mut q_n: Option<ComplexVolumeField> = None;

        for i in 1..=config.inner_cap {
            state.i = i;
            let (conv, source) =
                assemble_coefficients(n, &partition, &state.q_history, &state.tail)?;
            let k_prev = partition.value(n - 1);
            let mut rhs = source;
            for v in &mut rhs.data {
                *v /= k_prev;
            }
            let problem = DirichletProblem {
                domain: domain.clone(),
                convection: Some(conv),
                rhs,
                boundary: psi_data[n].clone(),
            };
            let sol = solve_dirichlet(&problem, &config.elliptic_solver)?;

            let grad_v = update_v(&sol.field, &state.q_history, &state.tail, partition.h);
            let div_grad_v = divergence(&grad_v);
            let eps = compute_epsilon(
                &grad_v,
                &div_grad_v,
                k_hi,
                region,
                config.search_z,
                &config.smoothing,
            )?;

            let e_value = state
                .eps_current
                .as_ref()
                .map(|prev| relative_error(&eps, prev));
            if let Some(e) = e_value {
                state.error_sequence.push(e);
                if i >= 2 {
                    inner_errors.push(e);
                }
            }

            let (new_tail, ls_residual) =
                tail::update_tail_with_stats(&eps, k_hi, &config.ls_solver)?;
            state.tail = new_tail;

            log.push(IterationRecord {
                n,
                i,
                e_value,
                max_eps: eps.max_value(),
                bvp_residual: sol.residual,
                bvp_iterations: sol.iterations,
                ls_residual,
                peclet_warning: sol.peclet_warning,
            });
            state.eps_current = Some(eps.clone());
            chain.push(eps);
            q_n = Some(sol.field);

            if stopping_inner(&inner_errors, i, config.inner_cap, config.inner_tolerance) {
                break;
            }
        }
        state
            .q_history
            .push(q_n.expect("inner loop runs at least once"));

        if n >= 2 {
            let start = outer_starts[n - 2];
            let seq = &state.error_sequence[start..];
            if stopping_outer(seq, config.outer_window_threshold) {
                window = first_window(seq, config.outer_window_threshold).map(|w| start + w);
                break 'outer;
            }
        }
    }

    let outer_count = state.n;
    let candidates: Vec<PermittivityField> = match window {
        Some(w) if !config.average_both_outers => chain[w..(w + 4).min(chain.len())].to_vec(),
        Some(_) => {
            let start = outer_starts[outer_count - 2];
            chain[start..].to_vec()
        }
        None => {
            return Err(Error::InvalidState(format!(
                "no qualifying stopping window after {outer_count} outer iterations \
                 (smallest error {:.3e})",
                state
                    .error_sequence
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min)
            )));
        }
    };

    finalize(&candidates, region.clone(), log, outer_count)
}
