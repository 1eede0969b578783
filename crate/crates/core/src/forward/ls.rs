//! Volume-integral total-field solve on the contrast support box.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::KrylovConfig;
use crate::error::{Error, Result};
use crate::fft::{next_fast_size, Fft3};
use crate::field::{ComplexVolumeField, PermittivityField};
use crate::forward::green::{dist, green_at_distance, self_cell_integral};
use crate::grid::Domain;
use crate::krylov::{gmres_checked, LinearOp};

/// Inclusive node-index bounds of the contrast support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportBox {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

impl SupportBox {
    pub fn dims(&self) -> [usize; 3] {
        [
            self.hi[0] - self.lo[0] + 1,
            self.hi[1] - self.lo[1] + 1,
            self.hi[2] - self.lo[2] + 1,
        ]
    }

    pub fn len(&self) -> usize {
        let [a, b, c] = self.dims();
        a * b * c
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, ix: usize, iy: usize, iz: usize) -> bool {
        ix >= self.lo[0]
            && ix <= self.hi[0]
            && iy >= self.lo[1]
            && iy <= self.hi[1]
            && iz >= self.lo[2]
            && iz <= self.hi[2]
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        let [dx, dy, _] = self.dims();
        (ix - self.lo[0]) + dx * ((iy - self.lo[1]) + dy * (iz - self.lo[2]))
    }
}

struct SupportData {
    support: SupportBox,
    /// Contrast m = eps - 1 at the box nodes.
    m: Vec<f64>,
    fft_dims: [usize; 3],
    /// Forward transform of the truncated kernel samples.
    kernel_spectrum: Vec<Complex64>,
    fft: Fft3,
    truncation_radius: f64,
}

/// Precomputed state for total-field solves at one wavenumber: the periodized
/// convolution kernel spectrum on a box at least twice the support diameter,
/// the contrast values, and the Krylov settings.
pub struct LsOperatorContext {
    pub domain: Domain,
    pub k: f64,
    pub solver: KrylovConfig,
    data: Option<SupportData>,
}

impl LsOperatorContext {
    pub fn new(eps: &PermittivityField, k: f64, solver: &KrylovConfig) -> Result<Self> {
        if k <= 0.0 || !k.is_finite() {
            return Err(Error::invalid("wavenumber must be positive"));
        }
        if eps.data.iter().any(|&v| !v.is_finite() || v < 1.0) {
            return Err(Error::invalid(
                "permittivity must be finite and at least 1 everywhere",
            ));
        }
        let domain = eps.domain.clone();
        let data = eps.contrast_support().map(|bounds| {
            let support = SupportBox {
                lo: [bounds[0].0, bounds[1].0, bounds[2].0],
                hi: [bounds[0].1, bounds[1].1, bounds[2].1],
            };
            build_support_data(eps, k, support)
        });
        Ok(LsOperatorContext {
            domain,
            k,
            solver: *solver,
            data,
        })
    }

    pub fn has_contrast(&self) -> bool {
        self.data.is_some()
    }

    pub fn support(&self) -> Option<SupportBox> {
        self.data.as_ref().map(|d| d.support)
    }

    pub fn truncation_radius(&self) -> Option<f64> {
        self.data.as_ref().map(|d| d.truncation_radius)
    }

    /// Forward transform of the periodized truncated kernel samples.
    pub fn kernel_spectrum(&self) -> Option<&[Complex64]> {
        self.data.as_ref().map(|d| d.kernel_spectrum.as_slice())
    }
}

fn build_support_data(eps: &PermittivityField, k: f64, support: SupportBox) -> SupportData {
    let d = &eps.domain;
    let spacing = d.spacing();
    let dims = support.dims();

    let extent: [f64; 3] = std::array::from_fn(|c| (dims[c] - 1) as f64 * spacing[c]);
    let diameter = (extent[0] * extent[0] + extent[1] * extent[1] + extent[2] * extent[2]).sqrt();
    let max_spacing = spacing.iter().cloned().fold(0.0, f64::max);
    // One extra cell keeps the periodic images strictly outside the
    // truncation radius.
    let radius = diameter + max_spacing;

    let fft_dims: [usize; 3] =
        std::array::from_fn(|c| next_fast_size((2.0 * radius / spacing[c]).ceil() as usize));

    let cell_volume = d.cell_volume();
    let mut kernel = vec![Complex64::new(0.0, 0.0); fft_dims[0] * fft_dims[1] * fft_dims[2]];
    for iz in 0..fft_dims[2] {
        let z = wrapped_coord(iz, fft_dims[2], spacing[2]);
        for iy in 0..fft_dims[1] {
            let y = wrapped_coord(iy, fft_dims[1], spacing[1]);
            for ix in 0..fft_dims[0] {
                let x = wrapped_coord(ix, fft_dims[0], spacing[0]);
                let r = (x * x + y * y + z * z).sqrt();
                let idx = ix + fft_dims[0] * (iy + fft_dims[1] * iz);
                kernel[idx] = if r == 0.0 {
                    self_cell_integral(k, cell_volume) / cell_volume
                } else if r <= radius {
                    green_at_distance(r, k)
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
        }
    }

    let fft = Fft3::new(fft_dims);
    fft.forward(&mut kernel);

    let mut m = Vec::with_capacity(support.len());
    for iz in support.lo[2]..=support.hi[2] {
        for iy in support.lo[1]..=support.hi[1] {
            for ix in support.lo[0]..=support.hi[0] {
                m.push(eps.at(ix, iy, iz) - 1.0);
            }
        }
    }

    SupportData {
        support,
        m,
        fft_dims,
        kernel_spectrum: kernel,
        fft,
        truncation_radius: radius,
    }
}

#[inline]
fn wrapped_coord(i: usize, n: usize, spacing: f64) -> f64 {
    if i <= n / 2 {
        i as f64 * spacing
    } else {
        (i as f64 - n as f64) * spacing
    }
}

struct LsOperator<'a> {
    data: &'a SupportData,
    k: f64,
    cell_volume: f64,
}

impl LsOperator<'_> {
    /// k^2 * (Φ_k ∗ (m u)) restricted to the support box.
    fn convolve_contrast(&self, u: &[Complex64]) -> Vec<Complex64> {
        let d = self.data;
        let [mx, my, _] = d.fft_dims;
        let [sx, sy, sz] = d.support.dims();
        let mut buf = vec![Complex64::new(0.0, 0.0); d.fft.len()];
        for iz in 0..sz {
            for iy in 0..sy {
                for ix in 0..sx {
                    let bi = ix + sx * (iy + sy * iz);
                    buf[ix + mx * (iy + my * iz)] = d.m[bi] * u[bi];
                }
            }
        }
        d.fft.forward(&mut buf);
        for (b, g) in buf.iter_mut().zip(&d.kernel_spectrum) {
            *b *= g;
        }
        d.fft.inverse(&mut buf);
        let scale = self.k * self.k * self.cell_volume / d.fft.len() as f64;
        let mut out = Vec::with_capacity(d.support.len());
        for iz in 0..sz {
            for iy in 0..sy {
                for ix in 0..sx {
                    out.push(buf[ix + mx * (iy + my * iz)] * scale);
                }
            }
        }
        out
    }
}

impl LinearOp for LsOperator<'_> {
    fn dim(&self) -> usize {
        self.data.support.len()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let conv = self.convolve_contrast(x);
        for i in 0..x.len() {
            y[i] = x[i] - conv[i];
        }
    }
}

/// Scattered-field quadrature at an arbitrary point from the box solution:
/// `k^2 Σ Φ_k(x, y_n) m_n u_n ΔV` (midpoint rule over the support cells).
pub(crate) fn scattered_at_point(
    point: [f64; 3],
    k: f64,
    domain: &Domain,
    support: &SupportBox,
    m: &[f64],
    u_box: &[Complex64],
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut bi = 0usize;
    for iz in support.lo[2]..=support.hi[2] {
        for iy in support.lo[1]..=support.hi[1] {
            for ix in support.lo[0]..=support.hi[0] {
                let mv = m[bi];
                if mv != 0.0 {
                    let y = [domain.x(ix), domain.y(iy), domain.z(iz)];
                    acc += green_at_distance(dist(point, y), k) * (mv * u_box[bi]);
                }
                bi += 1;
            }
        }
    }
    acc * (k * k * domain.cell_volume())
}

/// Solve the discretized total-field equation on the whole domain grid.
///
/// Inside the support box the solution comes from the FFT-accelerated Krylov
/// solve; outside it is evaluated by quadrature of the integral with the box
/// solution under the kernel. A homogeneous map short-circuits to the
/// incident wave.
pub fn solve_total_field(
    eps: &PermittivityField,
    k: f64,
    ctx: &LsOperatorContext,
) -> Result<ComplexVolumeField> {
    if eps.domain != ctx.domain {
        return Err(Error::invalid("context built for a different grid"));
    }
    if (k - ctx.k).abs() > 1e-12 * ctx.k.abs() {
        return Err(Error::invalid("context built for a different wavenumber"));
    }
    let d = &ctx.domain;
    let data = match &ctx.data {
        None => return Ok(ComplexVolumeField::incident_wave(d, k)),
        Some(data) => data,
    };

    let u_box = solve_on_support(data, d, k, &ctx.solver)?;

    let mut field = ComplexVolumeField::incident_wave(d, k);
    let support = data.support;
    // Box nodes take the solved values.
    for iz in support.lo[2]..=support.hi[2] {
        for iy in support.lo[1]..=support.hi[1] {
            for ix in support.lo[0]..=support.hi[0] {
                field.data[d.index(ix, iy, iz)] = u_box[support.index(ix, iy, iz)];
            }
        }
    }
    // Everything else is incident plus the scattered-field quadrature.
    let outside: Vec<usize> = (0..d.len())
        .filter(|&idx| {
            let (ix, iy, iz) = d.unindex(idx);
            !support.contains(ix, iy, iz)
        })
        .collect();
    let scattered: Vec<Complex64> = outside
        .par_iter()
        .map(|&idx| scattered_at_point(d.coords(idx), k, d, &support, &data.m, &u_box))
        .collect();
    for (&idx, &s) in outside.iter().zip(&scattered) {
        field.data[idx] += s;
    }
    Ok(field)
}

fn solve_on_support(
    data: &SupportData,
    d: &Domain,
    k: f64,
    solver: &KrylovConfig,
) -> Result<Vec<Complex64>> {
    let op = LsOperator {
        data,
        k,
        cell_volume: d.cell_volume(),
    };
    let support = data.support;
    let mut rhs = Vec::with_capacity(support.len());
    for iz in support.lo[2]..=support.hi[2] {
        let incident = Complex64::new(0.0, k * d.z(iz)).exp();
        for _iy in support.lo[1]..=support.hi[1] {
            for _ix in support.lo[0]..=support.hi[0] {
                rhs.push(incident);
            }
        }
    }
    Ok(gmres_checked(&op, &rhs, None, solver)?.x)
}

/// Solve only on the support box (used by measurement simulation, which never
/// needs the full volume).
pub(crate) fn solve_box(
    ctx: &LsOperatorContext,
) -> Result<Option<(SupportBox, Vec<f64>, Vec<Complex64>)>> {
    let data = match &ctx.data {
        None => return Ok(None),
        Some(data) => data,
    };
    let u_box = solve_on_support(data, &ctx.domain, ctx.k, &ctx.solver)?;
    Ok(Some((data.support, data.m.clone(), u_box)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PermittivityField;

    fn ball_eps(d: &Domain, center: [f64; 3], radius: f64, eps_val: f64) -> PermittivityField {
        PermittivityField::from_fn(d, |x, y, z| {
            let dr = ((x - center[0]).powi(2) + (y - center[1]).powi(2) + (z - center[2]).powi(2))
                .sqrt();
            if dr <= radius {
                eps_val
            } else {
                1.0
            }
        })
    }

    #[test]
    fn homogeneous_medium_gives_incident_wave() {
        let d = Domain::new((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (9, 9, 9)).unwrap();
        let eps = PermittivityField::homogeneous(&d);
        let ctx = LsOperatorContext::new(&eps, 6.5, &KrylovConfig::default()).unwrap();
        assert!(!ctx.has_contrast());
        let u = solve_total_field(&eps, 6.5, &ctx).unwrap();
        let inc = ComplexVolumeField::incident_wave(&d, 6.5);
        assert_eq!(u, inc);
    }

    #[test]
    fn kernel_spectrum_is_even_under_index_negation() {
        // Real-space kernel depends only on |x - y|, so the spectrum must be
        // symmetric under frequency negation.
        let d = Domain::new((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (11, 11, 11)).unwrap();
        let eps = ball_eps(&d, [0.0, 0.0, 0.0], 0.4, 1.5);
        let ctx = LsOperatorContext::new(&eps, 4.0, &KrylovConfig::default()).unwrap();
        let spec = ctx.kernel_spectrum().unwrap();
        let data = ctx.data.as_ref().unwrap();
        let [mx, my, mz] = data.fft_dims;
        for iz in 0..mz {
            for iy in 0..my {
                for ix in 0..mx {
                    let a = spec[ix + mx * (iy + my * iz)];
                    let jx = (mx - ix) % mx;
                    let jy = (my - iy) % my;
                    let jz = (mz - iz) % mz;
                    let b = spec[jx + mx * (jy + my * jz)];
                    assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()));
                }
            }
        }
    }

    #[test]
    fn operator_is_identity_where_contrast_vanishes() {
        // Two separated contrast nodes leave m == 0 in between; an input
        // supported only on the m == 0 nodes passes through unchanged.
        let d = Domain::new((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (9, 9, 9)).unwrap();
        let mut eps = PermittivityField::homogeneous(&d);
        eps.data[d.index(2, 4, 4)] = 1.3;
        eps.data[d.index(6, 4, 4)] = 1.3;
        let ctx = LsOperatorContext::new(&eps, 5.0, &KrylovConfig::default()).unwrap();
        let data = ctx.data.as_ref().unwrap();
        let op = LsOperator {
            data,
            k: 5.0,
            cell_volume: d.cell_volume(),
        };
        let n = data.support.len();
        assert!(n > 2);
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (bi, &mv) in data.m.iter().enumerate() {
            if mv == 0.0 {
                x[bi] = Complex64::new(0.7, -0.3);
            }
        }
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        op.apply(&x, &mut y);
        for (xi, yi) in x.iter().zip(&y) {
            assert!((xi - yi).norm() < 1e-14);
        }
    }

    #[test]
    fn refinement_differences_shrink_monotonically() {
        // Nested grids (n, 2n-1) share nodes, so solutions compare directly.
        let k = 3.0;
        let solve_on = |n: usize| {
            let d = Domain::new((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (n, n, n)).unwrap();
            let eps = PermittivityField::from_fn(&d, |x, y, z| {
                1.0 + 0.8 * (-4.0 * (x * x + y * y + z * z)).exp()
            });
            let ctx = LsOperatorContext::new(&eps, k, &KrylovConfig::default()).unwrap();
            (d, solve_total_field(&eps, k, &ctx).unwrap())
        };
        let (d1, u1) = solve_on(9);
        let (d2, u2) = solve_on(17);
        let (d3, u3) = solve_on(33);

        let rel_diff = |coarse_d: &Domain, coarse: &ComplexVolumeField, fine_d: &Domain, fine: &ComplexVolumeField| {
            let mut num = 0.0;
            let mut den = 0.0;
            for iz in 0..coarse_d.nz {
                for iy in 0..coarse_d.ny {
                    for ix in 0..coarse_d.nx {
                        let c = coarse.at(ix, iy, iz);
                        let f = fine.at(2 * ix, 2 * iy, 2 * iz);
                        num += (c - f).norm_sqr();
                        den += f.norm_sqr();
                    }
                }
            }
            let _ = fine_d;
            (num / den).sqrt()
        };
        let d12 = rel_diff(&d1, &u1, &d2, &u2);
        let d23 = rel_diff(&d2, &u2, &d3, &u3);
        assert!(d12 > d23, "differences {d12:.3e} -> {d23:.3e} must shrink");
    }

    #[test]
    fn rejects_permittivity_below_one() {
        let d = Domain::new((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (5, 5, 5)).unwrap();
        let mut eps = PermittivityField::homogeneous(&d);
        eps.data[10] = 0.5;
        assert!(LsOperatorContext::new(&eps, 2.0, &KrylovConfig::default()).is_err());
    }
}
