//! Restarted GMRES for non-Hermitian complex systems.
//!
//! Both the volume-integral scattering solve and the finite-difference
//! boundary value problems funnel through this module; they only differ in
//! how the operator applies.

use num_complex::Complex64;

use crate::config::KrylovConfig;
use crate::error::{Error, Result};

/// Matrix-free linear operator on complex vectors.
pub trait LinearOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

#[derive(Debug, Clone)]
pub struct KrylovOutcome {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// Final relative residual ||b - Ax|| / ||b||.
    pub residual: f64,
    pub converged: bool,
    /// Relative residual at the end of each restart cycle.
    pub residual_history: Vec<f64>,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Solve A x = b with restarted GMRES and an optional diagonal right
/// preconditioner (entries of `diag` approximate the matrix diagonal).
pub fn gmres(
    op: &dyn LinearOp,
    b: &[Complex64],
    diag: Option<&[Complex64]>,
    cfg: &KrylovConfig,
) -> KrylovOutcome {
    let n = op.dim();
    assert_eq!(b.len(), n, "rhs dimension mismatch");
    let m = cfg.restart.max(1).min(n);

    let apply_precond = |v: &[Complex64]| -> Vec<Complex64> {
        match diag {
            Some(d) => v
                .iter()
                .zip(d)
                .map(|(&vi, &di)| if di.norm_sqr() > 0.0 { vi / di } else { vi })
                .collect(),
            None => v.to_vec(),
        }
    };

    let b_norm = norm(b);
    if b_norm == 0.0 {
        return KrylovOutcome {
            x: vec![Complex64::new(0.0, 0.0); n],
            iterations: 0,
            residual: 0.0,
            converged: true,
            residual_history: vec![0.0],
        };
    }

    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut total_iter = 0usize;
    let mut history = Vec::new();
    let mut work = vec![Complex64::new(0.0, 0.0); n];

    loop {
        // r = b - A x
        op.apply(&x, &mut work);
        let mut r: Vec<Complex64> = b.iter().zip(&work).map(|(&bi, &wi)| bi - wi).collect();
        let r_norm = norm(&r);
        let rel = r_norm / b_norm;
        history.push(rel);
        if rel < cfg.tolerance || total_iter >= cfg.max_iterations {
            return KrylovOutcome {
                x,
                iterations: total_iter,
                residual: rel,
                converged: rel < cfg.tolerance,
                residual_history: history,
            };
        }

        // Arnoldi with modified Gram-Schmidt on the preconditioned operator.
        let inv = 1.0 / r_norm;
        for ri in r.iter_mut() {
            *ri *= inv;
        }
        let mut basis: Vec<Vec<Complex64>> = vec![r];
        let mut h = vec![vec![Complex64::new(0.0, 0.0); m + 1]; m];
        let mut g = vec![Complex64::new(0.0, 0.0); m + 1];
        g[0] = Complex64::new(r_norm, 0.0);
        let mut cs = vec![Complex64::new(0.0, 0.0); m];
        let mut sn = vec![Complex64::new(0.0, 0.0); m];

        let mut k = 0;
        while k < m && total_iter < cfg.max_iterations {
            total_iter += 1;

            let z = apply_precond(&basis[k]);
            let mut w = vec![Complex64::new(0.0, 0.0); n];
            op.apply(&z, &mut w);

            for j in 0..=k {
                let hjk = dot_conj(&basis[j], &w);
                h[k][j] = hjk;
                for i in 0..n {
                    w[i] -= hjk * basis[j][i];
                }
            }
            let w_norm = norm(&w);
            h[k][k + 1] = Complex64::new(w_norm, 0.0);

            let breakdown = w_norm < 1e-300;
            if !breakdown {
                let inv_w = 1.0 / w_norm;
                basis.push(w.iter().map(|&wi| wi * inv_w).collect());
            }

            for j in 0..k {
                let t = cs[j].conj() * h[k][j] + sn[j].conj() * h[k][j + 1];
                h[k][j + 1] = -sn[j] * h[k][j] + cs[j] * h[k][j + 1];
                h[k][j] = t;
            }
            let (c, s) = givens(h[k][k], h[k][k + 1]);
            cs[k] = c;
            sn[k] = s;
            h[k][k] = c.conj() * h[k][k] + s.conj() * h[k][k + 1];
            h[k][k + 1] = Complex64::new(0.0, 0.0);
            let t = c.conj() * g[k] + s.conj() * g[k + 1];
            g[k + 1] = -s * g[k] + c * g[k + 1];
            g[k] = t;

            k += 1;
            if breakdown || g[k].norm() / b_norm < cfg.tolerance {
                break;
            }
        }

        // Back-substitute H y = g and update x += M^{-1} (V y).
        let mut y = vec![Complex64::new(0.0, 0.0); k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in (i + 1)..k {
                s -= h[j][i] * y[j];
            }
            if h[i][i].norm() > 1e-300 {
                y[i] = s / h[i][i];
            }
        }
        let mut update = vec![Complex64::new(0.0, 0.0); n];
        for (i, yi) in y.iter().enumerate() {
            for j in 0..n {
                update[j] += basis[i][j] * yi;
            }
        }
        let update = apply_precond(&update);
        for j in 0..n {
            x[j] += update[j];
        }
    }
}

fn givens(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    if b.norm() == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / r, b / r)
}

/// Run GMRES and promote non-convergence to an error.
pub fn gmres_checked(
    op: &dyn LinearOp,
    b: &[Complex64],
    diag: Option<&[Complex64]>,
    cfg: &KrylovConfig,
) -> Result<KrylovOutcome> {
    let out = gmres(op, b, diag, cfg);
    if out.converged {
        Ok(out)
    } else {
        Err(Error::Convergence {
            residual: out.residual,
            iterations: out.iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense {
        n: usize,
        a: Vec<Vec<Complex64>>,
    }

    impl LinearOp for Dense {
        fn dim(&self) -> usize {
            self.n
        }
        fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
            for i in 0..self.n {
                y[i] = (0..self.n).map(|j| self.a[i][j] * x[j]).sum();
            }
        }
    }

    #[test]
    fn solves_small_nonhermitian_system() {
        let a = vec![
            vec![Complex64::new(4.0, 1.0), Complex64::new(1.0, -0.5), Complex64::new(0.0, 0.2)],
            vec![Complex64::new(0.3, 0.0), Complex64::new(3.0, -1.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(0.0, -0.2), Complex64::new(0.5, 0.5), Complex64::new(5.0, 2.0)],
        ];
        let op = Dense { n: 3, a };
        let x_true = vec![
            Complex64::new(1.0, -2.0),
            Complex64::new(0.5, 0.5),
            Complex64::new(-1.0, 0.25),
        ];
        let mut b = vec![Complex64::new(0.0, 0.0); 3];
        op.apply(&x_true, &mut b);
        let out = gmres(&op, &b, None, &KrylovConfig::default());
        assert!(out.converged);
        for (xi, ti) in out.x.iter().zip(&x_true) {
            assert!((xi - ti).norm() < 1e-7);
        }
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let op = Dense {
            n: 2,
            a: vec![
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        };
        let out = gmres(&op, &[Complex64::new(0.0, 0.0); 2], None, &KrylovConfig::default());
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn restart_still_converges() {
        // Diagonal system larger than the restart length.
        struct Diag(Vec<Complex64>);
        impl LinearOp for Diag {
            fn dim(&self) -> usize {
                self.0.len()
            }
            fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi = self.0[i] * x[i];
                }
            }
        }
        let d: Vec<Complex64> = (1..=40).map(|i| Complex64::new(i as f64, 0.3)).collect();
        let diag = d.clone();
        let op = Diag(d);
        let b = vec![Complex64::new(1.0, 1.0); 40];
        let cfg = KrylovConfig {
            tolerance: 1e-10,
            restart: 5,
            max_iterations: 500,
        };
        let out = gmres(&op, &b, Some(&diag), &cfg);
        assert!(out.converged, "residual {}", out.residual);
        assert!(out.residual < 1e-10);
    }

    #[test]
    fn reports_nonconvergence() {
        // Rotation operator with restart 1: the one-dimensional Krylov space
        // span{b} is orthogonal to the update direction, so every cycle
        // stalls at the initial residual.
        let a = vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)],
        ];
        let op = Dense { n: 2, a };
        let b = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let cfg = KrylovConfig {
            tolerance: 1e-12,
            restart: 1,
            max_iterations: 5,
        };
        match gmres_checked(&op, &b, None, &cfg) {
            Err(Error::Convergence { residual, .. }) => assert!(residual > 0.5),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }
}
