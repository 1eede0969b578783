//! Built-in oracle checks for the `validate` subcommand: quick, self-contained
//! verifications of the numerical kernels, one pass/fail line each.

use num_complex::Complex64;

use epsrec_core::config::KrylovConfig;
use epsrec_core::field::PermittivityField;
use epsrec_core::forward::{green_function, solve_total_field, LsOperatorContext};
use epsrec_core::grid::Domain;
use epsrec_core::io::{read_vtk_volume, write_vtk_volume};
use epsrec_core::partition::build_partition;
use epsrec_core::plane::{FieldKind, PlaneDataset, PlaneGeometry};
use epsrec_core::preprocess::{
    band_limited_projection, gaussian_kernel, propagate_round_trip, truncate_field,
};

fn check(name: &str, outcome: std::result::Result<(), String>) -> bool {
    match outcome {
        Ok(()) => {
            println!("PASS {name}");
            true
        }
        Err(msg) => {
            println!("FAIL {name}: {msg}");
            false
        }
    }
}

/// Runs every check; returns the number of failures.
pub fn run_all() -> usize {
    let checks: Vec<(&str, Box<dyn Fn() -> std::result::Result<(), String>>)> = vec![
        ("partition arithmetic", Box::new(partition_arithmetic)),
        ("kernel symmetry", Box::new(kernel_symmetry)),
        ("homogeneous forward solve", Box::new(homogeneous_forward)),
        ("weak-contrast forward solve", Box::new(weak_contrast_forward)),
        ("angular-spectrum round trip", Box::new(round_trip)),
        ("truncation idempotence", Box::new(truncation_idempotent)),
        ("smoothing kernel normalization", Box::new(kernel_normalized)),
        ("vtk round trip", Box::new(vtk_round_trip)),
    ];
    let mut failures = 0;
    for (name, f) in checks {
        if !check(name, f()) {
            failures += 1;
        }
    }
    failures
}

fn partition_arithmetic() -> Result<(), String> {
    let p = build_partition(6.25, 6.70, 9).map_err(|e| e.to_string())?;
    if (p.h - 0.05).abs() > 1e-12 || p.values.len() != 10 {
        return Err(format!("h = {}, len = {}", p.h, p.values.len()));
    }
    for w in p.values.windows(2) {
        if (w[0] - w[1] - p.h).abs() > 1e-12 {
            return Err("non-uniform step".into());
        }
    }
    Ok(())
}

fn kernel_symmetry() -> Result<(), String> {
    for (x, y) in [([0.3, -0.2, 1.0], [-1.0, 0.4, 0.2]), ([0.0; 3], [1.0, 1.0, 1.0])] {
        let a = green_function(x, y, 6.575).map_err(|e| e.to_string())?;
        let b = green_function(y, x, 6.575).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{a} != {b}"));
        }
    }
    Ok(())
}

fn homogeneous_forward() -> Result<(), String> {
    let d = Domain::new((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (9, 9, 9))
        .map_err(|e| e.to_string())?;
    let eps = PermittivityField::homogeneous(&d);
    let k = 6.5;
    let ctx = LsOperatorContext::new(&eps, k, &KrylovConfig::default()).map_err(|e| e.to_string())?;
    let u = solve_total_field(&eps, k, &ctx).map_err(|e| e.to_string())?;
    for (idx, v) in u.data.iter().enumerate() {
        let z = d.coords(idx)[2];
        if (v - Complex64::new(0.0, k * z).exp()).norm() > 1e-12 {
            return Err("field departs from the incident wave".into());
        }
    }
    Ok(())
}

fn weak_contrast_forward() -> Result<(), String> {
    // Scattered amplitude must halve when the contrast halves.
    let d = Domain::new((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (11, 11, 11))
        .map_err(|e| e.to_string())?;
    let k = 6.0;
    let solve_with = |delta: f64| -> Result<f64, String> {
        let eps = PermittivityField::from_fn(&d, |x, y, z| {
            if (x * x + y * y + z * z).sqrt() <= 0.35 {
                1.0 + delta
            } else {
                1.0
            }
        });
        let ctx = LsOperatorContext::new(&eps, k, &KrylovConfig::default())
            .map_err(|e| e.to_string())?;
        let u = solve_total_field(&eps, k, &ctx).map_err(|e| e.to_string())?;
        let mut acc = 0.0;
        for (idx, v) in u.data.iter().enumerate() {
            let z = d.coords(idx)[2];
            acc += (v - Complex64::new(0.0, k * z).exp()).norm_sqr();
        }
        Ok(acc.sqrt())
    };
    let s1 = solve_with(0.01)?;
    let s2 = solve_with(0.005)?;
    let ratio = s1 / s2;
    if (ratio - 2.0).abs() > 0.1 {
        return Err(format!("scaling ratio {ratio}"));
    }
    Ok(())
}

fn round_trip() -> Result<(), String> {
    let k = 6.575;
    let geom = PlaneGeometry::new((-5.0, 5.0), (-5.0, 5.0), 41, 41, -3.0)
        .map_err(|e| e.to_string())?;
    let field: Vec<Complex64> = (0..geom.len())
        .map(|i| {
            let (x, y) = geom.coords(i);
            Complex64::new((-x * x - y * y).exp(), (x * 0.7).sin() * 0.2)
        })
        .collect();
    let ds = PlaneDataset::from_wavenumbers(geom.clone(), FieldKind::Total, vec![k], vec![field.clone()])
        .map_err(|e| e.to_string())?;
    let rt = propagate_round_trip(&ds, k, -1.0).map_err(|e| e.to_string())?;
    let projected = band_limited_projection(&field, &geom, k);
    let num: f64 = rt
        .iter()
        .zip(&projected)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den: f64 = projected.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if num / den > 1e-8 {
        return Err(format!("round-trip error {}", num / den));
    }
    Ok(())
}

fn truncation_idempotent() -> Result<(), String> {
    let field: Vec<Complex64> = (0..64)
        .map(|i| Complex64::new((i as f64 * 0.41).sin(), (i as f64 * 0.13).cos()))
        .collect();
    let once = truncate_field(&field, 0.8).map_err(|e| e.to_string())?;
    let twice = truncate_field(&once, 0.8).map_err(|e| e.to_string())?;
    if once != twice {
        return Err("truncation changed on the second pass".into());
    }
    Ok(())
}

fn kernel_normalized() -> Result<(), String> {
    for (size, sigma) in [(3usize, 0.65), (5, 1.2)] {
        let w = gaussian_kernel(size, sigma).map_err(|e| e.to_string())?;
        if (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(format!("kernel sum {}", w.iter().sum::<f64>()));
        }
    }
    Ok(())
}

fn vtk_round_trip() -> Result<(), String> {
    let d = Domain::new((-1.0, 1.0), (-1.0, 1.0), (-0.75, 1.25), (6, 5, 4))
        .map_err(|e| e.to_string())?;
    let eps = PermittivityField::from_fn(&d, |x, y, z| 1.0 + (x * y * 7.7).abs() + z.abs());
    let dir = std::env::temp_dir().join(format!("epsrec-validate-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("eps.vtk");
    write_vtk_volume(&path, &eps).map_err(|e| e.to_string())?;
    let back = read_vtk_volume(&path).map_err(|e| e.to_string())?;
    std::fs::remove_dir_all(&dir).ok();
    if back.data != eps.data {
        return Err("re-imported field differs".into());
    }
    Ok(())
}
