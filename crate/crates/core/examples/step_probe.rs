// Scratch: walk the first inner iterations manually and inspect magnitudes.
use epsrec_core::config::PipelineConfig;
use epsrec_core::elliptic::{solve_dirichlet, DirichletProblem};
use epsrec_core::field::BoundaryField;
use epsrec_core::inversion::{assemble_coefficients, compute_epsilon_unsmoothed, init_tail, update_tail, update_v};
use epsrec_core::pipeline::{preprocess, simulate_scene};
use epsrec_core::preprocess::complete_psi_boundary;
use epsrec_core::scene::Scene;
use epsrec_core::stencil::divergence;

fn main() {
    let mut cfg = PipelineConfig::default();
    cfg.domain.x_min = -1.0; cfg.domain.x_max = 1.0;
    cfg.domain.y_min = -1.0; cfg.domain.y_max = 1.0;
    cfg.domain.z_min = -0.75; cfg.domain.z_max = 1.25;
    cfg.domain.nx = 33; cfg.domain.ny = 33; cfg.domain.nz = 33;
    cfg.elliptic_solver.restart = 200;
    cfg.elliptic_solver.max_iterations = 6000;
    cfg.ls_solver.restart = 60;
    cfg.ls_solver.max_iterations = 2000;
    cfg.search_z = (-0.3, 1.0);

    let domain = cfg.domain.build().unwrap();
    let scene = Scene::ball([0.0, 0.0, 0.5], 0.3, 4.0);
    let raw = simulate_scene(&scene, &cfg, None).unwrap();
    let pre = preprocess(&raw, &cfg, Some((cfg.partition.k_lo, cfg.partition.k_hi)), None).unwrap();
    println!("region samples: {} bounds {:?}", pre.region.sample_count(), pre.region.bounds);
    println!("k* = {}", pre.psi.k_star);

    let partition = pre.partition.clone();
    let geometry = &pre.psi.dataset.geometry;
    let psi_b: Vec<BoundaryField> = partition.values.iter().map(|&k_n| {
        let row = pre.psi.dataset.nearest_row(k_n);
        complete_psi_boundary(&pre.psi.dataset.rows[row], geometry, k_n, pre.psi.k_star, &domain).unwrap()
    }).collect();

    // psi magnitude on Γ
    for (j, b) in psi_b.iter().enumerate().take(2) {
        println!("psi[{j}] max |value| on boundary = {:.4}", b.max_abs());
    }

    let mut tail = init_tail(&psi_b[0], partition.k_hi, &cfg.elliptic_solver).unwrap();
    println!("tail0 max|grad| = {:.4}, max|div| = {:.4}", tail.grad.max_norm(),
        tail.div_grad.data.iter().map(|v| v.norm()).fold(0.0, f64::max));

    let q_history = vec![];
    for i in 1..=3 {
        let (conv, source) = assemble_coefficients(1, &partition, &q_history, &tail).unwrap();
        let k_prev = partition.value(0);
        let mut rhs = source;
        for v in &mut rhs.data { *v /= k_prev; }
        let max_conv = conv.max_norm();
        let max_rhs = rhs.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let problem = DirichletProblem { domain: domain.clone(), convection: Some(conv), rhs, boundary: psi_b[1].clone() };
        let sol = solve_dirichlet(&problem, &cfg.elliptic_solver).unwrap();
        let max_q = sol.field.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let grad_v = update_v(&sol.field, &q_history, &tail, partition.h);
        let div_grad_v = divergence(&grad_v);
        let eps_raw = compute_epsilon_unsmoothed(&grad_v, &div_grad_v, partition.k_hi, &pre.region, cfg.search_z);
        println!("i={i}: |F|max={max_conv:.2} |rhs|max={max_rhs:.2} |q|max={max_q:.3} bvp_iters={} peclet={} eps_max={:.3} |gradv|max={:.2}",
            sol.iterations, sol.peclet_warning, eps_raw.max_value(), grad_v.max_norm());
        let t0 = std::time::Instant::now();
        match update_tail(&eps_raw, partition.k_hi, &cfg.ls_solver) {
            Ok(t) => {
                println!("   tail update ok in {:.1?}, max|grad| = {:.3}", t0.elapsed(), t.grad.max_norm());
                tail = t;
            }
            Err(e) => { println!("   tail update FAILED: {e} (eps_max = {:.3})", eps_raw.max_value()); break; }
        }
    }
}
