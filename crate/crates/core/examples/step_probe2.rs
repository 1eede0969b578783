// Scratch: locate the runaway in the tail update.
use epsrec_core::config::{KrylovConfig, PipelineConfig};
use epsrec_core::elliptic::{solve_dirichlet, DirichletProblem};
use epsrec_core::field::BoundaryField;
use epsrec_core::forward::{solve_total_field, LsOperatorContext};
use epsrec_core::inversion::{assemble_coefficients, compute_epsilon_unsmoothed, init_tail, update_v};
use epsrec_core::inversion::TailState;
use epsrec_core::pipeline::{preprocess, simulate_scene};
use epsrec_core::preprocess::complete_psi_boundary;
use epsrec_core::scene::Scene;
use epsrec_core::stencil::{divergence, gradient};

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
    let partition = pre.partition.clone();
    let geometry = &pre.psi.dataset.geometry;
    let psi_b: Vec<BoundaryField> = partition.values.iter().map(|&k_n| {
        let row = pre.psi.dataset.nearest_row(k_n);
        complete_psi_boundary(&pre.psi.dataset.rows[row], geometry, k_n, pre.psi.k_star, &domain).unwrap()
    }).collect();

    let mut tail = init_tail(&psi_b[0], partition.k_hi, &cfg.elliptic_solver).unwrap();
    let q_history = vec![];
    for i in 1..=4 {
        let (conv, source) = assemble_coefficients(1, &partition, &q_history, &tail).unwrap();
        let mut rhs = source;
        for v in &mut rhs.data { *v /= partition.value(0); }
        let problem = DirichletProblem { domain: domain.clone(), convection: Some(conv), rhs, boundary: psi_b[1].clone() };
        let sol = solve_dirichlet(&problem, &cfg.elliptic_solver).unwrap();
        let grad_v = update_v(&sol.field, &q_history, &tail, partition.h);
        let div_grad_v = divergence(&grad_v);
        let eps = compute_epsilon_unsmoothed(&grad_v, &div_grad_v, partition.k_hi, &pre.region, cfg.search_z);
        let am = eps.argmax();
        println!("i={i}: eps_max={:.3} at ({:.2},{:.2},{:.2})", eps.max_value(), am[0], am[1], am[2]);

        // tail update with diagnostics
        let ctx = LsOperatorContext::new(&eps, partition.k_hi, &cfg.ls_solver).unwrap();
        let u = solve_total_field(&eps, partition.k_hi, &ctx).unwrap();
        let (mut umin, mut umin_idx) = (f64::INFINITY, 0usize);
        for (idx, v) in u.data.iter().enumerate() {
            if v.norm() < umin { umin = v.norm(); umin_idx = idx; }
        }
        let c = domain.coords(umin_idx);
        println!("   min|u| = {:.4} at ({:.2},{:.2},{:.2})", umin, c[0], c[1], c[2]);
        let mut grad = gradient(&u);
        for comp in 0..3 {
            for (g, uv) in grad.components[comp].iter_mut().zip(&u.data) { *g /= uv; }
        }
        let mut gm = 0.0; let mut gm_idx = 0usize;
        for idx in 0..domain.len() {
            let [a,b,cc] = grad.at(idx);
            let n = (a.norm_sqr()+b.norm_sqr()+cc.norm_sqr()).sqrt();
            if n > gm { gm = n; gm_idx = idx; }
        }
        let gc = domain.coords(gm_idx);
        println!("   max|grad u/u| = {:.2} at ({:.2},{:.2},{:.2})", gm, gc[0], gc[1], gc[2]);
        let div_grad = divergence(&grad);
        tail = TailState { grad, div_grad };
        let _ = KrylovConfig::default();
    }
}
