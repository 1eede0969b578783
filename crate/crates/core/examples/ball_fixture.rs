// Scratch experiment for the end-to-end ball fixture; removed before finishing.
use epsrec_core::config::PipelineConfig;
use epsrec_core::pipeline::full_run;
use epsrec_core::scene::Scene;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let noise: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let nz: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(33);

    let mut cfg = PipelineConfig::default();
    cfg.domain.x_min = -1.0;
    cfg.domain.x_max = 1.0;
    cfg.domain.y_min = -1.0;
    cfg.domain.y_max = 1.0;
    cfg.domain.z_min = -0.75;
    cfg.domain.z_max = 1.25;
    cfg.domain.nx = nz;
    cfg.domain.ny = nz;
    cfg.domain.nz = nz;
    cfg.search_z = (-0.3, 1.0);
    cfg.elliptic_solver.restart = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(200);
    cfg.elliptic_solver.max_iterations = 6000;
    cfg.ls_solver.restart = 60;
    cfg.ls_solver.max_iterations = 2000;

    let scene = Scene::ball([0.0, 0.0, 0.5], 0.3, 4.0);
    let t0 = std::time::Instant::now();
    match full_run(&scene, &cfg, noise, seed, None) {
        Ok((_raw, pre, result)) => {
            println!(
                "noise={noise} seed={seed} n={nz}: eps_max = {:.4}, argmax = ({:.3}, {:.3}, {:.3}), outers = {}, region = {} samples, k* = {:.3}, time = {:.1?}",
                result.dielectric_constant,
                result.argmax_location[0],
                result.argmax_location[1],
                result.argmax_location[2],
                result.outer_count,
                pre.region.sample_count(),
                pre.psi.k_star,
                t0.elapsed()
            );
            for rec in &result.iterations {
                println!(
                    "  n={} i={} e={:?} max_eps={:.4} bvp_res={:.1e} iters={} peclet={}",
                    rec.n, rec.i, rec.e_value.map(|e| format!("{e:.3e}")), rec.max_eps,
                    rec.bvp_residual, rec.bvp_iterations, rec.peclet_warning
                );
            }
        }
        Err(e) => println!("noise={noise} seed={seed}: ERROR {e}"),
    }
}
