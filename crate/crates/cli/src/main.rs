//! Command-line pipeline: simulate backscatter measurements, preprocess raw
//! data, and reconstruct the dielectric constant map.

mod validate;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use epsrec_core::config::PipelineConfig;
use epsrec_core::inversion::ReconstructionResult;
use epsrec_core::io::{
    ingest_measurements, read_plane_csv, write_plane_csv, write_result_json, write_vtk_volume,
    ResultRecord,
};
use epsrec_core::pipeline::{self, PreprocessOutput};
use epsrec_core::preprocess::{compute_calibration, CalibrationRecord, PsiData, TargetRegion};
use epsrec_core::scene::Scene;

#[derive(Parser)]
#[command(
    name = "epsrec",
    about = "Reconstruction of 3D dielectric constants from multi-frequency backscatter data",
    version
)]
struct Cli {
    /// JSON configuration file (all fields optional; empty file = defaults).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for per-wavenumber parallelism (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct NoiseArgs {
    /// Multiplicative noise amplitude as a fraction (e.g. 0.05).
    #[arg(long, default_value_t = 0.0)]
    noise_pct: f64,

    /// Noise generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate scattered-field measurements of a scene on the backscatter plane.
    Simulate {
        /// Scene description JSON (list of balls/boxes with permittivities).
        #[arg(long)]
        scene: Option<PathBuf>,

        /// Sweep sample count across the band (default: the partition points).
        #[arg(long)]
        sweep: Option<usize>,

        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Propagate, band-select, truncate, smooth, calibrate and build ψ data.
    Preprocess {
        /// Raw measurement CSV (defaults to the configured path).
        #[arg(long)]
        input: Option<PathBuf>,

        /// Override the stable band as LO:HI (dimensionless wavenumbers).
        #[arg(long)]
        band: Option<String>,
    },
    /// Run the recovery iteration on preprocessed ψ data.
    Invert {
        /// Directory holding the preprocess outputs (defaults to --out).
        #[arg(long)]
        input_dir: Option<PathBuf>,
    },
    /// Simulate, preprocess and invert in one go.
    FullRun {
        #[arg(long)]
        scene: Option<PathBuf>,

        #[arg(long)]
        sweep: Option<usize>,

        #[arg(long)]
        band: Option<String>,

        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Run the built-in oracle checks and print one pass/fail line each.
    Validate,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(2);
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("thread pool setup")?;
    }
    let config = load_config(cli.config.as_deref())?;

    match cli.command {
        Command::Simulate { scene, sweep, noise } => {
            let raw = stage_simulate(&config, scene.as_deref(), sweep, &noise)
                .context("stage: simulate")?;
            write_plane_csv(&cli.out.join("raw.csv"), &raw)?;
            println!("simulate: wrote {}", cli.out.join("raw.csv").display());
            Ok(())
        }
        Command::Preprocess { input, band } => {
            let raw_path = input
                .or_else(|| config.paths.raw_data.clone())
                .context("no input CSV: pass --input or set paths.raw_data")?;
            let raw = ingest_measurements(&raw_path).context("stage: ingest")?;
            let pre = stage_preprocess(&config, &raw, band.as_deref(), &cli.out)
                .context("stage: preprocess")?;
            println!(
                "preprocess: band [{:.4}, {:.4}], k* = {:.4}, region {} samples",
                pre.band.0,
                pre.band.1,
                pre.psi.k_star,
                pre.region.sample_count()
            );
            Ok(())
        }
        Command::Invert { input_dir } => {
            let dir = input_dir.unwrap_or_else(|| cli.out.clone());
            let pre = read_preprocess_dir(&dir, &config).context("stage: read preprocess")?;
            let result = epsrec_core::pipeline::invert(&pre, &config).context("stage: invert")?;
            write_results(&cli.out, &result)?;
            println!(
                "invert: dielectric constant {:.4} at ({:.3}, {:.3}, {:.3}) after {} outer iterations",
                result.dielectric_constant,
                result.argmax_location[0],
                result.argmax_location[1],
                result.argmax_location[2],
                result.outer_count
            );
            Ok(())
        }
        Command::FullRun {
            scene,
            sweep,
            band,
            noise,
        } => {
            let raw = stage_simulate(&config, scene.as_deref(), sweep, &noise)
                .context("stage: simulate")?;
            write_plane_csv(&cli.out.join("raw.csv"), &raw)?;
            let pre = stage_preprocess(&config, &raw, band.as_deref(), &cli.out)
                .context("stage: preprocess")?;
            let result = epsrec_core::pipeline::invert(&pre, &config).context("stage: invert")?;
            write_results(&cli.out, &result)?;
            println!(
                "full-run: dielectric constant {:.4} at ({:.3}, {:.3}, {:.3}) after {} outer iterations",
                result.dielectric_constant,
                result.argmax_location[0],
                result.argmax_location[1],
                result.argmax_location[2],
                result.outer_count
            );
            Ok(())
        }
        Command::Validate => {
            let failures = validate::run_all();
            if failures > 0 {
                bail!("{failures} validation check(s) failed");
            }
            println!("validate: all checks passed");
            Ok(())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p).with_context(|| format!("config {}", p.display())),
        None => Ok(PipelineConfig::default()),
    }
}

fn parse_band(spec: &str) -> Result<(f64, f64)> {
    let (lo, hi) = spec
        .split_once(':')
        .context("band must be LO:HI, e.g. 6.25:6.70")?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

fn stage_simulate(
    config: &PipelineConfig,
    scene_path: Option<&Path>,
    sweep: Option<usize>,
    noise: &NoiseArgs,
) -> Result<epsrec_core::PlaneDataset> {
    let scene = match scene_path.or(config.paths.scene.as_deref()) {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("scene {}", p.display()))?;
            Scene::from_json(&text)?
        }
        None => Scene::default(),
    };
    let mut raw = pipeline::simulate_scene(&scene, config, sweep)?;
    pipeline::add_noise(&mut raw, noise.noise_pct, noise.seed);
    Ok(raw)
}

/// Sidecar manifest tying the preprocess outputs together.
#[derive(Debug, Serialize, Deserialize)]
struct PreprocessManifest {
    band: (f64, f64),
    n_intervals: usize,
    k_star: f64,
    calibration: CalibrationRecord,
    region_file: String,
    psi_file: String,
}

fn stage_preprocess(
    config: &PipelineConfig,
    raw: &epsrec_core::PlaneDataset,
    band: Option<&str>,
    out: &Path,
) -> Result<PreprocessOutput> {
    let band_override = band.map(parse_band).transpose()?;
    let calibration = match (&config.paths.calibration_sim, &config.paths.calibration_exp) {
        (Some(sim_path), Some(exp_path)) => {
            let sim = read_plane_csv(sim_path)?;
            let exp = read_plane_csv(exp_path)?;
            Some(compute_calibration(&sim, &exp, "calibration pair")?)
        }
        _ => None,
    };
    let pre = pipeline::preprocess(raw, config, band_override, calibration.as_ref())?;

    std::fs::create_dir_all(out)?;
    write_plane_csv(&out.join("propagated.csv"), &pre.propagated)?;
    write_plane_csv(&out.join("processed.csv"), &pre.processed)?;
    write_plane_csv(&out.join("psi.csv"), &pre.psi.dataset)?;
    write_json(&out.join("region.json"), &pre.region)?;
    let manifest = PreprocessManifest {
        band: pre.band,
        n_intervals: pre.partition.n_intervals,
        k_star: pre.psi.k_star,
        calibration: pre.calibration.clone(),
        region_file: "region.json".into(),
        psi_file: "psi.csv".into(),
    };
    write_json(&out.join("preprocess.json"), &manifest)?;
    Ok(pre)
}

fn read_preprocess_dir(dir: &Path, config: &PipelineConfig) -> Result<PreprocessOutput> {
    let manifest_path = dir.join("preprocess.json");
    let manifest: PreprocessManifest = read_json(&manifest_path)?;
    let psi_path = dir.join(&manifest.psi_file);
    if !psi_path.exists() {
        bail!("missing ψ data file {}", psi_path.display());
    }
    let psi_ds = read_plane_csv(&psi_path)?;
    let region: TargetRegion = read_json(&dir.join(&manifest.region_file))?;
    let partition = epsrec_core::partition::build_partition(
        manifest.band.0,
        manifest.band.1,
        manifest.n_intervals,
    )?;
    // The propagated/processed datasets are inspection artifacts; inversion
    // only needs ψ, the region and the partition.
    let placeholder = psi_ds.clone();
    let _ = config;
    Ok(PreprocessOutput {
        band: manifest.band,
        partition,
        propagated: placeholder.clone(),
        processed: placeholder.clone(),
        total_on_gamma: placeholder,
        region,
        calibration: manifest.calibration,
        psi: PsiData {
            dataset: psi_ds,
            k_star: manifest.k_star,
        },
    })
}

fn write_results(out: &Path, result: &ReconstructionResult) -> Result<()> {
    std::fs::create_dir_all(out)?;
    write_vtk_volume(&out.join("eps.vtk"), &result.eps_final)?;
    write_result_json(&out.join("result.json"), &ResultRecord::from(result))?;
    write_argmax_slice(&out.join("eps_slice.csv"), result)?;
    Ok(())
}

/// Plot-ready CSV slice of the volume at the argmax depth.
fn write_argmax_slice(path: &Path, result: &ReconstructionResult) -> Result<()> {
    use std::fmt::Write as _;
    let eps = &result.eps_final;
    let d = &eps.domain;
    let mut iz_best = 0;
    let mut best = f64::NEG_INFINITY;
    for iz in 0..d.nz {
        for iy in 0..d.ny {
            for ix in 0..d.nx {
                let v = eps.at(ix, iy, iz);
                if v > best {
                    best = v;
                    iz_best = iz;
                }
            }
        }
    }
    let mut text = String::from("x,y,eps_r\n");
    for iy in 0..d.ny {
        for ix in 0..d.nx {
            writeln!(text, "{},{},{}", d.x(ix), d.y(iy), eps.at(ix, iy, iz_best)).unwrap();
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}
