//! Experiment runner behind the `fss` binary: configuration files, figure
//! presets and CSV output with a reproducibility manifest.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;
pub mod verify;

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Result;
use fss::stats::derive_seed;

use config::Plan;
use output::{sha256_hex, write_atomic, ExperimentDir, Manifest, ManifestEntry};

/// Seed of experiment `i` in a family seeded by `seed`. Kept to 63 bits
/// because TOML integers are signed.
pub fn experiment_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, i as u64) >> 1
}

pub fn override_seeds(plan: &mut Plan, seed: u64) {
    for (i, e) in plan.experiment.iter_mut().enumerate() {
        e.sampler.seed = experiment_seed(seed, i);
    }
}

pub struct RunInfo<'a> {
    pub source: String,
    pub scale: f64,
    pub seed_override: Option<u64>,
    pub out_dir: &'a Path,
    pub quiet: bool,
}

/// Runs a validated plan. Writes `config.toml` first, each experiment into its
/// own directory, and `manifest.toml` last. Returns the number of failed
/// built-in checks.
pub fn run_plan(plan: &Plan, info: &RunInfo) -> Result<usize> {
    let mut effective = plan.clone();
    effective.output = None;
    let config_text = effective.to_toml();
    write_atomic(&info.out_dir.join("config.toml"), config_text.as_bytes())?;

    let mut entries = Vec::new();
    let mut failed = 0;
    for e in &plan.experiment {
        let dir = info.out_dir.join(e.label());
        if !info.quiet {
            eprintln!("[{}] {}", e.label(), e.mode);
        }
        let report = run::run_experiment(e, &dir, info.quiet)?;
        failed += report.failed_checks;
        entries.push(ManifestEntry {
            label: e.label().to_string(),
            mode: e.mode.to_string(),
            seed: e.sampler.seed,
            config_sha256: sha256_hex(e.to_toml().as_bytes()),
            files: report.files,
        });
    }

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        source: info.source.clone(),
        scale: info.scale,
        seed_override: info.seed_override,
        config: "config.toml".to_string(),
        experiment: entries,
    };
    let mut top = ExperimentDir::new(info.out_dir.to_path_buf());
    top.write("manifest.toml", &manifest.to_toml())?;
    Ok(failed)
}
