use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use fss_cli::config::{parse_config, ConfigError};
use fss_cli::presets::{self, PRESETS};
use fss_cli::{override_seeds, run_plan, RunInfo};

/// Fock state sampling experiments for trapped Bose gases.
///
/// Runs a configuration file or a named preset and writes CSV tables, the
/// effective configuration and a manifest into the output directory.
#[derive(Parser, Debug)]
#[command(name = "fss", version)]
struct Cli {
    /// Experiment file (TOML).
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Named preset; see --list-presets.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Output directory [default: the file's `output`, else ./fss-out]
    #[arg(long, value_name = "DIR", env = "FSS_OUT_DIR")]
    out: Option<PathBuf>,

    /// Replace every experiment's seed with one derived from this.
    #[arg(long, value_name = "U63", value_parser = clap::value_parser!(u64).range(0..=i64::MAX as u64))]
    seed: Option<u64>,

    /// Worker threads [default: all cores]
    #[arg(long, value_name = "K", env = "FSS_THREADS")]
    threads: Option<usize>,

    /// Divide atom numbers and sample budgets by this factor.
    #[arg(long, value_name = "FACTOR")]
    scale: Option<f64>,

    /// List presets and exit.
    #[arg(long)]
    list_presets: bool,

    /// Print the effective configuration and exit without running.
    #[arg(long)]
    print_config: bool,

    /// No progress output.
    #[arg(long, short)]
    quiet: bool,
}

/// Exit status for configuration problems, as for usage errors.
const CONFIG_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(code) => code,
        Err(err) => {
            if let Some(cfg) = err.downcast_ref::<ConfigError>() {
                eprint!("error: {cfg}");
                return ExitCode::from(CONFIG_ERROR);
            }
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main(cli: Cli) -> Result<ExitCode> {
    if cli.list_presets {
        for p in &PRESETS {
            let scale = if p.default_scale == 1.0 { String::new() } else { format!(" [default scale {}]", p.default_scale) };
            println!("{:<10} {}{scale}", p.name, p.about);
        }
        return Ok(ExitCode::SUCCESS);
    }

    let (mut plan, source, default_scale) = match (&cli.config, &cli.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            (parse_config(&text)?, format!("config {}", path.display()), 1.0)
        }
        (None, Some(name)) => {
            let Some(p) = presets::find(name) else {
                bail!("unknown preset \"{name}\"; available: {}", PRESETS.map(|p| p.name).join(", "));
            };
            (p.plan(), format!("preset {name}"), p.default_scale)
        }
        (None, None) => bail!("give --config PATH or --preset NAME (see --help)"),
    };

    let scale = cli.scale.unwrap_or(default_scale);
    if !(scale.is_finite() && scale > 0.0) {
        bail!("--scale must be positive, got {scale}");
    }
    plan = plan.scaled(scale);
    if let Some(seed) = cli.seed {
        override_seeds(&mut plan, seed);
    }
    plan.normalize();
    let problems = plan.validate();
    if !problems.is_empty() {
        return Err(ConfigError::Invalid(problems).into());
    }
    if cli.print_config {
        print!("{}", plan.to_toml());
        return Ok(ExitCode::SUCCESS);
    }

    if let Some(k) = cli.threads {
        if k == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().context("configuring the thread pool")?;
    }
    let out_dir = cli.out.clone().or_else(|| plan.output.clone()).unwrap_or_else(|| PathBuf::from("fss-out"));
    let info = RunInfo { source, scale, seed_override: cli.seed, out_dir: &out_dir, quiet: cli.quiet };
    let failed = run_plan(&plan, &info)?;
    if !cli.quiet {
        eprintln!("wrote {}", out_dir.display());
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
