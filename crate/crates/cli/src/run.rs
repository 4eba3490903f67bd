//! Runs validated experiments and writes their CSV tables.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use fss::model::default_cutoff;
use fss::oracles::{canonical_moments, canonical_peak, exact_s, micro_moments, CanonicalPeak, Oscillator, TrapOneBody};
use fss::sampler::{default_gamma, run_chains, SamplerParams};
use fss::stats::{
    curve_csv, derive_seed, micro_variance, moments, s_tilde_from_set, sample_grid, scan_csv, scan_peak_from_sets, PeakScan,
    ScanRow,
};
use fss::{Model, SampleSet, Spectrum, TrapSpec};

use crate::config::{ExperimentConfig, Mode};
use crate::output::ExperimentDir;
use crate::verify;

/// Seed index of the long run at the located peak, clear of grid indices.
const PEAK_RUN: u64 = 1 << 32;

pub struct Report {
    pub files: Vec<String>,
    /// Failed built-in checks; only `verify` reports any.
    pub failed_checks: usize,
}

/// Everything an experiment needs once its temperatures are known.
struct Setup {
    trap: TrapSpec,
    atoms: usize,
    coupling: f64,
    temps: Vec<f64>,
    ideal: Option<CanonicalPeak>,
}

/// Energy cutoff for exact one-body sums at temperature `t`: far enough that
/// the Boltzmann factor at the edge is below `e^{-48}`.
fn exact_cutoff(t: f64) -> u64 {
    4 * default_cutoff(t)
}

/// Canonical peak of the ideal gas in `trap`.
pub fn ideal_peak(trap: TrapSpec, atoms: usize) -> Result<CanonicalPeak> {
    if let Some(osc) = Oscillator::<f64>::for_trap(&trap) {
        return Ok(canonical_peak(&osc, atoms)?);
    }
    let mut cutoff = 4096;
    loop {
        let peak = canonical_peak(&Spectrum::for_trap(&trap, cutoff)?, atoms)?;
        if exact_cutoff(peak.t_max) <= cutoff {
            return Ok(peak);
        }
        cutoff = 2 * exact_cutoff(peak.t_max);
    }
}

impl Setup {
    fn new(e: &ExperimentConfig) -> Result<Self> {
        let trap = e.trap.context("trap is missing")?.spec();
        let atoms = e.atoms.context("atoms is missing")?;
        let mut ideal = None;
        let temps = match (&e.temperatures, &e.relative_temperatures) {
            (Some(t), _) => t.clone(),
            (None, Some(rel)) => {
                let peak = ideal_peak(trap, atoms)?;
                ideal = Some(peak);
                rel.iter().map(|r| r * peak.t_max).collect()
            }
            (None, None) => Vec::new(),
        };
        Ok(Setup { trap, atoms, coupling: e.coupling, temps, ideal })
    }

    fn ideal(&mut self) -> Result<CanonicalPeak> {
        if self.ideal.is_none() {
            self.ideal = Some(ideal_peak(self.trap, self.atoms)?);
        }
        Ok(self.ideal.expect("just set"))
    }

    fn hottest(&self) -> f64 {
        self.temps.iter().copied().fold(0.0, f64::max)
    }

    /// Model and base parameters for sampling up to temperature `t_hot`.
    fn sampler(&self, e: &ExperimentConfig, t_hot: f64) -> Result<(Model, SamplerParams)> {
        let s = &e.sampler;
        let model = Model::build(self.trap, s.cutoff.unwrap_or_else(|| default_cutoff(t_hot)), self.atoms, self.coupling)?;
        let mut p = SamplerParams::at_temperature(self.atoms, t_hot);
        p.gamma = s.gamma.unwrap_or_else(|| default_gamma(self.atoms, 1.0 / t_hot));
        if let Some(b) = s.burn_in_steps {
            p.burn_in_steps = b;
        }
        if let Some(t) = s.thinning {
            p.thinning = t;
        }
        p.samples_target = s.samples;
        p.chain_count = s.chains;
        p.seed = s.seed;
        p.validate()?;
        Ok((model, p))
    }

    fn exact_rows(&self, temps: &[f64]) -> Result<Vec<ScanRow>> {
        let t_hot = temps.iter().copied().fold(0.0, f64::max);
        let one = TrapOneBody::<f64>::for_trap(&self.trap, exact_cutoff(t_hot))?;
        temps
            .iter()
            .map(|&t| {
                let (mean, var) = canonical_moments(&one, self.atoms, 1.0 / t)?;
                Ok(ScanRow::exact(t, mean, var))
            })
            .collect()
    }
}

fn log(quiet: bool, label: &str, msg: impl AsRef<str>) {
    if !quiet {
        eprintln!("[{label}] {}", msg.as_ref());
    }
}

/// Runs one experiment, writing its tables into `dir`.
pub fn run_experiment(e: &ExperimentConfig, dir: &Path, quiet: bool) -> Result<Report> {
    let label = e.label();
    let mut out = ExperimentDir::new(dir.to_path_buf());
    if e.mode == Mode::Verify {
        let checks = verify::run_checks(|c| log(quiet, label, format!("{} {}: {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail)));
        let failed = checks.iter().filter(|c| !c.pass).count();
        log(quiet, label, format!("{} passed, {failed} failed", checks.len() - failed));
        out.write("verify.csv", &verify::csv(&checks))?;
        return Ok(Report { files: out.files(), failed_checks: failed });
    }

    let mut setup = Setup::new(e)?;
    let exact = e.wants_exact();
    match e.mode {
        Mode::Sample => {
            let sets = sample_temps(e, &setup, quiet)?;
            let mut rows = Vec::new();
            for (k, (t, set)) in sets.iter().enumerate() {
                if e.write_samples.unwrap_or(true) {
                    out.write(&format!("samples_{k:02}.csv"), &set.to_csv_string())?;
                }
                rows.push(ScanRow::sampled(*t, &moments(set)?));
            }
            if exact {
                rows.extend(setup.exact_rows(&setup.temps)?);
            }
            out.write("moments.csv", &scan_csv(&rows))?;
        }
        Mode::ExactCanonical => {
            out.write("canonical.csv", &scan_csv(&setup.exact_rows(&setup.temps)?))?;
        }
        Mode::ExactMicro => {
            let energies = e.energies.as_deref().unwrap_or_default();
            let e_max = energies.iter().copied().max().unwrap_or(0);
            let beta0 = if matches!(setup.trap, TrapSpec::Harmonic3d { .. }) { 1.0 / setup.ideal()?.t_max } else { 0.0 };
            log(quiet, label, format!("exact microcanonical moments up to E = {e_max}"));
            let mm = micro_moments(&setup.trap, setup.atoms, e_max, beta0)?;
            let mut s = String::from("E,mean_N0,var_N0\n");
            for &en in energies {
                writeln!(s, "{en},{},{}", mm.mean[en as usize], mm.var[en as usize])?;
            }
            out.write("micro.csv", &s)?;
        }
        Mode::Postselect => {
            let sets = sample_temps(e, &setup, quiet)?;
            let fit = e.postselect.fit();
            let (mut curves, mut table) = (Vec::new(), String::from(EXTRAPOLATION_HEADER));
            for (t, set) in &sets {
                let cano = moments(set)?;
                let micro = micro_variance(set, &fit).with_context(|| format!("post-selection at T = {t}"))?;
                let exact_micro = if exact { exact_micro_at(&setup, *t, micro.curve.e_mean, quiet, label) } else { None };
                writeln!(
                    table,
                    "{t},{},{},{},{},{},{},{}",
                    micro.curve.e_mean,
                    cano.var_n0,
                    cano.stderr_var,
                    micro.value,
                    micro.stderr,
                    micro.fit_stderr,
                    exact_micro.map(|v| v.to_string()).unwrap_or_default()
                )?;
                curves.push(micro.curve);
            }
            out.write("curves.csv", &curve_csv(&curves))?;
            out.write("extrapolation.csv", &table)?;
        }
        Mode::ScanPeak => {
            let sets = sample_temps(e, &setup, quiet)?;
            let scan = scan_peak_from_sets(&sets)?;
            write_scan(&mut out, &mut setup, &scan, exact)?;
        }
        Mode::SRatio => {
            let t_max = if setup.temps.is_empty() {
                let t = setup.ideal()?.t_max;
                log(quiet, label, format!("ideal-gas canonical peak at T = {t}"));
                t
            } else {
                let sets = sample_temps(e, &setup, quiet)?;
                let scan = scan_peak_from_sets(&sets)?;
                write_scan(&mut out, &mut setup, &scan, exact)?;
                log(quiet, label, format!("located peak at T = {} ± {}", scan.t_max, scan.t_max_stderr));
                scan.t_max
            };
            let (model, mut p) = setup.sampler(e, t_max)?;
            p.beta = 1.0 / t_max;
            p.seed = derive_seed(e.sampler.seed, PEAK_RUN);
            log(quiet, label, format!("sampling {} chains x {} at T = {t_max}", p.chain_count, p.samples_target));
            let set = run_chains(&model, &p)?;
            let st = s_tilde_from_set(&set, &e.postselect.fit())?;
            let mut s = String::from("N,T_max,var_cano,var_micro,S,S_tilde,S_tilde_stderr,source\n");
            writeln!(s, "{},{t_max},{},{},,{},{},fss", setup.atoms, st.var_cano, st.var_micro, st.value, st.stderr)?;
            if exact {
                if setup.trap.is_integer_grid() {
                    log(quiet, label, "exact S and S̃");
                    match exact_s(&setup.trap, setup.atoms) {
                        Ok(r) => writeln!(
                            s,
                            "{},{},{},{},{},{},0,exact",
                            r.atoms, r.t_max, r.var_cano_max, r.var_micro_at_e_star, r.s, r.s_tilde
                        )?,
                        Err(err) => log(quiet, label, format!("no exact row: {err}")),
                    }
                } else {
                    log(quiet, label, "no exact row: the trap has no integer energy grid");
                }
            }
            out.write("ratio.csv", &s)?;
        }
        Mode::Verify => unreachable!("handled above"),
    }
    Ok(Report { files: out.files(), failed_checks: 0 })
}

const EXTRAPOLATION_HEADER: &str = "T,E_mean,var_cano,stderr_cano,var_micro,stderr_micro,fit_stderr,var_micro_exact\n";

fn sample_temps(e: &ExperimentConfig, setup: &Setup, quiet: bool) -> Result<Vec<(f64, SampleSet)>> {
    if setup.temps.is_empty() {
        bail!("no temperatures to sample");
    }
    let (model, p) = setup.sampler(e, setup.hottest())?;
    log(
        quiet,
        e.label(),
        format!(
            "sampling {} temperatures, {} chains x {} records, {} modes, gamma = {}",
            setup.temps.len(),
            p.chain_count,
            p.samples_target,
            model.basis().len(),
            p.gamma
        ),
    );
    Ok(sample_grid(&model, &setup.temps, &p)?)
}

fn write_scan(out: &mut ExperimentDir, setup: &mut Setup, scan: &PeakScan, exact: bool) -> Result<()> {
    let mut rows: Vec<ScanRow> = scan.grid.iter().map(|(t, m)| ScanRow::sampled(*t, m)).collect();
    let mut peak = String::from("T_max,var_max,T_max_stderr,var_max_stderr,source\n");
    writeln!(peak, "{},{},{},{},fss", scan.t_max, scan.var_max, scan.t_max_stderr, scan.var_max_stderr)?;
    if exact {
        rows.extend(setup.exact_rows(&setup.temps)?);
        let ideal = setup.ideal()?;
        writeln!(peak, "{},{},0,0,exact", ideal.t_max, ideal.var_max)?;
    }
    out.write("moments.csv", &scan_csv(&rows))?;
    out.write("peak.csv", &peak)?;
    Ok(())
}

/// Exact microcanonical variance interpolated to `e_mean`, if it can be had.
fn exact_micro_at(setup: &Setup, t: f64, e_mean: f64, quiet: bool, label: &str) -> Option<f64> {
    if !setup.trap.is_integer_grid() {
        return None;
    }
    let lo = e_mean.floor().max(0.0) as u64;
    match micro_moments(&setup.trap, setup.atoms, lo + 1, 1.0 / t) {
        Ok(mm) => {
            let w = e_mean - lo as f64;
            let (a, b) = (mm.var[lo as usize], mm.var[lo as usize + 1]);
            Some((1.0 - w) * a + w * b).filter(|v| v.is_finite())
        }
        Err(err) => {
            log(quiet, label, format!("no exact microcanonical value at T = {t}: {err}"));
            None
        }
    }
}
